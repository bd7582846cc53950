#include "cseer/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cseer {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool has_labels(const LossMask& mask) {
    return std::any_of(mask.begin(), mask.end(),
                       [](MaskGroup g) { return g != MaskGroup::None; });
}

}  // namespace

Gradients zero_gradients_like(const Model& model) {
    Gradients g;
    auto zero_like = [](const Eigen::MatrixXd& w) {
        return Eigen::MatrixXd::Zero(w.rows(), w.cols()).eval();
    };
    auto zero_vec = [](const Eigen::VectorXd& v) { return Eigen::VectorXd::Zero(v.size()).eval(); };
    g.lstm.w_fg = zero_like(model.lstm.w_fg);
    g.lstm.w_fh = zero_like(model.lstm.w_fh);
    g.lstm.b_f = zero_vec(model.lstm.b_f);
    g.lstm.w_ig = zero_like(model.lstm.w_ig);
    g.lstm.w_ih = zero_like(model.lstm.w_ih);
    g.lstm.b_i = zero_vec(model.lstm.b_i);
    g.lstm.w_cg = zero_like(model.lstm.w_cg);
    g.lstm.w_ch = zero_like(model.lstm.w_ch);
    g.lstm.b_c = zero_vec(model.lstm.b_c);
    g.lstm.w_og = zero_like(model.lstm.w_og);
    g.lstm.w_oh = zero_like(model.lstm.w_oh);
    g.lstm.b_o = zero_vec(model.lstm.b_o);
    g.output.w_out = zero_like(model.output.w_out);
    g.output.b_out = zero_vec(model.output.b_out);
    if (model.output.has_side()) {
        g.output.w_side = zero_like(model.output.w_side);
        g.output.b_side = zero_vec(model.output.b_side);
    }
    return g;
}

std::vector<ParamBlockRef> param_blocks(Gradients& grads) {
    return param_blocks(grads.lstm, grads.output);
}

double masked_loss_step(const Eigen::VectorXd& prediction, const Eigen::VectorXd& label,
                        const LossMask& mask, const EncodingDims& dims) {
    if (prediction.size() != dims.grade_dim())
        throw std::runtime_error("prediction length does not match encoding dims");
    double loss = 0.0;
    for (const auto& term : label_terms(label, mask, dims)) {
        loss -= std::log(prediction[term.group_offset + term.hot]);
    }
    return loss;
}

double masked_loss(const std::vector<Eigen::VectorXd>& predictions,
                   const std::vector<Eigen::VectorXd>& labels,
                   const std::vector<LossMask>& masks, const EncodingDims& dims) {
    if (predictions.size() != labels.size() || labels.size() != masks.size())
        throw std::runtime_error("predictions, labels and masks must have equal step counts");
    double loss = 0.0;
    for (std::size_t t = 0; t < predictions.size(); ++t)
        loss += masked_loss_step(predictions[t], labels[t], masks[t], dims);
    return loss;
}

Eigen::VectorXd loss_logit_gradient(const Eigen::VectorXd& probs, const Eigen::VectorXd& label,
                                    const LossMask& mask, const EncodingDims& dims) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dims.grade_dim());
    for (const auto& term : label_terms(label, mask, dims)) {
        for (int j = 0; j < term.group_len; ++j)
            grad[term.group_offset + j] = probs[term.group_offset + j];
        grad[term.group_offset + term.hot] -= 1.0;
    }
    return grad;
}

namespace {

struct StepCache {
    Eigen::MatrixXd x;        // input_dim x B
    Eigen::MatrixXd side_in;  // n x B (side-branch models)
    Eigen::MatrixXd f, i, ctil, o, c, tanh_c, h;
    Eigen::MatrixXd z;     // output-layer input after dropout scaling
    Eigen::MatrixXd drop;  // inverted-dropout factors, empty when disabled
    Eigen::MatrixXd probs;
    std::vector<const EncodedStep*> steps;  // nullptr past a sequence's end
    std::vector<char> labeled;
};

BatchResult run_bptt(const Model& model, const std::vector<const EncodedSequence*>& batch,
                     double dropout_rate, std::mt19937_64* rng) {
    if (batch.empty()) throw std::runtime_error("batch must not be empty");

    const ModelDims& dims = model.dims;
    const EncodingDims enc = dims.encoding();
    const int B = static_cast<int>(batch.size());
    const int d = dims.d;
    const bool side = model.kind == ModelKind::CoEnrollmentMajors;
    const int zdim = dims.output_input_dim(model.kind);
    const bool use_dropout = rng != nullptr && dropout_rate > 0.0;
    const double keep = 1.0 - dropout_rate;

    int max_t = 0;
    for (const auto* seq : batch) max_t = std::max(max_t, static_cast<int>(seq->size()));
    if (max_t == 0) throw std::runtime_error("batch contains only empty sequences");

    BatchResult result;
    result.grads = zero_gradients_like(model);

    auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };

    std::vector<StepCache> cache(max_t);
    Eigen::MatrixXd zero_state = Eigen::MatrixXd::Zero(d, B);

    for (int t = 0; t < max_t; ++t) {
        StepCache& sc = cache[t];
        sc.x = Eigen::MatrixXd::Zero(dims.input_dim(model.kind), B);
        if (side) sc.side_in = Eigen::MatrixXd::Zero(dims.n, B);
        sc.steps.assign(B, nullptr);
        sc.labeled.assign(B, 0);
        for (int b = 0; b < B; ++b) {
            const EncodedSequence& seq = *batch[b];
            if (t >= static_cast<int>(seq.size())) continue;
            const EncodedStep& step = seq[t];
            ModelInput input = build_model_input(model.kind, step.grades_in, step.coenroll_next,
                                                 step.majors_in, enc);
            sc.x.col(b) = input.recurrent;
            if (side) sc.side_in.col(b) = *input.side;
            sc.steps[b] = &step;
            sc.labeled[b] = has_labels(step.label_mask) ? 1 : 0;
        }

        const Eigen::MatrixXd& h_prev = t > 0 ? cache[t - 1].h : zero_state;
        const Eigen::MatrixXd& c_prev = t > 0 ? cache[t - 1].c : zero_state;

        sc.f = ((model.lstm.w_fg * sc.x + model.lstm.w_fh * h_prev).colwise() + model.lstm.b_f)
                   .unaryExpr(sigmoid);
        sc.i = ((model.lstm.w_ig * sc.x + model.lstm.w_ih * h_prev).colwise() + model.lstm.b_i)
                   .unaryExpr(sigmoid);
        sc.ctil = ((model.lstm.w_cg * sc.x + model.lstm.w_ch * h_prev).colwise() + model.lstm.b_c)
                      .array()
                      .tanh();
        sc.o = ((model.lstm.w_og * sc.x + model.lstm.w_oh * h_prev).colwise() + model.lstm.b_o)
                   .unaryExpr(sigmoid);
        sc.c = (sc.f.array() * c_prev.array() + sc.i.array() * sc.ctil.array()).matrix();
        sc.tanh_c = sc.c.array().tanh().matrix();
        sc.h = (sc.o.array() * sc.tanh_c.array()).matrix();

        Eigen::MatrixXd z_raw;
        if (side) {
            z_raw.resize(zdim, B);
            z_raw.topRows(d) = sc.h;
            z_raw.bottomRows(dims.d_side) =
                (model.output.w_side * sc.side_in).colwise() + model.output.b_side;
        } else {
            z_raw = sc.h;
        }
        if (use_dropout) {
            sc.drop.resize(zdim, B);
            for (int b = 0; b < B; ++b)
                for (int r = 0; r < zdim; ++r)
                    sc.drop(r, b) = uniform01(*rng) < keep ? 1.0 / keep : 0.0;
            sc.z = (sc.drop.array() * z_raw.array()).matrix();
        } else {
            sc.z = std::move(z_raw);
        }

        Eigen::MatrixXd logits = (model.output.w_out * sc.z).colwise() + model.output.b_out;
        sc.probs = Eigen::MatrixXd::Zero(enc.grade_dim(), B);
        for (int b = 0; b < B; ++b) {
            if (!sc.labeled[b]) continue;
            sc.probs.col(b) = group_softmax_all(logits.col(b), enc);
            for (const auto& term :
                 label_terms(sc.steps[b]->label, sc.steps[b]->label_mask, enc)) {
                result.loss -= std::log(sc.probs(term.group_offset + term.hot, b));
                ++result.labeled_terms;
            }
        }
    }

    Gradients& g = result.grads;
    Eigen::MatrixXd dh_next = zero_state;
    Eigen::MatrixXd dc_next = zero_state;
    for (int t = max_t - 1; t >= 0; --t) {
        StepCache& sc = cache[t];

        Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(enc.grade_dim(), B);
        for (int b = 0; b < B; ++b) {
            if (!sc.labeled[b]) continue;
            for (const auto& term :
                 label_terms(sc.steps[b]->label, sc.steps[b]->label_mask, enc)) {
                for (int j = 0; j < term.group_len; ++j)
                    dlogits(term.group_offset + j, b) = sc.probs(term.group_offset + j, b);
                dlogits(term.group_offset + term.hot, b) -= 1.0;
            }
        }

        g.output.w_out.noalias() += dlogits * sc.z.transpose();
        g.output.b_out += dlogits.rowwise().sum();
        Eigen::MatrixXd dz = model.output.w_out.transpose() * dlogits;
        if (use_dropout) dz = (dz.array() * sc.drop.array()).matrix();

        Eigen::MatrixXd dh;
        if (side) {
            dh = dz.topRows(d) + dh_next;
            Eigen::MatrixXd dside = dz.bottomRows(dims.d_side);
            g.output.w_side.noalias() += dside * sc.side_in.transpose();
            g.output.b_side += dside.rowwise().sum();
        } else {
            dh = dz + dh_next;
        }

        const Eigen::MatrixXd& h_prev = t > 0 ? cache[t - 1].h : zero_state;
        const Eigen::MatrixXd& c_prev = t > 0 ? cache[t - 1].c : zero_state;

        Eigen::MatrixXd do_gate = (dh.array() * sc.tanh_c.array()).matrix();
        Eigen::MatrixXd dc =
            (dc_next.array() + dh.array() * sc.o.array() * (1.0 - sc.tanh_c.array().square()))
                .matrix();
        Eigen::MatrixXd df = (dc.array() * c_prev.array()).matrix();
        Eigen::MatrixXd di = (dc.array() * sc.ctil.array()).matrix();
        Eigen::MatrixXd dctil = (dc.array() * sc.i.array()).matrix();
        dc_next = (dc.array() * sc.f.array()).matrix();

        Eigen::MatrixXd daf = (df.array() * sc.f.array() * (1.0 - sc.f.array())).matrix();
        Eigen::MatrixXd dai = (di.array() * sc.i.array() * (1.0 - sc.i.array())).matrix();
        Eigen::MatrixXd dac = (dctil.array() * (1.0 - sc.ctil.array().square())).matrix();
        Eigen::MatrixXd dao = (do_gate.array() * sc.o.array() * (1.0 - sc.o.array())).matrix();

        g.lstm.w_fg.noalias() += daf * sc.x.transpose();
        g.lstm.w_fh.noalias() += daf * h_prev.transpose();
        g.lstm.b_f += daf.rowwise().sum();
        g.lstm.w_ig.noalias() += dai * sc.x.transpose();
        g.lstm.w_ih.noalias() += dai * h_prev.transpose();
        g.lstm.b_i += dai.rowwise().sum();
        g.lstm.w_cg.noalias() += dac * sc.x.transpose();
        g.lstm.w_ch.noalias() += dac * h_prev.transpose();
        g.lstm.b_c += dac.rowwise().sum();
        g.lstm.w_og.noalias() += dao * sc.x.transpose();
        g.lstm.w_oh.noalias() += dao * h_prev.transpose();
        g.lstm.b_o += dao.rowwise().sum();

        dh_next = model.lstm.w_fh.transpose() * daf + model.lstm.w_ih.transpose() * dai +
                  model.lstm.w_ch.transpose() * dac + model.lstm.w_oh.transpose() * dao;
    }

    if (!std::isfinite(result.loss)) throw std::runtime_error("non-finite loss");
    for (const auto& block : param_blocks(g)) {
        for (std::ptrdiff_t j = 0; j < block.size; ++j) {
            if (!std::isfinite(block.data[j]))
                throw std::runtime_error(std::string("non-finite gradient in block ") + block.name);
        }
    }
    return result;
}

std::vector<const EncodedSequence*> as_pointers(const std::vector<EncodedSequence>& batch) {
    std::vector<const EncodedSequence*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& seq : batch) ptrs.push_back(&seq);
    return ptrs;
}

// Extended-precision scalar restatement of the forward loss, independent of
// the batched Eigen path. Central differences divide a ~1e-5 perturbation
// into a loss of order one, so double-precision rounding alone would swamp
// the smallest gradients; long double keeps the quotient meaningful.
long double sequence_loss_ld(const Model& model, const EncodedSequence& seq) {
    const ModelDims& dims = model.dims;
    const EncodingDims enc = dims.encoding();
    const int d = dims.d;

    std::vector<long double> h(d, 0.0L), c(d, 0.0L);
    std::vector<long double> h_next(d), c_next(d);
    long double loss = 0.0L;

    for (const auto& step : seq) {
        ModelInput input = build_model_input(model.kind, step.grades_in, step.coenroll_next,
                                             step.majors_in, enc);
        const Eigen::VectorXd& x = input.recurrent;

        auto gate = [&](const Eigen::MatrixXd& wg, const Eigen::MatrixXd& wh,
                        const Eigen::VectorXd& b, int r) {
            long double acc = b[r];
            for (Eigen::Index j = 0; j < x.size(); ++j) acc += (long double)wg(r, j) * x[j];
            for (int j = 0; j < d; ++j) acc += (long double)wh(r, j) * h[j];
            return acc;
        };
        for (int r = 0; r < d; ++r) {
            long double f = 1.0L / (1.0L + std::exp(-gate(model.lstm.w_fg, model.lstm.w_fh,
                                                          model.lstm.b_f, r)));
            long double i = 1.0L / (1.0L + std::exp(-gate(model.lstm.w_ig, model.lstm.w_ih,
                                                          model.lstm.b_i, r)));
            long double cc = std::tanh(gate(model.lstm.w_cg, model.lstm.w_ch, model.lstm.b_c, r));
            long double o = 1.0L / (1.0L + std::exp(-gate(model.lstm.w_og, model.lstm.w_oh,
                                                          model.lstm.b_o, r)));
            c_next[r] = f * c[r] + i * cc;
            h_next[r] = o * std::tanh(c_next[r]);
        }
        h = h_next;
        c = c_next;

        std::vector<long double> z(h.begin(), h.end());
        if (model.output.has_side()) {
            for (int r = 0; r < dims.d_side; ++r) {
                long double acc = model.output.b_side[r];
                for (int j = 0; j < dims.n; ++j)
                    acc += (long double)model.output.w_side(r, j) * (*input.side)[j];
                z.push_back(acc);
            }
        }

        auto logit = [&](int r) {
            long double acc = model.output.b_out[r];
            for (std::size_t j = 0; j < z.size(); ++j)
                acc += (long double)model.output.w_out(r, j) * z[j];
            return acc;
        };
        for (const auto& term : label_terms(step.label, step.label_mask, enc)) {
            long double max = logit(term.group_offset);
            for (int j = 1; j < term.group_len; ++j)
                max = std::max(max, logit(term.group_offset + j));
            long double denom = 0.0L;
            for (int j = 0; j < term.group_len; ++j)
                denom += std::exp(logit(term.group_offset + j) - max);
            loss -= logit(term.group_offset + term.hot) - max - std::log(denom);
        }
    }
    return loss;
}

long double batch_loss_ld(const Model& model, const std::vector<const EncodedSequence*>& batch) {
    long double loss = 0.0L;
    for (const auto* seq : batch) loss += sequence_loss_ld(model, *seq);
    return loss;
}

}  // namespace

BatchResult backward_bptt(const Model& model, const std::vector<EncodedSequence>& batch,
                          const TrainConfig& config, std::mt19937_64& rng) {
    return run_bptt(model, as_pointers(batch), config.dropout_rate, &rng);
}

BatchResult backward_bptt(const Model& model, const std::vector<EncodedSequence>& batch) {
    return run_bptt(model, as_pointers(batch), 0.0, nullptr);
}

void sgd_step(Model& model, const Gradients& grads, double learning_rate, double weight_decay,
              double clip_norm) {
    auto grad_blocks = param_blocks(const_cast<Gradients&>(grads));  // read-only access
    auto model_blocks = param_blocks(model);
    if (grad_blocks.size() != model_blocks.size())
        throw std::runtime_error("gradient blocks do not match model blocks");

    double sq_norm = 0.0;
    for (const auto& block : grad_blocks)
        for (std::ptrdiff_t j = 0; j < block.size; ++j) sq_norm += block.data[j] * block.data[j];
    double norm = std::sqrt(sq_norm);
    double scale = (clip_norm > 0.0 && norm > clip_norm) ? clip_norm / norm : 1.0;

    for (std::size_t i = 0; i < model_blocks.size(); ++i) {
        if (model_blocks[i].size != grad_blocks[i].size)
            throw std::runtime_error("gradient blocks do not match model blocks");
        double* theta = model_blocks[i].data;
        const double* grad = grad_blocks[i].data;
        for (std::ptrdiff_t j = 0; j < model_blocks[i].size; ++j)
            theta[j] -= learning_rate * (scale * grad[j] + weight_decay * theta[j]);
    }
}

void sgd_step(Model& model, const Gradients& grads, const TrainConfig& config) {
    sgd_step(model, grads, config.learning_rate, config.weight_decay, config.clip_norm);
}

double finite_diff_check(const Model& model, const std::vector<EncodedSequence>& batch,
                         double epsilon, const Gradients* analytic_override) {
    auto ptrs = as_pointers(batch);
    BatchResult base = run_bptt(model, ptrs, 0.0, nullptr);
    const Gradients& analytic = analytic_override ? *analytic_override : base.grads;
    auto analytic_blocks = param_blocks(const_cast<Gradients&>(analytic));

    Model probe = model;
    auto probe_blocks = param_blocks(probe);

    double max_err = 0.0;
    for (std::size_t i = 0; i < probe_blocks.size(); ++i) {
        for (std::ptrdiff_t j = 0; j < probe_blocks[i].size; ++j) {
            double saved = probe_blocks[i].data[j];
            probe_blocks[i].data[j] = saved + epsilon;
            long double loss_plus = batch_loss_ld(probe, ptrs);
            probe_blocks[i].data[j] = saved - epsilon;
            long double loss_minus = batch_loss_ld(probe, ptrs);
            probe_blocks[i].data[j] = saved;

            double numeric =
                static_cast<double>((loss_plus - loss_minus) / (2.0L * epsilon));
            double analytic_value = analytic_blocks[i].data[j];
            double err = std::abs(analytic_value - numeric) /
                         std::max({std::abs(analytic_value), std::abs(numeric), 1e-8});
            max_err = std::max(max_err, err);
        }
    }
    return max_err;
}

namespace {

void fisher_yates(std::vector<int>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);
}

}  // namespace

TrainResult train(ModelKind kind, const Vocabulary& vocab, const DataSplit& splits,
                  const Threshold& threshold, const TrainConfig& config) {
    if (splits.train.empty()) throw std::runtime_error("empty training split");

    ModelDims dims;
    dims.n = vocab.n();
    dims.m = vocab.m();
    dims.k = vocab.k();
    dims.d = config.hidden_dim;
    dims.d_side = kind == ModelKind::CoEnrollmentMajors ? config.side_dim : 0;

    TrainResult result;
    result.model = init_model(kind, dims, threshold, config.seed);
    if (config.epochs <= 0) return result;

    auto train_seqs = encode_split(splits.train, vocab, threshold, LabelMode::AllSteps);
    auto val_seqs = encode_split(splits.val, vocab, threshold, LabelMode::FinalStepOnly);
    if (train_seqs.empty()) throw std::runtime_error("empty training split");
    auto val_ptrs = as_pointers(val_seqs);

    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<int> order(train_seqs.size());
    std::iota(order.begin(), order.end(), 0);

    Model& model = result.model;
    Model best = model;
    double best_accuracy = -1.0;
    double lr = config.learning_rate;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        fisher_yates(order, rng);

        double epoch_loss = 0.0;
        long epoch_terms = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            std::vector<const EncodedSequence*> batch;
            std::size_t end = std::min(order.size(), start + config.batch_size);
            batch.reserve(end - start);
            for (std::size_t b = start; b < end; ++b) batch.push_back(&train_seqs[order[b]]);

            // run_bptt via the public wrapper would copy; call directly on pointers
            BatchResult r = run_bptt(model, batch, config.dropout_rate, &rng);
            sgd_step(model, r.grads, lr, config.weight_decay, config.clip_norm);
            epoch_loss += r.loss;
            epoch_terms += r.labeled_terms;
        }

        EpochStats stats;
        stats.train_loss = epoch_terms > 0 ? epoch_loss / epoch_terms : 0.0;

        double val_loss = 0.0;
        long val_terms = 0, letter_total = 0, letter_hits = 0;
        for (const auto& seq : val_seqs) {
            auto probs = forward_sequence(model, seq);
            for (std::size_t t = 0; t < seq.size(); ++t) {
                const auto& step = seq[t];
                for (const auto& term :
                     label_terms(step.label, step.label_mask, model.dims.encoding())) {
                    val_loss -= std::log(probs[t][term.group_offset + term.hot]);
                    ++val_terms;
                    if (!term.is_letter) continue;
                    int argmax = 0;
                    for (int j = 1; j < term.group_len; ++j)
                        if (probs[t][term.group_offset + j] > probs[t][term.group_offset + argmax])
                            argmax = j;
                    ++letter_total;
                    if (argmax == term.hot) ++letter_hits;
                }
            }
        }
        stats.val_loss = val_terms > 0 ? val_loss / val_terms : 0.0;
        stats.val_letter_accuracy =
            letter_total > 0 ? 100.0 * letter_hits / letter_total : 0.0;
        result.history.push_back(stats);

        if (stats.val_letter_accuracy > best_accuracy) {
            best_accuracy = stats.val_letter_accuracy;
            best = model;
        }
        lr *= config.lr_decay;
    }

    if (!val_ptrs.empty()) model = best;
    return result;
}

}  // namespace cseer

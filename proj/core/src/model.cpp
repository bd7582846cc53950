#include "cseer/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace cseer {

int ModelDims::input_dim(ModelKind kind) const {
    switch (kind) {
        case ModelKind::GradesOnly: return grade_dim();
        case ModelKind::CoEnrollment: return grade_dim() + n;
        case ModelKind::CoEnrollmentMajors: return grade_dim() + k;
    }
    return 0;
}

int ModelDims::output_input_dim(ModelKind kind) const {
    return kind == ModelKind::CoEnrollmentMajors ? d + d_side : d;
}

HiddenState HiddenState::zero(int d) {
    return HiddenState{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
}

namespace {

// Uniform draw in [0, 1) from the top 53 bits; keeps initialization
// reproducible across standard library implementations.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void fill_uniform(Eigen::MatrixXd& w, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            w(r, c) = (2.0 * uniform01(rng) - 1.0) * bound;
}

}  // namespace

Model init_model(ModelKind kind, const ModelDims& dims, const Threshold& threshold,
                 std::uint64_t seed) {
    if (dims.n <= 0 || dims.m <= 0 || dims.k <= 0 || dims.d <= 0)
        throw std::runtime_error("model dims must be positive");
    if (kind == ModelKind::CoEnrollmentMajors && dims.d_side <= 0)
        throw std::runtime_error("side branch width must be positive");

    Model model;
    model.kind = kind;
    model.dims = dims;
    model.dims.d_side = kind == ModelKind::CoEnrollmentMajors ? dims.d_side : 0;
    model.threshold = threshold;

    const int in = dims.input_dim(kind);
    const int d = dims.d;
    std::mt19937_64 rng(seed);

    auto init_gate = [&](Eigen::MatrixXd& wg, Eigen::MatrixXd& wh, Eigen::VectorXd& b) {
        wg.resize(d, in);
        fill_uniform(wg, rng);
        wh.resize(d, d);
        fill_uniform(wh, rng);
        b = Eigen::VectorXd::Zero(d);
    };
    init_gate(model.lstm.w_fg, model.lstm.w_fh, model.lstm.b_f);
    init_gate(model.lstm.w_ig, model.lstm.w_ih, model.lstm.b_i);
    init_gate(model.lstm.w_cg, model.lstm.w_ch, model.lstm.b_c);
    init_gate(model.lstm.w_og, model.lstm.w_oh, model.lstm.b_o);

    model.output.w_out.resize(dims.grade_dim(), dims.output_input_dim(kind));
    fill_uniform(model.output.w_out, rng);
    model.output.b_out = Eigen::VectorXd::Zero(dims.grade_dim());
    if (kind == ModelKind::CoEnrollmentMajors) {
        model.output.w_side.resize(dims.d_side, dims.n);
        fill_uniform(model.output.w_side, rng);
        model.output.b_side = Eigen::VectorXd::Zero(dims.d_side);
    }
    return model;
}

HiddenState lstm_step(const LstmParams& params, const Eigen::VectorXd& x,
                      const HiddenState& prev) {
    if (x.size() != params.input_dim())
        throw std::runtime_error("lstm input length does not match gate weights");
    if (prev.h.size() != params.hidden_dim() || prev.c.size() != params.hidden_dim())
        throw std::runtime_error("hidden state length does not match gate weights");

    auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };

    Eigen::VectorXd f = (params.w_fg * x + params.w_fh * prev.h + params.b_f).unaryExpr(sigmoid);
    Eigen::VectorXd i = (params.w_ig * x + params.w_ih * prev.h + params.b_i).unaryExpr(sigmoid);
    Eigen::VectorXd c_cand = (params.w_cg * x + params.w_ch * prev.h + params.b_c).array().tanh();
    Eigen::VectorXd o = (params.w_og * x + params.w_oh * prev.h + params.b_o).unaryExpr(sigmoid);

    HiddenState next;
    next.c = f.array() * prev.c.array() + i.array() * c_cand.array();
    next.h = o.array() * next.c.array().tanh();
    return next;
}

Eigen::VectorXd output_logits(const Model& model, const Eigen::VectorXd& h,
                              const Eigen::VectorXd* coenroll_next) {
    if (model.kind != ModelKind::CoEnrollmentMajors)
        return model.output.w_out * h + model.output.b_out;

    if (coenroll_next == nullptr)
        throw std::runtime_error("side branch model requires a co-enrollment input");
    if (coenroll_next->size() != model.dims.n)
        throw std::runtime_error("co-enrollment input length does not match vocabulary");

    Eigen::VectorXd side = model.output.w_side * (*coenroll_next) + model.output.b_side;
    Eigen::VectorXd z(h.size() + side.size());
    z << h, side;
    return model.output.w_out * z + model.output.b_out;
}

namespace {

// In-place stable softmax of one contiguous group.
void softmax_segment(Eigen::VectorXd& values, int offset, int len) {
    double max = values.segment(offset, len).maxCoeff();
    double sum = 0.0;
    for (int j = 0; j < len; ++j) {
        double e = std::exp(values[offset + j] - max);
        values[offset + j] = e;
        sum += e;
    }
    values.segment(offset, len) /= sum;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::Vector2d> group_softmax(const Eigen::VectorXd& logits,
                                                          int course_index,
                                                          const EncodingDims& dims) {
    if (course_index < 0 || course_index >= dims.n)
        throw std::runtime_error("course index out of range");
    if (logits.size() != dims.grade_dim())
        throw std::runtime_error("logit vector length does not match encoding dims");

    int offset = grade_slot_offset(course_index, dims);
    Eigen::VectorXd slot = logits.segment(offset, dims.slot_width());
    softmax_segment(slot, 0, dims.m);
    softmax_segment(slot, dims.m, 2);
    return {slot.head(dims.m), Eigen::Vector2d(slot[dims.m], slot[dims.m + 1])};
}

Eigen::VectorXd group_softmax_all(const Eigen::VectorXd& logits, const EncodingDims& dims) {
    if (logits.size() != dims.grade_dim())
        throw std::runtime_error("logit vector length does not match encoding dims");
    Eigen::VectorXd probs = logits;
    for (int course = 0; course < dims.n; ++course) {
        int offset = grade_slot_offset(course, dims);
        softmax_segment(probs, offset, dims.m);
        softmax_segment(probs, offset + dims.m, 2);
    }
    return probs;
}

ModelInput step_input(const Model& model, const EncodedStep& step) {
    return build_model_input(model.kind, step.grades_in, step.coenroll_next, step.majors_in,
                             model.dims.encoding());
}

std::vector<Eigen::VectorXd> forward_sequence(const Model& model, const EncodedSequence& steps,
                                              std::vector<HiddenState>* states) {
    if (steps.empty()) throw std::runtime_error("cannot run the model on an empty sequence");

    std::vector<Eigen::VectorXd> outputs;
    outputs.reserve(steps.size());
    if (states) {
        states->clear();
        states->reserve(steps.size());
    }

    HiddenState state = HiddenState::zero(model.dims.d);
    for (const auto& step : steps) {
        ModelInput input = step_input(model, step);
        state = lstm_step(model.lstm, input.recurrent, state);
        const Eigen::VectorXd* side = input.side ? &*input.side : nullptr;
        outputs.push_back(group_softmax_all(output_logits(model, state.h, side),
                                            model.dims.encoding()));
        if (states) states->push_back(state);
    }
    return outputs;
}

std::vector<ParamBlockRef> param_blocks(LstmParams& lstm, OutputParams& output) {
    std::vector<ParamBlockRef> blocks = {
        {"w_fg", lstm.w_fg.data(), lstm.w_fg.size()}, {"w_fh", lstm.w_fh.data(), lstm.w_fh.size()},
        {"b_f", lstm.b_f.data(), lstm.b_f.size()},    {"w_ig", lstm.w_ig.data(), lstm.w_ig.size()},
        {"w_ih", lstm.w_ih.data(), lstm.w_ih.size()}, {"b_i", lstm.b_i.data(), lstm.b_i.size()},
        {"w_cg", lstm.w_cg.data(), lstm.w_cg.size()}, {"w_ch", lstm.w_ch.data(), lstm.w_ch.size()},
        {"b_c", lstm.b_c.data(), lstm.b_c.size()},    {"w_og", lstm.w_og.data(), lstm.w_og.size()},
        {"w_oh", lstm.w_oh.data(), lstm.w_oh.size()}, {"b_o", lstm.b_o.data(), lstm.b_o.size()},
        {"w_out", output.w_out.data(), output.w_out.size()},
        {"b_out", output.b_out.data(), output.b_out.size()},
    };
    if (output.has_side()) {
        blocks.push_back({"w_side", output.w_side.data(), output.w_side.size()});
        blocks.push_back({"b_side", output.b_side.data(), output.b_side.size()});
    }
    return blocks;
}

std::vector<ParamBlockRef> param_blocks(Model& model) {
    return param_blocks(model.lstm, model.output);
}

}  // namespace cseer

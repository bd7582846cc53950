#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cseer/model.hpp"

namespace cseer {

struct TrainConfig {
    double learning_rate = 0.1;
    double lr_decay = 0.95;  // per-epoch multiplicative decay
    double weight_decay = 1e-4;
    double clip_norm = 5.0;
    double dropout_rate = 0.5;  // on the output-layer input, train mode only
    int batch_size = 32;
    int epochs = 50;
    std::uint64_t seed = 1;
    int hidden_dim = 50;
    int side_dim = 50;
};

/// Gradient accumulator, shape-congruent with the model parameters.
struct Gradients {
    LstmParams lstm;
    OutputParams output;
};

Gradients zero_gradients_like(const Model& model);
std::vector<ParamBlockRef> param_blocks(Gradients& grads);

// Natural-log cross entropy restricted per course to the grade-type group
// selected by the mask; courses with MaskGroup::None contribute exactly 0.
// Predictions must already be group-softmaxed probabilities. Throws when a
// label is inconsistent with its mask selector.
double masked_loss_step(const Eigen::VectorXd& prediction, const Eigen::VectorXd& label,
                        const LossMask& mask, const EncodingDims& dims);
double masked_loss(const std::vector<Eigen::VectorXd>& predictions,
                   const std::vector<Eigen::VectorXd>& labels,
                   const std::vector<LossMask>& masks, const EncodingDims& dims);

// d(masked CE)/d(logits) given group-softmaxed probabilities: probs - label
// inside each selected group, exactly zero everywhere else.
Eigen::VectorXd loss_logit_gradient(const Eigen::VectorXd& probs, const Eigen::VectorXd& label,
                                    const LossMask& mask, const EncodingDims& dims);

struct BatchResult {
    double loss = 0.0;       // summed over the batch
    long labeled_terms = 0;  // labeled course-steps contributing to the loss
    Gradients grads;
};

// Reverse-mode gradients of the summed masked loss through every time step.
// The rng drives the inverted-dropout masks on the output-layer input; the
// overload without an rng runs with dropout disabled (inference weights).
BatchResult backward_bptt(const Model& model, const std::vector<EncodedSequence>& batch,
                          const TrainConfig& config, std::mt19937_64& rng);
BatchResult backward_bptt(const Model& model, const std::vector<EncodedSequence>& batch);

// Rescales the gradient so its global L2 norm is at most clip_norm, then
// applies theta <- theta - lr * (g + weight_decay * theta).
void sgd_step(Model& model, const Gradients& grads, double learning_rate, double weight_decay,
              double clip_norm);
void sgd_step(Model& model, const Gradients& grads, const TrainConfig& config);

// Max over parameters of |g_analytic - g_numeric| relative error, with the
// numeric side from central differences at the given epsilon (dropout off).
// analytic_override substitutes precomputed gradients when non-null.
double finite_diff_check(const Model& model, const std::vector<EncodedSequence>& batch,
                         double epsilon, const Gradients* analytic_override = nullptr);

struct EpochStats {
    double train_loss = 0.0;  // mean per labeled course-step
    double val_loss = 0.0;
    double val_letter_accuracy = 0.0;  // percent
};

struct TrainResult {
    Model model;
    std::vector<EpochStats> history;
};

// Minibatch SGD over the training split, shuffled per epoch with the seeded
// rng; sequences inside a batch are tail-padded with fully masked steps.
// Returns the checkpoint with the best validation letter accuracy.
TrainResult train(ModelKind kind, const Vocabulary& vocab, const DataSplit& splits,
                  const Threshold& threshold, const TrainConfig& config);

}  // namespace cseer

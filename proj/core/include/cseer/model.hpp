#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "cseer/encoding.hpp"

namespace cseer {

/// All model dimensions. d is the LSTM hidden width, d_side the width of
/// the linear co-enrollment branch (CoEnrollmentMajors only).
struct ModelDims {
    int n = 0;
    int m = 0;
    int k = 0;
    int d = 0;
    int d_side = 0;

    EncodingDims encoding() const { return EncodingDims{n, m, k}; }
    int grade_dim() const { return (m + 2) * n; }
    int input_dim(ModelKind kind) const;
    int output_input_dim(ModelKind kind) const;  // d, or d + d_side with a side branch
};

/// Gate weights of a single LSTM cell. Suffix g marks the input-to-gate
/// matrices (d x input_dim), suffix h the recurrent ones (d x d).
struct LstmParams {
    Eigen::MatrixXd w_fg, w_fh;
    Eigen::VectorXd b_f;
    Eigen::MatrixXd w_ig, w_ih;
    Eigen::VectorXd b_i;
    Eigen::MatrixXd w_cg, w_ch;
    Eigen::VectorXd b_c;
    Eigen::MatrixXd w_og, w_oh;
    Eigen::VectorXd b_o;

    int hidden_dim() const { return static_cast<int>(w_fh.rows()); }
    int input_dim() const { return static_cast<int>(w_fg.cols()); }
};

/// Output layer mapping the hidden state (optionally concatenated with the
/// side branch activation) to per-course grade logits.
struct OutputParams {
    Eigen::MatrixXd w_out;  // (m+2)n x output_input_dim
    Eigen::VectorXd b_out;
    Eigen::MatrixXd w_side;  // d_side x n, empty unless the model has a side branch
    Eigen::VectorXd b_side;

    bool has_side() const { return w_side.size() > 0; }
};

struct HiddenState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;

    static HiddenState zero(int d);
};

struct Model {
    ModelKind kind = ModelKind::CoEnrollment;
    ModelDims dims;
    Threshold threshold;
    LstmParams lstm;
    OutputParams output;
};

// Weights drawn uniformly from [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases
// zero; bit-reproducible for a fixed seed.
Model init_model(ModelKind kind, const ModelDims& dims, const Threshold& threshold,
                 std::uint64_t seed);

//   f = sigmoid(w_fg x + w_fh h_prev + b_f)
//   i = sigmoid(w_ig x + w_ih h_prev + b_i)
//   c~ = tanh  (w_cg x + w_ch h_prev + b_c)
//   c = f * c_prev + i * c~
//   o = sigmoid(w_og x + w_oh h_prev + b_o)
//   h = o * tanh(c)
HiddenState lstm_step(const LstmParams& params, const Eigen::VectorXd& x,
                      const HiddenState& prev);

// coenroll_next is required iff the model has a side branch; it feeds the
// linear branch whose activation is concatenated to h before w_out.
Eigen::VectorXd output_logits(const Model& model, const Eigen::VectorXd& h,
                              const Eigen::VectorXd* coenroll_next);

// Independent softmax over one course's letter entries and over its
// Pass/No-Pass pair; each group sums to 1.
std::pair<Eigen::VectorXd, Eigen::Vector2d> group_softmax(const Eigen::VectorXd& logits,
                                                          int course_index,
                                                          const EncodingDims& dims);

// Group softmax applied to every course slot of a logit vector.
Eigen::VectorXd group_softmax_all(const Eigen::VectorXd& logits, const EncodingDims& dims);

// Assembles the model input for one encoded step.
ModelInput step_input(const Model& model, const EncodedStep& step);

// Runs the recurrence from a zero state; output t holds the group-softmaxed
// probabilities for the following semester. Throws on an empty sequence.
// When states is non-null it receives the hidden state after every step.
std::vector<Eigen::VectorXd> forward_sequence(const Model& model, const EncodedSequence& steps,
                                              std::vector<HiddenState>* states = nullptr);

/// Named view over one parameter block's storage.
struct ParamBlockRef {
    const char* name;
    double* data;
    std::ptrdiff_t size;
};

// Blocks in declared order: the four LSTM gates (w_*g, w_*h, b_*), then
// w_out, b_out, then w_side, b_side when present.
std::vector<ParamBlockRef> param_blocks(LstmParams& lstm, OutputParams& output);
std::vector<ParamBlockRef> param_blocks(Model& model);

}  // namespace cseer

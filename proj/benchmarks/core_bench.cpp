#include <benchmark/benchmark.h>

#include <random>

#include "cseer/inference.hpp"
#include "cseer/synthetic.hpp"
#include "cseer/training.hpp"

using namespace cseer;

namespace {

// Desk-scale dims: 60-course catalog, binarized grades, hidden width 50.
const ModelDims kDims{60, 2, 3, 50, 50};

Model make_model(ModelKind kind) {
    ModelDims dims = kDims;
    if (kind != ModelKind::CoEnrollmentMajors) dims.d_side = 0;
    return init_model(kind, dims, Threshold::for_goal(Threshold::Goal::B), 1);
}

std::vector<EncodedSequence> make_batch(const ModelDims& dims, int batch, int steps,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<EncodedSequence> out;
    out.reserve(batch);
    for (int b = 0; b < batch; ++b) out.push_back(random_encoded_sequence(dims, steps, rng));
    return out;
}

void bm_lstm_step(benchmark::State& state) {
    Model model = make_model(ModelKind::CoEnrollment);
    std::mt19937_64 rng(2);
    auto seq = random_encoded_sequence(model.dims, 1, rng);
    ModelInput input = step_input(model, seq[0]);
    HiddenState prev = HiddenState::zero(model.dims.d);
    for (auto _ : state) {
        auto next = lstm_step(model.lstm, input.recurrent, prev);
        benchmark::DoNotOptimize(next.h.data());
    }
}
BENCHMARK(bm_lstm_step);

void bm_forward_sequence(benchmark::State& state) {
    Model model = make_model(ModelKind::CoEnrollment);
    std::mt19937_64 rng(3);
    auto seq = random_encoded_sequence(model.dims, static_cast<int>(state.range(0)), rng);
    for (auto _ : state) {
        auto probs = forward_sequence(model, seq);
        benchmark::DoNotOptimize(probs.data());
    }
}
BENCHMARK(bm_forward_sequence)->Arg(4)->Arg(8);

void bm_group_softmax_all(benchmark::State& state) {
    EncodingDims enc = kDims.encoding();
    Eigen::VectorXd logits = Eigen::VectorXd::Random(enc.grade_dim());
    for (auto _ : state) {
        auto probs = group_softmax_all(logits, enc);
        benchmark::DoNotOptimize(probs.data());
    }
}
BENCHMARK(bm_group_softmax_all);

void bm_backward_bptt(benchmark::State& state) {
    Model model = make_model(ModelKind::CoEnrollment);
    auto batch = make_batch(model.dims, 32, 7, 4);
    for (auto _ : state) {
        auto result = backward_bptt(model, batch);
        benchmark::DoNotOptimize(result.loss);
    }
}
BENCHMARK(bm_backward_bptt);

void bm_infer_prereqs(benchmark::State& state) {
    SynthConfig config = default_synth_config();
    Model model = make_model(ModelKind::CoEnrollment);
    auto synth = generate(config);
    auto vocab = build_vocabulary(synth.data, 20);
    CandidateFilterContext ctx;
    ctx.prereq_pairs = synth.planted_edges;
    int target = vocab.require_course_index(synth.planted_edges.front().target);
    for (auto _ : state) {
        auto recs = infer_prereqs(model, target, vocab, ctx, 10);
        benchmark::DoNotOptimize(recs.data());
    }
}
BENCHMARK(bm_infer_prereqs);

void bm_generate_dataset(benchmark::State& state) {
    SynthConfig config = default_synth_config();
    config.n_students = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto synth = generate(config);
        benchmark::DoNotOptimize(synth.data.students.data());
    }
}
BENCHMARK(bm_generate_dataset)->Arg(200)->Arg(2000);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}

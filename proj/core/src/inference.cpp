#include "cseer/inference.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cseer {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::vector<PrereqPair> parse_prereq_pairs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty input, expected a CSV header");
    auto header = split(line, ',');
    if (header.size() < 4 || trim(header[0]) != "prerequisite_dept" ||
        trim(header[1]) != "prerequisite_num" || trim(header[2]) != "target_dept" ||
        trim(header[3]) != "target_num") {
        throw std::runtime_error(
            "expected header prerequisite_dept,prerequisite_num,target_dept,target_num");
    }

    std::vector<PrereqPair> pairs;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() < 4)
            throw std::runtime_error("line " + std::to_string(line_no) + ": malformed pair row");
        try {
            pairs.push_back(PrereqPair{make_course(trim(cells[0]), std::stoi(trim(cells[1]))),
                                       make_course(trim(cells[2]), std::stoi(trim(cells[3])))});
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": bad course number");
        }
    }
    return pairs;
}

std::vector<PrereqPair> parse_prereq_pairs_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_prereq_pairs_csv(in);
}

void write_prereq_pairs_csv(const std::vector<PrereqPair>& pairs, std::ostream& out) {
    out << "prerequisite_dept,prerequisite_num,target_dept,target_num\n";
    for (const auto& pair : pairs) {
        out << pair.prerequisite.department << ',' << pair.prerequisite.number << ','
            << pair.target.department << ',' << pair.target.number << '\n';
    }
}

std::vector<int> filter_candidates(const Vocabulary& vocab, const CandidateFilterContext& ctx,
                                   FilterMode mode, const std::vector<char>* predicted_ok) {
    if (ctx.target < 0 || ctx.target >= vocab.n())
        throw std::runtime_error("filter target not in vocabulary");
    const Course& target = vocab.courses[ctx.target];

    // Departments hosting registrar prerequisites for the *other* courses
    // of the target's department, plus the department itself. The target's
    // own registrar pairs stay out so that recovering them is not circular.
    std::set<std::string> departments{target.department};
    for (const auto& pair : ctx.prereq_pairs) {
        if (pair.target.department == target.department && !(pair.target == target))
            departments.insert(pair.prerequisite.department);
    }

    std::vector<int> candidates;
    for (int i = 0; i < vocab.n(); ++i) {
        const Course& course = vocab.courses[i];
        if (!departments.contains(course.department)) continue;
        if (course.level() > target.level()) continue;
        if (mode == FilterMode::GoalRec) {
            if (i == ctx.target) continue;
            if (!ctx.availability.contains(i)) continue;
            if (ctx.taken.contains(i)) continue;
            if (predicted_ok && !(*predicted_ok)[i]) continue;
        }
        candidates.push_back(i);
    }
    return candidates;
}

double success_probability(const Model& model, const HiddenState& state_prev,
                           const Eigen::VectorXd& probe_grades, int target_index,
                           const Eigen::VectorXd& majors) {
    Eigen::VectorXd coenroll = Eigen::VectorXd::Zero(model.dims.n);
    coenroll[target_index] = 1.0;

    ModelInput input = build_model_input(model.kind, probe_grades, coenroll, majors,
                                         model.dims.encoding());
    HiddenState state = lstm_step(model.lstm, input.recurrent, state_prev);
    const Eigen::VectorXd* side = input.side ? &*input.side : nullptr;
    Eigen::VectorXd logits = output_logits(model, state.h, side);
    auto [letter, pnp] = group_softmax(logits, target_index, model.dims.encoding());
    return letter[outcome_position(GradeOutcome::AboveOrEqual, model.dims.m)];
}

std::vector<RankedRecommendation> rank_top_k(std::vector<RankedRecommendation> scored,
                                             int top_k) {
    std::sort(scored.begin(), scored.end(),
              [](const RankedRecommendation& a, const RankedRecommendation& b) {
                  if (a.probability != b.probability) return a.probability > b.probability;
                  return a.course_index < b.course_index;
              });
    if (static_cast<int>(scored.size()) > top_k) scored.resize(top_k);
    return scored;
}

namespace {

Eigen::VectorXd probe_vector(int candidate, const ModelDims& dims) {
    Eigen::VectorXd probe = Eigen::VectorXd::Zero(dims.grade_dim());
    EncodingDims enc = dims.encoding();
    probe[grade_slot_offset(candidate, enc) +
          outcome_position(GradeOutcome::AboveOrEqual, dims.m)] = 1.0;
    return probe;
}

}  // namespace

std::vector<RankedRecommendation> infer_prereqs(const Model& model, int target_index,
                                                const Vocabulary& vocab,
                                                const CandidateFilterContext& ctx, int top_k,
                                                const std::vector<int>* candidate_override) {
    CandidateFilterContext local = ctx;
    local.target = target_index;
    std::vector<int> candidates = candidate_override
                                      ? *candidate_override
                                      : filter_candidates(vocab, local, FilterMode::PrereqInference);

    HiddenState zero = HiddenState::zero(model.dims.d);
    Eigen::VectorXd no_majors = Eigen::VectorXd::Zero(model.dims.k);

    std::vector<RankedRecommendation> scored;
    scored.reserve(candidates.size());
    for (int candidate : candidates) {
        double p = success_probability(model, zero, probe_vector(candidate, model.dims),
                                       target_index, no_majors);
        scored.push_back(RankedRecommendation{vocab.courses[candidate], candidate, p});
    }
    return rank_top_k(std::move(scored), top_k);
}

std::vector<RankedRecommendation> recommend(const Model& model, const StudentSequence& student,
                                            int target_index, const Threshold& goal,
                                            const Vocabulary& vocab,
                                            const CandidateFilterContext& ctx, int top_k) {
    if (student.semesters.empty()) throw std::runtime_error("student has no enrollment history");
    if (goal.goal != model.threshold.goal)
        throw std::runtime_error(std::string("model was trained for threshold ") +
                                 model.threshold.name() + ", requested goal " + goal.name());
    for (const auto& sem : student.semesters) {
        for (const auto& e : sem.enrollments) {
            if (vocab.course_index(e.course) == target_index)
                throw std::runtime_error("student already took the target course");
        }
    }

    // Replay the history. The final step's co-enrollment input is zeroed:
    // the semester being recommended is exactly what is still unknown.
    std::vector<SemesterEncoding> encoded;
    encoded.reserve(student.semesters.size());
    for (const auto& sem : student.semesters)
        encoded.push_back(encode_semester(sem, vocab, model.threshold));

    HiddenState state = HiddenState::zero(model.dims.d);
    Eigen::VectorXd last_probs;
    for (std::size_t t = 0; t < encoded.size(); ++t) {
        Eigen::VectorXd coenroll_next = t + 1 < encoded.size()
                                            ? encoded[t + 1].coenrollment
                                            : Eigen::VectorXd::Zero(model.dims.n);
        ModelInput input = build_model_input(model.kind, encoded[t].grades, coenroll_next,
                                             encoded[t].majors, model.dims.encoding());
        state = lstm_step(model.lstm, input.recurrent, state);
        if (t + 1 == encoded.size()) {
            const Eigen::VectorXd* side = input.side ? &*input.side : nullptr;
            last_probs = group_softmax_all(output_logits(model, state.h, side),
                                           model.dims.encoding());
        }
    }

    // Predicted-grade filter: a candidate is in reach when the replayed
    // prediction for the upcoming semester puts its letter grade at or
    // above the threshold.
    std::vector<char> predicted_ok(vocab.n(), 0);
    EncodingDims enc = model.dims.encoding();
    int above = outcome_position(GradeOutcome::AboveOrEqual, model.dims.m);
    for (int course = 0; course < vocab.n(); ++course) {
        int offset = grade_slot_offset(course, enc);
        int argmax = 0;
        for (int j = 1; j < model.dims.m; ++j)
            if (last_probs[offset + j] > last_probs[offset + argmax]) argmax = j;
        predicted_ok[course] = argmax == above ? 1 : 0;
    }

    CandidateFilterContext local = ctx;
    local.target = target_index;
    std::vector<int> candidates =
        filter_candidates(vocab, local, FilterMode::GoalRec, &predicted_ok);

    const Eigen::VectorXd& majors = encoded.back().majors;
    std::vector<RankedRecommendation> scored;
    scored.reserve(candidates.size());
    for (int candidate : candidates) {
        double p = success_probability(model, state, probe_vector(candidate, model.dims),
                                       target_index, majors);
        scored.push_back(RankedRecommendation{vocab.courses[candidate], candidate, p});
    }
    return rank_top_k(std::move(scored), top_k);
}

}  // namespace cseer

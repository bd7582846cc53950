#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "cseer/model.hpp"

namespace cseer {

/// Registrar-style prerequisite relation between two catalog courses.
struct PrereqPair {
    Course prerequisite;
    Course target;

    friend bool operator==(const PrereqPair&, const PrereqPair&) = default;
};

// CSV columns: prerequisite_dept, prerequisite_num, target_dept, target_num.
std::vector<PrereqPair> parse_prereq_pairs_csv(std::istream& in);
std::vector<PrereqPair> parse_prereq_pairs_csv_file(const std::string& path);
void write_prereq_pairs_csv(const std::vector<PrereqPair>& pairs, std::ostream& out);

/// Everything the candidate filters need. availability/taken hold vocabulary
/// indices and only matter for goal-based recommendation.
struct CandidateFilterContext {
    std::vector<PrereqPair> prereq_pairs;
    std::set<int> availability;
    std::set<int> taken;
    int target = -1;
    Threshold threshold;
};

enum class FilterMode { PrereqInference, GoalRec };

// Always applied: keep courses from the target's department plus the
// departments hosting registrar prerequisites for that department's courses,
// and drop courses of a higher division level than the target. GoalRec
// additionally drops unavailable courses, courses already taken, the target
// itself, and candidates the model predicts below threshold (predicted_ok).
// Returns vocabulary indices in ascending order.
std::vector<int> filter_candidates(const Vocabulary& vocab, const CandidateFilterContext& ctx,
                                   FilterMode mode,
                                   const std::vector<char>* predicted_ok = nullptr);

// One probe step from state_prev: the grade input asserts the candidate
// outcome, the co-enrollment input marks the target course, and the result
// is the target's above-threshold probability from its letter group.
double success_probability(const Model& model, const HiddenState& state_prev,
                           const Eigen::VectorXd& probe_grades, int target_index,
                           const Eigen::VectorXd& majors);

struct RankedRecommendation {
    Course course;
    int course_index = -1;
    double probability = 0.0;
};

// Sorts by probability descending, ties by ascending course index, keeps
// the first `top_k`.
std::vector<RankedRecommendation> rank_top_k(std::vector<RankedRecommendation> scored, int top_k);

// Population-level prerequisite scoring from a zero state: every filtered
// candidate is probed at the above-threshold position with the target as
// the co-enrollment input. candidate_override bypasses the filters.
// An empty candidate set yields an empty result.
std::vector<RankedRecommendation> infer_prereqs(const Model& model, int target_index,
                                                const Vocabulary& vocab,
                                                const CandidateFilterContext& ctx, int top_k = 10,
                                                const std::vector<int>* candidate_override = nullptr);

// Personalized preparation-course recommendation. Replays the student's
// history (with the co-enrollment input of the final replayed step zeroed,
// since the recommendation semester's enrollments are unknown), derives the
// predicted-grade filter from that replay, then scores each surviving
// candidate from the replayed state. Throws when the student has no history
// or already took the target.
std::vector<RankedRecommendation> recommend(const Model& model, const StudentSequence& student,
                                            int target_index, const Threshold& goal,
                                            const Vocabulary& vocab,
                                            const CandidateFilterContext& ctx, int top_k = 10);

}  // namespace cseer

#pragma once

#include <optional>
#include <set>
#include <vector>

#include "cseer/inference.hpp"

namespace cseer {

/// Binary grade-prediction quality, all values in percent. The F-score is
/// for the letter task with "at or above threshold" as the positive class;
/// it is absent for constant-class baselines.
struct GradeMetrics {
    double letter_accuracy = 0.0;
    std::optional<double> letter_fscore;
    double pnp_accuracy = 0.0;
};

// Argmax within each labeled group, scored against the labels. Throws when
// the split carries no labeled entries at all.
GradeMetrics grade_prediction_metrics(const Model& model,
                                      const std::vector<EncodedSequence>& split, int threads = 1);
GradeMetrics grade_prediction_metrics(const Model& model,
                                      const std::vector<StudentSequence>& split,
                                      const Vocabulary& vocab, LabelMode mode, int threads = 1);

// Constant predictor of the split's majority class, per grade type.
GradeMetrics majority_baseline(const std::vector<EncodedSequence>& split);

struct PrereqMetrics {
    double pair_accuracy = 0.0;    // % of pairs whose prerequisite ranks in the top k
    double target_accuracy = 0.0;  // % of targets with at least one recovered prerequisite
};

// Runs infer_prereqs once per distinct target course of the pair list.
// Every pair's target must be in the vocabulary.
PrereqMetrics prereq_accuracy(const Model& model, const std::vector<PrereqPair>& pairs,
                              const Vocabulary& vocab, int top_k = 10, int threads = 1);

struct GoalMetrics {
    double pos_rate = 0.0;  // % of above-goal students with a top-k hit
    double neg_rate = 0.0;  // same for below-goal students
};

struct GoalCourseResult {
    Course course;
    long pos_hits = 0, pos_total = 0;
    long neg_hits = 0, neg_total = 0;

    bool empty() const { return pos_total + neg_total == 0; }
};

struct GoalEvalResult {
    std::vector<GoalCourseResult> per_course;
    GoalMetrics summary;
    long pos_hits = 0, pos_total = 0, neg_hits = 0, neg_total = 0;
};

// Back-tests the recommender: for every student who took a target course in
// target_semester, had at least two semesters before it, no enrollment in a
// summer between rec_semester and target_semester, and at least one semester
// before rec_semester, recommendations are generated as of rec_semester and
// matched against the student's actual rec_semester enrollments. Students
// split into the pos/neg populations by their binarized target grade;
// P/NP-graded target takers are not classifiable and are skipped.
GoalEvalResult goal_match_rates(const Model& model, const EnrollmentDataset& dataset,
                                const Vocabulary& vocab, const std::vector<PrereqPair>& pairs,
                                const std::vector<int>& target_courses,
                                const Semester& target_semester, const Semester& rec_semester,
                                const Threshold& goal, int top_k = 10, int threads = 1);

// Courses taken in the given semester by at least min_takers letter-graded
// students, ranked by ascending above-threshold rate (hardest first).
// min_level restricts the pool; preparation recommendations are about
// advanced courses, so callers typically exclude the lower division.
std::vector<int> select_difficult_courses(const EnrollmentDataset& dataset,
                                          const Vocabulary& vocab, const Semester& semester,
                                          const Threshold& threshold, int count, int min_takers,
                                          CourseLevel min_level = CourseLevel::Lower);

// A course counts as offered in a term if any historical semester with that
// term has at least one enrollment in it.
std::set<int> availability_for_term(const EnrollmentDataset& dataset, const Vocabulary& vocab,
                                    Term term);

}  // namespace cseer

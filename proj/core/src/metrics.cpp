#include "cseer/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cseer/parallel.hpp"

namespace cseer {

namespace {

struct GradeCounts {
    long letter_total = 0, letter_hits = 0;
    long tp = 0, fp = 0, fn = 0;
    long pnp_total = 0, pnp_hits = 0;

    GradeCounts& operator+=(const GradeCounts& other) {
        letter_total += other.letter_total;
        letter_hits += other.letter_hits;
        tp += other.tp;
        fp += other.fp;
        fn += other.fn;
        pnp_total += other.pnp_total;
        pnp_hits += other.pnp_hits;
        return *this;
    }
};

int group_argmax(const Eigen::VectorXd& probs, int offset, int len) {
    int argmax = 0;
    for (int j = 1; j < len; ++j)
        if (probs[offset + j] > probs[offset + argmax]) argmax = j;
    return argmax;
}

GradeMetrics metrics_from_counts(const GradeCounts& counts) {
    if (counts.letter_total + counts.pnp_total == 0)
        throw std::runtime_error("no labeled entries in split");
    GradeMetrics metrics;
    metrics.letter_accuracy =
        counts.letter_total > 0 ? 100.0 * counts.letter_hits / counts.letter_total : 0.0;
    metrics.pnp_accuracy = counts.pnp_total > 0 ? 100.0 * counts.pnp_hits / counts.pnp_total : 0.0;
    // F = 2TP / (2TP + FP + FN); TP = 0 gives a defined 0.
    double denom = 2.0 * counts.tp + counts.fp + counts.fn;
    metrics.letter_fscore = denom > 0.0 ? 100.0 * 2.0 * counts.tp / denom : 0.0;
    return metrics;
}

}  // namespace

GradeMetrics grade_prediction_metrics(const Model& model,
                                      const std::vector<EncodedSequence>& split, int threads) {
    const EncodingDims enc = model.dims.encoding();
    const int above = outcome_position(GradeOutcome::AboveOrEqual, model.dims.m);

    std::vector<GradeCounts> partial(split.size());
    parallel_for(static_cast<long>(split.size()), threads, [&](long s) {
        GradeCounts& counts = partial[s];
        auto probs = forward_sequence(model, split[s]);
        for (std::size_t t = 0; t < split[s].size(); ++t) {
            const auto& step = split[s][t];
            for (const auto& term : label_terms(step.label, step.label_mask, enc)) {
                int predicted = group_argmax(probs[t], term.group_offset, term.group_len);
                if (term.is_letter) {
                    ++counts.letter_total;
                    if (predicted == term.hot) ++counts.letter_hits;
                    bool actual_above = term.hot == above;
                    bool predicted_above = predicted == above;
                    if (actual_above && predicted_above) ++counts.tp;
                    if (!actual_above && predicted_above) ++counts.fp;
                    if (actual_above && !predicted_above) ++counts.fn;
                } else {
                    ++counts.pnp_total;
                    if (predicted == term.hot) ++counts.pnp_hits;
                }
            }
        }
    });

    GradeCounts total;
    for (const auto& counts : partial) total += counts;
    return metrics_from_counts(total);
}

GradeMetrics grade_prediction_metrics(const Model& model,
                                      const std::vector<StudentSequence>& split,
                                      const Vocabulary& vocab, LabelMode mode, int threads) {
    return grade_prediction_metrics(model, encode_split(split, vocab, model.threshold, mode),
                                    threads);
}

GradeMetrics majority_baseline(const std::vector<EncodedSequence>& split) {
    if (split.empty()) throw std::runtime_error("empty split");
    EncodingDims enc;
    long letter_counts[2] = {0, 0};  // above, below (binarized)
    long pnp_counts[2] = {0, 0};     // pass, no-pass
    for (const auto& seq : split) {
        for (const auto& step : seq) {
            enc.n = static_cast<int>(step.label_mask.size());
            enc.m = static_cast<int>(step.label.size()) / std::max(1, enc.n) - 2;
            for (const auto& term : label_terms(step.label, step.label_mask, enc)) {
                if (term.is_letter)
                    ++letter_counts[term.hot == 0 ? 0 : 1];
                else
                    ++pnp_counts[term.hot];
            }
        }
    }

    GradeMetrics metrics;
    long letter_total = letter_counts[0] + letter_counts[1];
    long pnp_total = pnp_counts[0] + pnp_counts[1];
    metrics.letter_accuracy =
        letter_total > 0 ? 100.0 * std::max(letter_counts[0], letter_counts[1]) / letter_total
                         : 0.0;
    metrics.pnp_accuracy =
        pnp_total > 0 ? 100.0 * std::max(pnp_counts[0], pnp_counts[1]) / pnp_total : 0.0;
    metrics.letter_fscore = std::nullopt;
    return metrics;
}

PrereqMetrics prereq_accuracy(const Model& model, const std::vector<PrereqPair>& pairs,
                              const Vocabulary& vocab, int top_k, int threads) {
    // Group by target; map keys keep the target iteration order deterministic.
    std::map<Course, std::vector<const PrereqPair*>> by_target;
    for (const auto& pair : pairs) {
        if (!vocab.course_index(pair.target))
            throw std::runtime_error("pair target '" + pair.target.id + "' not in vocabulary");
        by_target[pair.target].push_back(&pair);
    }

    std::vector<const Course*> targets;
    targets.reserve(by_target.size());
    for (const auto& [course, group] : by_target) targets.push_back(&course);

    CandidateFilterContext ctx;
    ctx.prereq_pairs = pairs;
    ctx.threshold = model.threshold;

    std::vector<long> pair_hits(targets.size(), 0);
    std::vector<char> target_hit(targets.size(), 0);
    parallel_for(static_cast<long>(targets.size()), threads, [&](long i) {
        int target_index = *vocab.course_index(*targets[i]);
        auto top = infer_prereqs(model, target_index, vocab, ctx, top_k);
        for (const PrereqPair* pair : by_target.at(*targets[i])) {
            bool hit = std::any_of(top.begin(), top.end(), [&](const RankedRecommendation& r) {
                return r.course == pair->prerequisite;
            });
            if (hit) {
                ++pair_hits[i];
                target_hit[i] = 1;
            }
        }
    });

    long recovered_pairs = 0, recovered_targets = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        recovered_pairs += pair_hits[i];
        recovered_targets += target_hit[i];
    }

    PrereqMetrics metrics;
    metrics.pair_accuracy = pairs.empty() ? 0.0 : 100.0 * recovered_pairs / pairs.size();
    metrics.target_accuracy =
        targets.empty() ? 0.0 : 100.0 * recovered_targets / static_cast<double>(targets.size());
    return metrics;
}

namespace {

struct GoalTask {
    int course_slot = 0;  // into per_course
    const StudentSequence* student = nullptr;
    StudentSequence history;     // semesters before rec_semester
    std::set<int> taken;         // vocabulary indices of the history courses
    std::set<int> actual;        // rec_semester enrollments (ground truth)
    bool positive = false;       // target grade at or above the goal
    int target_index = -1;
};

}  // namespace

GoalEvalResult goal_match_rates(const Model& model, const EnrollmentDataset& dataset,
                                const Vocabulary& vocab, const std::vector<PrereqPair>& pairs,
                                const std::vector<int>& target_courses,
                                const Semester& target_semester, const Semester& rec_semester,
                                const Threshold& goal, int top_k, int threads) {
    if (!(rec_semester < target_semester))
        throw std::runtime_error("recommendation semester must precede the target semester");

    GoalEvalResult result;
    result.per_course.reserve(target_courses.size());
    for (int course : target_courses)
        result.per_course.push_back(GoalCourseResult{vocab.courses.at(course)});

    std::set<int> availability = availability_for_term(dataset, vocab, rec_semester.term);

    std::vector<GoalTask> tasks;
    for (const auto& student : dataset.students) {
        // Cohort rule, evaluated once per (student, target) combination.
        long prior_semesters = 0;
        bool intervening_summer = false;
        const SemesterRecords* target_sem_records = nullptr;
        const SemesterRecords* rec_sem_records = nullptr;
        for (const auto& sem : student.semesters) {
            if (sem.semester < target_semester) ++prior_semesters;
            if (sem.semester.term == Term::Summer && rec_semester < sem.semester &&
                sem.semester < target_semester)
                intervening_summer = true;
            if (sem.semester == target_semester) target_sem_records = &sem;
            if (sem.semester == rec_semester) rec_sem_records = &sem;
        }
        if (!target_sem_records || prior_semesters < 2 || intervening_summer) continue;

        StudentSequence history;
        history.student_id = student.student_id;
        std::set<int> taken;
        for (const auto& sem : student.semesters) {
            if (!(sem.semester < rec_semester)) break;
            history.semesters.push_back(sem);
            for (const auto& e : sem.enrollments) {
                if (auto idx = vocab.course_index(e.course)) taken.insert(*idx);
            }
        }
        if (history.semesters.empty()) continue;

        std::set<int> actual;
        if (rec_sem_records) {
            for (const auto& e : rec_sem_records->enrollments)
                if (auto idx = vocab.course_index(e.course)) actual.insert(*idx);
        }

        for (std::size_t slot = 0; slot < target_courses.size(); ++slot) {
            int target_index = target_courses[slot];
            // recommend() refuses retakes, so such students are not in the cohort
            if (taken.contains(target_index)) continue;
            const Enrollment* enrollment = nullptr;
            for (const auto& e : target_sem_records->enrollments) {
                if (vocab.course_index(e.course) == target_index) enrollment = &e;
            }
            if (!enrollment) continue;
            if (enrollment->grade.kind != Grade::Kind::Letter) continue;

            GoalTask task;
            task.course_slot = static_cast<int>(slot);
            task.student = &student;
            task.history = history;
            task.taken = taken;
            task.actual = actual;
            task.positive =
                binarize_grade(enrollment->grade, goal) == GradeOutcome::AboveOrEqual;
            task.target_index = target_index;
            tasks.push_back(std::move(task));
        }
    }

    std::vector<char> hits(tasks.size(), 0);
    parallel_for(static_cast<long>(tasks.size()), threads, [&](long i) {
        const GoalTask& task = tasks[i];
        CandidateFilterContext ctx;
        ctx.prereq_pairs = pairs;
        ctx.availability = availability;
        ctx.taken = task.taken;
        ctx.threshold = goal;
        auto top = recommend(model, task.history, task.target_index, goal, vocab, ctx, top_k);
        hits[i] = std::any_of(top.begin(), top.end(), [&](const RankedRecommendation& r) {
            return task.actual.contains(r.course_index);
        });
    });

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        GoalCourseResult& course = result.per_course[tasks[i].course_slot];
        if (tasks[i].positive) {
            ++course.pos_total;
            if (hits[i]) ++course.pos_hits;
        } else {
            ++course.neg_total;
            if (hits[i]) ++course.neg_hits;
        }
    }
    for (const auto& course : result.per_course) {
        result.pos_hits += course.pos_hits;
        result.pos_total += course.pos_total;
        result.neg_hits += course.neg_hits;
        result.neg_total += course.neg_total;
    }
    result.summary.pos_rate =
        result.pos_total > 0 ? 100.0 * result.pos_hits / result.pos_total : 0.0;
    result.summary.neg_rate =
        result.neg_total > 0 ? 100.0 * result.neg_hits / result.neg_total : 0.0;
    return result;
}

std::vector<int> select_difficult_courses(const EnrollmentDataset& dataset,
                                          const Vocabulary& vocab, const Semester& semester,
                                          const Threshold& threshold, int count, int min_takers,
                                          CourseLevel min_level) {
    std::vector<long> total(vocab.n(), 0), above(vocab.n(), 0);
    for (const auto& student : dataset.students) {
        for (const auto& sem : student.semesters) {
            if (sem.semester != semester) continue;
            for (const auto& e : sem.enrollments) {
                if (e.grade.kind != Grade::Kind::Letter) continue;
                auto idx = vocab.course_index(e.course);
                if (!idx) continue;
                ++total[*idx];
                if (binarize_grade(e.grade, threshold) == GradeOutcome::AboveOrEqual)
                    ++above[*idx];
            }
        }
    }

    std::vector<std::pair<double, int>> ranked;
    for (int i = 0; i < vocab.n(); ++i) {
        if (vocab.courses[i].level() < min_level) continue;
        if (total[i] >= min_takers)
            ranked.emplace_back(static_cast<double>(above[i]) / total[i], i);
    }
    std::sort(ranked.begin(), ranked.end());
    std::vector<int> out;
    for (const auto& [rate, index] : ranked) {
        if (static_cast<int>(out.size()) >= count) break;
        out.push_back(index);
    }
    return out;
}

std::set<int> availability_for_term(const EnrollmentDataset& dataset, const Vocabulary& vocab,
                                    Term term) {
    std::set<int> available;
    for (const auto& student : dataset.students) {
        for (const auto& sem : student.semesters) {
            if (sem.semester.term != term) continue;
            for (const auto& e : sem.enrollments) {
                if (auto idx = vocab.course_index(e.course)) available.insert(*idx);
            }
        }
    }
    return available;
}

}  // namespace cseer

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cseer/domain.hpp"

namespace cseer {

/// Grade goal used both to binarize letter grades and as the success
/// criterion during recommendation (A -> 4.0, B -> 3.0 cut).
struct Threshold {
    enum class Goal { A, B };

    Goal goal = Goal::B;
    double cut_points = 3.0;

    static Threshold for_goal(Goal goal);
    static Threshold parse(const std::string& name);  // "A" or "B"
    const char* name() const;

    friend bool operator==(const Threshold&, const Threshold&) = default;
};

enum class GradeOutcome { AboveOrEqual, Below, Pass, NoPass };

// Letter grades compare grade points against the cut; Pass/No-Pass grades
// map through unchanged.
GradeOutcome binarize_grade(const Grade& grade, const Threshold& threshold);

/// Per-course loss selector: which grade-type group of the course's slot
/// carries the label, if any.
enum class MaskGroup : std::uint8_t { None = 0, Letter = 1, PassNoPass = 2 };
using LossMask = std::vector<MaskGroup>;

/// Encoding dimensions. Each course owns a slot of m letter entries
/// followed by the Pass and No-Pass entries, so grade vectors have
/// (m + 2) * n entries; co-enrollment vectors n; major vectors k.
struct EncodingDims {
    int n = 0;
    int m = 0;
    int k = 0;

    int slot_width() const { return m + 2; }
    int grade_dim() const { return slot_width() * n; }
};

int grade_slot_offset(int course_index, const EncodingDims& dims);
// Position inside a course slot: letter categories first, then Pass, No-Pass.
int outcome_position(GradeOutcome outcome, int m);

struct SemesterEncoding {
    Eigen::VectorXd grades;        // (m+2)*n, multi-hot of per-course one-hots
    Eigen::VectorXd coenrollment;  // n, 1 at every enrolled course
    Eigen::VectorXd majors;        // k, 1 at every declared major
    LossMask mask;                 // n
};

SemesterEncoding encode_semester(const SemesterRecords& records, const Vocabulary& vocab,
                                 const Threshold& threshold);

// Inverse of the grade layout: the (course, outcome) pairs present in a
// multi-hot grade vector.
std::vector<std::pair<int, GradeOutcome>> decode_grade_vector(const Eigen::VectorXd& grades,
                                                              const EncodingDims& dims);

/// One labeled course within a label vector: where the selected group sits
/// and which of its entries carries the received grade.
struct LabelTerm {
    int course = 0;
    int group_offset = 0;  // into the grade vector
    int group_len = 0;
    int hot = 0;  // label position inside the group
    bool is_letter = false;
};

// Validates every course slot of a label vector against its mask selector
// (None slots all-zero, labeled slots one-hot inside the selected group)
// and enumerates the labeled courses. Throws on any inconsistency.
std::vector<LabelTerm> label_terms(const Eigen::VectorXd& label, const LossMask& mask,
                                   const EncodingDims& dims);

enum class ModelKind : int { GradesOnly = 1, CoEnrollment = 2, CoEnrollmentMajors = 3 };

ModelKind model_kind_from_int(int value);
const char* model_kind_name(ModelKind kind);

struct ModelInput {
    Eigen::VectorXd recurrent;
    std::optional<Eigen::VectorXd> side;  // co-enrollment routed to the output layer
};

// GradesOnly:          recurrent = g
// CoEnrollment:        recurrent = [g; c_next]
// CoEnrollmentMajors:  recurrent = [g; majors], side = c_next
ModelInput build_model_input(ModelKind kind, const Eigen::VectorXd& grades,
                             const Eigen::VectorXd& coenroll_next, const Eigen::VectorXd& majors,
                             const EncodingDims& dims);

/// One model transition: semester t's grades (plus the following semester's
/// co-enrollment and t's majors) predicting semester t+1, whose encoded
/// grades form the label under `label_mask`.
struct EncodedStep {
    Eigen::VectorXd grades_in;
    Eigen::VectorXd coenroll_next;
    Eigen::VectorXd majors_in;
    Eigen::VectorXd label;
    LossMask label_mask;
};

using EncodedSequence = std::vector<EncodedStep>;

enum class LabelMode {
    AllSteps,       // every transition is a label (training)
    FinalStepOnly,  // only the last transition is labeled (val/test)
};

// Empty result for students with fewer than two semesters.
EncodedSequence encode_sequence(const StudentSequence& student, const Vocabulary& vocab,
                                const Threshold& threshold, LabelMode mode);

std::vector<EncodedSequence> encode_split(const std::vector<StudentSequence>& students,
                                          const Vocabulary& vocab, const Threshold& threshold,
                                          LabelMode mode);

}  // namespace cseer

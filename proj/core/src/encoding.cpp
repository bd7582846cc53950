#include "cseer/encoding.hpp"

#include <stdexcept>

namespace cseer {

Threshold Threshold::for_goal(Goal goal) {
    Threshold t;
    t.goal = goal;
    t.cut_points = goal == Goal::A ? 4.0 : 3.0;
    return t;
}

Threshold Threshold::parse(const std::string& name) {
    if (name == "A") return for_goal(Goal::A);
    if (name == "B") return for_goal(Goal::B);
    throw std::runtime_error("unknown threshold '" + name + "', expected A or B");
}

const char* Threshold::name() const {
    return goal == Goal::A ? "A" : "B";
}

GradeOutcome binarize_grade(const Grade& grade, const Threshold& threshold) {
    if (grade.kind == Grade::Kind::PassNoPass)
        return grade.passed ? GradeOutcome::Pass : GradeOutcome::NoPass;
    return grade.letter_points >= threshold.cut_points ? GradeOutcome::AboveOrEqual
                                                       : GradeOutcome::Below;
}

int grade_slot_offset(int course_index, const EncodingDims& dims) {
    return course_index * dims.slot_width();
}

int outcome_position(GradeOutcome outcome, int m) {
    switch (outcome) {
        case GradeOutcome::AboveOrEqual: return 0;
        case GradeOutcome::Below: return 1;
        case GradeOutcome::Pass: return m;
        case GradeOutcome::NoPass: return m + 1;
    }
    return 0;
}

SemesterEncoding encode_semester(const SemesterRecords& records, const Vocabulary& vocab,
                                 const Threshold& threshold) {
    EncodingDims dims{vocab.n(), vocab.m(), vocab.k()};
    if (dims.m != 2)
        throw std::runtime_error("binarized encoding requires exactly 2 letter categories");

    SemesterEncoding enc;
    enc.grades = Eigen::VectorXd::Zero(dims.grade_dim());
    enc.coenrollment = Eigen::VectorXd::Zero(dims.n);
    enc.majors = Eigen::VectorXd::Zero(dims.k);
    enc.mask.assign(dims.n, MaskGroup::None);

    for (const auto& e : records.enrollments) {
        int course = vocab.require_course_index(e.course);
        GradeOutcome outcome = binarize_grade(e.grade, threshold);
        enc.grades[grade_slot_offset(course, dims) + outcome_position(outcome, dims.m)] = 1.0;
        enc.coenrollment[course] = 1.0;
        enc.mask[course] = e.grade.kind == Grade::Kind::Letter ? MaskGroup::Letter
                                                               : MaskGroup::PassNoPass;
    }
    for (const auto& major : records.majors) {
        if (auto idx = vocab.major_index(major)) enc.majors[*idx] = 1.0;
    }
    return enc;
}

std::vector<std::pair<int, GradeOutcome>> decode_grade_vector(const Eigen::VectorXd& grades,
                                                              const EncodingDims& dims) {
    if (grades.size() != dims.grade_dim())
        throw std::runtime_error("grade vector length does not match encoding dims");
    if (dims.m != 2)
        throw std::runtime_error("binarized decoding requires exactly 2 letter categories");
    std::vector<std::pair<int, GradeOutcome>> out;
    for (int course = 0; course < dims.n; ++course) {
        int offset = grade_slot_offset(course, dims);
        for (int pos = 0; pos < dims.slot_width(); ++pos) {
            if (grades[offset + pos] == 0.0) continue;
            GradeOutcome outcome;
            if (pos == 0) outcome = GradeOutcome::AboveOrEqual;
            else if (pos == 1) outcome = GradeOutcome::Below;
            else if (pos == dims.m) outcome = GradeOutcome::Pass;
            else outcome = GradeOutcome::NoPass;
            out.emplace_back(course, outcome);
        }
    }
    return out;
}

namespace {

// Index of the single 1.0 entry inside [offset, offset+len), requiring all
// other entries to be exactly 0; -1 when the range is all-zero, -2 when the
// contents are not a clean one-hot.
int one_hot_position(const Eigen::VectorXd& v, int offset, int len) {
    int found = -1;
    for (int j = 0; j < len; ++j) {
        double value = v[offset + j];
        if (value == 0.0) continue;
        if (value != 1.0 || found >= 0) return -2;
        found = j;
    }
    return found;
}

}  // namespace

std::vector<LabelTerm> label_terms(const Eigen::VectorXd& label, const LossMask& mask,
                                   const EncodingDims& dims) {
    if (label.size() != dims.grade_dim())
        throw std::runtime_error("label length does not match encoding dims");
    if (static_cast<int>(mask.size()) != dims.n)
        throw std::runtime_error("mask length does not match vocabulary");

    std::vector<LabelTerm> terms;
    for (int course = 0; course < dims.n; ++course) {
        int offset = grade_slot_offset(course, dims);
        int letter = one_hot_position(label, offset, dims.m);
        int pnp = one_hot_position(label, offset + dims.m, 2);
        auto inconsistent = [&]() {
            throw std::runtime_error("label inconsistent with mask selector for course index " +
                                     std::to_string(course));
        };
        switch (mask[course]) {
            case MaskGroup::None:
                if (letter != -1 || pnp != -1) inconsistent();
                break;
            case MaskGroup::Letter:
                if (letter < 0 || pnp != -1) inconsistent();
                terms.push_back({course, offset, dims.m, letter, true});
                break;
            case MaskGroup::PassNoPass:
                if (pnp < 0 || letter != -1) inconsistent();
                terms.push_back({course, offset + dims.m, 2, pnp, false});
                break;
        }
    }
    return terms;
}

ModelKind model_kind_from_int(int value) {
    switch (value) {
        case 1: return ModelKind::GradesOnly;
        case 2: return ModelKind::CoEnrollment;
        case 3: return ModelKind::CoEnrollmentMajors;
    }
    throw std::runtime_error("model kind must be 1, 2 or 3");
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::GradesOnly: return "grades-only";
        case ModelKind::CoEnrollment: return "co-enrollment";
        case ModelKind::CoEnrollmentMajors: return "co-enrollment+majors";
    }
    return "?";
}

ModelInput build_model_input(ModelKind kind, const Eigen::VectorXd& grades,
                             const Eigen::VectorXd& coenroll_next, const Eigen::VectorXd& majors,
                             const EncodingDims& dims) {
    if (grades.size() != dims.grade_dim())
        throw std::runtime_error("grade vector length does not match encoding dims");
    if (coenroll_next.size() != dims.n)
        throw std::runtime_error("co-enrollment vector length does not match encoding dims");
    if (majors.size() != dims.k)
        throw std::runtime_error("major vector length does not match encoding dims");

    ModelInput input;
    switch (kind) {
        case ModelKind::GradesOnly:
            input.recurrent = grades;
            break;
        case ModelKind::CoEnrollment:
            input.recurrent.resize(grades.size() + coenroll_next.size());
            input.recurrent << grades, coenroll_next;
            break;
        case ModelKind::CoEnrollmentMajors:
            input.recurrent.resize(grades.size() + majors.size());
            input.recurrent << grades, majors;
            input.side = coenroll_next;
            break;
    }
    return input;
}

EncodedSequence encode_sequence(const StudentSequence& student, const Vocabulary& vocab,
                                const Threshold& threshold, LabelMode mode) {
    EncodedSequence steps;
    if (student.semesters.size() < 2) return steps;

    std::vector<SemesterEncoding> encoded;
    encoded.reserve(student.semesters.size());
    for (const auto& sem : student.semesters) encoded.push_back(encode_semester(sem, vocab, threshold));

    EncodingDims dims{vocab.n(), vocab.m(), vocab.k()};
    int transitions = static_cast<int>(encoded.size()) - 1;
    steps.reserve(transitions);
    for (int t = 0; t < transitions; ++t) {
        EncodedStep step;
        step.grades_in = std::move(encoded[t].grades);
        step.majors_in = std::move(encoded[t].majors);
        step.coenroll_next = encoded[t + 1].coenrollment;
        bool labeled = mode == LabelMode::AllSteps || t == transitions - 1;
        if (labeled) {
            step.label = encoded[t + 1].grades;
            step.label_mask = encoded[t + 1].mask;
        } else {
            step.label = Eigen::VectorXd::Zero(dims.grade_dim());
            step.label_mask.assign(dims.n, MaskGroup::None);
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<EncodedSequence> encode_split(const std::vector<StudentSequence>& students,
                                          const Vocabulary& vocab, const Threshold& threshold,
                                          LabelMode mode) {
    std::vector<EncodedSequence> out;
    out.reserve(students.size());
    for (const auto& student : students) {
        auto seq = encode_sequence(student, vocab, threshold, mode);
        if (!seq.empty()) out.push_back(std::move(seq));
    }
    return out;
}

}  // namespace cseer

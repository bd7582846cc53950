#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cseer {

enum class Term : int { Spring = 0, Summer = 1, Fall = 2 };

const char* term_name(Term term);
std::optional<Term> term_from_name(const std::string& name);

/// Academic semester; total order is (year, Spring < Summer < Fall).
struct Semester {
    int year = 0;
    Term term = Term::Spring;

    friend auto operator<=>(const Semester&, const Semester&) = default;

    std::string str() const;  // "Fall 2015"
};

// "Fall 2015" (enrollment CSV column format).
Semester parse_semester(const std::string& text);
// "2015:Fall" (command-line format).
Semester parse_semester_token(const std::string& text);
// Next Spring or Fall semester, skipping Summer.
Semester next_regular_semester(const Semester& s);

enum class CourseLevel : int { Lower = 0, Upper = 1, Graduate = 2 };

const char* level_name(CourseLevel level);

/// Catalog course, uniquely identified by (department, number).
struct Course {
    std::string id;  // "<department> <number>"
    std::string department;
    int number = 0;
    std::string subject;

    // Division level is a pure function of the course number:
    // < 100 lower, 100..199 upper, >= 200 graduate.
    CourseLevel level() const;

    friend bool operator==(const Course& a, const Course& b) {
        return a.department == b.department && a.number == b.number;
    }
    friend auto operator<=>(const Course& a, const Course& b) {
        if (auto c = a.department <=> b.department; c != 0) return c;
        return a.number <=> b.number;
    }
};

Course make_course(std::string department, int number);

/// Received grade: either a letter grade carrying grade points or a
/// binary Pass/No-Pass outcome. The original token is kept so that a
/// dataset can be re-serialized without loss (A and A+ share 4.0 points).
struct Grade {
    enum class Kind { Letter, PassNoPass };

    Kind kind = Kind::Letter;
    double letter_points = 0.0;  // meaningful iff kind == Letter
    bool passed = false;         // meaningful iff kind == PassNoPass
    std::string token;           // "B+", "P", ...

    static Grade letter(const std::string& token);
    static Grade pass_no_pass(bool passed);
    // Throws on tokens outside the letter scale / {P, NP}.
    static Grade parse(const std::string& token);
};

// Grade points for a letter token (A=4.0, +/- = +/-0.3, A+ capped at 4.0).
std::optional<double> letter_grade_points(const std::string& token);

struct Enrollment {
    Course course;
    Grade grade;
};

/// One student-semester: declared majors plus the courses taken.
struct SemesterRecords {
    Semester semester;
    std::vector<std::string> majors;  // sorted, unique
    std::vector<Enrollment> enrollments;
};

struct StudentSequence {
    std::string student_id;
    std::vector<SemesterRecords> semesters;  // strictly increasing
};

/// Flat view of one parsed CSV row.
struct EnrollmentRecord {
    std::string student_id;
    Semester semester;
    std::vector<std::string> majors;
    Course course;
    Grade grade;

    friend bool operator==(const EnrollmentRecord&, const EnrollmentRecord&) = default;
};

struct EnrollmentDataset {
    std::vector<StudentSequence> students;  // ordered by student id

    std::size_t record_count() const;
    std::vector<EnrollmentRecord> all_records() const;
    const StudentSequence* find_student(const std::string& student_id) const;
};

// Columns: Semester Year, STU ID, Major, Dept, Course Num, Grade.
// Multiple majors are ';'-separated inside the Major cell. Malformed rows,
// unknown grade tokens and duplicate (student, semester, course) triples
// are hard errors carrying the line number.
EnrollmentDataset parse_enrollment_csv(std::istream& in);
EnrollmentDataset parse_enrollment_csv_file(const std::string& path);

void write_enrollment_csv(const EnrollmentDataset& dataset, std::ostream& out);

/// Dense, deterministic index maps for courses, majors and the letter
/// grade categories the model distinguishes.
struct Vocabulary {
    std::vector<Course> courses;             // sorted by (department, number)
    std::vector<std::string> majors;         // sorted
    std::vector<std::string> letter_categories;

    int n() const { return static_cast<int>(courses.size()); }
    int k() const { return static_cast<int>(majors.size()); }
    int m() const { return static_cast<int>(letter_categories.size()); }

    std::optional<int> course_index(const std::string& department, int number) const;
    std::optional<int> course_index(const Course& course) const;
    int require_course_index(const Course& course) const;
    std::optional<int> major_index(const std::string& major) const;

    // Must be called after mutating `courses` or `majors` directly.
    void rebuild_lookup();

  private:
    std::map<std::pair<std::string, int>, int> course_lookup_;
    std::map<std::string, int> major_lookup_;
};

// Binarized letter categories: index 0 = at/above threshold, 1 = below.
std::vector<std::string> binary_letter_categories();

// Drops courses with fewer than min_enrollments total records, removes the
// affected records from every sequence, and builds the index maps. Throws
// if nothing survives.
Vocabulary build_vocabulary(EnrollmentDataset& dataset, int min_enrollments);

// Removes records whose course is outside the vocabulary, e.g. before
// evaluating new data against a previously trained model.
void restrict_to_vocabulary(EnrollmentDataset& dataset, const Vocabulary& vocab);

struct DataSplit {
    std::vector<StudentSequence> train;  // per-student prefixes up to train_end
    std::vector<StudentSequence> val;    // history + final val-semester labels
    std::vector<StudentSequence> test;   // history + final test-semester labels
};

// Train sequences are the maximal per-student prefixes whose semesters are
// <= train_end (every transition inside is a training label). Val/test
// sequences end exactly at the given semester with the student's full prior
// history as input; only that final transition is a label. Students without
// any input history for a split are excluded from it.
DataSplit temporal_split(const EnrollmentDataset& dataset, const Semester& train_end,
                         const Semester& val_semester, const Semester& test_semester);

}  // namespace cseer

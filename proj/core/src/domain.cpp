#include "cseer/domain.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
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

std::optional<int> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    std::size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(s, &pos);
    } catch (const std::exception&) {
        return std::nullopt;
    }
    if (pos != s.size()) return std::nullopt;
    return value;
}

}  // namespace

const char* term_name(Term term) {
    switch (term) {
        case Term::Spring: return "Spring";
        case Term::Summer: return "Summer";
        case Term::Fall: return "Fall";
    }
    return "?";
}

std::optional<Term> term_from_name(const std::string& name) {
    if (name == "Spring") return Term::Spring;
    if (name == "Summer") return Term::Summer;
    if (name == "Fall") return Term::Fall;
    return std::nullopt;
}

std::string Semester::str() const {
    return std::string(term_name(term)) + " " + std::to_string(year);
}

Semester parse_semester(const std::string& text) {
    auto parts = split(trim(text), ' ');
    if (parts.size() != 2) throw std::runtime_error("bad semester '" + text + "', expected '<Term> <Year>'");
    auto term = term_from_name(parts[0]);
    auto year = parse_int(parts[1]);
    if (!term || !year) throw std::runtime_error("bad semester '" + text + "', expected '<Term> <Year>'");
    return Semester{*year, *term};
}

Semester parse_semester_token(const std::string& text) {
    auto parts = split(trim(text), ':');
    if (parts.size() != 2) throw std::runtime_error("bad semester '" + text + "', expected '<Year>:<Term>'");
    auto year = parse_int(parts[0]);
    auto term = term_from_name(parts[1]);
    if (!term || !year) throw std::runtime_error("bad semester '" + text + "', expected '<Year>:<Term>'");
    return Semester{*year, *term};
}

Semester next_regular_semester(const Semester& s) {
    switch (s.term) {
        case Term::Spring: return Semester{s.year, Term::Fall};
        case Term::Summer: return Semester{s.year, Term::Fall};
        case Term::Fall: return Semester{s.year + 1, Term::Spring};
    }
    return s;
}

const char* level_name(CourseLevel level) {
    switch (level) {
        case CourseLevel::Lower: return "lower";
        case CourseLevel::Upper: return "upper";
        case CourseLevel::Graduate: return "graduate";
    }
    return "?";
}

CourseLevel Course::level() const {
    if (number < 100) return CourseLevel::Lower;
    if (number <= 199) return CourseLevel::Upper;
    return CourseLevel::Graduate;
}

Course make_course(std::string department, int number) {
    Course c;
    c.department = std::move(department);
    c.number = number;
    c.id = c.department + " " + std::to_string(number);
    c.subject = c.department;
    return c;
}

std::optional<double> letter_grade_points(const std::string& token) {
    static const std::map<std::string, double> points = {
        {"A+", 4.0}, {"A", 4.0}, {"A-", 3.7}, {"B+", 3.3}, {"B", 3.0}, {"B-", 2.7},
        {"C+", 2.3}, {"C", 2.0}, {"C-", 1.7}, {"D+", 1.3}, {"D", 1.0}, {"D-", 0.7},
        {"F", 0.0},
    };
    auto it = points.find(token);
    if (it == points.end()) return std::nullopt;
    return it->second;
}

Grade Grade::letter(const std::string& token) {
    auto pts = letter_grade_points(token);
    if (!pts) throw std::runtime_error("unknown grade token '" + token + "'");
    Grade g;
    g.kind = Kind::Letter;
    g.letter_points = *pts;
    g.token = token;
    return g;
}

Grade Grade::pass_no_pass(bool passed) {
    Grade g;
    g.kind = Kind::PassNoPass;
    g.passed = passed;
    g.token = passed ? "P" : "NP";
    return g;
}

Grade Grade::parse(const std::string& token) {
    if (token == "P") return pass_no_pass(true);
    if (token == "NP") return pass_no_pass(false);
    return letter(token);
}

std::size_t EnrollmentDataset::record_count() const {
    std::size_t total = 0;
    for (const auto& student : students)
        for (const auto& sem : student.semesters) total += sem.enrollments.size();
    return total;
}

std::vector<EnrollmentRecord> EnrollmentDataset::all_records() const {
    std::vector<EnrollmentRecord> out;
    out.reserve(record_count());
    for (const auto& student : students) {
        for (const auto& sem : student.semesters) {
            for (const auto& e : sem.enrollments) {
                out.push_back(EnrollmentRecord{student.student_id, sem.semester, sem.majors,
                                               e.course, e.grade});
            }
        }
    }
    return out;
}

const StudentSequence* EnrollmentDataset::find_student(const std::string& student_id) const {
    auto it = std::lower_bound(students.begin(), students.end(), student_id,
                               [](const StudentSequence& s, const std::string& id) {
                                   return s.student_id < id;
                               });
    if (it == students.end() || it->student_id != student_id) return nullptr;
    return &*it;
}

namespace {

struct HeaderIndex {
    int semester = -1, student = -1, major = -1, dept = -1, number = -1, grade = -1;
};

HeaderIndex parse_header(const std::string& line) {
    HeaderIndex idx;
    auto cells = split(line, ',');
    for (int i = 0; i < static_cast<int>(cells.size()); ++i) {
        std::string name = trim(cells[i]);
        if (name == "Semester Year") idx.semester = i;
        else if (name == "STU ID") idx.student = i;
        else if (name == "Major") idx.major = i;
        else if (name == "Dept") idx.dept = i;
        else if (name == "Course Num") idx.number = i;
        else if (name == "Grade") idx.grade = i;
    }
    if (idx.semester < 0 || idx.student < 0 || idx.major < 0 || idx.dept < 0 ||
        idx.number < 0 || idx.grade < 0) {
        throw std::runtime_error(
            "missing header; expected columns Semester Year, STU ID, Major, Dept, Course Num, Grade");
    }
    return idx;
}

std::vector<std::string> parse_majors_cell(const std::string& cell) {
    std::set<std::string> majors;
    for (const auto& part : split(cell, ';')) {
        std::string major = trim(part);
        if (!major.empty()) majors.insert(major);
    }
    return {majors.begin(), majors.end()};
}

}  // namespace

EnrollmentDataset parse_enrollment_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty input, expected a CSV header");
    HeaderIndex idx = parse_header(line);

    // student -> semester -> accumulated records
    std::map<std::string, std::map<Semester, SemesterRecords>> by_student;
    std::set<std::tuple<std::string, Semester, std::string, int>> seen;

    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        auto fail = [&](const std::string& what) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
        };
        int needed = std::max({idx.semester, idx.student, idx.major, idx.dept, idx.number, idx.grade});
        if (static_cast<int>(cells.size()) <= needed) fail("malformed row, too few columns");

        Semester semester;
        try {
            semester = parse_semester(trim(cells[idx.semester]));
        } catch (const std::exception& e) {
            fail(e.what());
        }
        std::string student_id = trim(cells[idx.student]);
        if (student_id.empty()) fail("malformed row, empty student id");
        auto number = parse_int(trim(cells[idx.number]));
        if (!number || *number < 0) fail("malformed row, bad course number '" + trim(cells[idx.number]) + "'");
        std::string dept = trim(cells[idx.dept]);
        if (dept.empty()) fail("malformed row, empty department");
        Grade grade;
        try {
            grade = Grade::parse(trim(cells[idx.grade]));
        } catch (const std::exception& e) {
            fail(e.what());
        }

        if (!seen.insert({student_id, semester, dept, *number}).second) {
            fail("duplicate enrollment for student " + student_id + " in " + semester.str() +
                 ", course " + dept + " " + std::to_string(*number));
        }

        auto& sem = by_student[student_id][semester];
        sem.semester = semester;
        for (const auto& major : parse_majors_cell(cells[idx.major])) {
            auto it = std::lower_bound(sem.majors.begin(), sem.majors.end(), major);
            if (it == sem.majors.end() || *it != major) sem.majors.insert(it, major);
        }
        sem.enrollments.push_back(Enrollment{make_course(dept, *number), grade});
    }

    EnrollmentDataset dataset;
    dataset.students.reserve(by_student.size());
    for (auto& [student_id, semesters] : by_student) {
        StudentSequence seq;
        seq.student_id = student_id;
        for (auto& [sem, records] : semesters) {
            std::sort(records.enrollments.begin(), records.enrollments.end(),
                      [](const Enrollment& a, const Enrollment& b) { return a.course < b.course; });
            seq.semesters.push_back(std::move(records));
        }
        dataset.students.push_back(std::move(seq));
    }
    return dataset;
}

EnrollmentDataset parse_enrollment_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_enrollment_csv(in);
}

void write_enrollment_csv(const EnrollmentDataset& dataset, std::ostream& out) {
    out << "Semester Year,STU ID,Major,Dept,Course Num,Grade\n";
    for (const auto& student : dataset.students) {
        for (const auto& sem : student.semesters) {
            std::string majors;
            for (std::size_t i = 0; i < sem.majors.size(); ++i) {
                if (i) majors += ';';
                majors += sem.majors[i];
            }
            for (const auto& e : sem.enrollments) {
                out << sem.semester.str() << ',' << student.student_id << ',' << majors << ','
                    << e.course.department << ',' << e.course.number << ',' << e.grade.token
                    << '\n';
            }
        }
    }
}

std::optional<int> Vocabulary::course_index(const std::string& department, int number) const {
    auto it = course_lookup_.find({department, number});
    if (it == course_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> Vocabulary::course_index(const Course& course) const {
    return course_index(course.department, course.number);
}

int Vocabulary::require_course_index(const Course& course) const {
    auto idx = course_index(course);
    if (!idx) throw std::runtime_error("course '" + course.id + "' not in vocabulary");
    return *idx;
}

std::optional<int> Vocabulary::major_index(const std::string& major) const {
    auto it = major_lookup_.find(major);
    if (it == major_lookup_.end()) return std::nullopt;
    return it->second;
}

void Vocabulary::rebuild_lookup() {
    course_lookup_.clear();
    for (int i = 0; i < n(); ++i) course_lookup_[{courses[i].department, courses[i].number}] = i;
    major_lookup_.clear();
    for (int i = 0; i < k(); ++i) major_lookup_[majors[i]] = i;
}

std::vector<std::string> binary_letter_categories() {
    return {"above_or_equal", "below"};
}

Vocabulary build_vocabulary(EnrollmentDataset& dataset, int min_enrollments) {
    if (min_enrollments < 1) throw std::runtime_error("min_enrollments must be >= 1");

    std::map<std::pair<std::string, int>, long> counts;
    for (const auto& student : dataset.students)
        for (const auto& sem : student.semesters)
            for (const auto& e : sem.enrollments)
                ++counts[{e.course.department, e.course.number}];

    Vocabulary vocab;
    std::set<std::string> majors;
    for (const auto& [key, count] : counts) {
        if (count >= min_enrollments) vocab.courses.push_back(make_course(key.first, key.second));
    }
    if (vocab.courses.empty()) throw std::runtime_error("empty vocabulary");
    // counts is keyed by (department, number), so vocab.courses is already sorted.

    for (auto& student : dataset.students) {
        for (auto& sem : student.semesters) {
            std::erase_if(sem.enrollments, [&](const Enrollment& e) {
                auto it = counts.find({e.course.department, e.course.number});
                return it->second < min_enrollments;
            });
            for (const auto& major : sem.majors) majors.insert(major);
        }
        std::erase_if(student.semesters,
                      [](const SemesterRecords& sem) { return sem.enrollments.empty(); });
    }
    std::erase_if(dataset.students,
                  [](const StudentSequence& s) { return s.semesters.empty(); });

    vocab.majors.assign(majors.begin(), majors.end());
    vocab.letter_categories = binary_letter_categories();
    vocab.rebuild_lookup();
    return vocab;
}

void restrict_to_vocabulary(EnrollmentDataset& dataset, const Vocabulary& vocab) {
    for (auto& student : dataset.students) {
        for (auto& sem : student.semesters) {
            std::erase_if(sem.enrollments, [&](const Enrollment& e) {
                return !vocab.course_index(e.course).has_value();
            });
        }
        std::erase_if(student.semesters,
                      [](const SemesterRecords& sem) { return sem.enrollments.empty(); });
    }
    std::erase_if(dataset.students,
                  [](const StudentSequence& s) { return s.semesters.empty(); });
}

DataSplit temporal_split(const EnrollmentDataset& dataset, const Semester& train_end,
                         const Semester& val_semester, const Semester& test_semester) {
    if (!(train_end < val_semester && val_semester < test_semester))
        throw std::runtime_error("split semesters must satisfy train_end < val < test");

    bool saw_val = false, saw_test = false;
    for (const auto& student : dataset.students) {
        for (const auto& sem : student.semesters) {
            saw_val |= sem.semester == val_semester;
            saw_test |= sem.semester == test_semester;
        }
    }
    if (!saw_val) throw std::runtime_error("validation semester " + val_semester.str() + " absent from data");
    if (!saw_test) throw std::runtime_error("test semester " + test_semester.str() + " absent from data");

    DataSplit splits;
    auto eval_sequence = [](const StudentSequence& student, const Semester& label_semester)
        -> std::optional<StudentSequence> {
        StudentSequence seq;
        seq.student_id = student.student_id;
        bool has_label = false;
        for (const auto& sem : student.semesters) {
            if (sem.semester < label_semester) {
                seq.semesters.push_back(sem);
            } else if (sem.semester == label_semester) {
                has_label = true;
                seq.semesters.push_back(sem);
            }
        }
        // A prediction needs at least one input semester before the label.
        if (!has_label || seq.semesters.size() < 2) return std::nullopt;
        return seq;
    };

    for (const auto& student : dataset.students) {
        StudentSequence prefix;
        prefix.student_id = student.student_id;
        for (const auto& sem : student.semesters) {
            if (sem.semester <= train_end) prefix.semesters.push_back(sem);
        }
        if (prefix.semesters.size() >= 2) splits.train.push_back(std::move(prefix));

        if (auto v = eval_sequence(student, val_semester)) splits.val.push_back(std::move(*v));
        if (auto t = eval_sequence(student, test_semester)) splits.test.push_back(std::move(*t));
    }
    return splits;
}

}  // namespace cseer

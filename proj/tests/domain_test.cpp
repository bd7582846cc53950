#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "cseer/domain.hpp"

using namespace cseer;

namespace {

EnrollmentDataset parse(const std::string& csv) {
    std::istringstream in(csv);
    return parse_enrollment_csv(in);
}

const std::string kHeader = "Semester Year,STU ID,Major,Dept,Course Num,Grade\n";

}  // namespace

TEST_CASE("semester ordering and parsing") {
    CHECK(Semester{2014, Term::Spring} < Semester{2014, Term::Summer});
    CHECK(Semester{2014, Term::Summer} < Semester{2014, Term::Fall});
    CHECK(Semester{2014, Term::Fall} < Semester{2015, Term::Spring});

    CHECK(parse_semester("Spring 2014") == Semester{2014, Term::Spring});
    CHECK(parse_semester_token("2015:Fall") == Semester{2015, Term::Fall});
    CHECK(parse_semester("Fall 2015").str() == "Fall 2015");
    CHECK_THROWS(parse_semester("Winter 2014"));
    CHECK_THROWS(parse_semester("Spring"));

    CHECK(next_regular_semester({2015, Term::Fall}) == Semester{2016, Term::Spring});
    CHECK(next_regular_semester({2016, Term::Spring}) == Semester{2016, Term::Fall});
    CHECK(next_regular_semester({2016, Term::Summer}) == Semester{2016, Term::Fall});
}

TEST_CASE("course level follows the three number bands") {
    // Independent statement of the banding rule over the whole range.
    for (int number = 0; number <= 999; ++number) {
        Course c = make_course("X", number);
        CourseLevel expected;
        if (number <= 99) expected = CourseLevel::Lower;
        else if (number <= 199) expected = CourseLevel::Upper;
        else expected = CourseLevel::Graduate;
        CHECK(c.level() == expected);
    }
}

TEST_CASE("letter grade points") {
    CHECK(Grade::parse("A").letter_points == doctest::Approx(4.0));
    CHECK(Grade::parse("A+").letter_points == doctest::Approx(4.0));
    CHECK(Grade::parse("A-").letter_points == doctest::Approx(3.7));
    CHECK(Grade::parse("B-").letter_points == doctest::Approx(2.7));
    CHECK(Grade::parse("F").letter_points == doctest::Approx(0.0));
    CHECK(Grade::parse("P").passed);
    CHECK_FALSE(Grade::parse("NP").passed);
    CHECK_THROWS_WITH(Grade::parse("W"), doctest::Contains("W"));
}

TEST_CASE("sample row parses to the exact field values") {
    auto dataset = parse(kHeader + "Spring 2014,x137905,Law,Law,178,B\n");
    REQUIRE(dataset.students.size() == 1);
    const auto& student = dataset.students[0];
    CHECK(student.student_id == "x137905");
    REQUIRE(student.semesters.size() == 1);
    const auto& sem = student.semesters[0];
    CHECK(sem.semester == Semester{2014, Term::Spring});
    CHECK(sem.majors == std::vector<std::string>{"Law"});
    REQUIRE(sem.enrollments.size() == 1);
    CHECK(sem.enrollments[0].course.department == "Law");
    CHECK(sem.enrollments[0].course.number == 178);
    CHECK(sem.enrollments[0].grade.kind == Grade::Kind::Letter);
    CHECK(sem.enrollments[0].grade.letter_points == doctest::Approx(3.0));
}

TEST_CASE("empty file with header only") {
    auto dataset = parse(kHeader);
    CHECK(dataset.students.empty());
    CHECK(dataset.record_count() == 0);
}

TEST_CASE("rows out of order are sorted by semester") {
    auto dataset = parse(kHeader +
                         "Fall 2014,s1,Math,Math,140,D\n"
                         "Spring 2014,s1,Math,Math,121,A\n");
    REQUIRE(dataset.students.size() == 1);
    REQUIRE(dataset.students[0].semesters.size() == 2);
    CHECK(dataset.students[0].semesters[0].semester == Semester{2014, Term::Spring});
    CHECK(dataset.students[0].semesters[1].semester == Semester{2014, Term::Fall});
}

TEST_CASE("parse errors carry the line number") {
    CHECK_THROWS_WITH(parse(kHeader + "Spring 2014,s1,Math,Math\n"), doctest::Contains("line 2"));
    CHECK_THROWS_WITH(parse(kHeader + "Spring 2014,s1,Math,Math,121,ZZ\n"),
                      doctest::Contains("ZZ"));
    CHECK_THROWS_WITH(parse(kHeader +
                            "Spring 2014,s1,Math,Math,121,A\n"
                            "Spring 2014,s1,Math,Math,121,B\n"),
                      doctest::Contains("duplicate"));
    CHECK_THROWS(parse("Dept,Grade\nMath,A\n"));
    CHECK_THROWS(parse(""));
}

TEST_CASE("multi-major cell is split on semicolons") {
    auto dataset = parse(kHeader + "Spring 2014,s1,Math;Physics,Math,121,A\n");
    CHECK(dataset.students[0].semesters[0].majors ==
          std::vector<std::string>{"Math", "Physics"});
}

TEST_CASE("round trip preserves the record multiset") {
    std::string csv = kHeader +
                      "Spring 2014,x137905,Law,Law,178,B\n"
                      "Summer 2014,x137905,Law,Law,165,C\n"
                      "Fall 2014,x282243,Math,Math,140,D\n"
                      "Fall 2014,x282243,Math,Math,121,A+\n"
                      "Fall 2014,x282243,Math,Physics,7,P\n";
    auto dataset = parse(csv);
    std::ostringstream out;
    write_enrollment_csv(dataset, out);
    auto reparsed = parse(out.str());

    auto key = [](const EnrollmentRecord& r) {
        return std::tuple(r.student_id, r.semester, r.course.department, r.course.number,
                          r.grade.token);
    };
    auto a = dataset.all_records();
    auto b = reparsed.all_records();
    REQUIRE(a.size() == b.size());
    std::multiset<decltype(key(a[0]))> ma, mb;
    for (const auto& r : a) ma.insert(key(r));
    for (const auto& r : b) mb.insert(key(r));
    CHECK(ma == mb);
}

TEST_CASE("vocabulary excludes courses under the enrollment floor") {
    std::string csv = kHeader;
    for (int i = 0; i < 19; ++i)
        csv += "Spring 2014,s" + std::to_string(i) + ",Math,Math,1,A\n";
    for (int i = 0; i < 20; ++i)
        csv += "Spring 2014,s" + std::to_string(i) + ",Math,Math,2,A\n";
    auto dataset = parse(csv);
    auto vocab = build_vocabulary(dataset, 20);
    CHECK(vocab.n() == 1);
    CHECK_FALSE(vocab.course_index("Math", 1).has_value());
    CHECK(vocab.course_index("Math", 2).has_value());
    // the filtered course's records are gone from the sequences
    for (const auto& student : dataset.students)
        for (const auto& sem : student.semesters)
            for (const auto& e : sem.enrollments) CHECK(e.course.number == 2);
}

TEST_CASE("min_enrollments=1 keeps every observed course") {
    auto dataset = parse(kHeader +
                         "Spring 2014,s1,Math,Math,121,A\n"
                         "Spring 2014,s1,Math,Physics,7,B\n");
    auto vocab = build_vocabulary(dataset, 1);
    CHECK(vocab.n() == 2);
    CHECK_THROWS(build_vocabulary(dataset, 0));
}

TEST_CASE("everything filtered out is an error") {
    auto dataset = parse(kHeader + "Spring 2014,s1,Math,Math,121,A\n");
    CHECK_THROWS_WITH(build_vocabulary(dataset, 20), doctest::Contains("empty vocabulary"));
}

TEST_CASE("vocabulary indices are deterministic and reorder-stable") {
    std::vector<std::string> rows = {
        "Spring 2014,s1,Math,Math,121,A\n",   "Spring 2014,s2,Math,Physics,7,B\n",
        "Spring 2014,s3,Law,Law,178,C\n",     "Fall 2014,s1,Math,Math,140,B\n",
        "Fall 2014,s2,Math,Physics,105,NP\n",
    };
    auto vocab_of = [&](const std::vector<std::string>& ordered) {
        std::string csv = kHeader;
        for (const auto& r : ordered) csv += r;
        auto dataset = parse(csv);
        return build_vocabulary(dataset, 1);
    };
    auto base = vocab_of(rows);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(rows.begin(), rows.end(), rng);
        auto shuffled = vocab_of(rows);
        REQUIRE(shuffled.n() == base.n());
        for (int i = 0; i < base.n(); ++i) CHECK(shuffled.courses[i] == base.courses[i]);
        CHECK(shuffled.majors == base.majors);
    }
    // sorted by department then number
    for (int i = 1; i < base.n(); ++i) CHECK(base.courses[i - 1] < base.courses[i]);
}

TEST_CASE("temporal split semantics") {
    std::string csv = kHeader;
    auto row = [](const std::string& sem, const std::string& id, int num) {
        return sem + "," + id + ",Math,Math," + std::to_string(num) + ",A\n";
    };
    // s1 spans all four semesters; s2 starts in the val semester and has no
    // history; s3 has history but skips the val semester.
    csv += row("Fall 2014", "s1", 1) + row("Spring 2015", "s1", 2) + row("Fall 2015", "s1", 3) +
           row("Spring 2016", "s1", 4);
    csv += row("Fall 2015", "s2", 1);
    csv += row("Fall 2014", "s3", 1) + row("Spring 2016", "s3", 2);

    auto dataset = parse(csv);
    auto splits = temporal_split(dataset, {2015, Term::Spring}, {2015, Term::Fall},
                                 {2016, Term::Spring});

    REQUIRE(splits.train.size() == 1);  // only s1 has two semesters before the cut
    CHECK(splits.train[0].student_id == "s1");
    CHECK(splits.train[0].semesters.size() == 2);

    REQUIRE(splits.val.size() == 1);  // s2 lacks input history and is excluded
    CHECK(splits.val[0].student_id == "s1");
    CHECK(splits.val[0].semesters.size() == 3);

    REQUIRE(splits.test.size() == 2);
    for (const auto& student : splits.test)
        CHECK(student.semesters.back().semester == Semester{2016, Term::Spring});

    CHECK_THROWS(temporal_split(dataset, {2015, Term::Fall}, {2015, Term::Spring},
                                {2016, Term::Spring}));
    CHECK_THROWS_WITH(temporal_split(dataset, {2015, Term::Spring}, {2015, Term::Summer},
                                     {2016, Term::Spring}),
                      doctest::Contains("absent"));
}

TEST_CASE("split label records partition across splits") {
    // Brute-force partition check on a random 4-semester dataset: every
    // enrollment after a student's first semester is a label in exactly one
    // split, and the three label sets are disjoint.
    std::vector<Semester> semesters = {{2014, Term::Fall},
                                       {2015, Term::Spring},
                                       {2015, Term::Fall},
                                       {2016, Term::Spring}};
    std::string csv = kHeader;
    std::mt19937 rng(11);
    for (int s = 0; s < 12; ++s) {
        std::string id = "s" + std::to_string(s);
        int first = rng() % 3;
        for (int t = first; t < 4; ++t) {
            std::set<int> numbers;
            int count = 1 + rng() % 3;
            while (static_cast<int>(numbers.size()) < count)
                numbers.insert(1 + static_cast<int>(rng() % 8));
            for (int num : numbers)
                csv += semesters[t].str() + "," + id + ",Math,Math," + std::to_string(num) +
                       ",A\n";
        }
    }
    auto dataset = parse(csv);
    auto splits = temporal_split(dataset, semesters[1], semesters[2], semesters[3]);

    using Key = std::tuple<std::string, Semester, int>;
    auto labels_of = [](const std::vector<StudentSequence>& split, bool final_only) {
        std::multiset<Key> keys;
        for (const auto& student : split) {
            for (std::size_t i = 1; i < student.semesters.size(); ++i) {
                if (final_only && i + 1 != student.semesters.size()) continue;
                for (const auto& e : student.semesters[i].enrollments)
                    keys.insert({student.student_id, student.semesters[i].semester,
                                 e.course.number});
            }
        }
        return keys;
    };
    auto train_labels = labels_of(splits.train, false);
    auto val_labels = labels_of(splits.val, true);
    auto test_labels = labels_of(splits.test, true);

    for (const auto& k : val_labels) CHECK(train_labels.count(k) == 0);
    for (const auto& k : test_labels) CHECK(train_labels.count(k) == 0);
    for (const auto& k : test_labels) CHECK(val_labels.count(k) == 0);

    std::multiset<Key> expected;
    for (const auto& student : dataset.students) {
        for (std::size_t i = 1; i < student.semesters.size(); ++i)
            for (const auto& e : student.semesters[i].enrollments)
                expected.insert({student.student_id, student.semesters[i].semester,
                                 e.course.number});
    }
    std::multiset<Key> combined = train_labels;
    combined.insert(val_labels.begin(), val_labels.end());
    combined.insert(test_labels.begin(), test_labels.end());
    CHECK(combined == expected);
}

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cseer/metrics.hpp"

using namespace cseer;

namespace {

Vocabulary single_dept_vocab(int lower, bool with_upper = true, bool with_grad = false) {
    Vocabulary vocab;
    for (int i = 0; i < lower; ++i) vocab.courses.push_back(make_course("Dept", 10 + i));
    if (with_upper) vocab.courses.push_back(make_course("Dept", 150));
    if (with_grad) vocab.courses.push_back(make_course("Dept", 250));
    vocab.majors = {"Dept"};
    vocab.letter_categories = binary_letter_categories();
    vocab.rebuild_lookup();
    return vocab;
}

Model zeroed_model(const Vocabulary& vocab, int d = 3) {
    Model model = init_model(ModelKind::CoEnrollment, ModelDims{vocab.n(), vocab.m(), vocab.k(), d, 0},
                             Threshold::for_goal(Threshold::Goal::B), 1);
    for (auto& block : param_blocks(model))
        for (std::ptrdiff_t j = 0; j < block.size; ++j) block.data[j] = 0.0;
    return model;
}

// One single-transition sequence whose label puts `outcome` on `course`.
EncodedSequence one_label_sequence(const Vocabulary& vocab, int course, GradeOutcome outcome) {
    EncodingDims dims{vocab.n(), vocab.m(), vocab.k()};
    EncodedStep step;
    step.grades_in = Eigen::VectorXd::Zero(dims.grade_dim());
    step.coenroll_next = Eigen::VectorXd::Zero(dims.n);
    step.coenroll_next[course] = 1.0;
    step.majors_in = Eigen::VectorXd::Zero(dims.k);
    step.label = Eigen::VectorXd::Zero(dims.grade_dim());
    step.label[grade_slot_offset(course, dims) + outcome_position(outcome, dims.m)] = 1.0;
    step.label_mask.assign(dims.n, MaskGroup::None);
    step.label_mask[course] = outcome == GradeOutcome::AboveOrEqual || outcome == GradeOutcome::Below
                                  ? MaskGroup::Letter
                                  : MaskGroup::PassNoPass;
    return {step};
}

}  // namespace

TEST_CASE("perfect predictor scores 100 everywhere") {
    auto vocab = single_dept_vocab(3);
    Model model = zeroed_model(vocab);
    // bias the above and Pass positions so argmax matches the labels below
    EncodingDims dims{vocab.n(), vocab.m(), vocab.k()};
    for (int c = 0; c < vocab.n(); ++c) {
        model.output.b_out[grade_slot_offset(c, dims)] = 5.0;
        model.output.b_out[grade_slot_offset(c, dims) + dims.m] = 5.0;
    }

    std::vector<EncodedSequence> split = {
        one_label_sequence(vocab, 0, GradeOutcome::AboveOrEqual),
        one_label_sequence(vocab, 1, GradeOutcome::Pass),
        one_label_sequence(vocab, 2, GradeOutcome::AboveOrEqual),
    };
    auto metrics = grade_prediction_metrics(model, split);
    CHECK(metrics.letter_accuracy == doctest::Approx(100.0));
    CHECK(*metrics.letter_fscore == doctest::Approx(100.0));
    CHECK(metrics.pnp_accuracy == doctest::Approx(100.0));
}

TEST_CASE("balanced confusion gives 50 accuracy and 50 F-score") {
    auto vocab = single_dept_vocab(2);
    Model model = zeroed_model(vocab);
    EncodingDims dims{vocab.n(), vocab.m(), vocab.k()};
    // course 0 always predicted above, course 1 always predicted below
    model.output.b_out[grade_slot_offset(0, dims)] = 5.0;
    model.output.b_out[grade_slot_offset(1, dims) + 1] = 5.0;

    std::vector<EncodedSequence> split = {
        one_label_sequence(vocab, 0, GradeOutcome::AboveOrEqual),  // TP
        one_label_sequence(vocab, 0, GradeOutcome::Below),         // FP
        one_label_sequence(vocab, 1, GradeOutcome::AboveOrEqual),  // FN
        one_label_sequence(vocab, 1, GradeOutcome::Below),         // TN
    };
    auto metrics = grade_prediction_metrics(model, split);
    CHECK(metrics.letter_accuracy == doctest::Approx(50.0));
    CHECK(*metrics.letter_fscore == doctest::Approx(50.0));
}

TEST_CASE("F-score is a defined zero without true positives") {
    auto vocab = single_dept_vocab(1, false);
    Model model = zeroed_model(vocab);
    EncodingDims dims{vocab.n(), vocab.m(), vocab.k()};
    model.output.b_out[grade_slot_offset(0, dims) + 1] = 5.0;  // always predicts below

    std::vector<EncodedSequence> split = {one_label_sequence(vocab, 0, GradeOutcome::AboveOrEqual)};
    auto metrics = grade_prediction_metrics(model, split);
    CHECK(metrics.letter_accuracy == doctest::Approx(0.0));
    CHECK(*metrics.letter_fscore == doctest::Approx(0.0));
}

TEST_CASE("metrics are pure functions of model and data") {
    auto vocab = single_dept_vocab(3);
    Model model = init_model(ModelKind::CoEnrollment,
                             ModelDims{vocab.n(), vocab.m(), vocab.k(), 4, 0},
                             Threshold::for_goal(Threshold::Goal::B), 9);
    std::vector<EncodedSequence> split = {
        one_label_sequence(vocab, 0, GradeOutcome::AboveOrEqual),
        one_label_sequence(vocab, 1, GradeOutcome::NoPass),
        one_label_sequence(vocab, 2, GradeOutcome::Below),
    };
    auto a = grade_prediction_metrics(model, split);
    auto b = grade_prediction_metrics(model, split, 4);  // threading must not change results
    CHECK(a.letter_accuracy == b.letter_accuracy);
    CHECK(*a.letter_fscore == *b.letter_fscore);
    CHECK(a.pnp_accuracy == b.pnp_accuracy);

    CHECK_THROWS_WITH(grade_prediction_metrics(model, {}), doctest::Contains("no labeled"));
}

TEST_CASE("majority baseline") {
    auto vocab = single_dept_vocab(4);

    SUBCASE("3 above and 1 below gives 75") {
        std::vector<EncodedSequence> split = {
            one_label_sequence(vocab, 0, GradeOutcome::AboveOrEqual),
            one_label_sequence(vocab, 1, GradeOutcome::AboveOrEqual),
            one_label_sequence(vocab, 2, GradeOutcome::AboveOrEqual),
            one_label_sequence(vocab, 3, GradeOutcome::Below),
        };
        auto metrics = majority_baseline(split);
        CHECK(metrics.letter_accuracy == doctest::Approx(75.0));
        CHECK_FALSE(metrics.letter_fscore.has_value());
    }
    SUBCASE("identical labels give 100") {
        std::vector<EncodedSequence> split = {
            one_label_sequence(vocab, 0, GradeOutcome::Pass),
            one_label_sequence(vocab, 1, GradeOutcome::Pass),
        };
        CHECK(majority_baseline(split).pnp_accuracy == doctest::Approx(100.0));
    }
}

TEST_CASE("prerequisite recovery accuracies") {
    SUBCASE("a single pair ranked first scores 100/100") {
        auto vocab = single_dept_vocab(3);  // pool of 4 courses, everything in the top 10
        Model model = init_model(ModelKind::CoEnrollment,
                                 ModelDims{vocab.n(), vocab.m(), vocab.k(), 4, 0},
                                 Threshold::for_goal(Threshold::Goal::B), 5);
        std::vector<PrereqPair> pairs = {{vocab.courses[0], make_course("Dept", 150)}};
        auto metrics = prereq_accuracy(model, pairs, vocab);
        CHECK(metrics.pair_accuracy == doctest::Approx(100.0));
        CHECK(metrics.target_accuracy == doctest::Approx(100.0));
    }
    SUBCASE("one of two prerequisites recovered scores 50/100") {
        auto vocab = single_dept_vocab(14);  // 15 candidates, only 10 fit
        Model model = zeroed_model(vocab);   // all probes tie, index order decides
        Course target = make_course("Dept", 150);
        std::vector<PrereqPair> pairs = {{vocab.courses[0], target},
                                         {vocab.courses[13], target}};
        auto metrics = prereq_accuracy(model, pairs, vocab);
        CHECK(metrics.pair_accuracy == doctest::Approx(50.0));
        CHECK(metrics.target_accuracy == doctest::Approx(100.0));
    }
    SUBCASE("pair and target accuracy coincide when every target has one prerequisite") {
        auto vocab = single_dept_vocab(14);
        Model model = zeroed_model(vocab);
        std::vector<PrereqPair> pairs = {{vocab.courses[0], make_course("Dept", 150)},
                                         {vocab.courses[13], vocab.courses[12]}};
        auto metrics = prereq_accuracy(model, pairs, vocab);
        CHECK(metrics.pair_accuracy == metrics.target_accuracy);
    }
    SUBCASE("a pair target outside the vocabulary is an error") {
        auto vocab = single_dept_vocab(2);
        Model model = zeroed_model(vocab);
        std::vector<PrereqPair> pairs = {{vocab.courses[0], make_course("Elsewhere", 1)}};
        CHECK_THROWS_WITH(prereq_accuracy(model, pairs, vocab),
                          doctest::Contains("not in vocabulary"));
    }
}

namespace {

// Small dataset for the goal back-test: everything lives in one department.
// Semesters: Fall 2014, Spring 2015, Fall 2015 (recommendation), Spring 2016
// (target semester).
EnrollmentDataset goal_dataset(const Vocabulary& vocab) {
    std::ostringstream csv;
    csv << "Semester Year,STU ID,Major,Dept,Course Num,Grade\n";
    auto row = [&](const std::string& sem, const std::string& id, int num,
                   const std::string& grade) {
        csv << sem << "," << id << ",Dept,Dept," << num << "," << grade << "\n";
    };
    // hitter: above the goal in the target; rec-semester enrollments cover
    // lower-division candidates
    row("Fall 2014", "hit", 10, "A");
    row("Spring 2015", "hit", 11, "A");
    row("Fall 2015", "hit", 12, "A");
    row("Fall 2015", "hit", 13, "A");
    row("Fall 2015", "hit", 14, "A");
    row("Spring 2016", "hit", 150, "A");
    // misser: below the goal; rec-semester enrollment is a graduate course
    // no filter would ever recommend for an upper-division target
    row("Fall 2014", "miss", 10, "A");
    row("Spring 2015", "miss", 11, "A");
    row("Fall 2015", "miss", 250, "A");
    row("Spring 2016", "miss", 150, "C");
    // too-new: only one semester before the target, not in the cohort
    row("Fall 2015", "new", 10, "A");
    row("Spring 2016", "new", 150, "A");
    std::istringstream in(csv.str());
    auto dataset = parse_enrollment_csv(in);
    restrict_to_vocabulary(dataset, vocab);
    return dataset;
}

}  // namespace

TEST_CASE("goal back-test hit and miss populations") {
    auto vocab = single_dept_vocab(5, true, true);
    Model model = zeroed_model(vocab);  // uniform probes; predicted-ok everywhere
    auto dataset = goal_dataset(vocab);
    int target = *vocab.course_index("Dept", 150);

    auto result = goal_match_rates(model, dataset, vocab, {}, {target}, {2016, Term::Spring},
                                   {2015, Term::Fall}, Threshold::for_goal(Threshold::Goal::B));
    REQUIRE(result.per_course.size() == 1);
    const auto& course = result.per_course[0];
    CHECK(course.pos_total == 1);
    CHECK(course.pos_hits == 1);  // rec-semester enrollments overlap any top-10
    CHECK(course.neg_total == 1);
    CHECK(course.neg_hits == 0);  // graduate enrollment can never be recommended
    CHECK(result.summary.pos_rate == doctest::Approx(100.0));
    CHECK(result.summary.neg_rate == doctest::Approx(0.0));

    SUBCASE("courses without qualifying students are marked empty") {
        int lonely = *vocab.course_index("Dept", 10);
        auto empty_result =
            goal_match_rates(model, dataset, vocab, {}, {lonely}, {2016, Term::Spring},
                             {2015, Term::Fall}, Threshold::for_goal(Threshold::Goal::B));
        CHECK(empty_result.per_course[0].empty());
    }
    SUBCASE("threading does not change the counts") {
        auto threaded =
            goal_match_rates(model, dataset, vocab, {}, {target}, {2016, Term::Spring},
                             {2015, Term::Fall}, Threshold::for_goal(Threshold::Goal::B), 10, 4);
        CHECK(threaded.pos_hits == result.pos_hits);
        CHECK(threaded.neg_hits == result.neg_hits);
    }
}

TEST_CASE("difficult-course selection ranks by ascending above rate") {
    auto vocab = single_dept_vocab(2, true, true);
    std::ostringstream csv;
    csv << "Semester Year,STU ID,Major,Dept,Course Num,Grade\n";
    for (int s = 0; s < 6; ++s) {
        std::string id = "s" + std::to_string(s);
        csv << "Fall 2015," << id << ",Dept,Dept,10," << (s < 2 ? "A" : "C") << "\n";
        csv << "Fall 2015," << id << ",Dept,Dept,11," << (s < 4 ? "A" : "C") << "\n";
        csv << "Fall 2015," << id << ",Dept,Dept,150," << (s < 3 ? "A" : "C") << "\n";
    }
    std::istringstream in(csv.str());
    auto dataset = parse_enrollment_csv(in);

    auto ranked = select_difficult_courses(dataset, vocab, {2015, Term::Fall},
                                           Threshold::for_goal(Threshold::Goal::B), 10, 3);
    REQUIRE(ranked.size() == 3);
    CHECK(vocab.courses[ranked[0]].number == 10);   // above rate 1/3
    CHECK(vocab.courses[ranked[1]].number == 150);  // 1/2
    CHECK(vocab.courses[ranked[2]].number == 11);   // 2/3

    auto upper_only = select_difficult_courses(dataset, vocab, {2015, Term::Fall},
                                               Threshold::for_goal(Threshold::Goal::B), 10, 3,
                                               CourseLevel::Upper);
    REQUIRE(upper_only.size() == 1);
    CHECK(vocab.courses[upper_only[0]].number == 150);

    auto availability = availability_for_term(dataset, vocab, Term::Fall);
    CHECK(availability.contains(*vocab.course_index("Dept", 10)));
    CHECK_FALSE(availability.contains(*vocab.course_index("Dept", 250)));
    CHECK(availability_for_term(dataset, vocab, Term::Spring).empty());
}

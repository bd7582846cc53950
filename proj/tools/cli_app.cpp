#include "cli_app.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "cseer/metrics.hpp"
#include "cseer/model_io.hpp"
#include "cseer/synthetic.hpp"
#include "cseer/training.hpp"

namespace cseer::cli {

namespace {

namespace fs = std::filesystem;

// "<Dept> <Num>", department may contain spaces.
Course parse_course_arg(const std::string& text) {
    auto pos = text.find_last_of(' ');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= text.size())
        throw std::runtime_error("bad course '" + text + "', expected '<Dept> <Num>'");
    int number = 0;
    try {
        std::size_t used = 0;
        number = std::stoi(text.substr(pos + 1), &used);
        if (used != text.size() - pos - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::runtime_error("bad course '" + text + "', expected '<Dept> <Num>'");
    }
    return make_course(text.substr(0, pos), number);
}

struct SplitSpec {
    Semester train_end, val, test;
};

// "2015:Fall,2016:Spring,2017:Spring"
SplitSpec parse_split_arg(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) parts.push_back(token);
    if (parts.size() != 3)
        throw std::runtime_error("bad split '" + text +
                                 "', expected '<train_end>,<val>,<test>' semesters");
    return SplitSpec{parse_semester_token(parts[0]), parse_semester_token(parts[1]),
                     parse_semester_token(parts[2])};
}

template <class WriteFn>
void atomic_write(const fs::path& path, WriteFn&& write) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        write(out);
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void print_kv(const std::string& name, double value) {
    std::printf("%s %.4f\n", name.c_str(), value);
}

void print_recommendations(const std::vector<RankedRecommendation>& recs) {
    if (recs.empty()) {
        std::printf("no candidates survived the filters\n");
        return;
    }
    std::printf("%-4s %-24s %s\n", "rank", "course", "p_success");
    for (std::size_t i = 0; i < recs.size(); ++i)
        std::printf("%-4zu %-24s %.4f\n", i + 1, recs[i].course.id.c_str(),
                    recs[i].probability);
}

struct CommonModelArgs {
    std::string model_file;
    int threads = 1;
};

// Flat key=value config support: file values become trailing arguments, so
// anything given explicitly on the command line wins. Keys are the long
// option names without the leading dashes.
void apply_config_file(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    if (path.empty()) return;

    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto strip = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        std::string text = strip(line);
        if (text.empty() || text[0] == '#') continue;
        auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = strip(text.substr(0, eq));
        std::string value = strip(text.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(line_no) + ": empty key");

        std::string flag = "--" + key;
        bool overridden = false;
        for (const auto& arg : args)
            if (arg == flag || arg.starts_with(flag + "=")) overridden = true;
        if (!overridden) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
}

LoadedModel load_checked(const std::string& path) {
    LoadedModel loaded = load_model(path);
    return loaded;
}

// --- gen ---------------------------------------------------------------

struct GenArgs {
    std::string out_dir;
    std::string edges_file;
    SynthConfig config;  // dag_edges filled after parsing
};

void run_gen(const GenArgs& args) {
    SynthConfig config = args.config;
    if (!args.edges_file.empty()) {
        config.dag_edges = parse_prereq_pairs_csv_file(args.edges_file);
    } else if (config.n_courses == 60 && config.n_departments == 3) {
        config.dag_edges = default_synth_config().dag_edges;
    }

    SynthDataset synth = generate(config);
    fs::create_directories(args.out_dir);
    atomic_write(fs::path(args.out_dir) / "enrollments.csv",
                 [&](std::ostream& out) { write_enrollment_csv(synth.data, out); });
    atomic_write(fs::path(args.out_dir) / "prereq_pairs.csv",
                 [&](std::ostream& out) { write_prereq_pairs_csv(synth.planted_edges, out); });
    std::printf("wrote %s/enrollments.csv (%zu students, %zu records)\n", args.out_dir.c_str(),
                synth.data.students.size(), synth.data.record_count());
    std::printf("wrote %s/prereq_pairs.csv (%zu planted edges)\n", args.out_dir.c_str(),
                synth.planted_edges.size());
}

// --- train -------------------------------------------------------------

struct TrainArgs {
    int model_kind = 2;
    std::string threshold = "B";
    std::string data_file;
    std::string split;
    std::string out_file;
    int min_enrollments = 20;
    TrainConfig config;
};

void run_train(const TrainArgs& args) {
    EnrollmentDataset dataset = parse_enrollment_csv_file(args.data_file);
    Vocabulary vocab = build_vocabulary(dataset, args.min_enrollments);
    SplitSpec split = parse_split_arg(args.split);
    DataSplit splits = temporal_split(dataset, split.train_end, split.val, split.test);
    Threshold threshold = Threshold::parse(args.threshold);

    std::printf("vocabulary: %d courses, %d majors; train/val/test students: %zu/%zu/%zu\n",
                vocab.n(), vocab.k(), splits.train.size(), splits.val.size(),
                splits.test.size());

    TrainResult result =
        train(model_kind_from_int(args.model_kind), vocab, splits, threshold, args.config);
    for (std::size_t e = 0; e < result.history.size(); ++e) {
        const auto& stats = result.history[e];
        std::printf("epoch %zu train_loss %.4f val_loss %.4f val_letter_accuracy %.2f\n", e + 1,
                    stats.train_loss, stats.val_loss, stats.val_letter_accuracy);
    }
    save_model(result.model, vocab, args.out_file);
    std::printf("saved model to %s\n", args.out_file.c_str());
}

// --- eval-grades ---------------------------------------------------------

struct EvalGradesArgs {
    CommonModelArgs common;
    std::string data_file;
    std::string split;
};

void run_eval_grades(const EvalGradesArgs& args) {
    LoadedModel loaded = load_checked(args.common.model_file);
    EnrollmentDataset dataset = parse_enrollment_csv_file(args.data_file);
    restrict_to_vocabulary(dataset, loaded.vocab);
    SplitSpec split = parse_split_arg(args.split);
    DataSplit splits = temporal_split(dataset, split.train_end, split.val, split.test);

    auto encoded = encode_split(splits.test, loaded.vocab, loaded.model.threshold,
                                LabelMode::FinalStepOnly);
    GradeMetrics model_metrics =
        grade_prediction_metrics(loaded.model, encoded, args.common.threads);
    GradeMetrics baseline = majority_baseline(encoded);

    std::printf("%-22s %-10s %-10s %-10s\n", "predictor", "letter", "f-score", "pass/np");
    std::printf("%-22s %-10.2f %-10.2f %-10.2f\n", "model", model_metrics.letter_accuracy,
                model_metrics.letter_fscore.value_or(0.0), model_metrics.pnp_accuracy);
    std::printf("%-22s %-10.2f %-10s %-10.2f\n", "majority-baseline", baseline.letter_accuracy,
                "-", baseline.pnp_accuracy);

    print_kv("letter_accuracy", model_metrics.letter_accuracy);
    print_kv("letter_fscore", model_metrics.letter_fscore.value_or(0.0));
    print_kv("pnp_accuracy", model_metrics.pnp_accuracy);
    print_kv("baseline_letter_accuracy", baseline.letter_accuracy);
    print_kv("baseline_pnp_accuracy", baseline.pnp_accuracy);
}

// --- eval-prereq ---------------------------------------------------------

struct EvalPrereqArgs {
    CommonModelArgs common;
    std::string pairs_file;
    int top_k = 10;
};

void run_eval_prereq(const EvalPrereqArgs& args) {
    LoadedModel loaded = load_checked(args.common.model_file);
    auto pairs = parse_prereq_pairs_csv_file(args.pairs_file);

    std::vector<PrereqPair> usable;
    for (const auto& pair : pairs)
        if (loaded.vocab.course_index(pair.target)) usable.push_back(pair);
    if (usable.size() != pairs.size())
        std::fprintf(stderr, "skipping %zu pairs with targets outside the vocabulary\n",
                     pairs.size() - usable.size());
    if (usable.empty()) throw std::runtime_error("no usable prerequisite pairs");

    PrereqMetrics metrics =
        prereq_accuracy(loaded.model, usable, loaded.vocab, args.top_k, args.common.threads);
    print_kv("pair_accuracy", metrics.pair_accuracy);
    print_kv("target_accuracy", metrics.target_accuracy);
    print_kv("pairs_evaluated", static_cast<double>(usable.size()));
}

// --- eval-goal -----------------------------------------------------------

struct EvalGoalArgs {
    CommonModelArgs common;
    std::string data_file;
    std::string pairs_file;
    std::string target_semester;
    std::string rec_semester;
    std::string goal;
    std::vector<std::string> targets;
    int num_targets = 10;
    int min_takers = 5;
    std::string min_level = "upper";
    int top_k = 10;
};

CourseLevel parse_level(const std::string& name) {
    if (name == "lower") return CourseLevel::Lower;
    if (name == "upper") return CourseLevel::Upper;
    if (name == "graduate") return CourseLevel::Graduate;
    throw std::runtime_error("unknown level '" + name + "'");
}

void run_eval_goal(const EvalGoalArgs& args) {
    LoadedModel loaded = load_checked(args.common.model_file);
    EnrollmentDataset dataset = parse_enrollment_csv_file(args.data_file);
    restrict_to_vocabulary(dataset, loaded.vocab);
    auto pairs = parse_prereq_pairs_csv_file(args.pairs_file);
    Semester target_semester = parse_semester_token(args.target_semester);
    Semester rec_semester = parse_semester_token(args.rec_semester);
    Threshold goal =
        args.goal.empty() ? loaded.model.threshold : Threshold::parse(args.goal);

    std::vector<int> target_courses;
    if (!args.targets.empty()) {
        for (const auto& text : args.targets)
            target_courses.push_back(
                loaded.vocab.require_course_index(parse_course_arg(text)));
    } else {
        target_courses = select_difficult_courses(dataset, loaded.vocab, target_semester, goal,
                                                  args.num_targets, args.min_takers,
                                                  parse_level(args.min_level));
        if (target_courses.empty())
            throw std::runtime_error("no course has enough takers in " + target_semester.str());
    }

    GoalEvalResult result =
        goal_match_rates(loaded.model, dataset, loaded.vocab, pairs, target_courses,
                         target_semester, rec_semester, goal, args.top_k, args.common.threads);

    std::printf("%-24s %-12s %-12s %-10s %-10s\n", "target", "pos_hits", "neg_hits", "pos_rate",
                "neg_rate");
    for (const auto& course : result.per_course) {
        if (course.empty()) {
            std::printf("%-24s %-12s %-12s %-10s %-10s\n", course.course.id.c_str(), "-", "-",
                        "-", "-");
            continue;
        }
        std::printf("%-24s %ld/%-10ld %ld/%-10ld %-10.2f %-10.2f\n", course.course.id.c_str(),
                    course.pos_hits, course.pos_total, course.neg_hits, course.neg_total,
                    course.pos_total ? 100.0 * course.pos_hits / course.pos_total : 0.0,
                    course.neg_total ? 100.0 * course.neg_hits / course.neg_total : 0.0);
    }
    print_kv("pos_rate", result.summary.pos_rate);
    print_kv("neg_rate", result.summary.neg_rate);
    print_kv("pos_students", static_cast<double>(result.pos_total));
    print_kv("neg_students", static_cast<double>(result.neg_total));
}

// --- infer-prereq ----------------------------------------------------------

struct InferPrereqArgs {
    CommonModelArgs common;
    std::string pairs_file;
    std::string target;
    int top_k = 10;
};

void run_infer_prereq(const InferPrereqArgs& args) {
    LoadedModel loaded = load_checked(args.common.model_file);
    CandidateFilterContext ctx;
    if (!args.pairs_file.empty()) ctx.prereq_pairs = parse_prereq_pairs_csv_file(args.pairs_file);
    ctx.threshold = loaded.model.threshold;

    int target = loaded.vocab.require_course_index(parse_course_arg(args.target));
    auto recs = infer_prereqs(loaded.model, target, loaded.vocab, ctx, args.top_k);
    print_recommendations(recs);
}

// --- recommend ---------------------------------------------------------

struct RecommendArgs {
    CommonModelArgs common;
    std::string data_file;
    std::string student;
    std::string target;
    std::string goal;
    std::string rec_semester;
    std::string pairs_file;
    int top_k = 10;
};

void run_recommend(const RecommendArgs& args) {
    LoadedModel loaded = load_checked(args.common.model_file);
    EnrollmentDataset dataset = parse_enrollment_csv_file(args.data_file);
    restrict_to_vocabulary(dataset, loaded.vocab);

    const StudentSequence* student = dataset.find_student(args.student);
    if (!student) throw std::runtime_error("student '" + args.student + "' not found");

    Semester rec = args.rec_semester.empty()
                       ? next_regular_semester(student->semesters.back().semester)
                       : parse_semester_token(args.rec_semester);

    StudentSequence history;
    history.student_id = student->student_id;
    for (const auto& sem : student->semesters)
        if (sem.semester < rec) history.semesters.push_back(sem);
    if (history.semesters.empty())
        throw std::runtime_error("student has no history before " + rec.str());

    CandidateFilterContext ctx;
    if (!args.pairs_file.empty()) ctx.prereq_pairs = parse_prereq_pairs_csv_file(args.pairs_file);
    ctx.availability = availability_for_term(dataset, loaded.vocab, rec.term);
    for (const auto& sem : history.semesters)
        for (const auto& e : sem.enrollments)
            if (auto idx = loaded.vocab.course_index(e.course)) ctx.taken.insert(*idx);

    Threshold goal = args.goal.empty() ? loaded.model.threshold : Threshold::parse(args.goal);
    ctx.threshold = goal;
    int target = loaded.vocab.require_course_index(parse_course_arg(args.target));

    std::printf("recommending for %s in %s (target %s, goal %s)\n", args.student.c_str(),
                rec.str().c_str(), parse_course_arg(args.target).id.c_str(), goal.name());
    auto recs =
        recommend(loaded.model, history, target, goal, loaded.vocab, ctx, args.top_k);
    print_recommendations(recs);
}

// --- gradcheck ---------------------------------------------------------

struct GradcheckArgs {
    int model_kind = 2;
    std::uint64_t seed = 1;
    double epsilon = 1e-5;
};

int run_gradcheck(const GradcheckArgs& args) {
    ModelDims dims{3, 2, 2, 4, 3};
    std::mt19937_64 rng(args.seed);
    Model model = init_model(model_kind_from_int(args.model_kind), dims,
                             Threshold::for_goal(Threshold::Goal::B), args.seed);
    std::vector<EncodedSequence> batch;
    batch.push_back(random_encoded_sequence(model.dims, 3, rng));
    batch.push_back(random_encoded_sequence(model.dims, 3, rng));

    double err = finite_diff_check(model, batch, args.epsilon);
    print_kv("max_relative_error", err);
    return err < 1e-4 ? 0 : 1;
}

}  // namespace

int run(std::vector<std::string> args) {
    CLI::App app{"course enrollment sequence model: grade prediction, prerequisite "
                 "inference and goal-based preparation recommendations"};
    app.require_subcommand(1);

    std::string config_file;  // handled by apply_config_file before parsing
    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic enrollment dataset");
    gen_cmd->add_option("--config", config_file, "flat key=value config file; flags override it");
    gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();
    gen_cmd->add_option("--courses", gen.config.n_courses, "catalog size");
    gen_cmd->add_option("--departments", gen.config.n_departments, "number of departments");
    gen_cmd->add_option("--majors", gen.config.n_majors, "number of majors");
    gen_cmd->add_option("--students", gen.config.n_students, "number of students");
    gen_cmd->add_option("--semesters", gen.config.n_semesters, "number of semesters");
    gen_cmd->add_option("--seed", gen.config.seed, "generator seed");
    gen_cmd->add_option("--p-prepared", gen.config.p_prepared,
                        "P(above threshold) with all planted prereqs passed");
    gen_cmd->add_option("--p-unprepared", gen.config.p_unprepared,
                        "P(above threshold) with a planted prereq missing");
    gen_cmd->add_option("--pnp-fraction", gen.config.pnp_fraction,
                        "fraction of enrollments graded Pass/No-Pass");
    gen_cmd->add_option("--load", gen.config.courses_per_semester, "median courses per semester");
    gen_cmd->add_option("--start-year", gen.config.start_year, "year of the first Fall semester");
    gen_cmd->add_option("--edges", gen.edges_file,
                        "prerequisite-pairs CSV overriding the planted DAG");
    gen_cmd->callback([&gen] { run_gen(gen); });

    TrainArgs tr;
    auto* train_cmd = app.add_subcommand("train", "train a grade-prediction model");
    train_cmd->add_option("--config", config_file, "flat key=value config file; flags override it");
    train_cmd->add_option("--model", tr.model_kind, "model kind (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    train_cmd->add_option("--threshold", tr.threshold, "grade threshold (A or B)");
    train_cmd->add_option("--data", tr.data_file, "enrollment CSV")->required();
    train_cmd->add_option("--split", tr.split, "train_end,val,test as <Year>:<Term>")->required();
    train_cmd->add_option("--out", tr.out_file, "model output file")->required();
    train_cmd->add_option("--min-enrollments", tr.min_enrollments,
                          "drop courses with fewer total enrollments");
    train_cmd->add_option("--epochs", tr.config.epochs, "training epochs");
    train_cmd->add_option("--lr", tr.config.learning_rate, "initial learning rate");
    train_cmd->add_option("--lr-decay", tr.config.lr_decay, "per-epoch learning-rate decay");
    train_cmd->add_option("--weight-decay", tr.config.weight_decay, "L2 weight decay");
    train_cmd->add_option("--clip-norm", tr.config.clip_norm, "global gradient-norm clip");
    train_cmd->add_option("--dropout", tr.config.dropout_rate, "output-layer dropout rate");
    train_cmd->add_option("--batch-size", tr.config.batch_size, "sequences per minibatch");
    train_cmd->add_option("--seed", tr.config.seed, "training seed");
    train_cmd->add_option("--hidden-dim", tr.config.hidden_dim, "LSTM hidden width");
    train_cmd->add_option("--side-dim", tr.config.side_dim, "side-branch width (model 3)");
    train_cmd->callback([&tr] { run_train(tr); });

    EvalGradesArgs eg;
    auto* eval_grades_cmd =
        app.add_subcommand("eval-grades", "grade-prediction accuracy on the test split");
    eval_grades_cmd->add_option("--model-file", eg.common.model_file, "trained model")->required();
    eval_grades_cmd->add_option("--data", eg.data_file, "enrollment CSV")->required();
    eval_grades_cmd->add_option("--split", eg.split, "train_end,val,test as <Year>:<Term>")
        ->required();
    eval_grades_cmd->add_option("--threads", eg.common.threads, "worker threads");
    eval_grades_cmd->callback([&eg] { run_eval_grades(eg); });

    EvalPrereqArgs ep;
    auto* eval_prereq_cmd =
        app.add_subcommand("eval-prereq", "prerequisite recovery against a pair list");
    eval_prereq_cmd->add_option("--model-file", ep.common.model_file, "trained model")->required();
    eval_prereq_cmd->add_option("--pairs", ep.pairs_file, "prerequisite pairs CSV")->required();
    eval_prereq_cmd->add_option("--top", ep.top_k, "ranking cutoff");
    eval_prereq_cmd->add_option("--threads", ep.common.threads, "worker threads");
    eval_prereq_cmd->callback([&ep] { run_eval_prereq(ep); });

    EvalGoalArgs ego;
    auto* eval_goal_cmd =
        app.add_subcommand("eval-goal", "back-test recommendations against actual enrollments");
    eval_goal_cmd->add_option("--model-file", ego.common.model_file, "trained model")->required();
    eval_goal_cmd->add_option("--data", ego.data_file, "enrollment CSV")->required();
    eval_goal_cmd->add_option("--pairs", ego.pairs_file, "prerequisite pairs CSV")->required();
    eval_goal_cmd->add_option("--target-semester", ego.target_semester, "<Year>:<Term>")
        ->required();
    eval_goal_cmd->add_option("--rec-semester", ego.rec_semester, "<Year>:<Term>")->required();
    eval_goal_cmd->add_option("--goal", ego.goal, "grade goal (defaults to the model threshold)");
    eval_goal_cmd->add_option("--targets", ego.targets,
                              "explicit target courses ('<Dept> <Num>'), else auto-selected");
    eval_goal_cmd->add_option("--num-targets", ego.num_targets,
                              "how many difficult courses to auto-select");
    eval_goal_cmd->add_option("--min-takers", ego.min_takers,
                              "minimum letter-graded takers for auto-selection");
    eval_goal_cmd->add_option("--min-level", ego.min_level,
                              "lowest course level auto-selection considers")
        ->check(CLI::IsMember({"lower", "upper", "graduate"}));
    eval_goal_cmd->add_option("--top", ego.top_k, "ranking cutoff");
    eval_goal_cmd->add_option("--threads", ego.common.threads, "worker threads");
    eval_goal_cmd->callback([&ego] { run_eval_goal(ego); });

    InferPrereqArgs ip;
    auto* infer_cmd = app.add_subcommand("infer-prereq", "rank prerequisite candidates for a course");
    infer_cmd->add_option("--model-file", ip.common.model_file, "trained model")->required();
    infer_cmd->add_option("--pairs", ip.pairs_file, "prerequisite pairs CSV (department filter)");
    infer_cmd->add_option("--target", ip.target, "target course '<Dept> <Num>'")->required();
    infer_cmd->add_option("--top", ip.top_k, "ranking cutoff");
    infer_cmd->callback([&ip] { run_infer_prereq(ip); });

    RecommendArgs rec;
    auto* rec_cmd =
        app.add_subcommand("recommend", "personalized preparation courses for a student");
    rec_cmd->add_option("--model-file", rec.common.model_file, "trained model")->required();
    rec_cmd->add_option("--data", rec.data_file, "enrollment CSV")->required();
    rec_cmd->add_option("--student", rec.student, "student id")->required();
    rec_cmd->add_option("--target", rec.target, "target course '<Dept> <Num>'")->required();
    rec_cmd->add_option("--goal", rec.goal, "grade goal (defaults to the model threshold)");
    rec_cmd->add_option("--rec-semester", rec.rec_semester,
                        "semester to recommend for (default: after the student's last)");
    rec_cmd->add_option("--pairs", rec.pairs_file, "prerequisite pairs CSV (department filter)");
    rec_cmd->add_option("--top", rec.top_k, "ranking cutoff");
    rec_cmd->callback([&rec] { run_recommend(rec); });

    GradcheckArgs gc;
    int gradcheck_status = 0;
    auto* gradcheck_cmd =
        app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
    gradcheck_cmd->add_option("--model", gc.model_kind, "model kind (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    gradcheck_cmd->add_option("--seed", gc.seed, "random seed");
    gradcheck_cmd->add_option("--epsilon", gc.epsilon, "central-difference step");
    gradcheck_cmd->callback([&gc, &gradcheck_status] { gradcheck_status = run_gradcheck(gc); });

    try {
        apply_config_file(args);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }

    std::vector<const char*> argv;
    argv.push_back("cseer");
    for (const auto& arg : args) argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return gradcheck_status;
}

}  // namespace cseer::cli

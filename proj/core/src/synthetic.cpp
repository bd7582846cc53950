#include "cseer/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <stdexcept>

namespace cseer {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

const char* kDeptNames[] = {"Physics",   "Biology", "Chemistry",  "Geology",
                            "Astronomy", "History", "Philosophy", "Economics"};

std::string dept_name(int index) {
    if (index < static_cast<int>(std::size(kDeptNames))) return kDeptNames[index];
    return "Dept" + std::to_string(index + 1);
}

std::string major_name(int index) {
    return dept_name(index);
}

int dept_course_count(int n_courses, int n_departments, int dept) {
    return n_courses / n_departments + (dept < n_courses % n_departments ? 1 : 0);
}

}  // namespace

std::vector<Course> synth_catalog(int n_courses, int n_departments) {
    if (n_courses < 1 || n_departments < 1 || n_departments > n_courses)
        throw std::runtime_error("catalog needs at least one course per department");

    std::vector<Course> catalog;
    catalog.reserve(n_courses);
    for (int c = 0; c < n_courses; ++c) {
        int dept = c % n_departments;
        int slot = c / n_departments;
        int count = dept_course_count(n_courses, n_departments, dept);
        // 40% lower, 40% upper, remainder graduate within each department.
        int lower = std::max(1, (count * 2) / 5);
        int upper = std::max(1, (count * 2) / 5);
        if (lower + upper > count) upper = count - lower;
        int number;
        if (slot < lower) number = 10 + slot;
        else if (slot < lower + upper) number = 100 + (slot - lower);
        else number = 200 + (slot - lower - upper);
        catalog.push_back(make_course(dept_name(dept), number));
    }
    return catalog;
}

std::vector<Semester> synth_semesters(int n_semesters, int start_year) {
    std::vector<Semester> semesters;
    semesters.reserve(n_semesters);
    Semester s{start_year, Term::Fall};
    for (int i = 0; i < n_semesters; ++i) {
        semesters.push_back(s);
        s = next_regular_semester(s);
    }
    return semesters;
}

namespace {

// i-th course of `dept` at `level`, in catalog order.
const Course& band_course(const std::vector<Course>& catalog, const std::string& dept,
                          CourseLevel level, int i) {
    int seen = 0;
    for (const auto& course : catalog) {
        if (course.department != dept || course.level() != level) continue;
        if (seen == i) return course;
        ++seen;
    }
    throw std::runtime_error("default DAG needs more " + std::string(level_name(level)) +
                             "-division courses in " + dept);
}

}  // namespace

SynthConfig default_synth_config() {
    SynthConfig config;
    auto catalog = synth_catalog(config.n_courses, config.n_departments);

    // 20 planted edges. Each department imports prerequisites from both
    // other departments through two distinct targets, so the department
    // filter (which ignores a target's own pairs) always keeps the
    // departments of every planted prerequisite in the candidate pool.
    auto lower = [&](int dept, int i) -> const Course& {
        return band_course(catalog, dept_name(dept), CourseLevel::Lower, i);
    };
    auto upper = [&](int dept, int i) -> const Course& {
        return band_course(catalog, dept_name(dept), CourseLevel::Upper, i);
    };
    auto grad = [&](int dept, int i) -> const Course& {
        return band_course(catalog, dept_name(dept), CourseLevel::Graduate, i);
    };

    for (int d = 0; d < 3; ++d) {
        int next = (d + 1) % 3, prev = (d + 2) % 3;
        config.dag_edges.push_back({lower(d, 0), upper(d, 0)});
        config.dag_edges.push_back({lower(next, 2), upper(d, 2)});
        config.dag_edges.push_back({lower(prev, 3), upper(d, 3)});
        config.dag_edges.push_back({upper(d, 4), grad(d, 0)});
        config.dag_edges.push_back({upper(next, 5), grad(d, 1)});
        config.dag_edges.push_back({lower(prev, 4), grad(d, 0)});
    }
    // Two upper-division targets with a second prerequisite.
    config.dag_edges.push_back({lower(0, 1), upper(0, 0)});
    config.dag_edges.push_back({lower(1, 1), upper(1, 0)});
    return config;
}

namespace {

void validate_config(const SynthConfig& config, const std::vector<Course>& catalog) {
    if (config.n_students < 1 || config.n_semesters < 2 || config.n_majors < 1)
        throw std::runtime_error("synth config needs students, majors and >= 2 semesters");
    if (config.courses_per_semester < 1 || config.courses_per_semester + 1 > config.n_courses)
        throw std::runtime_error("courses_per_semester exceeds the catalog size");
    if (config.p_prepared < 0.0 || config.p_prepared > 1.0 || config.p_unprepared < 0.0 ||
        config.p_unprepared > 1.0 || config.p_prepared < config.p_unprepared)
        throw std::runtime_error("grade probabilities must satisfy 0 <= p_unprepared <= p_prepared <= 1");
    if (config.pnp_fraction < 0.0 || config.pnp_fraction > 1.0)
        throw std::runtime_error("pnp_fraction must be in [0, 1]");

    std::map<Course, int> index;
    for (int i = 0; i < static_cast<int>(catalog.size()); ++i) index[catalog[i]] = i;

    // Level ordering and acyclicity of the planted DAG.
    std::map<int, std::vector<int>> out_edges;
    for (const auto& edge : config.dag_edges) {
        auto p = index.find(edge.prerequisite);
        auto t = index.find(edge.target);
        if (p == index.end() || t == index.end())
            throw std::runtime_error("planted edge references a course outside the catalog");
        if (edge.prerequisite.level() > edge.target.level())
            throw std::runtime_error("planted edge '" + edge.prerequisite.id + "' -> '" +
                                     edge.target.id + "' violates level ordering");
        out_edges[p->second].push_back(t->second);
    }
    // DFS cycle check.
    std::map<int, int> color;  // 0 unseen, 1 active, 2 done
    std::vector<std::pair<int, std::size_t>> stack;
    for (const auto& [start, _] : out_edges) {
        if (color[start]) continue;
        stack.push_back({start, 0});
        color[start] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const auto& succ = out_edges[node];
            if (next == succ.size()) {
                color[node] = 2;
                stack.pop_back();
                continue;
            }
            int child = succ[next++];
            if (color[child] == 1) throw std::runtime_error("planted DAG contains a cycle");
            if (color[child] == 0) {
                color[child] = 1;
                stack.push_back({child, 0});
            }
        }
    }
}

}  // namespace

SynthDataset generate(const SynthConfig& config) {
    auto catalog = synth_catalog(config.n_courses, config.n_departments);
    validate_config(config, catalog);

    std::map<Course, int> catalog_index;
    for (int i = 0; i < static_cast<int>(catalog.size()); ++i) catalog_index[catalog[i]] = i;
    std::vector<std::vector<int>> prereqs_of(catalog.size());
    for (const auto& edge : config.dag_edges)
        prereqs_of[catalog_index.at(edge.target)].push_back(catalog_index.at(edge.prerequisite));

    std::vector<int> dept_of(catalog.size());
    for (int i = 0; i < static_cast<int>(catalog.size()); ++i) {
        for (int d = 0; d < config.n_departments; ++d)
            if (catalog[i].department == dept_name(d)) dept_of[i] = d;
    }

    auto semesters = synth_semesters(config.n_semesters, config.start_year);
    std::mt19937_64 rng(config.seed);

    // Per-course base success rate for courses without planted prerequisites.
    // Lower-division courses span the full prepared/unprepared range (the
    // weed-out happens early); advanced courses without prerequisites sit in
    // the upper part of it. Courses serving as planted prerequisites pass at
    // the prepared rate.
    const double spread = config.p_prepared - config.p_unprepared;
    std::vector<double> base_rate(catalog.size());
    for (int c = 0; c < static_cast<int>(catalog.size()); ++c) {
        double low = catalog[c].level() == CourseLevel::Lower ? config.p_unprepared
                                                              : config.p_unprepared + 0.6 * spread;
        base_rate[c] = low + (config.p_prepared - low) * uniform01(rng);
    }
    for (const auto& edge : config.dag_edges)
        base_rate[catalog_index.at(edge.prerequisite)] = config.p_prepared;

    // Selection preferences: own department, level progression by study
    // stage, and a strong pull toward planted targets once their
    // prerequisites are passed.
    constexpr double kOwnDept = 2.5;
    constexpr double kStageWeight[3][3] = {
        {3.0, 0.8, 0.3},   // lower division
        {0.4, 2.0, 2.0},   // upper division
        {0.02, 0.3, 1.5},  // graduate
    };
    constexpr double kPrepared = 3.5;
    constexpr double kFreshlyPrepared = 3.0;  // a prerequisite passed just last semester
    constexpr double kUnprepared = 0.75;

    SynthDataset out;
    out.planted_edges = config.dag_edges;
    out.data.students.reserve(config.n_students);

    std::vector<double> weights(catalog.size());
    for (int i = 0; i < config.n_students; ++i) {
        StudentSequence student;
        char id[16];
        std::snprintf(id, sizeof(id), "x%06d", 100001 + i);
        student.student_id = id;

        int home = static_cast<int>(rng() % config.n_departments);
        std::set<std::string> majors{major_name(home % config.n_majors)};
        if (config.n_majors > 1 && uniform01(rng) < 0.1)
            majors.insert(major_name((home + 1) % config.n_majors));

        double entry_draw = uniform01(rng);
        int entry = entry_draw < 0.4 ? 0 : entry_draw < 0.6 ? 1 : entry_draw < 0.8 ? 2 : 3;
        entry = std::min(entry, config.n_semesters - 2);

        std::vector<int> passed_sem(catalog.size(), -1);
        std::set<int> taken;

        for (int s = entry; s < config.n_semesters; ++s) {
            int stage = s - entry <= 1 ? 0 : s - entry <= 4 ? 1 : 2;
            double load_draw = uniform01(rng);
            int load = config.courses_per_semester + (load_draw < 0.3 ? -1 : load_draw < 0.75 ? 0 : 1);

            SemesterRecords sem;
            sem.semester = semesters[s];
            sem.majors.assign(majors.begin(), majors.end());

            for (int pick = 0; pick < load; ++pick) {
                double total = 0.0;
                for (int c = 0; c < static_cast<int>(catalog.size()); ++c) {
                    if (taken.contains(c)) {
                        weights[c] = 0.0;
                        continue;
                    }
                    double w = 1.0;
                    if (dept_of[c] == home) w *= kOwnDept;
                    w *= kStageWeight[static_cast<int>(catalog[c].level())][stage];
                    if (!prereqs_of[c].empty()) {
                        bool prepared = true;
                        bool fresh = false;
                        for (int p : prereqs_of[c]) {
                            if (passed_sem[p] < 0 || passed_sem[p] >= s) prepared = false;
                            else if (passed_sem[p] == s - 1) fresh = true;
                        }
                        w *= prepared ? kPrepared * (fresh ? kFreshlyPrepared : 1.0) : kUnprepared;
                    }
                    weights[c] = w;
                    total += w;
                }
                if (total <= 0.0) break;

                double r = uniform01(rng) * total;
                int chosen = -1;
                for (int c = 0; c < static_cast<int>(catalog.size()); ++c) {
                    r -= weights[c];
                    if (r < 0.0 && weights[c] > 0.0) {
                        chosen = c;
                        break;
                    }
                }
                if (chosen < 0) {
                    for (int c = static_cast<int>(catalog.size()) - 1; c >= 0; --c) {
                        if (weights[c] > 0.0) {
                            chosen = c;
                            break;
                        }
                    }
                }
                taken.insert(chosen);

                double p;
                if (prereqs_of[chosen].empty()) {
                    p = base_rate[chosen];
                } else {
                    bool prepared = true;
                    for (int q : prereqs_of[chosen])
                        if (passed_sem[q] < 0 || passed_sem[q] >= s) prepared = false;
                    p = prepared ? config.p_prepared : config.p_unprepared;
                }
                bool above = uniform01(rng) < p;
                bool pnp = uniform01(rng) < config.pnp_fraction;
                Grade grade = pnp ? Grade::pass_no_pass(above) : Grade::letter(above ? "A" : "C");
                if (above) passed_sem[chosen] = s;
                sem.enrollments.push_back(Enrollment{catalog[chosen], grade});
            }

            if (sem.enrollments.empty()) continue;
            std::sort(sem.enrollments.begin(), sem.enrollments.end(),
                      [](const Enrollment& a, const Enrollment& b) { return a.course < b.course; });
            student.semesters.push_back(std::move(sem));
        }

        if (!student.semesters.empty()) out.data.students.push_back(std::move(student));
    }
    return out;
}

double planted_recall(const std::map<int, std::vector<RankedRecommendation>>& recs_by_target,
                      const std::vector<PrereqPair>& edges, const Vocabulary& vocab) {
    if (edges.empty()) throw std::runtime_error("planted DAG is empty");
    long hits = 0;
    for (const auto& edge : edges) {
        auto target = vocab.course_index(edge.target);
        if (!target) continue;
        auto it = recs_by_target.find(*target);
        if (it == recs_by_target.end()) continue;
        bool hit = std::any_of(it->second.begin(), it->second.end(),
                               [&](const RankedRecommendation& r) {
                                   return r.course == edge.prerequisite;
                               });
        if (hit) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(edges.size());
}

EncodedSequence random_encoded_sequence(const ModelDims& dims, int steps, std::mt19937_64& rng) {
    EncodingDims enc = dims.encoding();
    EncodedSequence seq;
    seq.reserve(steps);
    for (int t = 0; t < steps; ++t) {
        EncodedStep step;
        step.grades_in = Eigen::VectorXd::Zero(enc.grade_dim());
        step.coenroll_next = Eigen::VectorXd::Zero(enc.n);
        step.majors_in = Eigen::VectorXd::Zero(enc.k);
        step.label = Eigen::VectorXd::Zero(enc.grade_dim());
        step.label_mask.assign(enc.n, MaskGroup::None);

        for (int course = 0; course < enc.n; ++course) {
            int offset = grade_slot_offset(course, enc);
            if (uniform01(rng) < 0.5)
                step.grades_in[offset + rng() % enc.slot_width()] = 1.0;
            if (uniform01(rng) < 0.5) step.coenroll_next[course] = 1.0;

            double r = uniform01(rng);
            if (r < 1.0 / 3.0) continue;
            if (r < 2.0 / 3.0) {
                step.label[offset + rng() % enc.m] = 1.0;
                step.label_mask[course] = MaskGroup::Letter;
            } else {
                step.label[offset + enc.m + rng() % 2] = 1.0;
                step.label_mask[course] = MaskGroup::PassNoPass;
            }
        }
        for (int j = 0; j < enc.k; ++j)
            if (uniform01(rng) < 0.5) step.majors_in[j] = 1.0;
        seq.push_back(std::move(step));
    }
    return seq;
}

double random_topk_recall(const Vocabulary& vocab, const std::vector<PrereqPair>& edges,
                          int top_k, int trials, std::uint64_t seed) {
    if (edges.empty()) throw std::runtime_error("planted DAG is empty");
    if (trials < 1) throw std::runtime_error("need at least one trial");

    CandidateFilterContext ctx;
    ctx.prereq_pairs = edges;

    // Candidate pool and prerequisite indices per distinct target.
    std::map<int, std::vector<int>> candidates_by_target;
    std::map<int, std::vector<int>> prereqs_by_target;
    for (const auto& edge : edges) {
        auto target = vocab.course_index(edge.target);
        if (!target) continue;
        if (!candidates_by_target.contains(*target)) {
            ctx.target = *target;
            candidates_by_target[*target] =
                filter_candidates(vocab, ctx, FilterMode::PrereqInference);
        }
        if (auto p = vocab.course_index(edge.prerequisite))
            prereqs_by_target[*target].push_back(*p);
    }

    std::mt19937_64 rng(seed);
    double recall_sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        long hits = 0;
        for (auto& [target, candidates] : candidates_by_target) {
            int k = std::min<int>(top_k, static_cast<int>(candidates.size()));
            // Partial Fisher-Yates: the first k entries become the sample.
            for (int j = 0; j < k; ++j) {
                std::size_t pick = j + rng() % (candidates.size() - j);
                std::swap(candidates[j], candidates[pick]);
            }
            for (int p : prereqs_by_target[target]) {
                for (int j = 0; j < k; ++j) {
                    if (candidates[j] == p) {
                        ++hits;
                        break;
                    }
                }
            }
        }
        recall_sum += static_cast<double>(hits) / static_cast<double>(edges.size());
    }
    return recall_sum / trials;
}

}  // namespace cseer

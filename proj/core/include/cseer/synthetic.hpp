#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "cseer/inference.hpp"

namespace cseer {

/// Configuration of the synthetic enrollment generator. The planted DAG is
/// the hidden ground truth used to validate prerequisite recovery; it never
/// appears in the emitted enrollment records.
struct SynthConfig {
    int n_courses = 60;
    int n_departments = 3;
    int n_majors = 3;
    int n_students = 2000;
    int n_semesters = 8;
    std::uint64_t seed = 1;
    std::vector<PrereqPair> dag_edges;  // planted prerequisite relations
    double p_prepared = 0.85;    // P(at/above threshold) with all planted prereqs passed
    double p_unprepared = 0.35;  // same with any planted prereq missing
    double pnp_fraction = 0.15;  // share of enrollments graded Pass/No-Pass
    int courses_per_semester = 4;  // median load
    int start_year = 2012;         // first semester is Fall of this year
};

// Default configuration including the 20-edge planted DAG over the default
// 60-course catalog.
SynthConfig default_synth_config();

// The deterministic course catalog shared by the generator and the default
// DAG construction: courses round-robin over departments, each department
// split into lower/upper/graduate number bands.
std::vector<Course> synth_catalog(int n_courses, int n_departments);

// Fall/Spring semester timeline used by the generator (no Summer terms).
std::vector<Semester> synth_semesters(int n_semesters, int start_year);

struct SynthDataset {
    EnrollmentDataset data;
    std::vector<PrereqPair> planted_edges;  // kept separately as the oracle key
};

// Deterministic for a fixed config. Students sample courses biased toward
// their home department and toward planted targets whose prerequisites they
// have already passed; grades are a two-point Bernoulli on the binarized
// scale (letter A above, C below).
SynthDataset generate(const SynthConfig& config);

// Share of planted edges whose prerequisite appears in the recommendations
// produced for the edge's target. Targets missing from the map count as
// unrecovered.
double planted_recall(const std::map<int, std::vector<RankedRecommendation>>& recs_by_target,
                      const std::vector<PrereqPair>& edges, const Vocabulary& vocab);

// Monte-Carlo estimate of the recall a uniformly random top-k over each
// target's filtered candidate set would achieve; the comparison baseline
// for planted-DAG recovery.
double random_topk_recall(const Vocabulary& vocab, const std::vector<PrereqPair>& edges,
                          int top_k, int trials, std::uint64_t seed);

// Random but well-formed encoded sequence at the given dims: every course
// is unlabeled, letter-labeled or P/NP-labeled with a matching one-hot.
// Used by gradient checking and fuzz-style tests.
EncodedSequence random_encoded_sequence(const ModelDims& dims, int steps, std::mt19937_64& rng);

}  // namespace cseer

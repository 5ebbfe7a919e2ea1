#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "pue/core.hpp"

namespace pue::datagen {

// Exposure mechanism: theta(e=1|x) = min(1, C * logistic(h(x))) with
// h(x) = x_pivot * g1(x) + (1 - x_pivot) * g2(x) and
// g(x; i) = x_i1 + 2 x_i2 + 3 x_i3 x_i4 + 4 x_i5 + 5 x_i6^2.
// Indices are 1-based and wrap modulo the dataset dimension.
struct ExposureSpec {
    double target_marginal = 0.5;
    int pivot_index = 13;
    std::array<int, 6> g1_indices = {2, 3, 4, 5, 6, 6};
    std::array<int, 6> g2_indices = {7, 8, 9, 10, 11, 12};

    void validate() const;
};

struct SplitSpec {
    double split_ratio = 0.3;  // D^PU share of the non-test pool
    std::size_t test_count = 300;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Problem { Pue, ThreeSe, Pe, Fpue, Sse };

Problem problem_from_name(const std::string& name);
std::string problem_name(Problem p);

struct SplitResult {
    LabeledSampleSet test;  // features + y_oracle
    LabeledSampleSet pool;  // all columns; transductive evaluation only
    std::optional<LabeledSampleSet> d_pu, d_e, d_p, d_u, d_sse;
    double class_prior = 0.0;  // mean W over the pool
};

// Sparse `label idx:val` text format, 1-based indices. Labels {+1,-1},
// {1,2} or {0,1} are normalized to {1,0}. Features are min-max scaled to
// [0,1] per column.
LabeledSampleSet parse_sparse_dataset(const std::string& path,
                                      std::optional<std::size_t> declared_dim = {});

double exposure_probability(const FeatureVector& x, const ExposureSpec& spec, double c);

// Bisection on c so the mean exposure probability over `data` hits
// spec.target_marginal within 1e-6.
double calibrate_c(const LabeledSampleSet& data, const ExposureSpec& spec);

// Draws E ~ Bernoulli(theta(e=1|x)) independently of Y given x and sets
// W = E * Y. Requires y_oracle.
LabeledSampleSet synthesize_observations(const LabeledSampleSet& data,
                                         const ExposureSpec& spec, double c,
                                         std::uint64_t seed);

// Removes test_count rows uniformly at random, then partitions the rest
// into the role datasets of the requested problem.
SplitResult split_for_problem(const LabeledSampleSet& data, Problem problem,
                              const SplitSpec& split);

// Uniform subsample without replacement, deterministic per seed.
LabeledSampleSet subsample(const LabeledSampleSet& data, std::size_t n, std::uint64_t seed);

// Columnar CSV with header `w,e,y_oracle,x1..xd`; absent columns omitted.
void write_csv(const LabeledSampleSet& data, const std::string& path);

}  // namespace pue::datagen

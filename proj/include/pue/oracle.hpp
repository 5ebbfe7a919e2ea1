#pragma once

#include <cstdint>
#include <vector>

#include "pue/core.hpp"

namespace pue::oracle {

// Finite feature space with exact conditional tables. Y and E are drawn
// independently given the point, so strong ignorability holds structurally.
struct DiscretePopulation {
    std::vector<FeatureVector> points;
    std::vector<double> zeta;      // point masses, sum to 1
    std::vector<double> p_y1;      // p(y=1|x) per point
    std::vector<double> theta_e1;  // theta(e=1|x) per point, in (0, 1]

    std::size_t size() const { return points.size(); }
    void validate() const;
};

// q(w=1|x) = p(y=1|x) * theta(e=1|x).
double q_w1(const DiscretePopulation& pop, std::size_t point_index);

// Max residual of p(y=1|x) = q(w=1|x) + p(y=1|x) * theta(e=0|x) over all points.
double identification_check(const DiscretePopulation& pop);

struct LemmaResult {
    double value = 0.0;
    bool boundary = false;  // stationary point fell outside (eps, 1-eps), clamped
};

// Pointwise minimizer of the pseudo risk: q1 + f_dagger * theta_e0.
LemmaResult lemma_minimizer(double q1, double f_dagger, double theta_e0);

// Independent check for lemma_minimizer: minimize a*loss(b,1) + (1-a)*loss(b,0)
// by exhaustive grid search over b (coarse pass then local refinement at `step`).
double grid_minimize_pointwise(double a, double step = 1e-6);

// Iterates f_t = q1 + f_{t-1} * theta_e0 and returns [f_0, ..., f_T].
// Cross-checked internally against the closed geometric form.
std::vector<double> theorem_recursion(double q1, double theta_e0, double f0, int rounds);

// Accuracy of the Bayes classifier 1[p(y=1|x) >= 1/2].
double bayes_accuracy(const DiscretePopulation& pop);

// Exact ideal risk of a scorer under the population and the log loss.
double ideal_risk(const DiscretePopulation& pop, const LinearScorer& f);

// Draws n i.i.d. rows with y_oracle, e and w columns (w = e * y).
LabeledSampleSet sample_from(const DiscretePopulation& pop, std::size_t n,
                             std::uint64_t seed);

}  // namespace pue::oracle

#include "pue/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "pue/rng.hpp"

namespace pue::oracle {

void DiscretePopulation::validate() const {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("population: empty support");
    if (zeta.size() != n || p_y1.size() != n || theta_e1.size() != n) {
        throw std::invalid_argument("population: table length mismatch");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(zeta[i] >= 0.0)) throw std::invalid_argument("population: negative mass");
        if (!(p_y1[i] >= 0.0 && p_y1[i] <= 1.0)) {
            throw std::invalid_argument("population: p_y1 outside [0, 1]");
        }
        if (!(theta_e1[i] > 0.0 && theta_e1[i] <= 1.0)) {
            throw std::invalid_argument("population: theta_e1 outside (0, 1]");
        }
        mass += zeta[i];
    }
    if (std::abs(mass - 1.0) > 1e-12) {
        throw std::invalid_argument("population: masses do not sum to 1");
    }
}

double q_w1(const DiscretePopulation& pop, std::size_t point_index) {
    if (point_index >= pop.size()) {
        throw std::out_of_range("population: point index out of range");
    }
    return pop.p_y1[point_index] * pop.theta_e1[point_index];
}

double identification_check(const DiscretePopulation& pop) {
    double worst = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double rhs = q_w1(pop, i) + pop.p_y1[i] * (1.0 - pop.theta_e1[i]);
        worst = std::max(worst, std::abs(pop.p_y1[i] - rhs));
    }
    return worst;
}

LemmaResult lemma_minimizer(double q1, double f_dagger, double theta_e0) {
    if (!(q1 >= 0.0 && q1 <= 1.0) || !(f_dagger >= 0.0 && f_dagger <= 1.0) ||
        !(theta_e0 >= 0.0 && theta_e0 <= 1.0)) {
        throw std::invalid_argument("lemma_minimizer: inputs must lie in [0, 1]");
    }
    const double stationary = q1 + f_dagger * theta_e0;
    LemmaResult res;
    res.value = stationary;
    if (stationary < kProbEps) {
        res.value = kProbEps;
        res.boundary = true;
    } else if (stationary > 1.0 - kProbEps) {
        res.value = 1.0 - kProbEps;
        res.boundary = true;
    }
    return res;
}

double grid_minimize_pointwise(double a, double step) {
    // Objective a*(-ln b) + (1-a)*(-ln(1-b)) is convex in b, so a coarse
    // scan followed by a fine scan around the coarse argmin is exhaustive.
    auto objective = [a](double b) { return a * log_loss(b, 1) + (1.0 - a) * log_loss(b, 0); };
    const double coarse = 1e-3;
    double best_b = kProbEps;
    double best_v = objective(best_b);
    for (double b = coarse; b < 1.0; b += coarse) {
        const double bb = std::min(b, 1.0 - kProbEps);
        const double v = objective(bb);
        if (v < best_v) {
            best_v = v;
            best_b = bb;
        }
    }
    const double lo = std::max(kProbEps, best_b - 2.0 * coarse);
    const double hi = std::min(1.0 - kProbEps, best_b + 2.0 * coarse);
    for (double b = lo; b <= hi; b += step) {
        const double v = objective(b);
        if (v < best_v) {
            best_v = v;
            best_b = b;
        }
    }
    return best_b;
}

std::vector<double> theorem_recursion(double q1, double theta_e0, double f0, int rounds) {
    if (!(theta_e0 >= 0.0 && theta_e0 < 1.0)) {
        throw std::invalid_argument(
            "theorem_recursion: theta_e0 must lie in [0, 1); theta_e0 = 1 means no "
            "exposure anywhere and the recursion diverges");
    }
    if (!(q1 >= 0.0 && q1 <= 1.0) || !(f0 >= 0.0 && f0 <= 1.0)) {
        throw std::invalid_argument("theorem_recursion: q1 and f0 must lie in [0, 1]");
    }
    if (rounds < 0) throw std::invalid_argument("theorem_recursion: negative round count");

    std::vector<double> seq;
    seq.reserve(static_cast<std::size_t>(rounds) + 1);
    seq.push_back(f0);
    for (int t = 1; t <= rounds; ++t) {
        seq.push_back(q1 + seq.back() * theta_e0);
    }
    // Closed geometric form cross-check.
    const double pow_t = std::pow(theta_e0, rounds);
    const double closed = theta_e0 == 0.0 && rounds == 0
                              ? f0
                              : q1 * (1.0 - pow_t) / (1.0 - theta_e0) + f0 * pow_t;
    if (std::abs(seq.back() - closed) > 1e-12) {
        throw std::logic_error("theorem_recursion: closed-form cross-check failed");
    }
    return seq;
}

double bayes_accuracy(const DiscretePopulation& pop) {
    double acc = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        acc += pop.zeta[i] * std::max(pop.p_y1[i], 1.0 - pop.p_y1[i]);
    }
    return acc;
}

double ideal_risk(const DiscretePopulation& pop, const LinearScorer& f) {
    double risk = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const double p = f.score(pop.points[i]);
        risk += pop.zeta[i] *
                (pop.p_y1[i] * log_loss(p, 1) + (1.0 - pop.p_y1[i]) * log_loss(p, 0));
    }
    return risk;
}

LabeledSampleSet sample_from(const DiscretePopulation& pop, std::size_t n,
                             std::uint64_t seed) {
    pop.validate();
    if (n == 0) throw std::invalid_argument("sample_from: empty sample requested");

    // Cumulative masses for the point draw.
    std::vector<double> cum(pop.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        acc += pop.zeta[i];
        cum[i] = acc;
    }
    cum.back() = 1.0;

    Rng rng(seed);
    LabeledSampleSet out;
    out.dim = pop.points.empty() ? 0 : pop.points.front().size();
    out.features.reserve(n);
    out.w = std::vector<std::uint8_t>();
    out.e = std::vector<std::uint8_t>();
    out.y_oracle = std::vector<std::uint8_t>();
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        std::size_t k = 0;
        while (cum[k] < u) ++k;
        const std::uint8_t y = rng.bernoulli(pop.p_y1[k]) ? 1 : 0;
        const std::uint8_t e = rng.bernoulli(pop.theta_e1[k]) ? 1 : 0;
        out.features.push_back(pop.points[k]);
        out.y_oracle->push_back(y);
        out.e->push_back(e);
        out.w->push_back(static_cast<std::uint8_t>(e * y));
    }
    out.validate();
    return out;
}

}  // namespace pue::oracle

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pue {

// Probability clamp. Keeps -log terms bounded (~16.1) so gradients stay finite.
inline constexpr double kProbEps = 1e-7;

using FeatureVector = std::vector<double>;

// Logistic link, clamped to [kProbEps, 1 - kProbEps]. Rejects non-finite input.
inline double logistic(double z) {
    if (!std::isfinite(z)) {
        throw std::invalid_argument("logistic: non-finite input");
    }
    double p = 1.0 / (1.0 + std::exp(-z));
    if (p < kProbEps) p = kProbEps;
    if (p > 1.0 - kProbEps) p = 1.0 - kProbEps;
    return p;
}

// Negative log loss: -ln(f) for z = 1, -ln(1 - f) for z = 0.
// Minimizing recovers the conditional probability.
inline double log_loss(double f, int z) {
    return z == 1 ? -std::log(f) : -std::log(1.0 - f);
}

// Threshold at 1/2, boundary included in the positive class.
inline int classify(double f) { return f >= 0.5 ? 1 : 0; }

// Linear model with logistic link: score(x) = logistic(w.x + b).
struct LinearScorer {
    std::vector<double> weights;
    double intercept = 0.0;

    LinearScorer() = default;
    explicit LinearScorer(std::size_t dim) : weights(dim, 0.0) {}

    double raw(std::span<const double> x) const {
        double z = intercept;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            z += weights[k] * x[k];
        }
        return z;
    }

    double score(std::span<const double> x) const { return logistic(raw(x)); }

    std::size_t dim() const { return weights.size(); }
};

// Unified sample container for D^PU, D^E, D^SSE, D^P, D^U and test sets.
// Columns that a role does not carry are absent, not sentinel-valued.
// y_oracle is the hidden true label; trainers never read it.
struct LabeledSampleSet {
    std::vector<FeatureVector> features;
    std::optional<std::vector<std::uint8_t>> w;
    std::optional<std::vector<std::uint8_t>> e;
    std::optional<std::vector<std::uint8_t>> y_oracle;
    std::size_t dim = 0;

    std::size_t size() const { return features.size(); }

    // Invariant checks: column lengths, finiteness, W = E*Y consistency.
    void validate() const {
        const std::size_t n = features.size();
        for (const auto& x : features) {
            if (x.size() != dim) {
                throw std::invalid_argument("sample set: feature row length != dim");
            }
            for (double v : x) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("sample set: non-finite feature value");
                }
            }
        }
        auto check_len = [n](const auto& col, const char* name) {
            if (col && col->size() != n) {
                throw std::invalid_argument(std::string("sample set: column length mismatch: ") + name);
            }
        };
        check_len(w, "w");
        check_len(e, "e");
        check_len(y_oracle, "y_oracle");
        if (w && e) {
            for (std::size_t i = 0; i < n; ++i) {
                if ((*w)[i] == 1 && (*e)[i] != 1) {
                    throw std::invalid_argument("sample set: w=1 requires e=1 (W = E*Y)");
                }
                if (y_oracle && (*w)[i] != (*e)[i] * (*y_oracle)[i]) {
                    throw std::invalid_argument("sample set: w != e*y_oracle");
                }
            }
        }
    }

    void require_column(const std::optional<std::vector<std::uint8_t>>& col,
                        const char* column, const char* role) const {
        if (!col) {
            throw std::invalid_argument(std::string("dataset '") + role +
                                        "' is missing required column '" + column + "'");
        }
    }
};

}  // namespace pue

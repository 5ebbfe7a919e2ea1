#include "pue/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pue/rng.hpp"

namespace pue::datagen {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

void min_max_scale(LabeledSampleSet& data) {
    if (data.size() == 0) return;
    std::vector<double> lo(data.dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(data.dim, -std::numeric_limits<double>::infinity());
    for (const auto& x : data.features) {
        for (std::size_t k = 0; k < data.dim; ++k) {
            lo[k] = std::min(lo[k], x[k]);
            hi[k] = std::max(hi[k], x[k]);
        }
    }
    for (auto& x : data.features) {
        for (std::size_t k = 0; k < data.dim; ++k) {
            const double range = hi[k] - lo[k];
            x[k] = range > 0.0 ? (x[k] - lo[k]) / range : 0.0;
        }
    }
}

// Copy selected rows, keeping only the requested columns (y_oracle always
// travels along; it is private to evaluation).
LabeledSampleSet take_rows(const LabeledSampleSet& src, const std::vector<std::size_t>& rows,
                           bool keep_w, bool keep_e) {
    LabeledSampleSet out;
    out.dim = src.dim;
    out.features.reserve(rows.size());
    if (keep_w && src.w) out.w = std::vector<std::uint8_t>();
    if (keep_e && src.e) out.e = std::vector<std::uint8_t>();
    if (src.y_oracle) out.y_oracle = std::vector<std::uint8_t>();
    for (std::size_t i : rows) {
        out.features.push_back(src.features[i]);
        if (out.w) out.w->push_back((*src.w)[i]);
        if (out.e) out.e->push_back((*src.e)[i]);
        if (out.y_oracle) out.y_oracle->push_back((*src.y_oracle)[i]);
    }
    return out;
}

std::size_t wrap_index(int one_based, std::size_t dim) {
    return static_cast<std::size_t>(one_based - 1) % dim;
}

double g_polynomial(const FeatureVector& x, const std::array<int, 6>& idx) {
    const std::size_t d = x.size();
    const double a = x[wrap_index(idx[0], d)];
    const double b = x[wrap_index(idx[1], d)];
    const double c = x[wrap_index(idx[2], d)];
    const double e = x[wrap_index(idx[3], d)];
    const double f = x[wrap_index(idx[4], d)];
    const double g = x[wrap_index(idx[5], d)];
    return a + 2.0 * b + 3.0 * c * e + 4.0 * f + 5.0 * g * g;
}

}  // namespace

void ExposureSpec::validate() const {
    if (!(target_marginal > 0.0 && target_marginal < 1.0)) {
        throw std::invalid_argument("exposure: target_marginal must lie in (0, 1)");
    }
    auto check_positive = [](int idx) {
        if (idx < 1) throw std::invalid_argument("exposure: indices are 1-based");
    };
    check_positive(pivot_index);
    for (int i : g1_indices) check_positive(i);
    for (int i : g2_indices) check_positive(i);
}

void SplitSpec::validate() const {
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw std::invalid_argument("split: split_ratio must lie in (0, 1)");
    }
    if (test_count == 0) throw std::invalid_argument("split: test_count must be positive");
}

Problem problem_from_name(const std::string& name) {
    if (name == "pue") return Problem::Pue;
    if (name == "3se") return Problem::ThreeSe;
    if (name == "pe") return Problem::Pe;
    if (name == "fpue") return Problem::Fpue;
    if (name == "sse") return Problem::Sse;
    throw std::invalid_argument("unknown problem kind: " + name);
}

std::string problem_name(Problem p) {
    switch (p) {
        case Problem::Pue: return "pue";
        case Problem::ThreeSe: return "3se";
        case Problem::Pe: return "pe";
        case Problem::Fpue: return "fpue";
        case Problem::Sse: return "sse";
    }
    throw std::logic_error("unknown problem");
}

LabeledSampleSet parse_sparse_dataset(const std::string& path,
                                      std::optional<std::size_t> declared_dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::vector<double> raw_labels;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
    std::size_t max_index = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        double label;
        if (!(ls >> label)) parse_fail(path, line_no, "malformed label");
        std::vector<std::pair<std::size_t, double>> entries;
        std::string tok;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) parse_fail(path, line_no, "malformed entry '" + tok + "'");
            std::size_t idx;
            double val;
            try {
                idx = std::stoul(tok.substr(0, colon));
                val = std::stod(tok.substr(colon + 1));
            } catch (const std::exception&) {
                parse_fail(path, line_no, "malformed entry '" + tok + "'");
            }
            if (idx == 0) parse_fail(path, line_no, "feature indices are 1-based");
            if (declared_dim && idx > *declared_dim) {
                parse_fail(path, line_no,
                           "feature index " + std::to_string(idx) + " exceeds declared dimension " +
                               std::to_string(*declared_dim));
            }
            max_index = std::max(max_index, idx);
            entries.emplace_back(idx - 1, val);
        }
        raw_labels.push_back(label);
        rows.push_back(std::move(entries));
    }
    if (rows.empty()) throw std::runtime_error("dataset file has no samples: " + path);

    // Normalize label alphabet to {1, 0}.
    std::set<double> alphabet(raw_labels.begin(), raw_labels.end());
    auto to_binary = [&](double v) -> std::uint8_t {
        if (alphabet == std::set<double>{-1.0, 1.0} || alphabet == std::set<double>{1.0} ||
            alphabet == std::set<double>{-1.0}) {
            return v > 0.0 ? 1 : 0;
        }
        if (alphabet == std::set<double>{1.0, 2.0} || alphabet == std::set<double>{2.0}) {
            return v == 1.0 ? 1 : 0;
        }
        if (alphabet == std::set<double>{0.0, 1.0} || alphabet == std::set<double>{0.0}) {
            return v == 1.0 ? 1 : 0;
        }
        throw std::runtime_error(path + ": unsupported label alphabet");
    };

    LabeledSampleSet data;
    data.dim = declared_dim ? *declared_dim : max_index;
    data.y_oracle = std::vector<std::uint8_t>();
    data.features.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        FeatureVector x(data.dim, 0.0);
        for (const auto& [idx, val] : rows[i]) x[idx] = val;
        data.features.push_back(std::move(x));
        data.y_oracle->push_back(to_binary(raw_labels[i]));
    }
    min_max_scale(data);
    data.validate();
    return data;
}

double exposure_probability(const FeatureVector& x, const ExposureSpec& spec, double c) {
    spec.validate();
    if (!(c > 0.0)) throw std::invalid_argument("exposure: c must be > 0");
    const double pivot = x[wrap_index(spec.pivot_index, x.size())];
    const double h = pivot * g_polynomial(x, spec.g1_indices) +
                     (1.0 - pivot) * g_polynomial(x, spec.g2_indices);
    return std::min(1.0, c / (1.0 + std::exp(-h)));
}

double calibrate_c(const LabeledSampleSet& data, const ExposureSpec& spec) {
    spec.validate();
    if (data.size() == 0) throw std::invalid_argument("calibrate_c: empty dataset");

    // sigma(h) per row is fixed; only the scale c moves during bisection.
    std::vector<double> sigma(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        sigma[i] = exposure_probability(data.features[i], spec, 1.0);
    }
    auto mean_at = [&](double c) {
        double acc = 0.0;
        for (double s : sigma) acc += std::min(1.0, c * s);
        return acc / static_cast<double>(sigma.size());
    };

    constexpr double kTol = 1e-6;
    constexpr double kMaxC = 1e6;
    double hi = 1.0;
    while (mean_at(hi) < spec.target_marginal) {
        hi *= 2.0;
        if (hi > kMaxC) {
            throw std::runtime_error("calibrate_c: target marginal unreachable with c <= 1e6");
        }
    }
    double lo = 0.0;
    double c = hi;
    for (int iter = 0; iter < 200; ++iter) {
        c = 0.5 * (lo + hi);
        const double m = mean_at(c);
        if (std::abs(m - spec.target_marginal) <= kTol) return c;
        (m < spec.target_marginal ? lo : hi) = c;
    }
    if (std::abs(mean_at(c) - spec.target_marginal) > kTol) {
        throw std::runtime_error("calibrate_c: bisection did not converge");
    }
    return c;
}

LabeledSampleSet synthesize_observations(const LabeledSampleSet& data,
                                         const ExposureSpec& spec, double c,
                                         std::uint64_t seed) {
    data.require_column(data.y_oracle, "y_oracle", "source data");
    LabeledSampleSet out = data;
    out.e = std::vector<std::uint8_t>(data.size());
    out.w = std::vector<std::uint8_t>(data.size());
    Rng rng(seed);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double theta = exposure_probability(data.features[i], spec, c);
        const std::uint8_t e = rng.bernoulli(theta) ? 1 : 0;
        (*out.e)[i] = e;
        (*out.w)[i] = static_cast<std::uint8_t>(e * (*data.y_oracle)[i]);
    }
    out.validate();
    return out;
}

LabeledSampleSet subsample(const LabeledSampleSet& data, std::size_t n, std::uint64_t seed) {
    if (n > data.size()) throw std::invalid_argument("subsample: n exceeds dataset size");
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    shuffle(idx, rng);
    idx.resize(n);
    return take_rows(data, idx, true, true);
}

SplitResult split_for_problem(const LabeledSampleSet& data, Problem problem,
                              const SplitSpec& split) {
    split.validate();
    data.require_column(data.w, "w", "observation data");
    data.require_column(data.e, "e", "observation data");
    if (split.test_count >= data.size()) {
        throw std::invalid_argument("split: test_count must be smaller than the dataset");
    }

    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(split.seed);
    shuffle(idx, rng);

    const std::vector<std::size_t> test_rows(idx.begin(),
                                             idx.begin() + static_cast<long>(split.test_count));
    const std::vector<std::size_t> pool_rows(idx.begin() + static_cast<long>(split.test_count),
                                             idx.end());
    const std::size_t m = pool_rows.size();

    SplitResult out;
    out.test = take_rows(data, test_rows, false, false);
    out.pool = take_rows(data, pool_rows, true, true);
    {
        double acc = 0.0;
        for (std::size_t i : pool_rows) acc += (*data.w)[i];
        out.class_prior = acc / static_cast<double>(m);
    }

    auto head = [&](std::size_t k) {
        return std::vector<std::size_t>(pool_rows.begin(), pool_rows.begin() + static_cast<long>(k));
    };
    auto tail = [&](std::size_t k) {
        return std::vector<std::size_t>(pool_rows.begin() + static_cast<long>(k), pool_rows.end());
    };
    auto ceil_share = [m](double share) {
        return static_cast<std::size_t>(std::ceil(share * static_cast<double>(m)));
    };
    auto require_nonempty = [](const std::vector<std::size_t>& rows, const char* role) {
        if (rows.empty()) {
            throw std::runtime_error(std::string("split: too few rows for partition '") + role + "'");
        }
    };

    switch (problem) {
        case Problem::Pue: {
            const std::size_t n_pu = ceil_share(split.split_ratio);
            auto pu_rows = head(n_pu);
            auto e_rows = tail(n_pu);
            require_nonempty(pu_rows, "d_pu");
            require_nonempty(e_rows, "d_e");
            out.d_pu = take_rows(data, pu_rows, true, false);
            out.d_e = take_rows(data, e_rows, false, true);
            break;
        }
        case Problem::ThreeSe: {
            // Ratio convention: D^PU gets the split_ratio share, D^SSE the rest.
            const std::size_t n_sse = ceil_share(1.0 - split.split_ratio);
            auto sse_rows = head(n_sse);
            auto pu_rows = tail(n_sse);
            require_nonempty(sse_rows, "d_sse");
            require_nonempty(pu_rows, "d_pu");
            out.d_sse = take_rows(data, sse_rows, true, true);
            out.d_pu = take_rows(data, pu_rows, true, false);
            break;
        }
        case Problem::Pe:
        case Problem::Fpue: {
            std::vector<std::size_t> pos_rows, rest_rows;
            for (std::size_t i : pool_rows) {
                ((*data.w)[i] == 1 ? pos_rows : rest_rows).push_back(i);
            }
            require_nonempty(pos_rows, "d_p");
            out.d_p = take_rows(data, pos_rows, false, false);
            if (problem == Problem::Pe) {
                require_nonempty(rest_rows, "d_e");
                out.d_e = take_rows(data, rest_rows, false, true);
            } else {
                const std::size_t n_u = static_cast<std::size_t>(
                    std::ceil(split.split_ratio * static_cast<double>(rest_rows.size())));
                std::vector<std::size_t> u_rows(rest_rows.begin(),
                                                rest_rows.begin() + static_cast<long>(n_u));
                std::vector<std::size_t> e_rows(rest_rows.begin() + static_cast<long>(n_u),
                                                rest_rows.end());
                require_nonempty(u_rows, "d_u");
                require_nonempty(e_rows, "d_e");
                out.d_u = take_rows(data, u_rows, false, false);
                out.d_e = take_rows(data, e_rows, false, true);
            }
            break;
        }
        case Problem::Sse: {
            out.d_sse = take_rows(data, pool_rows, true, true);
            break;
        }
    }
    return out;
}

void write_csv(const LabeledSampleSet& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    bool first = true;
    auto col = [&](const std::string& name) {
        out << (first ? "" : ",") << name;
        first = false;
    };
    if (data.w) col("w");
    if (data.e) col("e");
    if (data.y_oracle) col("y_oracle");
    for (std::size_t k = 1; k <= data.dim; ++k) col("x" + std::to_string(k));
    out << "\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        first = true;
        auto cell = [&](const std::string& v) {
            out << (first ? "" : ",") << v;
            first = false;
        };
        if (data.w) cell(std::to_string(static_cast<int>((*data.w)[i])));
        if (data.e) cell(std::to_string(static_cast<int>((*data.e)[i])));
        if (data.y_oracle) cell(std::to_string(static_cast<int>((*data.y_oracle)[i])));
        for (double v : data.features[i]) {
            std::ostringstream ss;
            ss.precision(17);
            ss << v;
            cell(ss.str());
        }
        out << "\n";
    }
}

}  // namespace pue::datagen

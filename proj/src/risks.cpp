#include "pue/risks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace pue {

namespace {

// Value + gradient accumulator for sums of c_i * loss(f(x_i), z_i).
// Gradient layout matches RiskEval: weights then intercept.
struct Accum {
    double value = 0.0;
    std::vector<double> grad;

    explicit Accum(std::size_t d) : grad(d + 1, 0.0) {}

    void add(const FeatureVector& x, double p, int z, double c) {
        if (c == 0.0) return;
        value += c * log_loss(p, z);
        const double g = c * (z == 1 ? p - 1.0 : p);
        for (std::size_t k = 0; k < x.size(); ++k) grad[k] += g * x[k];
        grad.back() += g;
    }

    void add_scaled(const Accum& o, double s) {
        value += s * o.value;
        for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += s * o.grad[k];
    }
};

std::vector<double> probs(const LinearScorer& f, const LabeledSampleSet& ds) {
    std::vector<double> p(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) p[i] = f.score(ds.features[i]);
    return p;
}

void check_proxy(std::span<const double> f_dagger, const LabeledSampleSet& host,
                 const char* role) {
    if (f_dagger.size() != host.size()) {
        throw std::invalid_argument(std::string("f_dagger length does not match dataset '") +
                                    role + "'");
    }
    for (double v : f_dagger) {
        if (!(v >= kProbEps && v <= 1.0 - kProbEps)) {
            throw std::invalid_argument("f_dagger value outside [eps, 1-eps]");
        }
    }
}

void check_nonempty(const LabeledSampleSet& ds, const char* role) {
    if (ds.size() == 0) {
        throw std::invalid_argument(std::string("dataset '") + role + "' is empty");
    }
}

void check_prior(double class_prior) {
    if (!(class_prior > 0.0 && class_prior < 1.0)) {
        throw std::invalid_argument("class_prior must lie in (0, 1)");
    }
}

RiskEval finish(Accum&& a, bool clipped) {
    return RiskEval{a.value, std::move(a.grad), clipped};
}

// Shared body of the nnPUE-style risk: positive terms plus a guarded
// negative-class bracket. `positive_sets` and the bracket halves are
// supplied by the callers as accumulators.
RiskEval guard_combine(Accum&& pos, Accum&& bracket) {
    bool clipped = bracket.value < 0.0;
    if (!clipped) pos.add_scaled(bracket, 1.0);
    return finish(std::move(pos), clipped);
}

}  // namespace

std::string risk_kind_name(RiskKind kind) {
    switch (kind) {
        case RiskKind::AdpueAlternate: return "adpue_alternate";
        case RiskKind::AdpueDirect: return "adpue_direct";
        case RiskKind::Nnpue: return "nnpue";
        case RiskKind::Adpe: return "adpe";
        case RiskKind::Adfpue: return "adfpue";
        case RiskKind::Ads: return "ads";
        case RiskKind::Adss: return "adss";
        case RiskKind::Dadss: return "dadss";
        case RiskKind::Ad3se: return "ad3se";
        case RiskKind::Logit: return "logit";
        case RiskKind::Upu: return "upu";
        case RiskKind::Nnpu: return "nnpu";
    }
    throw std::logic_error("unknown risk kind");
}

RiskKind risk_kind_from_name(const std::string& name) {
    static const std::map<std::string, RiskKind> table = {
        {"adpue_alternate", RiskKind::AdpueAlternate},
        {"adpue_direct", RiskKind::AdpueDirect},
        {"nnpue", RiskKind::Nnpue},
        {"adpe", RiskKind::Adpe},
        {"adfpue", RiskKind::Adfpue},
        {"ads", RiskKind::Ads},
        {"adss", RiskKind::Adss},
        {"dadss", RiskKind::Dadss},
        {"ad3se", RiskKind::Ad3se},
        {"logit", RiskKind::Logit},
        {"upu", RiskKind::Upu},
        {"nnpu", RiskKind::Nnpu},
    };
    auto it = table.find(name);
    if (it == table.end()) {
        throw std::invalid_argument("unknown risk kind: " + name);
    }
    return it->second;
}

bool RiskSpec::needs_class_prior() const {
    return kind == RiskKind::Adpe || kind == RiskKind::Adfpue || kind == RiskKind::Upu ||
           kind == RiskKind::Nnpu;
}

bool RiskSpec::uses_proxy() const {
    switch (kind) {
        case RiskKind::Ads:
        case RiskKind::Logit:
        case RiskKind::Upu:
        case RiskKind::Nnpu:
            return false;
        default:
            return true;
    }
}

void RiskSpec::validate() const {
    if (needs_class_prior()) {
        if (!class_prior) {
            throw std::invalid_argument("risk '" + risk_kind_name(kind) +
                                        "' requires class_prior");
        }
        check_prior(*class_prior);
    } else if (class_prior) {
        throw std::invalid_argument("risk '" + risk_kind_name(kind) +
                                    "' does not take class_prior");
    }
    if (kind == RiskKind::Dadss) {
        if (!mix_weight) {
            throw std::invalid_argument("dadss requires mix_weight");
        }
        if (!(*mix_weight >= 0.0 && *mix_weight <= 1.0)) {
            throw std::invalid_argument("mix_weight must lie in [0, 1]");
        }
    } else if (mix_weight) {
        throw std::invalid_argument("mix_weight only applies to dadss");
    }
}

RiskEval risk_pseudo(const LinearScorer& f, std::span<const double> f_dagger,
                     const LabeledSampleSet& d_pu, const LabeledSampleSet& d_e) {
    d_pu.require_column(d_pu.w, "w", "d_pu");
    d_e.require_column(d_e.e, "e", "d_e");
    check_nonempty(d_pu, "d_pu");
    check_nonempty(d_e, "d_e");
    check_proxy(f_dagger, d_e, "d_e");

    Accum acc(f.dim());
    const auto p_pu = probs(f, d_pu);
    const double inv_pu = 1.0 / static_cast<double>(d_pu.size());
    for (std::size_t i = 0; i < d_pu.size(); ++i) {
        const int wi = (*d_pu.w)[i];
        acc.add(d_pu.features[i], p_pu[i], 1, inv_pu * wi);
        acc.add(d_pu.features[i], p_pu[i], 0, inv_pu * (1 - wi));
    }
    const auto p_e = probs(f, d_e);
    const double inv_e = 1.0 / static_cast<double>(d_e.size());
    for (std::size_t i = 0; i < d_e.size(); ++i) {
        const double c = inv_e * f_dagger[i] * (1 - (*d_e.e)[i]);
        acc.add(d_e.features[i], p_e[i], 1, c);
        acc.add(d_e.features[i], p_e[i], 0, -c);
    }
    return finish(std::move(acc), false);
}

RiskEval risk_nnpue(const LinearScorer& f, std::span<const double> f_dagger,
                    const LabeledSampleSet& d_pu, const LabeledSampleSet& d_e) {
    d_pu.require_column(d_pu.w, "w", "d_pu");
    d_e.require_column(d_e.e, "e", "d_e");
    check_nonempty(d_pu, "d_pu");
    check_nonempty(d_e, "d_e");
    check_proxy(f_dagger, d_e, "d_e");

    Accum pos(f.dim());
    Accum bracket(f.dim());
    const auto p_pu = probs(f, d_pu);
    const double inv_pu = 1.0 / static_cast<double>(d_pu.size());
    for (std::size_t i = 0; i < d_pu.size(); ++i) {
        const int wi = (*d_pu.w)[i];
        pos.add(d_pu.features[i], p_pu[i], 1, inv_pu * wi);
        bracket.add(d_pu.features[i], p_pu[i], 0, inv_pu * (1 - wi));
    }
    const auto p_e = probs(f, d_e);
    const double inv_e = 1.0 / static_cast<double>(d_e.size());
    for (std::size_t i = 0; i < d_e.size(); ++i) {
        const double c = inv_e * f_dagger[i] * (1 - (*d_e.e)[i]);
        pos.add(d_e.features[i], p_e[i], 1, c);
        bracket.add(d_e.features[i], p_e[i], 0, -c);
    }
    return guard_combine(std::move(pos), std::move(bracket));
}

RiskEval risk_adpe(const LinearScorer& f, std::span<const double> f_dagger,
                   const LabeledSampleSet& d_p, const LabeledSampleSet& d_e,
                   double class_prior) {
    check_prior(class_prior);
    if (d_p.w || d_p.e) {
        throw std::invalid_argument("dataset 'd_p' must carry no label columns");
    }
    d_e.require_column(d_e.e, "e", "d_e");
    check_nonempty(d_p, "d_p");
    check_nonempty(d_e, "d_e");
    check_proxy(f_dagger, d_e, "d_e");

    Accum pos(f.dim());
    Accum bracket(f.dim());
    const auto p_p = probs(f, d_p);
    const double cp = class_prior / static_cast<double>(d_p.size());
    for (std::size_t i = 0; i < d_p.size(); ++i) {
        pos.add(d_p.features[i], p_p[i], 1, cp);
        bracket.add(d_p.features[i], p_p[i], 0, -cp);
    }
    const auto p_e = probs(f, d_e);
    const double inv_e = 1.0 / static_cast<double>(d_e.size());
    for (std::size_t i = 0; i < d_e.size(); ++i) {
        bracket.add(d_e.features[i], p_e[i], 0, inv_e);
        const double c = inv_e * f_dagger[i] * (1 - (*d_e.e)[i]);
        pos.add(d_e.features[i], p_e[i], 1, c);
        pos.add(d_e.features[i], p_e[i], 0, -c);
    }
    return guard_combine(std::move(pos), std::move(bracket));
}

RiskEval risk_adfpue(const LinearScorer& f, std::span<const double> f_dagger,
                     const LabeledSampleSet& d_p, const LabeledSampleSet& d_u,
                     const LabeledSampleSet& d_e, double class_prior) {
    check_prior(class_prior);
    if (d_p.w || d_p.e) {
        throw std::invalid_argument("dataset 'd_p' must carry no label columns");
    }
    if (d_u.w || d_u.e) {
        throw std::invalid_argument("dataset 'd_u' must carry no label columns");
    }
    d_e.require_column(d_e.e, "e", "d_e");
    check_nonempty(d_p, "d_p");
    check_nonempty(d_e, "d_e");
    check_proxy(f_dagger, d_e, "d_e");

    Accum pos(f.dim());
    Accum bracket(f.dim());
    const auto p_p = probs(f, d_p);
    const double cp = class_prior / static_cast<double>(d_p.size());
    for (std::size_t i = 0; i < d_p.size(); ++i) {
        pos.add(d_p.features[i], p_p[i], 1, cp);
        bracket.add(d_p.features[i], p_p[i], 0, -cp);
    }
    // Joint-set mean over D^U and D^E with equal row weights.
    const double inv_joint = 1.0 / static_cast<double>(d_u.size() + d_e.size());
    const auto p_u = probs(f, d_u);
    for (std::size_t i = 0; i < d_u.size(); ++i) {
        bracket.add(d_u.features[i], p_u[i], 0, inv_joint);
    }
    const auto p_e = probs(f, d_e);
    const double inv_e = 1.0 / static_cast<double>(d_e.size());
    for (std::size_t i = 0; i < d_e.size(); ++i) {
        bracket.add(d_e.features[i], p_e[i], 0, inv_joint);
        const double c = inv_e * f_dagger[i] * (1 - (*d_e.e)[i]);
        pos.add(d_e.features[i], p_e[i], 1, c);
        pos.add(d_e.features[i], p_e[i], 0, -c);
    }
    return guard_combine(std::move(pos), std::move(bracket));
}

RiskEval risk_ads(const LinearScorer& f, const LabeledSampleSet& d_sse) {
    d_sse.require_column(d_sse.w, "w", "d_sse");
    d_sse.require_column(d_sse.e, "e", "d_sse");

    std::size_t n_exposed = 0;
    for (std::size_t i = 0; i < d_sse.size(); ++i) n_exposed += (*d_sse.e)[i];
    if (n_exposed == 0) {
        throw std::runtime_error("ads risk: exposed subset of 'd_sse' is empty");
    }
    Accum acc(f.dim());
    const double inv = 1.0 / static_cast<double>(n_exposed);
    for (std::size_t i = 0; i < d_sse.size(); ++i) {
        if ((*d_sse.e)[i] != 1) continue;
        const double p = f.score(d_sse.features[i]);
        const int wi = (*d_sse.w)[i];
        acc.add(d_sse.features[i], p, 1, inv * wi);
        acc.add(d_sse.features[i], p, 0, inv * (1 - wi));
    }
    return finish(std::move(acc), false);
}

RiskEval risk_adss(const LinearScorer& f, std::span<const double> f_dagger,
                   const LabeledSampleSet& d_sse) {
    d_sse.require_column(d_sse.w, "w", "d_sse");
    d_sse.require_column(d_sse.e, "e", "d_sse");
    check_nonempty(d_sse, "d_sse");
    check_proxy(f_dagger, d_sse, "d_sse");

    Accum acc(f.dim());
    const auto p = probs(f, d_sse);
    const double inv = 1.0 / static_cast<double>(d_sse.size());
    for (std::size_t i = 0; i < d_sse.size(); ++i) {
        const int wi = (*d_sse.w)[i];
        const double c = inv * f_dagger[i] * (1 - (*d_sse.e)[i]);
        acc.add(d_sse.features[i], p[i], 1, inv * wi + c);
        acc.add(d_sse.features[i], p[i], 0, inv * (1 - wi) - c);
    }
    return finish(std::move(acc), false);
}

RiskEval risk_dadss(const LinearScorer& f, std::span<const double> f_dagger,
                    const LabeledSampleSet& d_sse, double mix_weight) {
    if (!(mix_weight >= 0.0 && mix_weight <= 1.0)) {
        throw std::invalid_argument("mix_weight must lie in [0, 1]");
    }
    RiskEval ss = risk_adss(f, f_dagger, d_sse);
    RiskEval l = risk_ads(f, d_sse);
    RiskEval out;
    out.value = mix_weight * ss.value + (1.0 - mix_weight) * l.value;
    out.gradient.resize(ss.gradient.size());
    for (std::size_t k = 0; k < out.gradient.size(); ++k) {
        out.gradient[k] = mix_weight * ss.gradient[k] + (1.0 - mix_weight) * l.gradient[k];
    }
    out.clipped = false;
    return out;
}

RiskEval risk_ad3se(const LinearScorer& f, std::span<const double> f_dagger,
                    const LabeledSampleSet& d_sse, const LabeledSampleSet& d_pu) {
    d_sse.require_column(d_sse.w, "w", "d_sse");
    d_sse.require_column(d_sse.e, "e", "d_sse");
    if (d_pu.size() > 0) d_pu.require_column(d_pu.w, "w", "d_pu");
    check_nonempty(d_sse, "d_sse");
    check_proxy(f_dagger, d_sse, "d_sse");

    Accum pos(f.dim());
    Accum bracket(f.dim());
    const double inv_joint = 1.0 / static_cast<double>(d_sse.size() + d_pu.size());
    const auto p_sse = probs(f, d_sse);
    const double inv_sse = 1.0 / static_cast<double>(d_sse.size());
    for (std::size_t i = 0; i < d_sse.size(); ++i) {
        const int wi = (*d_sse.w)[i];
        pos.add(d_sse.features[i], p_sse[i], 1, inv_joint * wi);
        bracket.add(d_sse.features[i], p_sse[i], 0, inv_joint * (1 - wi));
        const double c = inv_sse * f_dagger[i] * (1 - (*d_sse.e)[i]);
        pos.add(d_sse.features[i], p_sse[i], 1, c);
        bracket.add(d_sse.features[i], p_sse[i], 0, -c);
    }
    const auto p_pu = probs(f, d_pu);
    for (std::size_t i = 0; i < d_pu.size(); ++i) {
        const int wi = (*d_pu.w)[i];
        pos.add(d_pu.features[i], p_pu[i], 1, inv_joint * wi);
        bracket.add(d_pu.features[i], p_pu[i], 0, inv_joint * (1 - wi));
    }
    return guard_combine(std::move(pos), std::move(bracket));
}

RiskEval risk_logit(const LinearScorer& f, const LabeledSampleSet& d_pu) {
    d_pu.require_column(d_pu.w, "w", "d_pu");
    check_nonempty(d_pu, "d_pu");

    Accum acc(f.dim());
    const auto p = probs(f, d_pu);
    const double inv = 1.0 / static_cast<double>(d_pu.size());
    for (std::size_t i = 0; i < d_pu.size(); ++i) {
        const int wi = (*d_pu.w)[i];
        acc.add(d_pu.features[i], p[i], 1, inv * wi);
        acc.add(d_pu.features[i], p[i], 0, inv * (1 - wi));
    }
    return finish(std::move(acc), false);
}

namespace {

// Shared body of uPU/nnPU: positives are the W = 1 rows of d_pu, the
// unlabeled set is all of d_pu.
RiskEval pu_risk(const LinearScorer& f, const LabeledSampleSet& d_pu, double class_prior,
                 bool guard) {
    d_pu.require_column(d_pu.w, "w", "d_pu");
    check_nonempty(d_pu, "d_pu");
    check_prior(class_prior);

    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < d_pu.size(); ++i) n_pos += (*d_pu.w)[i];
    if (n_pos == 0) {
        throw std::runtime_error("pu risk: no positive (w = 1) rows in 'd_pu'");
    }
    Accum pos(f.dim());
    Accum bracket(f.dim());
    const auto p = probs(f, d_pu);
    const double cp = class_prior / static_cast<double>(n_pos);
    const double inv_u = 1.0 / static_cast<double>(d_pu.size());
    for (std::size_t i = 0; i < d_pu.size(); ++i) {
        if ((*d_pu.w)[i] == 1) {
            pos.add(d_pu.features[i], p[i], 1, cp);
            bracket.add(d_pu.features[i], p[i], 0, -cp);
        }
        bracket.add(d_pu.features[i], p[i], 0, inv_u);
    }
    if (!guard) {
        pos.add_scaled(bracket, 1.0);
        return finish(std::move(pos), false);
    }
    return guard_combine(std::move(pos), std::move(bracket));
}

}  // namespace

RiskEval risk_upu(const LinearScorer& f, const LabeledSampleSet& d_pu, double class_prior) {
    return pu_risk(f, d_pu, class_prior, false);
}

RiskEval risk_nnpu(const LinearScorer& f, const LabeledSampleSet& d_pu, double class_prior) {
    return pu_risk(f, d_pu, class_prior, true);
}

namespace {

const LabeledSampleSet& need(const LabeledSampleSet* ds, const char* role) {
    if (!ds) {
        throw std::invalid_argument(std::string("risk evaluation: dataset role '") + role +
                                    "' not provided");
    }
    return *ds;
}

}  // namespace

const LabeledSampleSet* proxy_host(const RiskSpec& spec, const DatasetBundle& data) {
    if (!spec.uses_proxy()) return nullptr;
    switch (spec.kind) {
        case RiskKind::Adss:
        case RiskKind::Dadss:
        case RiskKind::Ad3se:
            return &need(data.d_sse, "d_sse");
        default:
            return &need(data.d_e, "d_e");
    }
}

RiskEval evaluate_risk(const RiskSpec& spec, const LinearScorer& f,
                       const DatasetBundle& data, std::span<const double> f_dagger) {
    spec.validate();
    switch (spec.kind) {
        case RiskKind::AdpueAlternate:
        case RiskKind::AdpueDirect:
        case RiskKind::Nnpue:
            return risk_nnpue(f, f_dagger, need(data.d_pu, "d_pu"), need(data.d_e, "d_e"));
        case RiskKind::Adpe:
            return risk_adpe(f, f_dagger, need(data.d_p, "d_p"), need(data.d_e, "d_e"),
                             *spec.class_prior);
        case RiskKind::Adfpue:
            return risk_adfpue(f, f_dagger, need(data.d_p, "d_p"), need(data.d_u, "d_u"),
                               need(data.d_e, "d_e"), *spec.class_prior);
        case RiskKind::Ads:
            return risk_ads(f, need(data.d_sse, "d_sse"));
        case RiskKind::Adss:
            return risk_adss(f, f_dagger, need(data.d_sse, "d_sse"));
        case RiskKind::Dadss:
            return risk_dadss(f, f_dagger, need(data.d_sse, "d_sse"), *spec.mix_weight);
        case RiskKind::Ad3se:
            return risk_ad3se(f, f_dagger, need(data.d_sse, "d_sse"), need(data.d_pu, "d_pu"));
        case RiskKind::Logit:
            return risk_logit(f, need(data.d_pu, "d_pu"));
        case RiskKind::Upu:
            return risk_upu(f, need(data.d_pu, "d_pu"), *spec.class_prior);
        case RiskKind::Nnpu:
            return risk_nnpu(f, need(data.d_pu, "d_pu"), *spec.class_prior);
    }
    throw std::logic_error("unknown risk kind");
}

}  // namespace pue

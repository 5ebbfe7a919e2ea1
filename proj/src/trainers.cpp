#include "pue/trainers.hpp"

#include <cmath>
#include <stdexcept>

namespace pue {

namespace {

constexpr int kMaxHalvings = 30;

std::size_t bundle_dim(const DatasetBundle& data) {
    for (const LabeledSampleSet* ds : {data.d_pu, data.d_sse, data.d_e, data.d_u, data.d_p}) {
        if (ds) return ds->dim;
    }
    throw std::invalid_argument("training: no datasets provided");
}

// Diagnostic-only accuracy for the trace; picks the first dataset that
// carries hidden oracle labels.
const LabeledSampleSet* trace_target(const DatasetBundle& data) {
    for (const LabeledSampleSet* ds : {data.d_pu, data.d_sse, data.d_e, data.d_u, data.d_p}) {
        if (ds && ds->y_oracle) return ds;
    }
    return nullptr;
}

double oracle_accuracy(const LinearScorer& f, const LabeledSampleSet& ds) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        hits += classify(f.score(ds.features[i])) == (*ds.y_oracle)[i];
    }
    return static_cast<double>(hits) / static_cast<double>(ds.size());
}

struct Objective {
    const RiskSpec& spec;
    const DatasetBundle& data;
    std::span<const double> f_dagger;
    double l2 = 0.0;

    RiskEval operator()(const LinearScorer& f) const {
        RiskEval eval = evaluate_risk(spec, f, data, f_dagger);
        if (l2 > 0.0) {
            double sq = 0.0;
            for (std::size_t k = 0; k < f.weights.size(); ++k) {
                sq += f.weights[k] * f.weights[k];
                eval.gradient[k] += l2 * f.weights[k];
            }
            eval.value += 0.5 * l2 * sq;
        }
        return eval;
    }
};

LinearScorer step(const LinearScorer& f, const std::vector<double>& grad, double lr) {
    LinearScorer next = f;
    for (std::size_t k = 0; k < next.weights.size(); ++k) {
        next.weights[k] -= lr * grad[k];
    }
    next.intercept -= lr * grad.back();
    return next;
}

// Safeguarded descent step: backtrack from the base rate, halving on any risk
// increase. Returns false when 30 halvings still fail to produce a decrease
// (caller stops the run).
template <typename Eval>
bool descend_epoch(LinearScorer& scorer, RiskEval& current, const Eval& objective,
                   double base_lr) {
    double lr = base_lr;
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
        LinearScorer candidate = step(scorer, current.gradient, lr);
        RiskEval eval = objective(candidate);
        if (eval.value <= current.value) {
            scorer = std::move(candidate);
            current = std::move(eval);
            return true;
        }
        lr *= 0.5;
    }
    return false;
}

void record_epoch(TrainTrace& trace, const RiskEval& eval, const LinearScorer& scorer,
                  const LabeledSampleSet* target) {
    EpochRecord rec;
    rec.risk = eval.value;
    rec.clipped = eval.clipped;
    if (target) rec.train_accuracy = oracle_accuracy(scorer, *target);
    trace.epochs.push_back(rec);
}

std::vector<double> proxy_from_scorer(const LinearScorer& f, const LabeledSampleSet& host) {
    std::vector<double> out(host.size());
    for (std::size_t i = 0; i < host.size(); ++i) out[i] = f.score(host.features[i]);
    return out;
}

std::pair<LinearScorer, TrainTrace> alternate_loop(const RiskSpec& spec,
                                                   const DatasetBundle& data,
                                                   const TrainConfig& config) {
    config.validate();
    const LabeledSampleSet* host = proxy_host(spec, data);
    if (!host) throw std::logic_error("alternate_loop: risk has no proxy term");

    std::vector<double> f_dagger(host->size(), config.init_guess);
    LinearScorer scorer(bundle_dim(data));
    TrainTrace trace;
    for (int t = 0; t < config.rounds; ++t) {
        auto [round_scorer, round_trace] =
            minimize(spec, data, f_dagger, config, t == 0 ? nullptr : &scorer);
        scorer = std::move(round_scorer);
        trace.epochs.insert(trace.epochs.end(), round_trace.epochs.begin(),
                            round_trace.epochs.end());
        trace.round_snapshots.push_back(scorer);
        f_dagger = proxy_from_scorer(scorer, *host);
    }
    return {std::move(scorer), std::move(trace)};
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (!(init_guess > kProbEps && init_guess < 1.0 - kProbEps)) {
        throw std::invalid_argument("init_guess must lie in (eps, 1-eps)");
    }
    if (l2_penalty < 0.0) throw std::invalid_argument("l2_penalty must be >= 0");
}

std::size_t TrainTrace::clipped_epochs() const {
    std::size_t n = 0;
    for (const auto& rec : epochs) n += rec.clipped;
    return n;
}

std::pair<LinearScorer, TrainTrace> minimize(const RiskSpec& spec,
                                             const DatasetBundle& data,
                                             std::span<const double> f_dagger,
                                             const TrainConfig& config,
                                             const LinearScorer* warm_start) {
    config.validate();
    spec.validate();

    LinearScorer scorer = warm_start ? *warm_start : LinearScorer(bundle_dim(data));
    const Objective objective{spec, data, f_dagger, config.l2_penalty};
    const LabeledSampleSet* target = trace_target(data);

    RiskEval current = objective(scorer);
    TrainTrace trace;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (!descend_epoch(scorer, current, objective, config.learning_rate)) break;
        record_epoch(trace, current, scorer, target);
    }
    return {std::move(scorer), std::move(trace)};
}

std::pair<LinearScorer, TrainTrace> train_adpue_alternate(const LabeledSampleSet& d_pu,
                                                          const LabeledSampleSet& d_e,
                                                          const TrainConfig& config) {
    DatasetBundle data;
    data.d_pu = &d_pu;
    data.d_e = &d_e;
    return alternate_loop(RiskSpec{RiskKind::Nnpue}, data, config);
}

std::pair<LinearScorer, TrainTrace> train_adpue_direct(const LabeledSampleSet& d_pu,
                                                       const LabeledSampleSet& d_e,
                                                       const TrainConfig& config,
                                                       bool nn_correction) {
    config.validate();
    DatasetBundle data;
    data.d_pu = &d_pu;
    data.d_e = &d_e;
    const LabeledSampleSet* target = trace_target(data);

    LinearScorer scorer(bundle_dim(data));
    TrainTrace trace;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Self-referential proxy, frozen within the epoch.
        const std::vector<double> f_dagger = proxy_from_scorer(scorer, d_e);
        auto eval_at = [&](const LinearScorer& f) {
            RiskEval eval = nn_correction ? risk_nnpue(f, f_dagger, d_pu, d_e)
                                          : risk_pseudo(f, f_dagger, d_pu, d_e);
            if (config.l2_penalty > 0.0) {
                for (std::size_t k = 0; k < f.weights.size(); ++k) {
                    eval.gradient[k] += config.l2_penalty * f.weights[k];
                    eval.value += 0.5 * config.l2_penalty * f.weights[k] * f.weights[k];
                }
            }
            return eval;
        };
        RiskEval current = eval_at(scorer);
        if (!descend_epoch(scorer, current, eval_at, config.learning_rate)) break;
        record_epoch(trace, current, scorer, target);
    }
    trace.round_snapshots.push_back(scorer);
    return {std::move(scorer), std::move(trace)};
}

std::pair<LinearScorer, TrainTrace> train_variant(const RiskSpec& spec,
                                                  const DatasetBundle& data,
                                                  const TrainConfig& config) {
    spec.validate();
    switch (spec.kind) {
        case RiskKind::Ads:
        case RiskKind::Logit:
        case RiskKind::Upu:
        case RiskKind::Nnpu:
            return minimize(spec, data, {}, config);
        case RiskKind::AdpueDirect: {
            if (!data.d_pu || !data.d_e) {
                throw std::invalid_argument("adpue_direct requires d_pu and d_e");
            }
            return train_adpue_direct(*data.d_pu, *data.d_e, config);
        }
        default:
            return alternate_loop(spec, data, config);
    }
}

}  // namespace pue

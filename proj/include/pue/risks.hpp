#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pue/core.hpp"

namespace pue {

enum class RiskKind {
    AdpueAlternate,
    AdpueDirect,
    Nnpue,
    Adpe,
    Adfpue,
    Ads,
    Adss,
    Dadss,
    Ad3se,
    Logit,
    Upu,
    Nnpu,
};

std::string risk_kind_name(RiskKind kind);
RiskKind risk_kind_from_name(const std::string& name);

// Which empirical risk to evaluate plus its hyperparameters.
struct RiskSpec {
    RiskKind kind = RiskKind::Logit;
    std::optional<double> class_prior;  // q(w=1), required by ADPE/ADFPUE/uPU/nnPU
    std::optional<double> mix_weight;   // DADSS weight alpha in [0,1]

    void validate() const;
    bool needs_class_prior() const;
    bool uses_proxy() const;  // has an f-dagger term
};

struct RiskEval {
    double value = 0.0;
    std::vector<double> gradient;  // weights then intercept, length d+1
    bool clipped = false;          // whether the max{., 0} branch engaged
};

// Pseudo classification risk over D^PU and D^E (no non-negative guard).
RiskEval risk_pseudo(const LinearScorer& f, std::span<const double> f_dagger,
                     const LabeledSampleSet& d_pu, const LabeledSampleSet& d_e);

// Pseudo risk with the non-negative correction on the negative-class bracket.
RiskEval risk_nnpue(const LinearScorer& f, std::span<const double> f_dagger,
                    const LabeledSampleSet& d_pu, const LabeledSampleSet& d_e);

// Positive + exposure data with known class prior.
RiskEval risk_adpe(const LinearScorer& f, std::span<const double> f_dagger,
                   const LabeledSampleSet& d_p, const LabeledSampleSet& d_e,
                   double class_prior);

// Fully separated variant: unlabeled negative term averaged over D^U and D^E jointly.
RiskEval risk_adfpue(const LinearScorer& f, std::span<const double> f_dagger,
                     const LabeledSampleSet& d_p, const LabeledSampleSet& d_u,
                     const LabeledSampleSet& d_e, double class_prior);

// Supervised risk over the exposed subset of D^SSE (W = Y there).
RiskEval risk_ads(const LinearScorer& f, const LabeledSampleSet& d_sse);

// Semi-supervised debiased risk over D^SSE; no clipping.
RiskEval risk_adss(const LinearScorer& f, std::span<const double> f_dagger,
                   const LabeledSampleSet& d_sse);

// Convex mix: alpha * ADSS + (1 - alpha) * ADS.
RiskEval risk_dadss(const LinearScorer& f, std::span<const double> f_dagger,
                    const LabeledSampleSet& d_sse, double mix_weight);

// Debiased risk with the positive/negative means taken over D^SSE and D^PU jointly.
RiskEval risk_ad3se(const LinearScorer& f, std::span<const double> f_dagger,
                    const LabeledSampleSet& d_sse, const LabeledSampleSet& d_pu);

// Comparison baselines: plain logistic on W, unbiased PU, non-negative PU.
RiskEval risk_logit(const LinearScorer& f, const LabeledSampleSet& d_pu);
RiskEval risk_upu(const LinearScorer& f, const LabeledSampleSet& d_pu, double class_prior);
RiskEval risk_nnpu(const LinearScorer& f, const LabeledSampleSet& d_pu, double class_prior);

// Dataset roles a risk evaluation may draw on. Non-owning.
struct DatasetBundle {
    const LabeledSampleSet* d_pu = nullptr;
    const LabeledSampleSet* d_e = nullptr;
    const LabeledSampleSet* d_p = nullptr;
    const LabeledSampleSet* d_u = nullptr;
    const LabeledSampleSet* d_sse = nullptr;
};

// Dataset whose rows the proxy f-dagger is indexed by, or nullptr for
// kinds without a proxy term.
const LabeledSampleSet* proxy_host(const RiskSpec& spec, const DatasetBundle& data);

// Dispatch to the matching risk function.
RiskEval evaluate_risk(const RiskSpec& spec, const LinearScorer& f,
                       const DatasetBundle& data, std::span<const double> f_dagger);

}  // namespace pue

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pue/risks.hpp"

namespace pue {

struct TrainConfig {
    double learning_rate = 0.001;
    int epochs = 100;
    int rounds = 10;          // outer alternate rounds T
    double init_guess = 0.5;  // constant initial f-dagger
    std::uint64_t seed = 0;
    double l2_penalty = 0.0;

    void validate() const;
};

struct EpochRecord {
    double risk = 0.0;
    bool clipped = false;
    double train_accuracy = -1.0;  // -1 when no oracle labels available
};

struct TrainTrace {
    std::vector<EpochRecord> epochs;
    std::vector<LinearScorer> round_snapshots;  // final scorer per alternate round
    std::size_t clipped_epochs() const;
};

// Full-batch gradient descent on a fixed risk objective, with a
// step-halving safeguard: a step that increases the risk is retried at
// half the rate, up to 30 halvings, then the run stops early.
// f_dagger, when the risk uses a proxy, stays frozen for the whole run.
std::pair<LinearScorer, TrainTrace> minimize(const RiskSpec& spec,
                                             const DatasetBundle& data,
                                             std::span<const double> f_dagger,
                                             const TrainConfig& config,
                                             const LinearScorer* warm_start = nullptr);

// Alternate learning: round 0 proxy is the constant init_guess; each round
// minimizes the nnPUE risk with the proxy frozen to the previous round's
// scorer evaluated on D^E.
std::pair<LinearScorer, TrainTrace> train_adpue_alternate(const LabeledSampleSet& d_pu,
                                                          const LabeledSampleSet& d_e,
                                                          const TrainConfig& config);

// Direct minimization: the proxy is re-evaluated from the current scorer
// at every epoch and treated as frozen within the epoch (stop-gradient).
// `nn_correction = false` uses the unguarded pseudo risk instead.
std::pair<LinearScorer, TrainTrace> train_adpue_direct(const LabeledSampleSet& d_pu,
                                                       const LabeledSampleSet& d_e,
                                                       const TrainConfig& config,
                                                       bool nn_correction = true);

// Dispatch: alternate-loop machinery for proxy risks, plain minimization
// for ADS/Logit/uPU/nnPU, direct minimization for the adpue_direct kind.
std::pair<LinearScorer, TrainTrace> train_variant(const RiskSpec& spec,
                                                  const DatasetBundle& data,
                                                  const TrainConfig& config);

}  // namespace pue

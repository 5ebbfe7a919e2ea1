#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pue/datagen.hpp"
#include "pue/oracle.hpp"
#include "pue/risks.hpp"
#include "pue/trainers.hpp"

namespace pue::harness {

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    bool precision_defaulted = false;  // no predicted positives, convention 1.0
    bool recall_defaulted = false;     // no true positives, convention 1.0
};

enum class EvalMode { Inductive, Transductive };

// Accuracy/precision/recall of the thresholded scorer against y_oracle.
Metrics evaluate(const LinearScorer& model, const LabeledSampleSet& data);

struct ExperimentConfig {
    std::string dataset_path;  // sparse dataset file, or empty when population set
    std::optional<oracle::DiscretePopulation> population;
    std::size_t population_rows = 0;  // rows drawn per trial when population set
    datagen::Problem problem = datagen::Problem::Pue;
    std::vector<RiskSpec> methods;
    datagen::SplitSpec split;
    datagen::ExposureSpec exposure;
    TrainConfig train;
    int trials = 100;
    std::size_t pool_rows = 0;  // 0 = use the whole dataset; else pool_rows + test_count drawn
    std::uint64_t base_seed = 0;
    std::string output_path;
    std::string output_format = "csv";  // csv | json
    bool emit_trace = false;
    std::string trace_path;

    void validate() const;
};

struct TrialResult {
    int trial = 0;
    Metrics inductive;
    Metrics transductive;
    std::size_t clipped_epochs = 0;
};

struct MethodReport {
    std::string method;
    std::vector<TrialResult> trials;

    double mean_accuracy(EvalMode mode) const;
    double std_accuracy(EvalMode mode) const;
};

struct EvalReport {
    std::vector<MethodReport> methods;              // includes the "majority" calibration row
    std::vector<std::pair<int, std::string>> failures;  // trial index -> diagnostic
    int trials_requested = 0;

    const MethodReport& method(const std::string& name) const;
};

EvalReport run_experiment(const ExperimentConfig& config);

void emit_report(const EvalReport& report, const std::string& path,
                 const std::string& format);
std::string report_to_csv(const EvalReport& report);
std::string report_to_json_string(const EvalReport& report);

// Declarative JSON config, keys mirroring ExperimentConfig fields.
ExperimentConfig load_config(const std::string& path);
oracle::DiscretePopulation population_from_json_file(const std::string& path);

}  // namespace pue::harness

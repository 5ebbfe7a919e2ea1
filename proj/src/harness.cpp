#include "pue/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pue::harness {

using json = nlohmann::ordered_json;

Metrics evaluate(const LinearScorer& model, const LabeledSampleSet& data) {
    data.require_column(data.y_oracle, "y_oracle", "evaluation data");
    if (data.size() == 0) throw std::invalid_argument("evaluate: empty dataset");

    std::size_t tp = 0, fp = 0, fn = 0, hits = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int pred = classify(model.score(data.features[i]));
        const int truth = (*data.y_oracle)[i];
        hits += pred == truth;
        tp += pred == 1 && truth == 1;
        fp += pred == 1 && truth == 0;
        fn += pred == 0 && truth == 1;
    }
    Metrics m;
    m.accuracy = static_cast<double>(hits) / static_cast<double>(data.size());
    if (tp + fp == 0) {
        m.precision = 1.0;
        m.precision_defaulted = true;
    } else {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn == 0) {
        m.recall = 1.0;
        m.recall_defaulted = true;
    } else {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    return m;
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (methods.empty()) throw std::invalid_argument("config: method list is empty");
    if (dataset_path.empty() && !population) {
        throw std::invalid_argument("config: either dataset or population is required");
    }
    if (population && population_rows == 0) {
        throw std::invalid_argument("config: population_rows required with a population");
    }
    if (output_format != "csv" && output_format != "json") {
        throw std::invalid_argument("config: format must be 'csv' or 'json'");
    }
    split.validate();
    exposure.validate();
    train.validate();
}

namespace {

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::vector<double> column(const MethodReport& rep, EvalMode mode,
                           double Metrics::* field) {
    std::vector<double> out;
    out.reserve(rep.trials.size());
    for (const auto& t : rep.trials) {
        const Metrics& m = mode == EvalMode::Inductive ? t.inductive : t.transductive;
        out.push_back(m.*field);
    }
    return out;
}

// Transductive target: the rows the problem leaves unlabeled in the
// training pool (W = 0 for PU-style data, E = 0 for SSE-style data).
LabeledSampleSet transductive_subset(const LabeledSampleSet& pool, datagen::Problem problem) {
    const bool by_exposure =
        problem == datagen::Problem::ThreeSe || problem == datagen::Problem::Sse;
    LabeledSampleSet out;
    out.dim = pool.dim;
    out.y_oracle = std::vector<std::uint8_t>();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const std::uint8_t flag = by_exposure ? (*pool.e)[i] : (*pool.w)[i];
        if (flag == 0) {
            out.features.push_back(pool.features[i]);
            out.y_oracle->push_back((*pool.y_oracle)[i]);
        }
    }
    if (out.size() == 0) throw std::runtime_error("transductive subset is empty");
    return out;
}

Metrics majority_metrics(const LabeledSampleSet& data) {
    double pos = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) pos += (*data.y_oracle)[i];
    const double frac = pos / static_cast<double>(data.size());
    Metrics m;
    const bool predict_positive = frac >= 0.5;
    m.accuracy = predict_positive ? frac : 1.0 - frac;
    if (predict_positive) {
        m.precision = frac;
        m.recall = pos > 0.0 ? 1.0 : 1.0;
        m.recall_defaulted = pos == 0.0;
    } else {
        m.precision = 1.0;
        m.precision_defaulted = true;
        m.recall = pos > 0.0 ? 0.0 : 1.0;
        m.recall_defaulted = pos == 0.0;
    }
    return m;
}

struct TrialData {
    datagen::SplitResult split;
};

RiskSpec resolve_spec(RiskSpec spec, double pool_class_prior) {
    // The generating run's marginal q(w=1) stands in for the known class
    // prior when the config does not pin one.
    if (spec.needs_class_prior() && !spec.class_prior) {
        spec.class_prior = std::clamp(pool_class_prior, 1e-3, 1.0 - 1e-3);
    }
    return spec;
}

DatasetBundle bundle_from_split(const datagen::SplitResult& split) {
    DatasetBundle b;
    if (split.d_pu) b.d_pu = &*split.d_pu;
    if (split.d_e) b.d_e = &*split.d_e;
    if (split.d_p) b.d_p = &*split.d_p;
    if (split.d_u) b.d_u = &*split.d_u;
    if (split.d_sse) b.d_sse = &*split.d_sse;
    return b;
}

void append_trace(std::string& buffer, const std::string& method, int trial,
                  const TrainTrace& trace) {
    std::ostringstream os;
    os << std::setprecision(12);
    for (std::size_t epoch = 0; epoch < trace.epochs.size(); ++epoch) {
        const auto& rec = trace.epochs[epoch];
        os << method << ',' << trial << ',' << epoch << ',' << rec.risk << ','
           << (rec.clipped ? 1 : 0) << ',' << rec.train_accuracy << '\n';
    }
    buffer += os.str();
}

}  // namespace

double MethodReport::mean_accuracy(EvalMode mode) const {
    return mean_of(column(*this, mode, &Metrics::accuracy));
}

double MethodReport::std_accuracy(EvalMode mode) const {
    return std_of(column(*this, mode, &Metrics::accuracy));
}

const MethodReport& EvalReport::method(const std::string& name) const {
    for (const auto& m : methods) {
        if (m.method == name) return m;
    }
    throw std::out_of_range("no such method in report: " + name);
}

EvalReport run_experiment(const ExperimentConfig& config) {
    config.validate();

    std::optional<LabeledSampleSet> base;
    double exposure_c = 0.0;
    if (!config.dataset_path.empty()) {
        base = datagen::parse_sparse_dataset(config.dataset_path);
        exposure_c = datagen::calibrate_c(*base, config.exposure);
    }

    EvalReport report;
    report.trials_requested = config.trials;
    for (const auto& spec : config.methods) {
        report.methods.push_back(MethodReport{risk_kind_name(spec.kind), {}});
    }
    report.methods.push_back(MethodReport{"majority", {}});

    std::string trace_buffer = "method,trial,epoch,risk,clipped,accuracy\n";

    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(trial);
        try {
            LabeledSampleSet observed;
            if (base) {
                LabeledSampleSet subset = *base;
                if (config.pool_rows > 0) {
                    const std::size_t want = config.pool_rows + config.split.test_count;
                    subset = datagen::subsample(*base, std::min(want, base->size()), seed);
                }
                observed = datagen::synthesize_observations(subset, config.exposure, exposure_c,
                                                            seed ^ 0x9e3779b97f4a7c15ULL);
            } else {
                observed = oracle::sample_from(*config.population, config.population_rows, seed);
            }
            datagen::SplitSpec split_spec = config.split;
            split_spec.seed = seed ^ 0xd1b54a32d192ed03ULL;
            auto split = datagen::split_for_problem(observed, config.problem, split_spec);
            const LabeledSampleSet trans = transductive_subset(split.pool, config.problem);
            const DatasetBundle bundle = bundle_from_split(split);

            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                const RiskSpec spec = resolve_spec(config.methods[mi], split.class_prior);
                TrainConfig train = config.train;
                train.seed = seed;
                auto [model, trace] = train_variant(spec, bundle, train);
                TrialResult res;
                res.trial = trial;
                res.inductive = evaluate(model, split.test);
                res.transductive = evaluate(model, trans);
                res.clipped_epochs = trace.clipped_epochs();
                report.methods[mi].trials.push_back(res);
                if (config.emit_trace) {
                    append_trace(trace_buffer, report.methods[mi].method, trial, trace);
                }
            }
            TrialResult maj;
            maj.trial = trial;
            maj.inductive = majority_metrics(split.test);
            maj.transductive = majority_metrics(trans);
            report.methods.back().trials.push_back(maj);
        } catch (const std::exception& ex) {
            report.failures.emplace_back(trial, ex.what());
        }
    }

    if (report.failures.size() * 10 > static_cast<std::size_t>(config.trials)) {
        std::string msg = "experiment failed: more than 10% of trials errored; first: " +
                          report.failures.front().second;
        throw std::runtime_error(msg);
    }

    if (config.emit_trace && !config.trace_path.empty()) {
        std::ofstream out(config.trace_path);
        if (!out) throw std::runtime_error("cannot open trace file: " + config.trace_path);
        out << trace_buffer;
    }
    if (!config.output_path.empty()) {
        emit_report(report, config.output_path, config.output_format);
    }
    return report;
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream os;
    os << std::setprecision(12);
    os << "method,trial,mode,accuracy,precision,recall\n";
    auto row = [&](const MethodReport& m, const TrialResult& t, EvalMode mode) {
        const Metrics& v = mode == EvalMode::Inductive ? t.inductive : t.transductive;
        os << m.method << ',' << t.trial << ','
           << (mode == EvalMode::Inductive ? "inductive" : "transductive") << ',' << v.accuracy
           << ',' << v.precision << ',' << v.recall << '\n';
    };
    for (const auto& m : report.methods) {
        for (const auto& t : m.trials) {
            row(m, t, EvalMode::Inductive);
            row(m, t, EvalMode::Transductive);
        }
    }
    os << "aggregate,method,mode,mean_accuracy,std_accuracy,mean_precision,mean_recall\n";
    for (const auto& m : report.methods) {
        if (m.trials.empty()) continue;
        for (EvalMode mode : {EvalMode::Inductive, EvalMode::Transductive}) {
            os << "aggregate," << m.method << ','
               << (mode == EvalMode::Inductive ? "inductive" : "transductive") << ','
               << m.mean_accuracy(mode) << ',' << m.std_accuracy(mode) << ','
               << mean_of(column(m, mode, &Metrics::precision)) << ','
               << mean_of(column(m, mode, &Metrics::recall)) << '\n';
        }
    }
    return os.str();
}

std::string report_to_json_string(const EvalReport& report) {
    json root;
    root["trials_requested"] = report.trials_requested;
    root["methods"] = json::array();
    for (const auto& m : report.methods) {
        json jm;
        jm["method"] = m.method;
        jm["trials"] = json::array();
        for (const auto& t : m.trials) {
            auto pack = [](const Metrics& v) {
                return json{{"accuracy", v.accuracy},
                            {"precision", v.precision},
                            {"recall", v.recall},
                            {"precision_defaulted", v.precision_defaulted},
                            {"recall_defaulted", v.recall_defaulted}};
            };
            jm["trials"].push_back(json{{"trial", t.trial},
                                        {"inductive", pack(t.inductive)},
                                        {"transductive", pack(t.transductive)},
                                        {"clipped_epochs", t.clipped_epochs}});
        }
        if (!m.trials.empty()) {
            jm["aggregate"] = json{
                {"inductive_mean_accuracy", m.mean_accuracy(EvalMode::Inductive)},
                {"inductive_std_accuracy", m.std_accuracy(EvalMode::Inductive)},
                {"transductive_mean_accuracy", m.mean_accuracy(EvalMode::Transductive)},
                {"transductive_std_accuracy", m.std_accuracy(EvalMode::Transductive)},
            };
        }
        root["methods"].push_back(jm);
    }
    root["failures"] = json::array();
    for (const auto& [trial, what] : report.failures) {
        root["failures"].push_back(json{{"trial", trial}, {"error", what}});
    }
    return root.dump(2) + "\n";
}

void emit_report(const EvalReport& report, const std::string& path, const std::string& format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << (format == "json" ? report_to_json_string(report) : report_to_csv(report));
}

namespace {

oracle::DiscretePopulation population_from_json(const json& j) {
    oracle::DiscretePopulation pop;
    for (const auto& p : j.at("points")) {
        pop.points.push_back(p.get<FeatureVector>());
    }
    pop.zeta = j.at("zeta").get<std::vector<double>>();
    pop.p_y1 = j.at("p_y1").get<std::vector<double>>();
    pop.theta_e1 = j.at("theta_e1").get<std::vector<double>>();
    pop.validate();
    return pop;
}

RiskSpec spec_from_json(const json& j) {
    RiskSpec spec;
    if (j.is_string()) {
        spec.kind = risk_kind_from_name(j.get<std::string>());
    } else {
        spec.kind = risk_kind_from_name(j.at("kind").get<std::string>());
        if (j.contains("class_prior")) spec.class_prior = j["class_prior"].get<double>();
        if (j.contains("mix_weight")) spec.mix_weight = j["mix_weight"].get<double>();
    }
    return spec;
}

}  // namespace

oracle::DiscretePopulation population_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open population file: " + path);
    json j = json::parse(in);
    return population_from_json(j.contains("population") ? j["population"] : j);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw std::runtime_error("malformed config " + path + ": " + ex.what());
    }

    ExperimentConfig cfg;
    if (j.contains("dataset")) cfg.dataset_path = j["dataset"].get<std::string>();
    if (j.contains("population")) cfg.population = population_from_json(j["population"]);
    if (j.contains("population_rows")) cfg.population_rows = j["population_rows"].get<std::size_t>();
    if (j.contains("problem")) cfg.problem = datagen::problem_from_name(j["problem"].get<std::string>());
    for (const auto& m : j.at("methods")) cfg.methods.push_back(spec_from_json(m));
    if (j.contains("split")) {
        const auto& s = j["split"];
        if (s.contains("ratio")) cfg.split.split_ratio = s["ratio"].get<double>();
        if (s.contains("test_count")) cfg.split.test_count = s["test_count"].get<std::size_t>();
        if (s.contains("seed")) cfg.split.seed = s["seed"].get<std::uint64_t>();
    }
    if (j.contains("exposure")) {
        const auto& e = j["exposure"];
        if (e.contains("target_marginal")) cfg.exposure.target_marginal = e["target_marginal"].get<double>();
        if (e.contains("pivot_index")) cfg.exposure.pivot_index = e["pivot_index"].get<int>();
        if (e.contains("g1_indices")) {
            auto v = e["g1_indices"].get<std::vector<int>>();
            if (v.size() != 6) throw std::runtime_error("config: g1_indices must have 6 entries");
            std::copy(v.begin(), v.end(), cfg.exposure.g1_indices.begin());
        }
        if (e.contains("g2_indices")) {
            auto v = e["g2_indices"].get<std::vector<int>>();
            if (v.size() != 6) throw std::runtime_error("config: g2_indices must have 6 entries");
            std::copy(v.begin(), v.end(), cfg.exposure.g2_indices.begin());
        }
    }
    if (j.contains("train")) {
        const auto& t = j["train"];
        if (t.contains("learning_rate")) cfg.train.learning_rate = t["learning_rate"].get<double>();
        if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<int>();
        if (t.contains("rounds")) cfg.train.rounds = t["rounds"].get<int>();
        if (t.contains("init_guess")) cfg.train.init_guess = t["init_guess"].get<double>();
        if (t.contains("l2_penalty")) cfg.train.l2_penalty = t["l2_penalty"].get<double>();
    }
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("pool_rows")) cfg.pool_rows = j["pool_rows"].get<std::size_t>();
    if (j.contains("seed")) cfg.base_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
    if (j.contains("format")) cfg.output_format = j["format"].get<std::string>();
    if (j.contains("emit_trace")) cfg.emit_trace = j["emit_trace"].get<bool>();
    if (j.contains("trace_path")) cfg.trace_path = j["trace_path"].get<std::string>();
    return cfg;
}

}  // namespace pue::harness

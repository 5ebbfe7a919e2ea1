// Command-line front end: experiment runner, oracle verification suite,
// exposure calibration, and dataset validation.

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pue/harness.hpp"
#include "pue/rng.hpp"

namespace {

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<int> trials, std::optional<double> alpha,
            std::optional<std::string> out) {
    pue::harness::ExperimentConfig cfg = pue::harness::load_config(config_path);
    if (seed) cfg.base_seed = *seed;
    if (trials) cfg.trials = *trials;
    if (alpha) cfg.split.split_ratio = *alpha;
    if (out) cfg.output_path = *out;

    pue::harness::EvalReport report = pue::harness::run_experiment(cfg);
    for (const auto& m : report.methods) {
        if (m.trials.empty()) continue;
        std::cout << m.method << ": inductive " << m.mean_accuracy(pue::harness::EvalMode::Inductive)
                  << " +- " << m.std_accuracy(pue::harness::EvalMode::Inductive) << ", transductive "
                  << m.mean_accuracy(pue::harness::EvalMode::Transductive) << "\n";
    }
    if (!report.failures.empty()) {
        std::cout << report.failures.size() << " trial(s) failed; first: "
                  << report.failures.front().second << "\n";
    }
    if (!cfg.output_path.empty()) {
        std::cout << "report written to " << cfg.output_path << "\n";
    }
    return 0;
}

int cmd_oracle(const std::optional<std::string>& population_path) {
    using namespace pue::oracle;
    pue::Rng rng(20240901);

    // Closed-form minimizer against exhaustive grid search.
    double worst_lemma = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double q1 = rng.uniform(0.01, 0.6);
        const double fd = rng.uniform01();
        const double th0 = rng.uniform(0.0, std::min(0.98, (0.99 - q1) / std::max(fd, 1e-9)));
        const double stationary = q1 + fd * th0;
        if (stationary < 0.01 || stationary > 0.99) continue;
        const double grid = grid_minimize_pointwise(stationary);
        worst_lemma = std::max(worst_lemma, std::abs(grid - lemma_minimizer(q1, fd, th0).value));
    }
    std::cout << "lemma minimizer max grid residual: " << worst_lemma << "\n";

    // Geometric recursion against its closed form and limit.
    double worst_rec = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double q1 = rng.uniform01();
        const double th0 = rng.uniform(0.0, 0.95);
        const double f0 = rng.uniform01();
        const auto seq = theorem_recursion(q1, th0, f0, 40);
        const double limit = q1 / (1.0 - th0);
        for (std::size_t t = 0; t < seq.size(); ++t) {
            const double expect = std::abs(f0 - limit) * std::pow(th0, static_cast<double>(t));
            worst_rec = std::max(worst_rec, std::abs(std::abs(seq[t] - limit) - expect));
        }
    }
    std::cout << "recursion max geometric-rate residual: " << worst_rec << "\n";

    DiscretePopulation pop;
    if (population_path) {
        pop = pue::harness::population_from_json_file(*population_path);
    } else {
        for (int i = 0; i < 100; ++i) {
            pop.points.push_back({static_cast<double>(i)});
            pop.zeta.push_back(0.01);
            pop.p_y1.push_back(rng.uniform01());
            pop.theta_e1.push_back(rng.uniform(0.05, 1.0));
        }
        pop.validate();
    }
    std::cout << "identification residual: " << identification_check(pop) << "\n";
    std::cout << "bayes accuracy: " << bayes_accuracy(pop) << "\n";

    const bool ok = worst_lemma <= 2e-6 && worst_rec <= 1e-12 &&
                    identification_check(pop) <= 1e-12;
    std::cout << (ok ? "oracle checks passed" : "oracle checks FAILED") << "\n";
    return ok ? 0 : 1;
}

int cmd_calibrate(const std::string& dataset, double target) {
    pue::datagen::ExposureSpec spec;
    spec.target_marginal = target;
    const auto data = pue::datagen::parse_sparse_dataset(dataset);
    const double c = pue::datagen::calibrate_c(data, spec);
    double mean = 0.0;
    for (const auto& x : data.features) {
        mean += pue::datagen::exposure_probability(x, spec, c);
    }
    mean /= static_cast<double>(data.size());
    std::cout << "c=" << c << " mean_exposure=" << mean << " target=" << target << "\n";
    return 0;
}

int cmd_parse_check(const std::string& dataset, std::optional<std::size_t> expect_n,
                    std::optional<std::size_t> expect_dim, std::optional<double> expect_pos) {
    const auto data = pue::datagen::parse_sparse_dataset(dataset);
    double pos = 0.0;
    for (auto y : *data.y_oracle) pos += y;
    const double frac = pos / static_cast<double>(data.size());
    std::cout << "n=" << data.size() << " d=" << data.dim << " pos=" << frac << "\n";

    bool ok = true;
    if (expect_n && *expect_n != data.size()) ok = false;
    if (expect_dim && *expect_dim != data.dim) ok = false;
    if (expect_pos && std::abs(*expect_pos - frac) > 1e-3) ok = false;
    if (!ok) std::cout << "dataset does not match expectations\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PUE risk estimator benchmark harness"};
    app.require_subcommand(1);

    std::string config_path, dataset;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<double> alpha;
    std::optional<std::string> out, population_path;
    double target = 0.5;
    std::optional<std::size_t> expect_n, expect_dim;
    std::optional<double> expect_pos;

    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--seed", seed, "override base seed");
    run->add_option("--trials", trials, "override trial count");
    run->add_option("--alpha", alpha, "override sample splitting ratio");
    run->add_option("--out", out, "override report output path");

    auto* orc = app.add_subcommand("oracle", "closed-form verification suite");
    orc->add_option("--population", population_path, "population JSON to check");

    auto* cal = app.add_subcommand("calibrate", "calibrate the exposure constant");
    cal->add_option("dataset", dataset, "sparse dataset file")->required();
    cal->add_option("--target", target, "target marginal exposure probability");

    auto* chk = app.add_subcommand("parse-check", "validate a dataset file");
    chk->add_option("dataset", dataset, "sparse dataset file")->required();
    chk->add_option("--expect-n", expect_n, "expected sample count");
    chk->add_option("--expect-dim", expect_dim, "expected dimension");
    chk->add_option("--expect-pos", expect_pos, "expected positive fraction (tol 1e-3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, seed, trials, alpha, out);
        if (orc->parsed()) return cmd_oracle(population_path);
        if (cal->parsed()) return cmd_calibrate(dataset, target);
        if (chk->parsed()) return cmd_parse_check(dataset, expect_n, expect_dim, expect_pos);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        // Missing files and malformed configs are usage errors.
        const std::string what = ex.what();
        if (what.find("cannot open") != std::string::npos ||
            what.find("malformed") != std::string::npos) {
            return 2;
        }
        return 1;
    }
    return 2;
}

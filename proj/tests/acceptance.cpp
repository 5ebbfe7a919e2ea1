// End-to-end acceptance checks. Each numbered check prints one PASS/FAIL
// line; the process exits nonzero if any check fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "pue/harness.hpp"
#include "pue/oracle.hpp"
#include "pue/rng.hpp"
#include "pue/trainers.hpp"

using namespace pue;
namespace oc = pue::oracle;

namespace {

int g_failures = 0;

class Timer {
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
};

void report(int number, const std::string& label, bool ok, double secs, double limit,
            const std::string& detail) {
    if (secs > limit) ok = false;
    std::printf("[%s] %d. %s (%.1fs / %.0fs limit)%s%s\n", ok ? "PASS" : "FAIL", number,
                label.c_str(), secs, limit, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---------------------------------------------------------------- 1
void check_lemma() {
    Timer timer;
    Rng rng(101);
    double worst = 0.0;
    int done = 0;
    while (done < 1000) {
        const double q1 = rng.uniform01();
        const double fd = rng.uniform01();
        const double th0 = rng.uniform01();
        const double target = q1 + fd * th0;
        if (target < 0.01 || target > 0.99) continue;
        ++done;
        const auto r = oc::lemma_minimizer(q1, fd, th0);
        const double grid = oc::grid_minimize_pointwise(target);
        worst = std::max(worst, std::fabs(r.value - grid));
    }
    report(1, "pointwise minimizer matches grid search on 1000 triples", worst <= 2e-6,
           timer.seconds(), 10.0, fmt("max |closed form - grid| = %.3g", worst));
}

// ---------------------------------------------------------------- 2
void check_recursion() {
    Timer timer;
    Rng rng(202);
    double worst_geo = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const double th0 = rng.uniform(0.0, 0.999);
        const double q1 = rng.uniform01() * (1.0 - th0);
        const double f0 = rng.uniform01();
        const double limit = q1 / (1.0 - th0);
        const auto seq = oc::theorem_recursion(q1, th0, f0, 30);
        for (int t = 0; t <= 30; ++t) {
            const double expect = std::fabs(f0 - limit) * std::pow(th0, t);
            worst_geo = std::max(worst_geo, std::fabs(std::fabs(seq[t] - limit) - expect));
        }
    }
    double worst_id = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        oc::DiscretePopulation pop;
        const std::size_t n = 2 + rng.below(60);
        std::vector<double> mass(n);
        double total = 0.0;
        for (auto& m : mass) total += m = rng.uniform(0.05, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            pop.points.push_back({rng.uniform01()});
            pop.zeta.push_back(mass[i] / total);
            pop.p_y1.push_back(rng.uniform01());
            pop.theta_e1.push_back(rng.uniform(0.05, 1.0));
        }
        pop.validate();
        worst_id = std::max(worst_id, oc::identification_check(pop));
    }
    report(2, "recursion contracts geometrically and identifies p(y=1|x)",
           worst_geo <= 1e-12 && worst_id <= 1e-12, timer.seconds(), 5.0,
           fmt("geometric dev %.3g, identification residual %.3g", worst_geo, worst_id));
}

// ---------------------------------------------------------------- 3
void check_sample_convergence() {
    Timer timer;
    oc::DiscretePopulation pop;
    pop.points = {{1.0, 0.0}, {0.0, 1.0}};
    pop.zeta = {0.5, 0.5};
    pop.p_y1 = {0.6, 0.6};
    pop.theta_e1 = {0.5, 0.5};
    pop.validate();

    TrainConfig cfg;
    cfg.learning_rate = 2.0;
    cfg.epochs = 200;
    cfg.rounds = 20;
    double err0 = 0.0, err1 = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto d_pu = oc::sample_from(pop, 50000, 1000 + seed * 2);
        auto d_e = oc::sample_from(pop, 50000, 1001 + seed * 2);
        d_pu.e.reset();
        d_e.w.reset();
        auto [model, trace] = train_adpue_alternate(d_pu, d_e, cfg);
        err0 += std::fabs(model.score(std::vector<double>{1.0, 0.0}) - 0.6);
        err1 += std::fabs(model.score(std::vector<double>{0.0, 1.0}) - 0.6);
    }
    err0 /= 10.0;
    err1 /= 10.0;
    report(3, "alternate training recovers p(y=1|x)=0.6 on the 2-point sample",
           err0 <= 0.02 && err1 <= 0.02, timer.seconds(), 120.0,
           fmt("mean abs errors %.4f / %.4f", err0, err1));
}

// ---------------------------------------------------------------- 4
struct GradInstance {
    LabeledSampleSet d_pu, d_e, d_p, d_u, d_sse;
    std::vector<double> f_dagger;
    LinearScorer scorer;
    RiskSpec spec;
    DatasetBundle bundle;
};

LabeledSampleSet random_rows(Rng& rng, std::size_t n, std::size_t dim, bool with_w,
                             bool with_e) {
    LabeledSampleSet s;
    s.dim = dim;
    if (with_w) s.w = std::vector<std::uint8_t>();
    if (with_e) s.e = std::vector<std::uint8_t>();
    for (std::size_t i = 0; i < n; ++i) {
        FeatureVector x(dim);
        for (auto& v : x) v = rng.uniform01();
        s.features.push_back(std::move(x));
        std::uint8_t e = rng.bernoulli(0.6) ? 1 : 0;
        std::uint8_t w = e && rng.bernoulli(0.5) ? 1 : 0;
        if (i == 0) e = w = 1;
        if (i == 1) e = 1, w = 0;
        if (s.e) s.e->push_back(e);
        if (s.w) s.w->push_back(w);
    }
    return s;
}

GradInstance make_instance(RiskKind kind, Rng& rng) {
    GradInstance inst;
    inst.spec.kind = kind;
    const std::size_t dim = 2 + rng.below(4);
    const std::size_t n = 6 + rng.below(20);

    const bool pu_style = kind == RiskKind::AdpueAlternate || kind == RiskKind::AdpueDirect ||
                          kind == RiskKind::Nnpue || kind == RiskKind::Logit ||
                          kind == RiskKind::Upu || kind == RiskKind::Nnpu;
    if (pu_style) {
        inst.d_pu = random_rows(rng, n, dim, true, false);
        inst.bundle.d_pu = &inst.d_pu;
    }
    if (kind == RiskKind::AdpueAlternate || kind == RiskKind::AdpueDirect ||
        kind == RiskKind::Nnpue || kind == RiskKind::Adpe || kind == RiskKind::Adfpue) {
        inst.d_e = random_rows(rng, n, dim, false, true);
        inst.bundle.d_e = &inst.d_e;
    }
    if (kind == RiskKind::Adpe || kind == RiskKind::Adfpue) {
        inst.d_p = random_rows(rng, n, dim, false, false);
        inst.bundle.d_p = &inst.d_p;
        inst.spec.class_prior = rng.uniform(0.2, 0.8);
    }
    if (kind == RiskKind::Adfpue) {
        inst.d_u = random_rows(rng, n, dim, false, false);
        inst.bundle.d_u = &inst.d_u;
    }
    if (kind == RiskKind::Ads || kind == RiskKind::Adss || kind == RiskKind::Dadss ||
        kind == RiskKind::Ad3se) {
        inst.d_sse = random_rows(rng, n, dim, true, true);
        inst.bundle.d_sse = &inst.d_sse;
        if (kind == RiskKind::Ad3se) {
            inst.d_pu = random_rows(rng, n, dim, true, false);
            inst.bundle.d_pu = &inst.d_pu;
        }
    }
    if (kind == RiskKind::Upu || kind == RiskKind::Nnpu) {
        inst.spec.class_prior = rng.uniform(0.2, 0.8);
    }
    if (kind == RiskKind::Dadss) inst.spec.mix_weight = rng.uniform01();

    if (const auto* host = proxy_host(inst.spec, inst.bundle)) {
        inst.f_dagger.resize(host->size());
        for (auto& v : inst.f_dagger) v = rng.uniform(0.1, 0.9);
    }
    inst.scorer = LinearScorer(dim);
    for (auto& w : inst.scorer.weights) w = 0.5 * rng.normal();
    inst.scorer.intercept = 0.5 * rng.normal();
    return inst;
}

// returns false when the clip boundary flips under perturbation (instance skipped)
bool fd_check(const GradInstance& inst, double& worst_rel) {
    const double h = 1e-5;
    const auto base = evaluate_risk(inst.spec, inst.scorer, inst.bundle, inst.f_dagger);
    const std::size_t dim = inst.scorer.dim();
    for (std::size_t k = 0; k <= dim; ++k) {
        auto lo = inst.scorer;
        auto hi = inst.scorer;
        if (k < dim) {
            lo.weights[k] -= h;
            hi.weights[k] += h;
        } else {
            lo.intercept -= h;
            hi.intercept += h;
        }
        const auto a = evaluate_risk(inst.spec, lo, inst.bundle, inst.f_dagger);
        const auto b = evaluate_risk(inst.spec, hi, inst.bundle, inst.f_dagger);
        if (a.clipped != base.clipped || b.clipped != base.clipped) return false;
        const double fd = (b.value - a.value) / (2.0 * h);
        const double rel = std::fabs(fd - base.gradient[k]) /
                           std::max(1.0, std::fabs(base.gradient[k]));
        worst_rel = std::max(worst_rel, rel);
    }
    return true;
}

void check_gradients() {
    Timer timer;
    const RiskKind kinds[] = {RiskKind::AdpueAlternate, RiskKind::AdpueDirect, RiskKind::Nnpue,
                              RiskKind::Adpe,           RiskKind::Adfpue,      RiskKind::Ads,
                              RiskKind::Adss,           RiskKind::Dadss,       RiskKind::Ad3se,
                              RiskKind::Logit,          RiskKind::Upu,         RiskKind::Nnpu};
    Rng rng(404);
    double worst = 0.0;
    bool enough = true;
    for (RiskKind kind : kinds) {
        int done = 0, attempts = 0;
        while (done < 20 && attempts < 400) {
            ++attempts;
            const auto inst = make_instance(kind, rng);
            if (fd_check(inst, worst)) ++done;
        }
        enough = enough && done == 20;
    }
    report(4, "finite-difference gradient audit over every risk kind",
           enough && worst <= 1e-6, timer.seconds(), 30.0,
           fmt("worst relative deviation %.3g", worst));
}

// ---------------------------------------------------------------- 5
void check_ads_unbiased() {
    Timer timer;
    Rng rng(505);
    oc::DiscretePopulation pop;
    const std::size_t npts = 40;
    const double theta = 0.6;  // constant exposure keeps the exposed subset unbiased
    std::vector<double> mass(npts);
    double total = 0.0;
    for (auto& m : mass) total += m = rng.uniform(0.05, 1.0);
    for (std::size_t i = 0; i < npts; ++i) {
        pop.points.push_back({rng.uniform01(), rng.uniform01(), rng.uniform01()});
        pop.zeta.push_back(mass[i] / total);
        pop.p_y1.push_back(rng.uniform01());
        pop.theta_e1.push_back(theta);
    }
    pop.validate();

    bool ok = true;
    double worst_z = 0.0;
    for (int s = 0; s < 5; ++s) {
        LinearScorer f(3);
        for (auto& w : f.weights) w = rng.normal();
        f.intercept = rng.normal();
        const double exact = oc::ideal_risk(pop, f);

        std::vector<double> values;
        for (int rep = 0; rep < 200; ++rep) {
            auto d_sse = oc::sample_from(pop, 2000, 9000 + s * 200 + rep);
            values.push_back(risk_ads(f, d_sse).value);
        }
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= values.size();
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / (values.size() - 1) / values.size());
        const double z = std::fabs(mean - exact) / se;
        worst_z = std::max(worst_z, z);
        ok = ok && z <= 3.0;
    }
    report(5, "empirical supervised risk is unbiased for the population risk", ok,
           timer.seconds(), 60.0, fmt("worst |mean - exact| / SE = %.2f", worst_z));
}

// -------------------------------------------------------- 6, 7, 9 helpers
harness::ExperimentConfig benchmark_config(const std::string& name) {
    auto cfg = harness::load_config(std::string(PUE_CONFIG_DIR) + "/" + name);
    const auto slash = cfg.dataset_path.rfind('/');
    cfg.dataset_path = std::string(PUE_DATA_DIR) + cfg.dataset_path.substr(slash);
    cfg.output_path.clear();
    return cfg;
}

double acc(const harness::EvalReport& rep, const std::string& method) {
    return rep.method(method).mean_accuracy(harness::EvalMode::Inductive);
}

void check_mushrooms() {
    Timer timer;
    auto pue = harness::run_experiment(benchmark_config("mushrooms_pue.json"));
    auto sse = harness::run_experiment(benchmark_config("mushrooms_3se.json"));
    const double adpue = acc(pue, "adpue_direct");
    const double logit = acc(pue, "logit");
    const double upu = acc(pue, "upu");
    const double ads = acc(sse, "ads");
    const double ad3se = acc(sse, "ad3se");
    const bool ok = adpue >= 0.80 && logit <= 0.40 && upu <= 0.40 && ads >= 0.96 &&
                    ad3se >= 0.93;
    report(6, "mushrooms benchmark ordering (debiased wins, naive fails)", ok, timer.seconds(),
           900.0,
           fmt("adpue %.3f, logit %.3f, upu %.3f", adpue, logit, upu) +
               fmt(", ads %.3f, ad3se %.3f", ads, ad3se));
}

void check_australian() {
    Timer timer;
    auto rep = harness::run_experiment(benchmark_config("australian_pue.json"));
    const double adpue = acc(rep, "adpue_direct");
    const double logit = acc(rep, "logit");
    const double upu = acc(rep, "upu");
    const bool ok = adpue >= logit + 0.05 && adpue >= upu + 0.05;
    report(7, "australian benchmark gap of at least 0.05", ok, timer.seconds(), 300.0,
           fmt("adpue %.3f vs logit %.3f / upu %.3f", adpue, logit, upu));
}

// ---------------------------------------------------------------- 8
void check_nn_correction() {
    Timer timer;
    auto cfg = benchmark_config("mushrooms_pue.json");
    auto base = datagen::parse_sparse_dataset(cfg.dataset_path);
    const double c = datagen::calibrate_c(base, cfg.exposure);

    std::size_t clipped = 0;
    double acc_nn = 0.0, acc_pseudo = 0.0;
    const int trials = 10;
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
        auto subset =
            datagen::subsample(base, cfg.pool_rows + cfg.split.test_count, seed);
        auto observed = datagen::synthesize_observations(subset, cfg.exposure, c,
                                                         seed ^ 0x9e3779b97f4a7c15ULL);
        datagen::SplitSpec split_spec = cfg.split;
        split_spec.seed = seed ^ 0xd1b54a32d192ed03ULL;
        auto split = datagen::split_for_problem(observed, datagen::Problem::Pue, split_spec);
        auto [nn, nn_trace] = train_adpue_direct(*split.d_pu, *split.d_e, cfg.train, true);
        auto [ps, ps_trace] = train_adpue_direct(*split.d_pu, *split.d_e, cfg.train, false);
        clipped += nn_trace.clipped_epochs();
        acc_nn += harness::evaluate(nn, split.test).accuracy;
        acc_pseudo += harness::evaluate(ps, split.test).accuracy;
    }
    acc_nn /= trials;
    acc_pseudo /= trials;
    const bool ok = clipped >= 1 && acc_nn >= acc_pseudo - 0.02;
    report(8, "non-negative correction engages and never materially hurts", ok,
           timer.seconds(), 300.0,
           fmt("clipped epochs %g, guarded %.4f vs unguarded %.4f", double(clipped), acc_nn,
               acc_pseudo));
}

// ---------------------------------------------------------------- 9
void check_determinism() {
    Timer timer;
    auto cfg = benchmark_config("australian_pue.json");
    auto a = harness::run_experiment(cfg);
    auto b = harness::run_experiment(cfg);
    const bool ok = harness::report_to_csv(a) == harness::report_to_csv(b) &&
                    harness::report_to_json_string(a) == harness::report_to_json_string(b);
    report(9, "repeated runs produce byte-identical reports", ok, timer.seconds(), 300.0, "");
}

}  // namespace

int main() {
    check_lemma();
    check_recursion();
    check_sample_convergence();
    check_gradients();
    check_ads_unbiased();
    check_mushrooms();
    check_australian();
    check_nn_correction();
    check_determinism();
    if (g_failures > 0) {
        std::printf("%d acceptance check(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance checks passed\n");
    return 0;
}

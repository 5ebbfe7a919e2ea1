#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pue/core.hpp"

using namespace pue;

TEST_CASE("logistic basics") {
    CHECK(logistic(0.0) == doctest::Approx(0.5));
    CHECK(logistic(std::log(3.0)) == doctest::Approx(0.75));
    CHECK(logistic(1e9) == doctest::Approx(1.0 - kProbEps));
    CHECK(logistic(-1e9) == doctest::Approx(kProbEps));
}

TEST_CASE("logistic rejects non-finite input") {
    CHECK_THROWS_AS(logistic(std::numeric_limits<double>::infinity()), std::invalid_argument);
    CHECK_THROWS_AS(logistic(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("logistic symmetry") {
    for (double z = -30.0; z <= 30.0; z += 0.37) {
        CHECK(logistic(z) + logistic(-z) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("log loss values") {
    CHECK(log_loss(0.5, 1) == doctest::Approx(std::log(2.0)));
    CHECK(log_loss(0.25, 0) == doctest::Approx(-std::log(0.75)));
    CHECK(log_loss(1.0 - kProbEps, 1) == doctest::Approx(kProbEps).epsilon(1e-3));
    for (double f = 0.05; f < 1.0; f += 0.05) {
        CHECK(log_loss(f, 1) >= 0.0);
        CHECK(log_loss(f, 0) >= 0.0);
    }
}

TEST_CASE("log loss is convex in the pre-link score") {
    // finite-difference second derivative of z -> log_loss(logistic(z), y)
    const double h = 1e-3;
    for (int y : {0, 1}) {
        for (double z = -10.0; z <= 10.0; z += 0.25) {
            const double a = log_loss(logistic(z - h), y);
            const double b = log_loss(logistic(z), y);
            const double c = log_loss(logistic(z + h), y);
            CHECK((a - 2.0 * b + c) / (h * h) >= -1e-6);
        }
    }
}

TEST_CASE("classify thresholds at one half, boundary positive") {
    CHECK(classify(0.5) == 1);
    CHECK(classify(0.4999) == 0);
    CHECK(classify(1.0 - kProbEps) == 1);
    CHECK(classify(kProbEps) == 0);
}

TEST_CASE("classify is monotone in the threshold sign") {
    const double probes[] = {0.01, 0.3, 0.4999, 0.5, 0.7, 0.99};
    for (double f : probes) {
        for (double g : probes) {
            if ((f >= 0.5) == (g >= 0.5)) CHECK(classify(f) == classify(g));
        }
    }
}

TEST_CASE("linear scorer evaluates the logistic link") {
    LinearScorer f(2);
    f.weights = {1.0, -2.0};
    f.intercept = 0.5;
    const std::vector<double> x = {2.0, 1.0};
    CHECK(f.raw(x) == doctest::Approx(0.5));
    CHECK(f.score(x) == doctest::Approx(logistic(0.5)));
    CHECK(f.dim() == 2);
    CHECK(f.score(x) > 0.0);
    CHECK(f.score(x) < 1.0);
}

static LabeledSampleSet tiny_set() {
    LabeledSampleSet s;
    s.dim = 2;
    s.features = {{0.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}};
    s.w = std::vector<std::uint8_t>{1, 0, 0};
    s.e = std::vector<std::uint8_t>{1, 1, 0};
    s.y_oracle = std::vector<std::uint8_t>{1, 0, 1};
    return s;
}

TEST_CASE("sample set validates consistent columns") {
    CHECK_NOTHROW(tiny_set().validate());
}

TEST_CASE("sample set rejects column length mismatch") {
    auto s = tiny_set();
    s.w->pop_back();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sample set rejects w=1 with e=0") {
    auto s = tiny_set();
    (*s.e)[0] = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sample set rejects w inconsistent with e*y") {
    auto s = tiny_set();
    (*s.w)[1] = 1;  // e=1 but y=0
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sample set rejects non-finite features") {
    auto s = tiny_set();
    s.features[2][0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sample set rejects wrong row width") {
    auto s = tiny_set();
    s.features[1].push_back(0.0);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("require_column names the missing column and role") {
    LabeledSampleSet s;
    s.dim = 1;
    s.features = {{0.0}};
    try {
        s.require_column(s.w, "w", "d_pu");
        FAIL("expected throw");
    } catch (const std::invalid_argument& ex) {
        const std::string msg = ex.what();
        CHECK(msg.find("d_pu") != std::string::npos);
        CHECK(msg.find("'w'") != std::string::npos);
    }
}

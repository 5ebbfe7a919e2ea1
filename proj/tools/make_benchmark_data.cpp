// Generates the bundled benchmark files under data/. They are synthetic
// stand-ins shaped like the LIBSVM `mushrooms` and `australian` datasets
// (same sample count, dimension, and positive fraction), with class
// structure a linear model can separate; they are not the original data.
//
// Usage: make_benchmark_data <output-dir>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pue/rng.hpp"

namespace {

std::vector<std::uint8_t> labels_with_exact_positives(std::size_t n, std::size_t positives,
                                                      pue::Rng& rng) {
    std::vector<std::uint8_t> y(n, 0);
    for (std::size_t i = 0; i < positives; ++i) y[i] = 1;
    pue::shuffle(y, rng);
    return y;
}

// Binary one-hot style features, each column set with p = 0.92/0.08 by class.
void write_mushrooms(const std::string& path) {
    constexpr std::size_t kRows = 8124;
    constexpr std::size_t kPositives = 7133;  // fraction 0.878
    constexpr std::size_t kDim = 112;

    pue::Rng rng(6021023);
    const auto y = labels_with_exact_positives(kRows, kPositives, rng);

    std::ofstream out(path);
    for (std::size_t i = 0; i < kRows; ++i) {
        out << (y[i] == 1 ? 1 : 2);
        for (std::size_t k = 1; k <= kDim; ++k) {
            const double p = y[i] == 1 ? 0.92 : 0.08;
            if (rng.bernoulli(p)) out << ' ' << k << ":1";
        }
        out << '\n';
    }
}

// Continuous features: 8 informative Gaussian columns with a class mean
// shift of 1.8, 6 noise columns.
void write_australian(const std::string& path) {
    constexpr std::size_t kRows = 690;
    constexpr std::size_t kPositives = 307;  // fraction 0.445
    constexpr std::size_t kDim = 14;
    constexpr std::size_t kInformative = 8;

    pue::Rng rng(41291734);
    const auto y = labels_with_exact_positives(kRows, kPositives, rng);

    std::ofstream out(path);
    out.precision(6);
    for (std::size_t i = 0; i < kRows; ++i) {
        out << (y[i] == 1 ? "+1" : "-1");
        for (std::size_t k = 1; k <= kDim; ++k) {
            double v = rng.normal();
            if (k <= kInformative) v += y[i] == 1 ? 0.9 : -0.9;
            out << ' ' << k << ':' << v;
        }
        out << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_benchmark_data <output-dir>\n";
        return 2;
    }
    const std::string dir = argv[1];
    write_mushrooms(dir + "/mushrooms.libsvm");
    write_australian(dir + "/australian.libsvm");
    std::cout << "wrote " << dir << "/mushrooms.libsvm and " << dir << "/australian.libsvm\n";
    return 0;
}

#pragma once

#include <cstdint>
#include <random>

#include "doeblin/channels.hpp"

namespace doeblin {

// Seeded generator shared by oracles, simulators and tests.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
    std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

ComplexMatrix ginibre(int rows, int cols, Rng& rng);
ComplexMatrix haar_unitary(int d, Rng& rng);
ComplexVector random_unit_vector(int d, Rng& rng);
QuantumState random_pure_state(int d, Rng& rng);
QuantumState random_state(int d, Rng& rng);
// Haar-random isometry dilation with the given number of Kraus operators.
Channel random_channel(int d_in, int d_out, Rng& rng, int kraus_rank = 0);
std::vector<HermitianOperator> random_povm(int d, int outcomes, Rng& rng);

}  // namespace doeblin

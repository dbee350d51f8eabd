#pragma once

#include "twobit/coding.hpp"
#include "twobit/estimation.hpp"
#include "twobit/region_model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace twobit {

/// trials x k draws of (x, y) from the standard bivariate normal with correlation rho.
/// Trial t uses its own generator seeded from (seed, t), so any subset of
/// trials can be regenerated independently.
struct SimulatedPairs {
    std::size_t k = 0;
    std::size_t trials = 0;
    std::vector<double> x;
    std::vector<double> y;

    std::span<const double> x_trial(std::size_t t) const { return {x.data() + t * k, k}; }
    std::span<const double> y_trial(std::size_t t) const { return {y.data() + t * k, k}; }
};

SimulatedPairs synth_pairs(double rho, std::size_t k, std::size_t trials, std::uint64_t seed);

/// Generator state for trial t of a simulation keyed by seed.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Cell counts of every trial under 2-bit coding at threshold w.
std::vector<CellCounts> tally_trials(const SimulatedPairs& pairs, double w);

struct SimulateMseConfig {
    std::vector<double> rho_grid;
    std::size_t k = 200;
    std::size_t trials = 10000;
    double w = 0.75;
    std::uint64_t seed = 1;

    void validate() const;
};

struct MseRow {
    double rho;
    std::string estimator; // one_bit, two_bit_linear, two_bit_mle, two_bit_mle_five_cell
    double empirical_mse;
    double fisher_predicted_var;
};

/// Empirical MSE of each estimator over simulated trials, next to the
/// asymptotic variance 1 / (k I(rho)).
std::vector<MseRow> simulate_mse(const SimulateMseConfig& config, const ProbabilityTable& table);

} // namespace twobit

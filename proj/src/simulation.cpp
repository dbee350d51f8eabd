#include "twobit/simulation.hpp"

#include "twobit/error.hpp"
#include "twobit/parallel.hpp"

#include <cmath>
#include <random>
#include <string>

namespace twobit {

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (trial + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

SimulatedPairs synth_pairs(double rho, std::size_t k, std::size_t trials, std::uint64_t seed) {
    const double r = clamp_rho(rho).value;
    const double s = std::sqrt((1.0 - r) * (1.0 + r));
    SimulatedPairs pairs;
    pairs.k = k;
    pairs.trials = trials;
    pairs.x.resize(k * trials);
    pairs.y.resize(k * trials);
    parallel_for(trials, [&](std::size_t t) {
        std::mt19937_64 rng(trial_seed(seed, t));
        std::normal_distribution<double> normal;
        for (std::size_t j = 0; j < k; ++j) {
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            pairs.x[t * k + j] = z1;
            pairs.y[t * k + j] = r * z1 + s * z2;
        }
    });
    return pairs;
}

std::vector<CellCounts> tally_trials(const SimulatedPairs& pairs, double w) {
    std::vector<CellCounts> counts(pairs.trials);
    for (std::size_t t = 0; t < pairs.trials; ++t) {
        counts[t] = tally_cells(encode_2bit(pairs.x_trial(t), w), encode_2bit(pairs.y_trial(t), w));
    }
    return counts;
}

void SimulateMseConfig::validate() const {
    if (rho_grid.empty()) {
        throw ValidationError("rho grid is empty");
    }
    for (double rho : rho_grid) {
        if (!std::isfinite(rho) || std::abs(rho) > kRhoMax) {
            throw ValidationError("rho grid value " + std::to_string(rho) + " outside [-1+eps, 1-eps]");
        }
    }
    if (k < 1) {
        throw ValidationError("k must be at least 1");
    }
    if (trials < 1) {
        throw ValidationError("trials must be at least 1");
    }
    if (!(w > 0.0)) {
        throw ValidationError("w must be positive");
    }
}

std::vector<MseRow> simulate_mse(const SimulateMseConfig& config, const ProbabilityTable& table) {
    config.validate();
    if (std::abs(table.w() - config.w) > 1e-12) {
        throw ValidationError("probability table was built for w=" + std::to_string(table.w()));
    }
    const double k = static_cast<double>(config.k);
    MleConfig five;
    five.mode = CellMode::FiveCell;

    std::vector<MseRow> rows;
    for (std::size_t g = 0; g < config.rho_grid.size(); ++g) {
        const double rho = config.rho_grid[g];
        const auto pairs = synth_pairs(rho, config.k, config.trials, trial_seed(config.seed, g));
        const auto counts = tally_trials(pairs, config.w);

        std::vector<std::array<double, 4>> sq(config.trials);
        parallel_for(config.trials, [&](std::size_t t) {
            const CellCounts& c = counts[t];
            const double e1 = estimate_1bit(c.same_sign(), c.total());
            const double el = estimate_2bit_linear(c, table).rho_hat;
            const double em = estimate_2bit_mle(c, table).rho_hat;
            const double e5 = estimate_2bit_mle(c, table, five).rho_hat;
            sq[t] = {(e1 - rho) * (e1 - rho), (el - rho) * (el - rho), (em - rho) * (em - rho),
                     (e5 - rho) * (e5 - rho)};
        });
        std::array<double, 4> mse{};
        for (const auto& s : sq) {
            for (std::size_t e = 0; e < 4; ++e) {
                mse[e] += s[e];
            }
        }
        for (double& m : mse) {
            m /= static_cast<double>(config.trials);
        }
        rows.push_back({rho, "one_bit", mse[0], 1.0 / (k * fisher_info_1bit(rho))});
        rows.push_back({rho, "two_bit_linear", mse[1], 1.0 / (k * fisher_info_2bit_linear(table, rho))});
        rows.push_back({rho, "two_bit_mle", mse[2], 1.0 / (k * fisher_info_2bit(table, rho))});
        rows.push_back({rho, "two_bit_mle_five_cell", mse[3], 1.0 / (k * fisher_info_2bit_five_cell(table, rho))});
    }
    return rows;
}

} // namespace twobit

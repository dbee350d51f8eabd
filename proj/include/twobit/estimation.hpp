#pragma once

#include "twobit/coding.hpp"
#include "twobit/region_model.hpp"

#include <optional>

namespace twobit {

enum class CellMode : std::uint8_t {
    SixCell,
    /// AdjOpp and DiagOuterNeg merged into one cell with probability 2 P23(-rho) + P33(-rho).
    FiveCell,
};

struct MleConfig {
    CellMode mode = CellMode::SixCell;
    double tolerance = 1e-6; // on |l'(rho)|
    int max_iterations = 50;
    double rho_lower = -kRhoMax;
    double rho_upper = kRhoMax;

    void validate() const;
};

struct EstimateResult {
    double rho_hat = 0.0;
    int iterations = 0;
    bool converged = false;
    /// The estimate sits on rho_lower/rho_upper because the likelihood (or the
    /// observed statistic) is monotone over the whole admissible range.
    bool at_boundary = false;
    /// 1 / (k * I(rho_hat)) when the estimator has an asymptotic variance formula.
    std::optional<double> predicted_variance;
};

/// Sign-agreement estimator: rho = cos(pi * (1 - n_same/k)), clamped.
double estimate_1bit(std::int64_t n_same_sign, std::int64_t k);

/// Solves 2 P22(rho) + 2 P33(rho) = exact_diagonal / k by bisection.
EstimateResult estimate_2bit_linear(const CellCounts& counts, const ProbabilityTable& table);

/// Log-likelihood of grouped counts and its first two rho-derivatives.
struct LogLikelihood {
    double value;
    double d1;
    double d2;
};

LogLikelihood log_likelihood(const CellCounts& counts, const ProbabilityTable& table, double rho,
                             CellMode mode = CellMode::SixCell);

/// Maximum-likelihood estimate from the 2-bit cell counts.
///
/// Starts from the 1-bit estimate recovered from code signs and walks uphill
/// (steps sized from the Newton step, doubling) until l' changes sign. Newton
/// iterations then stay inside the bracket [a, b] with l'(a) > 0 > l'(b); a step
/// that leaves the bracket, or is taken where l'' >= 0, is replaced by bisection.
/// If the walk reaches rho_lower/rho_upper still climbing, that bound is returned
/// with at_boundary set. The result never has lower likelihood than the start.
EstimateResult estimate_2bit_mle(const CellCounts& counts, const ProbabilityTable& table,
                                 const MleConfig& config = {});

/// Per-observation Fisher information of the six-cell 2-bit likelihood,
/// 2 * [P22'^2/P22 + 2 P23'^2/P23 + P33'^2/P33 + (same at -rho)].
/// Terms whose probability is below the quadrature noise floor are dropped.
double fisher_info_2bit(double rho, double w);
double fisher_info_2bit(const ProbabilityTable& table, double rho);

/// Per-observation Fisher information of the five-cell likelihood.
double fisher_info_2bit_five_cell(double rho, double w);
double fisher_info_2bit_five_cell(const ProbabilityTable& table, double rho);

/// Per-observation Fisher information of the sign (1-bit) estimator.
double fisher_info_1bit(double rho);

/// Per-observation Fisher information of the diagonal-only linear estimator.
double fisher_info_2bit_linear(const ProbabilityTable& table, double rho);

/// I_2(rho, w) / I_1(rho).
double variance_ratio(double rho, double w);

/// Closed form of variance_ratio(0, w) = g(w)^2.
double g_function(double w);

} // namespace twobit

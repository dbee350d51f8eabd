#include "twobit/estimation.hpp"

#include "twobit/error.hpp"
#include "twobit/normal_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace twobit {

namespace {

constexpr double kProbabilityFloor = 1e-300;
// Base probabilities are quadrature results with ~1e-13 absolute error; below
// this level p is noise and its Fisher term (d1^2 / p, with d1 -> 0 faster) is dropped.
constexpr double kFisherNoiseFloor = 1e-12;

using RegionTriple = std::array<BaseRegionEval, 3>;

double fisher_term(const BaseRegionEval& e) {
    return e.p > kFisherNoiseFloor ? e.d1 * e.d1 / e.p : 0.0;
}

double six_cell_info(const RegionTriple& pos, const RegionTriple& neg) {
    const double a = fisher_term(pos[0]) + 2.0 * fisher_term(pos[1]) + fisher_term(pos[2]) +
                     fisher_term(neg[0]) + 2.0 * fisher_term(neg[1]) + fisher_term(neg[2]);
    return 2.0 * a;
}

double five_cell_info(const RegionTriple& pos, const RegionTriple& neg) {
    const BaseRegionEval merged{2.0 * neg[1].p + neg[2].p, 2.0 * neg[1].d1 + neg[2].d1, 0.0};
    const double a = fisher_term(pos[0]) + 2.0 * fisher_term(pos[1]) + fisher_term(pos[2]) +
                     fisher_term(neg[0]) + fisher_term(merged);
    return 2.0 * a;
}

struct Accumulator {
    LogLikelihood l{0.0, 0.0, 0.0};

    // Adds n * log P(s * rho) where (p, d1, d2) are evaluated at s * rho.
    void add(std::int64_t n, double p, double d1, double d2, int sign) {
        if (n == 0) {
            return;
        }
        const double count = static_cast<double>(n);
        const double prob = std::max(p, kProbabilityFloor);
        const double ratio = d1 / prob;
        l.value += count * std::log(prob);
        l.d1 += count * sign * ratio;
        l.d2 += count * (d2 / prob - ratio * ratio);
    }
};

bool finite(const LogLikelihood& l) {
    return std::isfinite(l.value) && std::isfinite(l.d1) && std::isfinite(l.d2);
}

} // namespace

void MleConfig::validate() const {
    if (!(tolerance > 0.0)) {
        throw ValidationError("MLE tolerance must be positive");
    }
    if (max_iterations < 1) {
        throw ValidationError("MLE max_iterations must be at least 1");
    }
    if (!(rho_lower < rho_upper) || rho_lower < -kRhoMax || rho_upper > kRhoMax) {
        throw ValidationError("MLE rho bounds must satisfy -1+eps <= lower < upper <= 1-eps");
    }
}

double estimate_1bit(std::int64_t n_same_sign, std::int64_t k) {
    if (k < 1) {
        throw ValidationError("1-bit estimate needs k >= 1");
    }
    if (n_same_sign < 0 || n_same_sign > k) {
        throw ValidationError("same-sign count " + std::to_string(n_same_sign) + " outside [0, " +
                              std::to_string(k) + "]");
    }
    const double agree = static_cast<double>(n_same_sign) / static_cast<double>(k);
    return std::clamp(std::cos(kPi * (1.0 - agree)), -kRhoMax, kRhoMax);
}

EstimateResult estimate_2bit_linear(const CellCounts& counts, const ProbabilityTable& table) {
    const std::int64_t k = counts.total();
    if (k < 1) {
        throw ValidationError("linear estimate needs at least one observation");
    }
    const double target = static_cast<double>(counts.exact_diagonal()) / static_cast<double>(k);
    auto diagonal = [&](double rho) {
        const auto e = table.lookup_all(rho);
        return 2.0 * (e[0].p + e[2].p);
    };

    EstimateResult result;
    result.converged = true;
    double lo = -kRhoMax;
    double hi = kRhoMax;
    if (target <= diagonal(lo)) {
        result.rho_hat = lo;
        result.at_boundary = true;
    } else if (target >= diagonal(hi)) {
        result.rho_hat = hi;
        result.at_boundary = true;
    } else {
        // The diagonal mass is increasing in rho on the whole range.
        while (hi - lo > 1e-15 && result.iterations < 200) {
            const double mid = 0.5 * (lo + hi);
            if (diagonal(mid) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
            ++result.iterations;
        }
        result.rho_hat = 0.5 * (lo + hi);
    }
    const double info = fisher_info_2bit_linear(table, result.rho_hat);
    if (info > 0.0) {
        result.predicted_variance = 1.0 / (static_cast<double>(k) * info);
    }
    return result;
}

LogLikelihood log_likelihood(const CellCounts& counts, const ProbabilityTable& table, double rho,
                             CellMode mode) {
    const RegionTriple pos = table.lookup_all(rho);
    const RegionTriple neg = table.lookup_all(-rho);
    Accumulator acc;
    for (std::size_t r = 0; r < 3; ++r) {
        acc.add(counts.cells[r], pos[r].p, pos[r].d1, pos[r].d2, +1);
    }
    acc.add(counts[CellGroup::DiagInnerNeg], neg[0].p, neg[0].d1, neg[0].d2, -1);
    if (mode == CellMode::SixCell) {
        acc.add(counts[CellGroup::AdjOpp], neg[1].p, neg[1].d1, neg[1].d2, -1);
        acc.add(counts[CellGroup::DiagOuterNeg], neg[2].p, neg[2].d1, neg[2].d2, -1);
    } else {
        acc.add(counts[CellGroup::AdjOpp] + counts[CellGroup::DiagOuterNeg], 2.0 * neg[1].p + neg[2].p,
                2.0 * neg[1].d1 + neg[2].d1, 2.0 * neg[1].d2 + neg[2].d2, -1);
    }
    return acc.l;
}

EstimateResult estimate_2bit_mle(const CellCounts& counts, const ProbabilityTable& table,
                                 const MleConfig& config) {
    config.validate();
    const std::int64_t k = counts.total();
    if (k < 1) {
        throw ValidationError("MLE needs at least one observation");
    }
    for (auto c : counts.cells) {
        if (c < 0) {
            throw ValidationError("cell counts must be non-negative");
        }
    }
    auto eval = [&](double rho) { return log_likelihood(counts, table, rho, config.mode); };

    const double init =
        std::clamp(estimate_1bit(counts.same_sign(), k), config.rho_lower, config.rho_upper);
    const LogLikelihood at_init = eval(init);

    EstimateResult result;
    auto finish = [&](double rho) {
        result.rho_hat = rho;
        const double info = config.mode == CellMode::SixCell ? fisher_info_2bit(table, rho)
                                                             : fisher_info_2bit_five_cell(table, rho);
        if (info > 0.0) {
            result.predicted_variance = 1.0 / (static_cast<double>(k) * info);
        }
        return result;
    };
    if (std::abs(at_init.d1) <= config.tolerance) {
        result.converged = true;
        return finish(init);
    }

    // Phase 1: walk uphill from the initializer until l' changes sign or a bound is hit.
    const double dir = at_init.d1 > 0.0 ? 1.0 : -1.0;
    const double bound = dir > 0.0 ? config.rho_upper : config.rho_lower;
    double from = init;
    LogLikelihood at_from = at_init;
    double step = 0.05;
    if (at_init.d2 < 0.0 && std::isfinite(at_init.d2)) {
        step = std::clamp(2.0 * std::abs(at_init.d1 / at_init.d2), 1e-9, 0.25);
    }
    double to = from;
    LogLikelihood at_to = at_from;
    bool bracketed = false;
    while (!bracketed) {
        if (++result.iterations > config.max_iterations) {
            result.iterations = config.max_iterations;
            return finish(from);
        }
        to = dir * (from + dir * step - bound) >= 0.0 ? bound : from + dir * step;
        at_to = eval(to);
        const double slope = dir * at_to.d1;
        if (std::abs(at_to.d1) <= config.tolerance && at_to.value >= at_from.value) {
            result.converged = true;
            return finish(to);
        }
        if (slope > 0.0 && at_to.value >= at_from.value) {
            if (to == bound) {
                result.converged = true;
                result.at_boundary = true;
                return finish(bound);
            }
            from = to;
            at_from = at_to;
            step *= 2.0;
        } else if (slope < 0.0) {
            bracketed = true;
        } else {
            // Went downhill while l' still points onward (or l' is unusable): a dip
            // lies between, so retreat and look closer to the last good point.
            step *= 0.25;
            if (step < 1e-12) {
                return finish(from);
            }
        }
    }

    // Phase 2: safeguarded Newton inside [a, b] with l'(a) > 0 > l'(b).
    double a = dir > 0.0 ? from : to;
    double b = dir > 0.0 ? to : from;
    double x = from;
    LogLikelihood cur = at_from;
    double step_before_last = b - a;
    double last_step = step_before_last;
    while (true) {
        if (std::abs(cur.d1) <= config.tolerance) {
            result.converged = true;
            break;
        }
        if (result.iterations >= config.max_iterations) {
            break;
        }
        ++result.iterations;
        if (!finite(cur)) {
            // Only the sign of l' is trustworthy here.
            cur.d2 = std::numeric_limits<double>::quiet_NaN();
        }
        if (cur.d1 > 0.0) {
            a = x;
        } else {
            b = x;
        }
        double next = 0.5 * (a + b);
        if (cur.d2 < 0.0) {
            const double newton = x - cur.d1 / cur.d2;
            const bool inside = newton > a && newton < b;
            const bool shrinking = std::abs(2.0 * cur.d1) <= std::abs(step_before_last * cur.d2);
            if (inside && shrinking) {
                next = newton;
            }
        }
        step_before_last = last_step;
        last_step = next - x;
        if (next <= a || next >= b || next == x) {
            // Root located to adjacent doubles.
            result.converged = true;
            break;
        }
        x = next;
        cur = eval(x);
    }

    if (cur.value < at_init.value) {
        // Never return something worse than the starting point.
        result.converged = false;
        return finish(init);
    }
    return finish(x);
}

double fisher_info_2bit(double rho, double w) {
    const double r = clamp_rho(rho).value;
    return six_cell_info(evaluate_base_regions(r, w), evaluate_base_regions(-r, w));
}

double fisher_info_2bit(const ProbabilityTable& table, double rho) {
    return six_cell_info(table.lookup_all(rho), table.lookup_all(-rho));
}

double fisher_info_2bit_five_cell(double rho, double w) {
    const double r = clamp_rho(rho).value;
    return five_cell_info(evaluate_base_regions(r, w), evaluate_base_regions(-r, w));
}

double fisher_info_2bit_five_cell(const ProbabilityTable& table, double rho) {
    return five_cell_info(table.lookup_all(rho), table.lookup_all(-rho));
}

double fisher_info_1bit(double rho) {
    const double r = clamp_rho(rho).value;
    const double quarter = std::asin(r) / (2.0 * kPi);
    return 2.0 / (4.0 * kPi * kPi * (1.0 - r) * (1.0 + r)) * (1.0 / (0.25 + quarter) + 1.0 / (0.25 - quarter));
}

double fisher_info_2bit_linear(const ProbabilityTable& table, double rho) {
    const auto e = table.lookup_all(rho);
    const double f = 2.0 * (e[0].p + e[2].p);
    const double df = 2.0 * (e[0].d1 + e[2].d1);
    const double denom = f * (1.0 - f);
    return denom > kFisherNoiseFloor ? df * df / denom : 0.0;
}

double variance_ratio(double rho, double w) { return fisher_info_2bit(rho, w) / fisher_info_1bit(rho); }

double g_function(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("g(w) needs w > 0");
    }
    const double inner_mass = 0.5 * std::erf(w * 0.70710678118654752440); // Phi(w) - 1/2
    const double tail = std_normal_sf(w);
    const double a = 1.0 - std::exp(-0.5 * w * w);
    const double first = a * a / inner_mass;
    const double second = tail > 0.0 ? std::exp(-w * w) / tail : 0.0;
    return 0.5 * (first + second);
}

} // namespace twobit

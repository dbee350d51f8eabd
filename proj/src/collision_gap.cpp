#include "twobit/collision_gap.hpp"

#include "twobit/error.hpp"
#include "twobit/normal_math.hpp"
#include "twobit/region_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace twobit {

namespace {

constexpr double kBandMassCutoff = 1e-14;
const QuadratureSpec kCollisionQuadrature{1e-13, 4000};

void require_w(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("bin width w must be positive, got " + std::to_string(w));
    }
}

double normal_mass(double lo, double hi) {
    if (lo > 0.0) {
        return std_normal_sf(lo) - std_normal_sf(hi);
    }
    return std_normal_cdf(hi) - std_normal_cdf(lo);
}

} // namespace

double collision_prob_uniform(double rho, double w) {
    require_w(w);
    const double r = clamp_rho(rho).value;
    const double s = std::sqrt((1.0 - r) * (1.0 + r));
    // By the (x, y) -> (-x, -y) symmetry the negative bins mirror the
    // non-negative ones, hence the factor 2. Band i is cut off once its
    // marginal mass Phi((i+1)w) - Phi(iw) < 1e-14; every later band carries
    // less mass than the discarded tail 1 - Phi(iw), which is itself of the
    // same order because the Gaussian tail decays faster than geometrically.
    double total = 0.0;
    for (int i = 0;; ++i) {
        const double lo = i * w;
        const double hi = (i + 1) * w;
        if (normal_mass(lo, hi) < kBandMassCutoff) {
            break;
        }
        total += integrate(
            [=](double z) {
                return std_normal_pdf(z) * normal_mass((lo - r * z) / s, (hi - r * z) / s);
            },
            lo, hi, kCollisionQuadrature);
    }
    return std::min(2.0 * total, 1.0);
}

double collision_prob_offset(double d, double w) {
    require_w(w);
    if (!(d >= 0.0) || d > 4.0) {
        throw ValidationError("squared distance must lie in [0, 4], got " + std::to_string(d));
    }
    if (d == 0.0) {
        return 1.0;
    }
    // Closed form of  int_0^w (1/sqrt d) 2 phi(t/sqrt d) (1 - t/w) dt.
    const double sigma = std::sqrt(d);
    const double ratio = w / sigma;
    const double mass = 2.0 * normal_mass(0.0, ratio);
    const double first_moment = 2.0 * sigma * (kInvSqrt2Pi - std_normal_pdf(ratio));
    return std::clamp(mass - first_moment / w, 0.0, 1.0);
}

std::string_view scheme_name(QuantScheme scheme) {
    return scheme == QuantScheme::Uniform ? "uniform" : "offset";
}

QuantScheme parse_scheme(std::string_view name) {
    if (name == "uniform") {
        return QuantScheme::Uniform;
    }
    if (name == "offset") {
        return QuantScheme::Offset;
    }
    throw ValidationError("unknown scheme '" + std::string(name) + "' (expected uniform or offset)");
}

double max_admissible_c(double rho0) { return std::sqrt(1.0 / (1.0 - rho0)); }

GapQuery GapQuery::make(double rho0, double c, double w) {
    if (!(rho0 >= 0.0) || !(rho0 < 1.0)) {
        throw ValidationError("target similarity rho0 must lie in [0, 1), got " + std::to_string(rho0));
    }
    if (!(c > 1.0) || !std::isfinite(c)) {
        throw ValidationError("approximation factor c must exceed 1, got " + std::to_string(c));
    }
    require_w(w);
    GapQuery q{rho0, c, w, 0.0, 0.0, 0.0};
    q.d0 = 2.0 * (1.0 - rho0);
    q.d2 = c * c * q.d0;
    q.rho2 = 1.0 - q.d2 / 2.0;
    if (q.rho2 < -kRhoMax) {
        throw ValidationError("c=" + std::to_string(c) + " pushes the far similarity below -1 for rho0=" +
                              std::to_string(rho0));
    }
    return q;
}

GapProfile gap(const GapQuery& query, QuantScheme scheme) {
    GapProfile profile{};
    if (scheme == QuantScheme::Uniform) {
        profile.p1 = collision_prob_uniform(query.rho0, query.w);
        profile.p2 = collision_prob_uniform(query.rho2, query.w);
    } else {
        profile.p1 = collision_prob_offset(query.d0, query.w);
        profile.p2 = collision_prob_offset(query.d2, query.w);
    }
    profile.gap = std::log(1.0 / profile.p1) / std::log(1.0 / profile.p2);
    return profile;
}

OptimalGap optimal_gap(double rho0, double c, QuantScheme scheme, const std::vector<double>& w_grid) {
    if (w_grid.empty()) {
        throw ValidationError("w grid is empty");
    }
    OptimalGap best{w_grid.front(), std::numeric_limits<double>::infinity()};
    double previous = 0.0;
    for (double w : w_grid) {
        if (!(w > previous)) {
            throw ValidationError("w grid must be positive and ascending");
        }
        previous = w;
        const double g = gap(GapQuery::make(rho0, c, w), scheme).gap;
        if (g < best.gap_star) {
            best = {w, g};
        }
    }
    return best;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2) {
        throw ValidationError("geometric grid needs 0 < lo < hi and at least two points");
    }
    std::vector<double> grid(points);
    const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo * std::exp(ratio * static_cast<double>(i));
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> default_w_grid() { return geometric_grid(0.25, 5.0, 200); }

} // namespace twobit

#include "twobit/region_model.hpp"

#include "binary_io.hpp"
#include "twobit/error.hpp"
#include "twobit/normal_math.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

namespace twobit {

namespace {

constexpr double kInv2Pi = 1.0 / (2.0 * kPi);
constexpr double kInvSqrt2 = 0.70710678118654752440;

// Relative accuracy matters: the likelihood takes logs of very small cell masses.
const QuadratureSpec kRegionQuadrature{1e-300, 4000, 1e-12};

// Below this the quadrant identity for the outer mass cancels badly.
constexpr double kOuterDirectBelow = 1e-3;

// Table lookups go direct beyond this |rho|; derivatives grow like (1 - rho^2)^-1/2.
constexpr double kTableDirectBeyond = 0.99;

// Node masses below this are interpolated as log p.
constexpr double kLogInterpolationBelow = 1e-3;

void require_positive_w(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("threshold w must be positive and finite, got " + std::to_string(w));
    }
}

// Phi(hi) - Phi(lo) for lo <= hi, taken from whichever tail is more accurate.
double normal_mass(double lo, double hi) {
    if (lo > 0.0) {
        return 0.5 * (std::erfc(lo * kInvSqrt2) - std::erfc(hi * kInvSqrt2));
    }
    return 0.5 * (std::erfc(-hi * kInvSqrt2) - std::erfc(-lo * kInvSqrt2));
}

double phi_raw(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double cdf_raw(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

struct Probabilities {
    double inner;
    double straddle;
    double outer;
};

// As |rho| -> 1 the integrands develop layers of width ~s at the ends of the
// range, narrow enough for a 15-point rule to step over. Break there explicitly.
double integrate_layered(const std::function<double(double)>& f, double a, double b, double s) {
    std::vector<double> cuts = {a, b};
    for (double k = 1.0; k <= 1024.0; k *= 4.0) {
        if (a + k * s < b) {
            cuts.push_back(a + k * s);
        }
        if (b - k * s > a) {
            cuts.push_back(b - k * s);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) {
            total += integrate(f, cuts[i], cuts[i + 1], kRegionQuadrature);
        }
    }
    return total;
}

Probabilities probabilities(double rho, double w) {
    const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
    const double inner = integrate_layered(
        [=](double x) { return phi_raw(x) * normal_mass(-rho * x / s, (w - rho * x) / s); }, 0.0, w, s);
    const double straddle = integrate_layered(
        [=](double x) { return phi_raw(x) * cdf_raw((rho * x - w) / s); }, 0.0, w, s);
    // Quadrant identity: P(x>0, y>0) = P22 + 2 P23 + P33.
    const double quadrant = 0.25 + std::asin(rho) * kInv2Pi;
    double outer = quadrant - inner - 2.0 * straddle;
    if (outer < kOuterDirectBelow) {
        auto f = [=](double x) { return phi_raw(x) * 0.5 * std::erfc((w - rho * x) / s * kInvSqrt2); };
        outer = integrate_layered(f, w, w + 1.0, s) + integrate(f, w + 1.0, w + 40.0, kRegionQuadrature);
    }
    return {std::clamp(inner, 0.0, 1.0), std::clamp(straddle, 0.0, 1.0), std::clamp(outer, 0.0, 1.0)};
}

struct Derivatives {
    std::array<double, 3> d1;
    std::array<double, 3> d2;
};

Derivatives derivatives(double rho, double w) {
    const double s2 = (1.0 - rho) * (1.0 + rho);
    const double s = std::sqrt(s2);
    const double w2 = w * w;
    const double c = kInv2Pi / s;
    const double e1 = std::exp(-w2 / (2.0 * s2));
    const double e2 = std::exp(-w2 / (1.0 + rho));

    Derivatives d{};
    d.d1 = {c * (1.0 - 2.0 * e1 + e2), c * (e1 - e2), c * e2};

    const double a = kInv2Pi * rho / (s2 * s);
    const double b = e1 == 0.0 ? 0.0 : a * e1 * (1.0 - w2 / s2);
    const double cc = e2 == 0.0 ? 0.0 : c * e2 * (rho / s2 + w2 / ((1.0 + rho) * (1.0 + rho)));
    d.d2 = {a - 2.0 * b + cc, b - cc, cc};
    return d;
}

std::size_t index_of(BaseRegion region) { return static_cast<std::size_t>(region); }

double hermite(double t, double h, double y0, double m0, double y1, double m1) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1;
}

} // namespace

ClampedRho clamp_rho(double rho) {
    if (!std::isfinite(rho) || std::abs(rho) > 1.0) {
        throw ValidationError("correlation must lie in [-1, 1], got " + std::to_string(rho));
    }
    if (rho > kRhoMax) {
        return {kRhoMax, true};
    }
    if (rho < -kRhoMax) {
        return {-kRhoMax, true};
    }
    return {rho, false};
}

RegionReduction reduce_region(RegionId region) {
    if (region.row < 0 || region.row > 3 || region.col < 0 || region.col > 3) {
        throw ValidationError("region indices must lie in {0,1,2,3}");
    }
    const bool x_positive = region.row >= 2;
    const bool y_positive = region.col >= 2;
    const bool x_outer = region.row == 0 || region.row == 3;
    const bool y_outer = region.col == 0 || region.col == 3;
    BaseRegion base = BaseRegion::Straddle;
    if (x_outer && y_outer) {
        base = BaseRegion::Outer;
    } else if (!x_outer && !y_outer) {
        base = BaseRegion::Inner;
    }
    return {base, x_positive == y_positive ? 1 : -1};
}

std::array<BaseRegionEval, 3> evaluate_base_regions(double rho, double w) {
    require_positive_w(w);
    const double r = clamp_rho(rho).value;
    const Probabilities p = probabilities(r, w);
    const Derivatives d = derivatives(r, w);
    return {BaseRegionEval{p.inner, d.d1[0], d.d2[0]}, BaseRegionEval{p.straddle, d.d1[1], d.d2[1]},
            BaseRegionEval{p.outer, d.d1[2], d.d2[2]}};
}

double base_region_prob(BaseRegion region, double rho, double w) {
    require_positive_w(w);
    const Probabilities p = probabilities(clamp_rho(rho).value, w);
    switch (region) {
    case BaseRegion::Inner: return p.inner;
    case BaseRegion::Straddle: return p.straddle;
    case BaseRegion::Outer: return p.outer;
    }
    return 0.0;
}

double base_region_d1(BaseRegion region, double rho, double w) {
    require_positive_w(w);
    return derivatives(clamp_rho(rho).value, w).d1[index_of(region)];
}

double base_region_d2(BaseRegion region, double rho, double w) {
    require_positive_w(w);
    return derivatives(clamp_rho(rho).value, w).d2[index_of(region)];
}

double region_prob(RegionId region, double rho, double w) {
    const RegionReduction r = reduce_region(region);
    return base_region_prob(r.base, r.sign * rho, w);
}

double region_d1(RegionId region, double rho, double w) {
    const RegionReduction r = reduce_region(region);
    return r.sign * base_region_d1(r.base, r.sign * rho, w);
}

double region_d2(RegionId region, double rho, double w) {
    const RegionReduction r = reduce_region(region);
    return base_region_d2(r.base, r.sign * rho, w);
}

ProbabilityTable ProbabilityTable::build(double w, double grid_step) {
    require_positive_w(w);
    if (!(grid_step > 0.0) || grid_step > 0.01) {
        throw ValidationError("grid_step must lie in (0, 0.01], got " + std::to_string(grid_step));
    }
    ProbabilityTable table;
    table.w_ = w;
    table.grid_step_ = grid_step;

    long last = static_cast<long>(std::floor(kRhoMax / grid_step));
    while (static_cast<double>(last) * grid_step >= kRhoMax) {
        --last;
    }
    table.grid_.reserve(static_cast<std::size_t>(2 * last + 3));
    table.grid_.push_back(-kRhoMax);
    for (long m = -last; m <= last; ++m) {
        table.grid_.push_back(static_cast<double>(m) * grid_step);
    }
    table.grid_.push_back(kRhoMax);

    table.entries_.reserve(table.grid_.size());
    for (double rho : table.grid_) {
        table.entries_.push_back(evaluate_base_regions(rho, w));
    }
    return table;
}

std::array<BaseRegionEval, 3> ProbabilityTable::lookup_all(double rho) const {
    const double r = clamp_rho(rho).value;
    auto upper = std::upper_bound(grid_.begin(), grid_.end(), r);
    std::size_t hi = static_cast<std::size_t>(upper - grid_.begin());
    if (hi == 0) {
        hi = 1;
    } else if (hi >= grid_.size()) {
        return entries_.back();
    }
    const std::size_t lo = hi - 1;
    if (r == grid_[lo]) {
        return entries_[lo];
    }
    if (std::abs(r) > kTableDirectBeyond) {
        return evaluate_base_regions(r, w_);
    }
    const double h = grid_[hi] - grid_[lo];
    const double t = (r - grid_[lo]) / h;
    std::array<BaseRegionEval, 3> out;
    for (std::size_t k = 0; k < 3; ++k) {
        const BaseRegionEval& a = entries_[lo][k];
        const BaseRegionEval& b = entries_[hi][k];
        if (std::min(a.p, b.p) >= kLogInterpolationBelow) {
            out[k] = {hermite(t, h, a.p, a.d1, b.p, b.d1), hermite(t, h, a.d1, a.d2, b.d1, b.d2),
                      a.d2 + t * (b.d2 - a.d2)};
            continue;
        }
        if (!(a.p > 0.0 && b.p > 0.0)) {
            return evaluate_base_regions(r, w_);
        }
        // Interpolate log p, its slope and curvature, then map back.
        const double sa = a.d1 / a.p;
        const double sb = b.d1 / b.p;
        const double ca = a.d2 / a.p - sa * sa;
        const double cb = b.d2 / b.p - sb * sb;
        const double slope = hermite(t, h, sa, ca, sb, cb);
        const double curvature = ca + t * (cb - ca);
        const double p = std::exp(hermite(t, h, std::log(a.p), sa, std::log(b.p), sb));
        out[k] = {p, p * slope, p * (curvature + slope * slope)};
    }
    return out;
}

BaseRegionEval ProbabilityTable::lookup(BaseRegion region, double rho) const {
    return lookup_all(rho)[index_of(region)];
}

namespace {
constexpr std::string_view kTableMagic = "TBPT";
constexpr std::uint32_t kTableVersion = 1;
} // namespace

void ProbabilityTable::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    io::write_magic(out, kTableMagic);
    io::write_u32(out, kTableVersion);
    io::write_f64(out, w_);
    io::write_f64(out, epsilon_);
    io::write_f64(out, grid_step_);
    io::write_u64(out, grid_.size());
    for (double rho : grid_) {
        io::write_f64(out, rho);
    }
    for (const auto& node : entries_) {
        for (const BaseRegionEval& e : node) {
            io::write_f64(out, e.p);
            io::write_f64(out, e.d1);
            io::write_f64(out, e.d2);
        }
    }
    if (!out) {
        throw FormatError("write failed: " + path.string());
    }

    nlohmann::json meta = {
        {"format", "twobit-probability-table"},
        {"version", kTableVersion},
        {"w", w_},
        {"epsilon", epsilon_},
        {"grid_step", grid_step_},
        {"nodes", grid_.size()},
        {"regions", {"inner(2,2)", "straddle(2,3)", "outer(3,3)"}},
        {"fields", {"p", "d1", "d2"}},
        {"byte_order", "little-endian"},
    };
    std::ofstream sidecar(path.string() + ".json");
    sidecar << meta.dump(2) << '\n';
}

ProbabilityTable ProbabilityTable::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    io::expect_magic(in, kTableMagic);
    if (const auto version = io::read_u32(in); version != kTableVersion) {
        throw FormatError("unsupported table version " + std::to_string(version));
    }
    ProbabilityTable table;
    table.w_ = io::read_f64(in);
    table.epsilon_ = io::read_f64(in);
    table.grid_step_ = io::read_f64(in);
    const std::uint64_t nodes = io::read_u64(in);
    if (!(table.w_ > 0.0) || nodes < 2 || nodes > (1u << 26)) {
        throw FormatError("corrupt table header in " + path.string());
    }
    table.grid_.resize(nodes);
    for (double& rho : table.grid_) {
        rho = io::read_f64(in);
    }
    if (!std::is_sorted(table.grid_.begin(), table.grid_.end(), std::less_equal<>())) {
        throw FormatError("table grid is not strictly ascending");
    }
    table.entries_.resize(nodes);
    for (auto& node : table.entries_) {
        for (BaseRegionEval& e : node) {
            e.p = io::read_f64(in);
            e.d1 = io::read_f64(in);
            e.d2 = io::read_f64(in);
        }
    }
    return table;
}

} // namespace twobit

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace twobit {

/// Distance kept from the singular endpoints rho = +-1.
inline constexpr double kRhoEpsilon = 1e-8;
inline constexpr double kRhoMax = 1.0 - kRhoEpsilon;

struct ClampedRho {
    double value;
    bool clamped;
};

/// Clamps rho into [-1+eps, 1-eps]. Non-finite values and |rho| > 1 are rejected.
ClampedRho clamp_rho(double rho);

/// The three regions every other cell of the 4x4 code grid reduces to.
///   Inner:    x in (0, w],  y in (0, w]      cell (2,2)
///   Straddle: x in (0, w],  y in (w, inf)    cell (2,3)
///   Outer:    x in (w, inf), y in (w, inf)   cell (3,3)
enum class BaseRegion : std::uint8_t { Inner = 0, Straddle = 1, Outer = 2 };

inline constexpr std::array<BaseRegion, 3> kBaseRegions = {BaseRegion::Inner, BaseRegion::Straddle,
                                                           BaseRegion::Outer};

/// Probability of a base region together with its first two rho-derivatives.
struct BaseRegionEval {
    double p = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Cell of the 4x4 grid, indexed by the 2-bit codes of x (row) and y (col).
struct RegionId {
    int row;
    int col;
};

/// How a cell maps onto a base region: P_{row,col}(rho) = P_base(sign * rho).
struct RegionReduction {
    BaseRegion base;
    int sign;
};

RegionReduction reduce_region(RegionId region);

double base_region_prob(BaseRegion region, double rho, double w);
double base_region_d1(BaseRegion region, double rho, double w);
double base_region_d2(BaseRegion region, double rho, double w);

/// p, d1 and d2 of all three base regions at (rho, w), sharing the quadratures.
std::array<BaseRegionEval, 3> evaluate_base_regions(double rho, double w);

double region_prob(RegionId region, double rho, double w);
double region_d1(RegionId region, double rho, double w);
double region_d2(RegionId region, double rho, double w);

/// Precomputed base-region values on a rho grid at fixed w.
///
/// Nodes are every multiple of grid_step strictly inside (-1+eps, 1-eps) plus
/// the two endpoints. Between nodes p and d1 are cubic Hermite interpolants
/// (using d1 and d2 as slopes), d2 is linear. Where a node mass is below 1e-3 the
/// same scheme runs on log p so small masses keep their relative accuracy. For
/// |rho| > 0.99, where the derivatives diverge, lookups are evaluated directly.
/// The table is immutable once built.
class ProbabilityTable {
public:
    static constexpr double kDefaultStep = 1e-3;

    static ProbabilityTable build(double w, double grid_step = kDefaultStep);

    double w() const { return w_; }
    double epsilon() const { return epsilon_; }
    double grid_step() const { return grid_step_; }
    const std::vector<double>& rho_grid() const { return grid_; }
    const std::array<BaseRegionEval, 3>& node(std::size_t i) const { return entries_[i]; }

    /// Interpolated evaluation; rho is clamped like every other evaluator.
    BaseRegionEval lookup(BaseRegion region, double rho) const;
    std::array<BaseRegionEval, 3> lookup_all(double rho) const;

    /// Binary layout (little-endian):
    ///   "TBPT" | u32 version=1 | f64 w | f64 eps | f64 grid_step | u64 nodes
    ///   | nodes x f64 rho | nodes x 3 regions x (p, d1, d2) f64
    /// plus a JSON sidecar at <path>.json with the same metadata.
    void save(const std::filesystem::path& path) const;
    static ProbabilityTable load(const std::filesystem::path& path);

private:
    ProbabilityTable() = default;

    double w_ = 0.0;
    double epsilon_ = kRhoEpsilon;
    double grid_step_ = kDefaultStep;
    std::vector<double> grid_;
    std::vector<std::array<BaseRegionEval, 3>> entries_;
};

} // namespace twobit

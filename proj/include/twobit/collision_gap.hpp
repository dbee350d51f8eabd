#pragma once

#include <string_view>
#include <vector>

namespace twobit {

/// Pr(floor(x/w) == floor(y/w)) for (x, y) standard bivariate normal with correlation rho.
/// The band series is cut once a band's marginal mass drops below 1e-14.
double collision_prob_uniform(double rho, double w);

/// Pr(floor((x+q)/w) == floor((y+q)/w)), q ~ U[0, w), for squared distance d = ||u - v||^2.
double collision_prob_offset(double d, double w);

enum class QuantScheme { Uniform, Offset };

std::string_view scheme_name(QuantScheme scheme);
QuantScheme parse_scheme(std::string_view name);

/// Largest c for which c * sqrt(d0) stays within the rho >= 0 range.
double max_admissible_c(double rho0);

/// A c-approximate near-neighbour question at target similarity rho0.
///
/// The only place where similarity and squared distance are converted
/// (d = 2(1 - rho)); everything downstream reads the fields.
struct GapQuery {
    double rho0;
    double c;
    double w;
    double d0;   // squared distance at the target
    double d2;   // c^2 d0
    double rho2; // 1 - d2 / 2

    static GapQuery make(double rho0, double c, double w);
};

struct GapProfile {
    double p1;
    double p2;
    double gap;
};

GapProfile gap(const GapQuery& query, QuantScheme scheme);

struct OptimalGap {
    double w_star;
    double gap_star;
};

/// Grid minimiser of the gap over w; the first minimum wins ties.
OptimalGap optimal_gap(double rho0, double c, QuantScheme scheme, const std::vector<double>& w_grid);

/// Geometric grid of `points` values from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t points);

/// The default sweep grid: 200 geometric points over [0.25, 5].
std::vector<double> default_w_grid();

} // namespace twobit

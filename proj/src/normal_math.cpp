#include "twobit/normal_math.hpp"

#include "twobit/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <queue>
#include <string>
#include <vector>

namespace twobit {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw ValidationError(std::string(what) + ": non-finite argument");
    }
}

// Kronrod 15-point abscissae on [-1, 1] (non-negative half); odd indices are
// the embedded 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod15(const std::function<double(double)>& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * pair;
        }
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace

double std_normal_pdf(double x) {
    require_finite(x, "std_normal_pdf");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
    require_finite(x, "std_normal_cdf");
    return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

double std_normal_sf(double x) {
    require_finite(x, "std_normal_sf");
    return 0.5 * std::erfc(x * 0.70710678118654752440);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
    if (!(spec.absolute_tolerance > 0.0) || !(spec.relative_tolerance >= 0.0) || spec.max_subdivisions < 1) {
        throw ValidationError("integrate: invalid quadrature spec");
    }
    require_finite(a, "integrate");
    require_finite(b, "integrate");
    if (a > b) {
        throw ValidationError("integrate: lower limit exceeds upper limit");
    }
    if (a == b) {
        return 0.0;
    }

    std::priority_queue<Panel> panels;
    Panel first = kronrod15(f, a, b);
    double total = first.value;
    double error = first.error;
    panels.push(first);

    auto target = [&] { return std::max(spec.absolute_tolerance, spec.relative_tolerance * std::abs(total)); };
    int subdivisions = 0;
    while (error > target()) {
        if (subdivisions >= spec.max_subdivisions) {
            char msg[160];
            std::snprintf(msg, sizeof msg, "integrate: tolerance %.3g not reached after %d subdivisions (error estimate %.3g)",
                          target(), subdivisions, error);
            throw AccuracyError(msg);
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            throw AccuracyError("integrate: interval cannot be split further");
        }
        Panel left = kronrod15(f, worst.a, mid);
        Panel right = kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
        // The running sums drift; resum occasionally so the stopping test is honest.
        if (subdivisions % 64 == 0 || error <= target()) {
            auto copy = panels;
            double t = 0.0;
            double e = 0.0;
            while (!copy.empty()) {
                t += copy.top().value;
                e += copy.top().error;
                copy.pop();
            }
            total = t;
            error = e;
        }
    }
    if (!std::isfinite(total)) {
        throw AccuracyError("integrate: non-finite result");
    }
    return total;
}

} // namespace twobit

#include "oracles.hpp"

#include "twobit/error.hpp"
#include "twobit/normal_math.hpp"
#include "twobit/region_model.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace twobit;

namespace {

const std::vector<double> kWs = {0.4, 0.6, 0.75, 1.0, 1.5, 3.0};

std::vector<double> rho_grid() {
    std::vector<double> out;
    for (int i = -19; i <= 19; ++i) {
        out.push_back(i * 0.05);
    }
    return out;
}

double quadrant(double rho) { return 0.25 + std::asin(rho) / (2.0 * kPi); }

const ProbabilityTable& table075() {
    static const ProbabilityTable t = ProbabilityTable::build(0.75);
    return t;
}

} // namespace

TEST(ClampRho, InteriorUnchanged) {
    const auto c = clamp_rho(0.3);
    EXPECT_EQ(c.value, 0.3);
    EXPECT_FALSE(c.clamped);
}

TEST(ClampRho, EndpointsClampedAndFlagged) {
    EXPECT_EQ(clamp_rho(1.0).value, kRhoMax);
    EXPECT_TRUE(clamp_rho(1.0).clamped);
    EXPECT_EQ(clamp_rho(-1.0).value, -kRhoMax);
    EXPECT_TRUE(clamp_rho(-1.0).clamped);
}

TEST(ClampRho, RejectsOutOfRange) {
    EXPECT_THROW(clamp_rho(1.5), ValidationError);
    EXPECT_THROW(clamp_rho(std::nan("")), ValidationError);
    EXPECT_THROW(base_region_prob(BaseRegion::Inner, -1.01, 0.75), ValidationError);
}

TEST(BaseRegion, RejectsNonPositiveW) {
    EXPECT_THROW(base_region_prob(BaseRegion::Inner, 0.0, 0.0), ValidationError);
    EXPECT_THROW(base_region_d1(BaseRegion::Outer, 0.0, -1.0), ValidationError);
}

TEST(BaseRegion, OuterAtZeroFactorises) {
    for (double w : kWs) {
        const double t = 1.0 - oracle::Phi(w);
        EXPECT_NEAR(base_region_prob(BaseRegion::Outer, 0.0, w), t * t, 1e-12) << w;
    }
}

TEST(BaseRegion, InnerAndStraddleAtZeroFactorise) {
    for (double w : kWs) {
        const double a = oracle::Phi(w) - 0.5;
        const double b = 1.0 - oracle::Phi(w);
        EXPECT_NEAR(base_region_prob(BaseRegion::Inner, 0.0, w), a * a, 1e-12);
        EXPECT_NEAR(base_region_prob(BaseRegion::Straddle, 0.0, w), a * b, 1e-12);
    }
}

TEST(BaseRegion, StraddleVanishesLikeSqrtNearPerfectCorrelation) {
    // Near rho = 1 the straddle mass is a layer of width s = sqrt(1 - rho^2) at x = w:
    // P23 ~ phi(w) * s * phi(0).
    for (double gap : {1e-7, 1e-8}) {
        const double rho = 1.0 - gap;
        const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
        const double approx = oracle::phi(0.75) * s * oracle::phi(0.0);
        EXPECT_NEAR(base_region_prob(BaseRegion::Straddle, rho, 0.75), approx, 1e-3 * approx) << gap;
    }
}

TEST(BaseRegion, ProbabilitiesInUnitInterval) {
    for (double w : kWs) {
        for (double rho : {-kRhoMax, -0.999, -0.5, 0.0, 0.5, 0.999, kRhoMax}) {
            for (auto r : kBaseRegions) {
                const double p = base_region_prob(r, rho, w);
                EXPECT_GE(p, 0.0);
                EXPECT_LE(p, 1.0);
            }
        }
    }
}

TEST(BaseRegion, InnerMatchesSimpsonOracle) {
    // Independent evaluation of Pr(0 < x <= w, 0 < y <= w) by Simpson's rule.
    for (double rho : {-0.8, -0.3, 0.2, 0.6, 0.95}) {
        for (double w : {0.5, 0.75, 2.0}) {
            const double s = std::sqrt(1.0 - rho * rho);
            auto f = [&](double x) {
                return oracle::phi(x) * (oracle::Phi((w - rho * x) / s) - oracle::Phi(-rho * x / s));
            };
            EXPECT_NEAR(base_region_prob(BaseRegion::Inner, rho, w), oracle::simpson(f, 0.0, w), 1e-10);
        }
    }
}

TEST(BaseRegion, InnerMatchesMonteCarlo) {
    const double w = 0.75;
    const auto mc = oracle::mc_proportion(0.5, 4'000'000, 11, [w](double x, double y) {
        return x > 0 && x <= w && y > 0 && y <= w;
    });
    EXPECT_NEAR(base_region_prob(BaseRegion::Inner, 0.5, w), mc.p, 4 * mc.se);
}

TEST(BaseRegion, D1OuterAtZero) {
    for (double w : kWs) {
        EXPECT_NEAR(base_region_d1(BaseRegion::Outer, 0.0, w), std::exp(-w * w) / (2 * kPi), 1e-14);
    }
}

TEST(BaseRegion, D1TelescopesToQuadrantDerivative) {
    for (double w : kWs) {
        for (double rho : {-0.9, -0.4, 0.0, 0.37, 0.8, 0.99}) {
            const double sum = base_region_d1(BaseRegion::Inner, rho, w) +
                               2 * base_region_d1(BaseRegion::Straddle, rho, w) +
                               base_region_d1(BaseRegion::Outer, rho, w);
            EXPECT_NEAR(sum, 1.0 / (2 * kPi * std::sqrt(1 - rho * rho)), 1e-12);
        }
    }
}

TEST(BaseRegion, D1InnerMatchesFiniteDifference) {
    const auto fd = oracle::central_difference(
        [](double r) { return base_region_prob(BaseRegion::Inner, r, 0.75); }, 0.3);
    EXPECT_NEAR(base_region_d1(BaseRegion::Inner, 0.3, 0.75), fd, 1e-6);
}

TEST(BaseRegion, InnerTendsToQuadrantForWideThreshold) {
    // With w = 10 the inner square covers the positive quadrant up to 1e-23.
    for (double rho : {-0.9, -0.5, 0.0, 0.5, 0.9}) {
        EXPECT_NEAR(base_region_prob(BaseRegion::Inner, rho, 10.0), quadrant(rho), 1e-6);
    }
}

TEST(BaseRegion, EvaluateAllAgreesWithSingles) {
    const auto all = evaluate_base_regions(0.42, 1.1);
    for (auto r : kBaseRegions) {
        const auto i = static_cast<std::size_t>(r);
        EXPECT_EQ(all[i].p, base_region_prob(r, 0.42, 1.1));
        EXPECT_EQ(all[i].d1, base_region_d1(r, 0.42, 1.1));
        EXPECT_EQ(all[i].d2, base_region_d2(r, 0.42, 1.1));
    }
}

TEST(Region, ReductionTable) {
    EXPECT_EQ(reduce_region({1, 1}).base, BaseRegion::Inner);
    EXPECT_EQ(reduce_region({1, 1}).sign, 1);
    EXPECT_EQ(reduce_region({1, 2}).base, BaseRegion::Inner);
    EXPECT_EQ(reduce_region({1, 2}).sign, -1);
    EXPECT_EQ(reduce_region({0, 3}).base, BaseRegion::Outer);
    EXPECT_EQ(reduce_region({0, 3}).sign, -1);
    EXPECT_EQ(reduce_region({0, 1}).base, BaseRegion::Straddle);
    EXPECT_EQ(reduce_region({0, 1}).sign, 1);
    EXPECT_EQ(reduce_region({3, 1}).base, BaseRegion::Straddle);
    EXPECT_EQ(reduce_region({3, 1}).sign, -1);
    EXPECT_THROW(reduce_region({4, 0}), ValidationError);
    EXPECT_THROW(reduce_region({0, -1}), ValidationError);
}

TEST(Region, MirrorCellsEqual) {
    for (double rho : {-0.5, 0.0, 0.5}) {
        EXPECT_EQ(region_prob({1, 1}, rho, 0.75), region_prob({2, 2}, rho, 0.75));
        EXPECT_EQ(region_prob({1, 2}, rho, 0.75), base_region_prob(BaseRegion::Inner, -rho, 0.75));
        EXPECT_EQ(region_prob({0, 3}, rho, 0.75), base_region_prob(BaseRegion::Outer, -rho, 0.75));
    }
}

TEST(Region, SixteenCellsSumToOne) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            sum += region_prob({i, j}, 0.37, 0.75);
        }
    }
    EXPECT_NEAR(sum, 1.0, 1e-8);
}

TEST(Region, CellZeroTwoMatchesMonteCarlo) {
    const double w = 0.75;
    const auto mc = oracle::mc_proportion(0.6, 4'000'000, 12, [w](double x, double y) {
        return oracle::code2(x, w) == 0 && oracle::code2(y, w) == 2;
    });
    EXPECT_NEAR(region_prob({0, 2}, 0.6, w), mc.p, 4 * mc.se);
}

TEST(Region, AllCellsMatchMonteCarlo) {
    const double w = 0.75;
    const double rho = -0.35;
    oracle::BivariateSampler draw(rho, 99);
    std::array<std::array<double, 4>, 4> counts{};
    const int n = 2'000'000;
    for (int t = 0; t < n; ++t) {
        const auto [x, y] = draw();
        counts[oracle::code2(x, w)][oracle::code2(y, w)] += 1.0;
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double p = region_prob({i, j}, rho, w);
            const double se = std::sqrt(p * (1 - p) / n);
            EXPECT_NEAR(counts[i][j] / n, p, 4 * se) << i << "," << j;
        }
    }
}

TEST(RegionProperty, NormalisationAndDerivativeClosure) {
    for (double w : kWs) {
        for (double rho : rho_grid()) {
            double p = 0.0, d1 = 0.0, d2 = 0.0;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 4; ++j) {
                    p += region_prob({i, j}, rho, w);
                    d1 += region_d1({i, j}, rho, w);
                    d2 += region_d2({i, j}, rho, w);
                }
            }
            EXPECT_NEAR(p, 1.0, 1e-8) << rho << " " << w;
            EXPECT_NEAR(d1, 0.0, 1e-8) << rho << " " << w;
            EXPECT_NEAR(d2, 0.0, 1e-8) << rho << " " << w;
        }
    }
}

TEST(RegionProperty, DerivativesMatchFiniteDifferences) {
    std::vector<double> rhos = rho_grid();
    rhos.push_back(0.99);
    rhos.push_back(-0.99);
    for (double w : kWs) {
        for (double rho : rhos) {
            for (auto r : kBaseRegions) {
                const double fd1 =
                    oracle::extrapolated_difference([&](double x) { return base_region_prob(r, x, w); }, rho);
                const double fd2 =
                    oracle::extrapolated_difference([&](double x) { return base_region_d1(r, x, w); }, rho);
                EXPECT_NEAR(base_region_d1(r, rho, w), fd1, 1e-6) << rho << " " << w;
                EXPECT_NEAR(base_region_d2(r, rho, w), fd2, 1e-5) << rho << " " << w;
            }
        }
    }
}

TEST(RegionProperty, DiagonalMassNondecreasingOnPositiveRho) {
    for (double w : kWs) {
        double prev = -1.0;
        for (int i = 0; i < 1000; ++i) {
            const double rho = i * 1e-3;
            const double v = base_region_prob(BaseRegion::Inner, rho, w) + base_region_prob(BaseRegion::Outer, rho, w);
            EXPECT_GE(v, prev - 1e-13) << rho << " " << w;
            prev = v;
        }
    }
}

TEST(Table, GridCoversClampedRange) {
    const auto& t = table075();
    const auto& g = t.rho_grid();
    ASSERT_EQ(g.size(), 2001u);
    EXPECT_EQ(g.front(), -kRhoMax);
    EXPECT_EQ(g.back(), kRhoMax);
    for (std::size_t i = 1; i < g.size(); ++i) {
        EXPECT_LT(g[i - 1], g[i]);
    }
    EXPECT_EQ(t.epsilon(), kRhoEpsilon);
    EXPECT_EQ(t.grid_step(), 1e-3);
}

TEST(Table, EntriesFiniteIncludingEndpoints) {
    const auto& t = table075();
    for (std::size_t i = 0; i < t.rho_grid().size(); ++i) {
        for (const auto& e : t.node(i)) {
            EXPECT_TRUE(std::isfinite(e.p) && std::isfinite(e.d1) && std::isfinite(e.d2)) << i;
            EXPECT_GE(e.p, 0.0);
            EXPECT_LE(e.p, 1.0);
        }
    }
}

TEST(Table, NodeLookupIsExact) {
    const auto& t = table075();
    for (std::size_t i : {std::size_t{0}, std::size_t{1}, std::size_t{700}, std::size_t{1000}, std::size_t{2000}}) {
        const double rho = t.rho_grid()[i];
        const auto direct = evaluate_base_regions(rho, 0.75);
        for (auto r : kBaseRegions) {
            const auto e = t.lookup(r, rho);
            const auto k = static_cast<std::size_t>(r);
            EXPECT_EQ(e.p, direct[k].p);
            EXPECT_EQ(e.d1, direct[k].d1);
            EXPECT_EQ(e.d2, direct[k].d2);
        }
    }
}

TEST(Table, MidpointInterpolationAccuracy) {
    const auto& t = table075();
    for (auto r : kBaseRegions) {
        EXPECT_NEAR(t.lookup(r, 0.4715).p, base_region_prob(r, 0.4715, 0.75), 1e-6);
    }
    for (double rho = -0.9995; rho < 0.9995; rho += 0.0131) {
        const auto direct = evaluate_base_regions(rho, 0.75);
        const auto interp = t.lookup_all(rho);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(interp[k].p, direct[k].p, 1e-6) << rho;
        }
    }
}

TEST(Table, RejectsBadStep) {
    EXPECT_THROW(ProbabilityTable::build(0.75, 0.0), ValidationError);
    EXPECT_THROW(ProbabilityTable::build(0.75, 0.02), ValidationError);
    EXPECT_THROW(ProbabilityTable::build(0.0, 0.01), ValidationError);
}

TEST(Table, SaveLoadRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "twobit_table_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "t.tbpt";
    const auto t = ProbabilityTable::build(1.25, 0.01);
    t.save(path);
    const auto u = ProbabilityTable::load(path);
    EXPECT_EQ(u.w(), 1.25);
    EXPECT_EQ(u.grid_step(), 0.01);
    ASSERT_EQ(u.rho_grid(), t.rho_grid());
    for (std::size_t i = 0; i < t.rho_grid().size(); ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_EQ(u.node(i)[k].p, t.node(i)[k].p);
            EXPECT_EQ(u.node(i)[k].d2, t.node(i)[k].d2);
        }
    }
    std::ifstream sidecar(path.string() + ".json");
    ASSERT_TRUE(sidecar.good());
    const auto meta = nlohmann::json::parse(sidecar);
    EXPECT_EQ(meta.at("w").get<double>(), 1.25);
    EXPECT_EQ(meta.at("nodes").get<std::size_t>(), t.rho_grid().size());

    std::ifstream head(path, std::ios::binary);
    char magic[4];
    head.read(magic, 4);
    EXPECT_EQ(std::string(magic, 4), "TBPT");
}

TEST(Table, LoadRejectsGarbage) {
    const auto path = std::filesystem::temp_directory_path() / "twobit_bad.tbpt";
    std::ofstream(path) << "not a table";
    EXPECT_THROW(ProbabilityTable::load(path), FormatError);
    EXPECT_THROW(ProbabilityTable::load("/nonexistent/table"), FormatError);
}

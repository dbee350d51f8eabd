#include "oracles.hpp"

#include "twobit/dataset.hpp"
#include "twobit/error.hpp"
#include "twobit/experiments.hpp"
#include "twobit/normal_math.hpp"
#include "twobit/simulation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

using namespace twobit;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("twobit_" + name); }

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

DataMatrix random_unit_rows(std::size_t n, std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> norm;
    DataMatrix m(n, dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            m(i, d) = norm(gen);
        }
    }
    m.normalize_rows();
    return m;
}

} // namespace

TEST(LoadDataset, CsvNormalises) {
    const auto p = temp_file("345.csv");
    write(p, "3,4\n");
    DatasetSpec spec;
    spec.path = p;
    const auto m = load_dataset(spec);
    ASSERT_EQ(m.rows(), 1u);
    ASSERT_EQ(m.cols(), 2u);
    EXPECT_DOUBLE_EQ(m(0, 0), 0.6);
    EXPECT_DOUBLE_EQ(m(0, 1), 0.8);
}

TEST(LoadDataset, RowsHaveUnitNorm) {
    const auto p = temp_file("rows.csv");
    write(p, "1,2,3\n-0.5,0.25,8e3\n1e-7,0,0\n");
    DatasetSpec spec;
    spec.path = p;
    const auto m = load_dataset(spec);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        EXPECT_NEAR(std::sqrt(dot(m.row(i), m.row(i))), 1.0, 1e-9);
    }
}

TEST(LoadDataset, RawF32RoundTripIsBitIdentical) {
    DataMatrix m(3, 4);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t d = 0; d < 4; ++d) {
            m(i, d) = static_cast<double>(static_cast<float>(std::sin(1.0 + 4 * i + d)));
        }
    }
    const auto p = temp_file("m.f32");
    save_raw_f32(m, p);
    EXPECT_EQ(fs::file_size(p), 3u * 4u * 4u);
    DatasetSpec spec{p, DataFormat::RawF32, 3, 4, false};
    const auto back = load_dataset(spec);
    EXPECT_EQ(back.values(), m.values());
}

TEST(LoadDataset, CsvRoundTrip) {
    const auto m = random_unit_rows(5, 7, 1);
    const auto p = temp_file("rt.csv");
    save_csv(m, p);
    DatasetSpec spec{p, DataFormat::Csv, 0, 0, false};
    EXPECT_EQ(load_dataset(spec).values(), m.values());
}

TEST(LoadDataset, DeclaredDimensionMismatchNamesBoth) {
    const auto p = temp_file("bad.csv");
    write(p, "1,2,3\n4,5\n");
    DatasetSpec spec{p, DataFormat::Csv, 0, 3, true};
    const auto msg = message_of([&] { load_dataset(spec); });
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("D=3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2"), std::string::npos) << msg;

    const auto r = temp_file("bad.f32");
    write(r, std::string(20, '\0'));
    DatasetSpec raw{r, DataFormat::RawF32, 0, 3, true};
    const auto raw_msg = message_of([&] { load_dataset(raw); });
    EXPECT_NE(raw_msg.find("D=3"), std::string::npos) << raw_msg;
    EXPECT_NE(raw_msg.find("20"), std::string::npos) << raw_msg;
}

TEST(LoadDataset, ParseErrorHasLineNumber) {
    const auto p = temp_file("parse.csv");
    write(p, "1,2\n3,x\n");
    DatasetSpec spec;
    spec.path = p;
    const auto msg = message_of([&] { load_dataset(spec); });
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(LoadDataset, ZeroRowNamesIndex) {
    const auto p = temp_file("zero.csv");
    write(p, "1,2\n0,0\n");
    DatasetSpec spec;
    spec.path = p;
    const auto msg = message_of([&] { load_dataset(spec); });
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
    spec.normalize = false;
    EXPECT_NO_THROW(load_dataset(spec));
}

TEST(LoadDataset, MissingFileAndFormat) {
    DatasetSpec spec;
    spec.path = "/nonexistent/data.csv";
    EXPECT_THROW(load_dataset(spec), ValidationError);
    EXPECT_THROW(parse_format("parquet"), ValidationError);
    EXPECT_EQ(parse_format("raw_f32"), DataFormat::RawF32);
}

TEST(BruteForce, FullRankingReturnsAll) {
    const auto data = random_unit_rows(50, 8, 2);
    const auto top = brute_force_top_t(data, data.row(3), 50);
    EXPECT_EQ(top.size(), 50u);
    EXPECT_EQ(top[0].id, 3u);
    EXPECT_NEAR(top[0].similarity, 1.0, 1e-12);
    for (std::size_t i = 1; i < top.size(); ++i) {
        EXPECT_GE(top[i - 1].similarity, top[i].similarity);
    }
    EXPECT_THROW(brute_force_top_t(data, data.row(0), 51), ValidationError);
}

TEST(BruteForce, TiesByAscendingId) {
    DataMatrix data(4, 2);
    for (std::size_t i = 0; i < 4; ++i) {
        data(i, 0) = 1.0;
    }
    const std::vector<double> q = {1.0, 0.0};
    const auto top = brute_force_top_t(data, q, 3);
    EXPECT_EQ(top[0].id, 0u);
    EXPECT_EQ(top[1].id, 1u);
    EXPECT_EQ(top[2].id, 2u);
}

TEST(BruteForce, AgreesWithEuclideanOrder) {
    const auto data = random_unit_rows(1000, 16, 3);
    const auto q = random_unit_rows(1, 16, 4);
    const auto top = brute_force_top_t(data, q.row(0), 100);
    std::vector<std::pair<double, PointId>> dist;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double d = 0;
        for (std::size_t j = 0; j < 16; ++j) {
            d += (data(i, j) - q(0, j)) * (data(i, j) - q(0, j));
        }
        dist.push_back({d, static_cast<PointId>(i)});
    }
    std::sort(dist.begin(), dist.end());
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_EQ(top[i].id, dist[i].second) << i;
    }
}

TEST(SynthPairs, IndependentAtZero) {
    const auto pairs = synth_pairs(0.0, 1000, 1000, 5);
    const double w = 0.75;
    std::array<std::array<double, 4>, 4> obs{};
    std::array<double, 4> rows{}, cols{};
    for (std::size_t i = 0; i < pairs.x.size(); ++i) {
        const int a = oracle::code2(pairs.x[i], w), b = oracle::code2(pairs.y[i], w);
        obs[a][b] += 1;
        rows[a] += 1;
        cols[b] += 1;
    }
    const double n = static_cast<double>(pairs.x.size());
    double chi2 = 0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double e = rows[a] * cols[b] / n;
            chi2 += (obs[a][b] - e) * (obs[a][b] - e) / e;
        }
    }
    // Upper 1e-4 quantile of chi-square with 9 degrees of freedom.
    EXPECT_LT(chi2, 33.72);
}

TEST(SynthPairs, NearPerfectCorrelationSignFlipRate) {
    // Opposite signs occur with probability acos(rho) / pi.
    const double rho = 1.0 - 1e-8;
    const auto pairs = synth_pairs(rho, 500, 200, 6);
    const auto counts = tally_trials(pairs, 0.75);
    std::int64_t off = 0;
    for (const auto& c : counts) {
        off += c[CellGroup::DiagInnerNeg] + c[CellGroup::AdjOpp] + c[CellGroup::DiagOuterNeg];
    }
    const double mean = 500.0 * 200.0 * std::acos(rho) / kPi;
    EXPECT_NEAR(static_cast<double>(off), mean, 5.0 * std::sqrt(mean) + 1.0);
}

TEST(SynthPairs, CellFrequenciesMatchRegionModel) {
    const auto pairs = synth_pairs(0.5, 1000, 1000, 7);
    CellCounts total;
    for (const auto& c : tally_trials(pairs, 0.75)) {
        for (std::size_t g = 0; g < 6; ++g) {
            total.cells[g] += c.cells[g];
        }
    }
    const double n = static_cast<double>(total.total());
    const auto pos = evaluate_base_regions(0.5, 0.75);
    const auto neg = evaluate_base_regions(-0.5, 0.75);
    const double mult[3] = {2, 4, 2};
    for (std::size_t g = 0; g < 6; ++g) {
        const double p = mult[g % 3] * (g < 3 ? pos[g].p : neg[g - 3].p);
        EXPECT_NEAR(total.cells[g] / n, p, 4 * std::sqrt(p * (1 - p) / n)) << g;
    }
}

TEST(SynthPairs, TrialsRegenerateIndependently) {
    const auto all = synth_pairs(0.3, 50, 20, 8);
    const auto again = synth_pairs(0.3, 50, 20, 8);
    EXPECT_EQ(all.x, again.x);
    EXPECT_EQ(all.y, again.y);
    // Trial t of a longer run is the same stream.
    const auto longer = synth_pairs(0.3, 50, 40, 8);
    for (std::size_t t = 0; t < 20; ++t) {
        EXPECT_TRUE(std::equal(all.x_trial(t).begin(), all.x_trial(t).end(), longer.x_trial(t).begin()));
    }
}

TEST(SimulateMse, ValidatesConfig) {
    const auto table = ProbabilityTable::build(0.75, 0.01);
    SimulateMseConfig cfg;
    cfg.rho_grid = {0.5};
    cfg.trials = 0;
    EXPECT_THROW(simulate_mse(cfg, table), ValidationError);
    cfg.trials = 10;
    cfg.rho_grid = {};
    EXPECT_THROW(simulate_mse(cfg, table), ValidationError);
    cfg.rho_grid = {0.5};
    cfg.w = 1.0;
    EXPECT_THROW(simulate_mse(cfg, table), ValidationError);
}

TEST(SimulateMse, RowsAndReproducibility) {
    const auto table = ProbabilityTable::build(0.75);
    SimulateMseConfig cfg;
    cfg.rho_grid = {0.2, 0.6};
    cfg.trials = 500;
    cfg.seed = 3;
    const auto a = simulate_mse(cfg, table);
    const auto b = simulate_mse(cfg, table);
    ASSERT_EQ(a.size(), 8u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].empirical_mse, b[i].empirical_mse);
        EXPECT_GT(a[i].fisher_predicted_var, 0.0);
    }
    EXPECT_EQ(a[0].estimator, "one_bit");
    EXPECT_EQ(a[3].estimator, "two_bit_mle_five_cell");
}

TEST(Planted, ShapeAndUnitNorm) {
    PlantedSpec spec;
    spec.n = 400;
    spec.dim = 32;
    spec.clusters = 4;
    spec.queries = 10;
    const auto ds = make_planted_dataset(spec);
    EXPECT_EQ(ds.data.rows(), 400u);
    EXPECT_EQ(ds.queries.rows(), 10u);
    for (std::size_t i = 0; i < 400; ++i) {
        EXPECT_NEAR(dot(ds.data.row(i), ds.data.row(i)), 1.0, 1e-9);
    }
    const auto again = make_planted_dataset(spec);
    EXPECT_EQ(ds.data.values(), again.data.values());
}

TEST(Planted, QueriesHaveCloseNeighbours) {
    PlantedSpec spec;
    spec.n = 1000;
    spec.clusters = 10;
    spec.queries = 20;
    const auto ds = make_planted_dataset(spec);
    for (std::size_t q = 0; q < ds.queries.rows(); ++q) {
        const auto top = brute_force_top_t(ds.data, ds.queries.row(q), 100);
        EXPECT_GT(top[0].similarity, 0.8);
        EXPECT_GT(top[99].similarity, 0.4);
    }
}

TEST(Curves, AverageKeepsHitsBeyondListEnd) {
    const std::vector<PrPoint> a = {{1, 1.0, 0.5}, {2, 1.0, 1.0}};
    const std::vector<PrPoint> b = {{1, 0.0, 0.0}};
    const auto avg = average_curves({a, b}, 3);
    ASSERT_EQ(avg.size(), 3u);
    EXPECT_DOUBLE_EQ(avg[0].precision, 0.5);
    EXPECT_DOUBLE_EQ(avg[1].precision, 0.5);
    EXPECT_DOUBLE_EQ(avg[2].precision, 0.5 * (2.0 / 3.0));
    EXPECT_DOUBLE_EQ(avg[2].recall, 0.5);
}

TEST(Curves, AucOfPerfectAndFlatCurves) {
    const std::vector<PrPoint> perfect = {{1, 1.0, 0.5}, {2, 1.0, 1.0}};
    EXPECT_DOUBLE_EQ(pr_auc(perfect), 1.0);
    const std::vector<PrPoint> flat = {{1, 0.0, 0.0}, {2, 0.0, 0.0}};
    EXPECT_DOUBLE_EQ(pr_auc(flat), 0.0);
    EXPECT_EQ(pr_auc({}), 0.0);
}

TEST(RerankEval, SmallProtocolRunsAndReportsFractions) {
    PlantedSpec spec;
    spec.n = 1000;
    spec.dim = 32;
    spec.clusters = 5;
    spec.queries = 20;
    const auto ds = make_planted_dataset(spec);
    ExperimentConfig cfg;
    cfg.L_values = {20};
    cfg.k_values = {64};
    cfg.T_values = {10, 50};
    const auto table = ProbabilityTable::build(0.75);
    const auto res = rerank_eval(ds.data, ds.queries, cfg, table);
    EXPECT_EQ(res.retrieval.size(), 20u);
    for (const auto& r : res.retrieval) {
        EXPECT_DOUBLE_EQ(r.fraction, static_cast<double>(r.candidates) / 1000.0);
    }
    EXPECT_EQ(res.auc.size(), 2u * 3u);
    for (const auto& row : res.auc) {
        EXPECT_GE(row.auc, 0.0);
        EXPECT_LE(row.auc, 1.0);
    }
    EXPECT_NO_THROW(res.auc_of(10, Estimator::TwoBitMle, 20, 64));
    EXPECT_THROW(res.auc_of(20, Estimator::TwoBitMle, 20, 64), ValidationError);
    const auto again = rerank_eval(ds.data, ds.queries, cfg, table);
    for (std::size_t i = 0; i < res.curves.size(); ++i) {
        EXPECT_EQ(res.curves[i].precision, again.curves[i].precision);
    }
}

TEST(RerankEval, ValidatesConfig) {
    ExperimentConfig cfg;
    EXPECT_THROW(cfg.validate(50), ValidationError); // T = 100 > n - 1
    cfg.T_values = {10};
    EXPECT_NO_THROW(cfg.validate(50));
    cfg.w = 0.0;
    EXPECT_THROW(cfg.validate(50), ValidationError);
}

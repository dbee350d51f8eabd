#pragma once

#include "twobit/data_matrix.hpp"
#include "twobit/estimation.hpp"
#include "twobit/lsh_engine.hpp"
#include "twobit/region_model.hpp"

#include <cstdint>
#include <vector>

namespace twobit {

/// Retrieval-and-rerank protocol: build (K, L) tables with bin width w1,
/// store k 2-bit codes (threshold w) of the first k of those same projections,
/// rerank each query's candidates with every estimator and score the
/// ranked lists against the exact top-T.
struct ExperimentConfig {
    std::size_t K = 10;
    std::vector<std::size_t> L_values{50, 100};
    double w1 = 1.5;
    double w = 0.75;
    std::vector<std::size_t> k_values{100, 200};
    std::vector<std::size_t> T_values{10, 20, 50, 100};
    std::vector<Estimator> estimators{Estimator::TwoBitMle, Estimator::TwoBitLinear, Estimator::OneBit};
    MleConfig mle;
    std::uint64_t seed = 7;

    void validate(std::size_t n) const;
};

/// Seed of the sketch projections. Projection entries depend only on
/// (seed, row, col), so sharing the index seed makes sketch column j the same
/// projection as index column j.
std::uint64_t sketch_seed(std::uint64_t seed);

struct PrCurveRow {
    std::size_t T;
    std::size_t m;
    double precision;
    double recall;
    Estimator estimator;
    std::size_t L;
    std::size_t k;
};

struct AucRow {
    std::size_t T;
    Estimator estimator;
    std::size_t L;
    std::size_t k;
    double auc;
};

struct RetrievalRow {
    std::size_t query;
    std::size_t L;
    std::size_t candidates;
    double fraction;
};

struct RerankEvalResult {
    std::vector<PrCurveRow> curves;
    std::vector<AucRow> auc;
    std::vector<RetrievalRow> retrieval;

    double auc_of(std::size_t T, Estimator e, std::size_t L, std::size_t k) const;
};

/// Precision and recall at every m averaged point-wise over queries. A query
/// whose ranked list is shorter than m keeps its hit count, so its precision
/// keeps falling as hits / m.
std::vector<PrPoint> average_curves(const std::vector<std::vector<PrPoint>>& curves, std::size_t max_m);

/// Area under a precision-recall curve by the trapezoid rule in recall,
/// anchored at (recall 0, precision at m = 1).
double pr_auc(const std::vector<PrPoint>& curve);

RerankEvalResult rerank_eval(const DataMatrix& data, const DataMatrix& queries, const ExperimentConfig& config,
                             const ProbabilityTable& table);

} // namespace twobit

#include "twobit/experiments.hpp"

#include "twobit/dataset.hpp"
#include "twobit/error.hpp"
#include "twobit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twobit {

void ExperimentConfig::validate(std::size_t n) const {
    if (K < 1 || L_values.empty() || k_values.empty() || T_values.empty() || estimators.empty()) {
        throw ValidationError("experiment needs K >= 1 and non-empty L, k, T and estimator lists");
    }
    if (!(w1 > 0.0) || !(w > 0.0)) {
        throw ValidationError("bin widths must be positive");
    }
    for (auto L : L_values) {
        if (L < 1) {
            throw ValidationError("L must be at least 1");
        }
    }
    for (auto k : k_values) {
        if (k < 1) {
            throw ValidationError("k must be at least 1");
        }
    }
    for (auto T : T_values) {
        if (T < 1 || T + 1 > n) {
            throw ValidationError("T=" + std::to_string(T) + " must satisfy 1 <= T <= n-1");
        }
    }
    mle.validate();
}

std::uint64_t sketch_seed(std::uint64_t seed) { return seed; }

double RerankEvalResult::auc_of(std::size_t T, Estimator e, std::size_t L, std::size_t k) const {
    for (const auto& row : auc) {
        if (row.T == T && row.estimator == e && row.L == L && row.k == k) {
            return row.auc;
        }
    }
    throw ValidationError("no AUC recorded for that combination");
}

std::vector<PrPoint> average_curves(const std::vector<std::vector<PrPoint>>& curves, std::size_t max_m) {
    std::vector<PrPoint> avg(max_m);
    for (std::size_t m = 1; m <= max_m; ++m) {
        avg[m - 1] = {m, 0.0, 0.0};
    }
    if (curves.empty()) {
        return avg;
    }
    for (const auto& curve : curves) {
        double last_recall = 0.0;
        double hits = 0.0;
        for (std::size_t m = 1; m <= max_m; ++m) {
            if (m <= curve.size()) {
                last_recall = curve[m - 1].recall;
                hits = curve[m - 1].precision * static_cast<double>(m);
            }
            avg[m - 1].precision += hits / static_cast<double>(m);
            avg[m - 1].recall += last_recall;
        }
    }
    const double q = static_cast<double>(curves.size());
    for (auto& p : avg) {
        p.precision /= q;
        p.recall /= q;
    }
    return avg;
}

double pr_auc(const std::vector<PrPoint>& curve) {
    if (curve.empty()) {
        return 0.0;
    }
    double area = 0.0;
    double prev_recall = 0.0;
    double prev_precision = curve.front().precision;
    for (const auto& p : curve) {
        area += 0.5 * (p.precision + prev_precision) * (p.recall - prev_recall);
        prev_recall = p.recall;
        prev_precision = p.precision;
    }
    return area;
}

RerankEvalResult rerank_eval(const DataMatrix& data, const DataMatrix& queries, const ExperimentConfig& config,
                             const ProbabilityTable& table) {
    config.validate(data.rows());
    if (queries.cols() != data.cols()) {
        throw ValidationError("query dimension does not match the data");
    }
    if (std::abs(table.w() - config.w) > 1e-12) {
        throw ValidationError("probability table was built for w=" + std::to_string(table.w()));
    }
    const std::size_t nq = queries.rows();
    const std::size_t max_T = *std::max_element(config.T_values.begin(), config.T_values.end());

    // Exact neighbours once per query; shorter T are prefixes.
    std::vector<std::vector<PointId>> truth(nq);
    parallel_for(nq, [&](std::size_t q) {
        for (const auto& nb : brute_force_top_t(data, queries.row(q), max_T)) {
            truth[q].push_back(nb.id);
        }
    });

    RerankEvalResult result;
    for (std::size_t L : config.L_values) {
        const LshIndex index = LshIndex::build(data, IndexConfig{config.K, L, config.w1, config.seed});
        std::vector<std::vector<PointId>> candidates(nq);
        parallel_for(nq, [&](std::size_t q) { candidates[q] = index.query(queries.row(q)); });
        for (std::size_t q = 0; q < nq; ++q) {
            result.retrieval.push_back({q, L, candidates[q].size(),
                                        static_cast<double>(candidates[q].size()) / static_cast<double>(data.rows())});
        }
        std::size_t max_m = 1;
        for (const auto& c : candidates) {
            max_m = std::max(max_m, c.size());
        }

        for (std::size_t k : config.k_values) {
            const SketchStore store = SketchStore::encode(data, k, config.w, sketch_seed(config.seed));
            std::vector<PackedCodes> query_sketches(nq);
            for (std::size_t q = 0; q < nq; ++q) {
                query_sketches[q] = store.encode_query(queries.row(q), data.cols());
            }
            for (Estimator est : config.estimators) {
                std::vector<std::vector<PointId>> ranked(nq);
                parallel_for(nq, [&](std::size_t q) {
                    for (const auto& r : rerank(candidates[q], query_sketches[q], store, est, table, config.mle)) {
                        ranked[q].push_back(r.id);
                    }
                });
                for (std::size_t T : config.T_values) {
                    std::vector<std::vector<PrPoint>> per_query(nq);
                    for (std::size_t q = 0; q < nq; ++q) {
                        per_query[q] = precision_recall(ranked[q], std::span(truth[q]).first(T));
                    }
                    const auto avg = average_curves(per_query, max_m);
                    for (const auto& p : avg) {
                        result.curves.push_back({T, p.m, p.precision, p.recall, est, L, k});
                    }
                    result.auc.push_back({T, est, L, k, pr_auc(avg)});
                }
            }
        }
    }
    return result;
}

} // namespace twobit

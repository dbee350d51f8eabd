#pragma once

#include "twobit/coding.hpp"
#include "twobit/data_matrix.hpp"
#include "twobit/estimation.hpp"
#include "twobit/region_model.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace twobit {

using PointId = std::uint32_t;

struct IndexConfig {
    std::size_t K = 10;  // codes concatenated per table key
    std::size_t L = 50;  // number of tables
    double w1 = 1.5;     // bin width of the table codes
    std::uint64_t seed = 1;

    void validate() const;
};

/// 64-bit digest of a K-tuple of uniform-quantisation codes.
std::uint64_t digest_key(std::span<const std::int64_t> codes);

/// (K, L) hash tables over floor(x / w1) codes of K*L Gaussian projections.
/// Table t uses projection columns [t*K, (t+1)*K).
class LshIndex {
public:
    LshIndex() = default;

    static LshIndex build(const DataMatrix& data, const IndexConfig& config);

    /// Union of the buckets the query falls into, ascending and deduplicated.
    std::vector<PointId> query(std::span<const double> q) const;

    /// The L bucket keys of a vector.
    std::vector<std::uint64_t> keys(std::span<const double> v) const;

    const IndexConfig& config() const { return config_; }
    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    std::size_t bucket_count(std::size_t table) const { return tables_.at(table).size(); }

    /// Index file (little-endian):
    ///   "TBLX" | u32 version=1 | u32 K | u32 L | f64 w1 | u64 seed | u64 n | u64 dim
    ///   then per table: u64 buckets, and per bucket in ascending key order
    ///   u64 key | u32 count | count x u32 point id (ascending).
    void save(const std::filesystem::path& path) const;
    static LshIndex load(const std::filesystem::path& path);

private:
    using Table = std::unordered_map<std::uint64_t, std::vector<PointId>>;

    void init_projection();

    IndexConfig config_;
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    DataMatrix projection_;
    std::vector<Table> tables_;
};

enum class Estimator : std::uint8_t { OneBit, TwoBitLinear, TwoBitMle };

std::string_view estimator_name(Estimator e);
Estimator parse_estimator(std::string_view name);

struct Ranked {
    PointId id;
    double rho_hat;
};

/// Estimated similarity of one stored sketch to a query sketch.
double estimate_similarity(std::span<const std::uint8_t> query_packed, std::span<const std::uint8_t> packed,
                           std::size_t k, Estimator estimator, const ProbabilityTable& table,
                           const MleConfig& mle = {});

/// Orders candidates by descending estimated similarity, ties by ascending id.
std::vector<Ranked> rerank(std::span<const PointId> candidates, const PackedCodes& query_sketch,
                           const SketchStore& store, Estimator estimator, const ProbabilityTable& table,
                           const MleConfig& mle = {});

struct PrPoint {
    std::size_t m;
    double precision;
    double recall;
};

/// One (precision, recall) point per prefix length m = 1..ranked.size().
std::vector<PrPoint> precision_recall(std::span<const PointId> ranked, std::span<const PointId> truth);

} // namespace twobit

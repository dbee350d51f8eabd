#include "twobit/lsh_engine.hpp"

#include "binary_io.hpp"
#include "twobit/error.hpp"
#include "twobit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <unordered_set>

namespace twobit {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xFF51AFD7ED558CCDull;
    x ^= x >> 33;
    x *= 0xC4CEB9FE1A85EC53ull;
    x ^= x >> 33;
    return x;
}

constexpr std::string_view kIndexMagic = "TBLX";
constexpr std::uint32_t kIndexVersion = 1;

} // namespace

void IndexConfig::validate() const {
    if (K < 1 || L < 1) {
        throw ValidationError("index needs K >= 1 and L >= 1");
    }
    if (!(w1 > 0.0)) {
        throw ValidationError("table bin width w1 must be positive");
    }
}

std::uint64_t digest_key(std::span<const std::int64_t> codes) {
    std::uint64_t h = 0x84222325CBF29CE4ull;
    for (std::int64_t c : codes) {
        h = mix64(h ^ static_cast<std::uint64_t>(c)) + 0x9E3779B97F4A7C15ull;
    }
    return mix64(h);
}

void LshIndex::init_projection() {
    projection_ = projection_matrix(ProjectionSpec{config_.K * config_.L, config_.seed, dim_});
}

std::vector<std::uint64_t> LshIndex::keys(std::span<const double> v) const {
    const auto projected = project_row(v, projection_);
    std::vector<std::uint64_t> out(config_.L);
    std::vector<std::int64_t> codes(config_.K);
    for (std::size_t t = 0; t < config_.L; ++t) {
        for (std::size_t j = 0; j < config_.K; ++j) {
            codes[j] = encode_uniform(projected[t * config_.K + j], config_.w1);
        }
        out[t] = digest_key(codes);
    }
    return out;
}

LshIndex LshIndex::build(const DataMatrix& data, const IndexConfig& config) {
    config.validate();
    if (data.empty()) {
        throw ValidationError("cannot index an empty dataset");
    }
    LshIndex index;
    index.config_ = config;
    index.n_ = data.rows();
    index.dim_ = data.cols();
    index.init_projection();

    std::vector<std::vector<std::uint64_t>> point_keys(index.n_);
    parallel_for(index.n_, [&](std::size_t i) { point_keys[i] = index.keys(data.row(i)); });

    // Insertion in id order keeps every bucket sorted.
    index.tables_.assign(config.L, {});
    for (std::size_t i = 0; i < index.n_; ++i) {
        for (std::size_t t = 0; t < config.L; ++t) {
            index.tables_[t][point_keys[i][t]].push_back(static_cast<PointId>(i));
        }
    }
    return index;
}

std::vector<PointId> LshIndex::query(std::span<const double> q) const {
    if (n_ == 0) {
        return {};
    }
    std::vector<PointId> out;
    const auto query_keys = keys(q);
    for (std::size_t t = 0; t < config_.L; ++t) {
        const auto it = tables_[t].find(query_keys[t]);
        if (it != tables_[t].end()) {
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void LshIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    io::write_magic(out, kIndexMagic);
    io::write_u32(out, kIndexVersion);
    io::write_u32(out, static_cast<std::uint32_t>(config_.K));
    io::write_u32(out, static_cast<std::uint32_t>(config_.L));
    io::write_f64(out, config_.w1);
    io::write_u64(out, config_.seed);
    io::write_u64(out, n_);
    io::write_u64(out, dim_);
    for (const Table& table : tables_) {
        std::vector<std::uint64_t> sorted_keys;
        sorted_keys.reserve(table.size());
        for (const auto& [key, ids] : table) {
            sorted_keys.push_back(key);
        }
        std::sort(sorted_keys.begin(), sorted_keys.end());
        io::write_u64(out, sorted_keys.size());
        for (std::uint64_t key : sorted_keys) {
            const auto& ids = table.at(key);
            io::write_u64(out, key);
            io::write_u32(out, static_cast<std::uint32_t>(ids.size()));
            for (PointId id : ids) {
                io::write_u32(out, id);
            }
        }
    }
    if (!out) {
        throw FormatError("write failed: " + path.string());
    }
}

LshIndex LshIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    io::expect_magic(in, kIndexMagic);
    if (const auto version = io::read_u32(in); version != kIndexVersion) {
        throw FormatError("unsupported index version " + std::to_string(version));
    }
    LshIndex index;
    index.config_.K = io::read_u32(in);
    index.config_.L = io::read_u32(in);
    index.config_.w1 = io::read_f64(in);
    index.config_.seed = io::read_u64(in);
    index.n_ = io::read_u64(in);
    index.dim_ = io::read_u64(in);
    index.config_.validate();
    if (index.dim_ == 0) {
        throw FormatError("index has zero dimension");
    }
    index.init_projection();
    index.tables_.resize(index.config_.L);
    for (Table& table : index.tables_) {
        const std::uint64_t buckets = io::read_u64(in);
        for (std::uint64_t b = 0; b < buckets; ++b) {
            const std::uint64_t key = io::read_u64(in);
            const std::uint32_t count = io::read_u32(in);
            std::vector<PointId> ids(count);
            for (PointId& id : ids) {
                id = io::read_u32(in);
                if (id >= index.n_) {
                    throw FormatError("bucket references point " + std::to_string(id) + " beyond n");
                }
            }
            table.emplace(key, std::move(ids));
        }
    }
    return index;
}

std::string_view estimator_name(Estimator e) {
    switch (e) {
    case Estimator::OneBit: return "one_bit";
    case Estimator::TwoBitLinear: return "two_bit_linear";
    case Estimator::TwoBitMle: return "two_bit_mle";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "one_bit" || name == "1bit") {
        return Estimator::OneBit;
    }
    if (name == "two_bit_linear" || name == "linear") {
        return Estimator::TwoBitLinear;
    }
    if (name == "two_bit_mle" || name == "mle") {
        return Estimator::TwoBitMle;
    }
    throw ValidationError("unknown estimator '" + std::string(name) +
                          "' (expected one_bit, two_bit_linear or two_bit_mle)");
}

double estimate_similarity(std::span<const std::uint8_t> query_packed, std::span<const std::uint8_t> packed,
                           std::size_t k, Estimator estimator, const ProbabilityTable& table,
                           const MleConfig& mle) {
    const CellCounts counts = tally_cells(query_packed, packed, k);
    switch (estimator) {
    case Estimator::OneBit: return estimate_1bit(counts.same_sign(), counts.total());
    case Estimator::TwoBitLinear: return estimate_2bit_linear(counts, table).rho_hat;
    case Estimator::TwoBitMle: return estimate_2bit_mle(counts, table, mle).rho_hat;
    }
    return 0.0;
}

std::vector<Ranked> rerank(std::span<const PointId> candidates, const PackedCodes& query_sketch,
                           const SketchStore& store, Estimator estimator, const ProbabilityTable& table,
                           const MleConfig& mle) {
    if (query_sketch.size() != store.k()) {
        throw ValidationError("query sketch has " + std::to_string(query_sketch.size()) + " codes, store has k=" +
                              std::to_string(store.k()));
    }
    if (estimator != Estimator::OneBit && std::abs(table.w() - store.w()) > 1e-12) {
        throw ValidationError("probability table w=" + std::to_string(table.w()) +
                              " does not match sketch w=" + std::to_string(store.w()));
    }
    std::vector<Ranked> ranked;
    ranked.reserve(candidates.size());
    for (PointId id : candidates) {
        ranked.push_back(
            {id, estimate_similarity(query_sketch.bytes(), store.row(id), store.k(), estimator, table, mle)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.rho_hat != b.rho_hat) {
            return a.rho_hat > b.rho_hat;
        }
        return a.id < b.id;
    });
    return ranked;
}

std::vector<PrPoint> precision_recall(std::span<const PointId> ranked, std::span<const PointId> truth) {
    if (truth.empty()) {
        throw ValidationError("ground-truth set is empty");
    }
    const std::unordered_set<PointId> relevant(truth.begin(), truth.end());
    const double t = static_cast<double>(relevant.size());
    std::vector<PrPoint> curve;
    curve.reserve(ranked.size());
    std::size_t hits = 0;
    for (std::size_t m = 1; m <= ranked.size(); ++m) {
        hits += relevant.count(ranked[m - 1]);
        curve.push_back({m, static_cast<double>(hits) / static_cast<double>(m), static_cast<double>(hits) / t});
    }
    return curve;
}

} // namespace twobit

#pragma once

#include "twobit/data_matrix.hpp"
#include "twobit/lsh_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace twobit {

enum class DataFormat { Csv, RawF32 };

DataFormat parse_format(std::string_view name);

/// csv: one point per line, comma-separated; `dim` of 0 means "take it from the first row".
/// raw_f32: headerless row-major float32, little-endian; `dim` is required and
/// `n` (when non-zero) must match the file size.
struct DatasetSpec {
    std::filesystem::path path;
    DataFormat format = DataFormat::Csv;
    std::size_t n = 0;
    std::size_t dim = 0;
    bool normalize = true;
};

DataMatrix load_dataset(const DatasetSpec& spec);
void save_csv(const DataMatrix& data, const std::filesystem::path& path);
void save_raw_f32(const DataMatrix& data, const std::filesystem::path& path);

struct Neighbor {
    PointId id;
    double similarity;
};

/// Exact top-T by inner product (unit rows), ties by ascending id.
std::vector<Neighbor> brute_force_top_t(const DataMatrix& data, std::span<const double> query, std::size_t T);

/// Clustered synthetic data with planted near neighbours.
///
/// Each cluster has a random unit centre c. A member is a*c + sqrt(1-a^2)*g
/// with g a random unit vector orthogonal to c and a drawn uniformly from
/// [member_rho_min, member_rho_max]. Queries are built the same way around a
/// random centre with a = query_rho, so a query's similarities to its cluster
/// spread over roughly [query_rho*member_rho_min, query_rho*member_rho_max]
/// while other clusters sit near zero.
struct PlantedSpec {
    std::size_t n = 10000;
    std::size_t dim = 128;
    std::size_t clusters = 50;
    std::size_t queries = 500;
    double member_rho_min = 0.6;
    double member_rho_max = 0.99;
    double query_rho = 0.97;
    std::uint64_t seed = 20141;
};

struct PlantedDataset {
    DataMatrix data;
    DataMatrix queries;
};

PlantedDataset make_planted_dataset(const PlantedSpec& spec);

} // namespace twobit

#include "twobit/dataset.hpp"

#include "twobit/error.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace twobit {

namespace {

std::vector<double> parse_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<double> values;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
        const char* comma = std::find(p, end, ',');
        const char* a = p;
        const char* b = comma;
        while (a < b && std::isspace(static_cast<unsigned char>(*a))) {
            ++a;
        }
        while (b > a && std::isspace(static_cast<unsigned char>(b[-1]))) {
            --b;
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(a, b, v);
        if (ec != std::errc() || ptr != b || a == b || !std::isfinite(v)) {
            throw ValidationError("line " + std::to_string(line_no) + ": cannot parse value '" +
                                  std::string(a, b) + "'");
        }
        values.push_back(v);
        p = comma + 1;
    }
    return values;
}

} // namespace

DataFormat parse_format(std::string_view name) {
    if (name == "csv") {
        return DataFormat::Csv;
    }
    if (name == "raw_f32") {
        return DataFormat::RawF32;
    }
    throw ValidationError("unknown data format '" + std::string(name) + "' (expected csv or raw_f32)");
}

DataMatrix load_dataset(const DatasetSpec& spec) {
    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t dim = spec.dim;

    if (spec.format == DataFormat::Csv) {
        std::ifstream in(spec.path);
        if (!in) {
            throw ValidationError("cannot open dataset " + spec.path.string());
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.find_first_not_of(" \t") == std::string::npos) {
                continue;
            }
            auto row = parse_csv_line(line, line_no);
            if (dim == 0) {
                dim = row.size();
            }
            if (row.size() != dim) {
                throw ValidationError("line " + std::to_string(line_no) + ": declared D=" + std::to_string(dim) +
                                      " but the row has " + std::to_string(row.size()) + " values");
            }
            values.insert(values.end(), row.begin(), row.end());
            ++rows;
        }
    } else {
        if (dim == 0) {
            throw ValidationError("raw_f32 datasets need the dimension D");
        }
        std::ifstream in(spec.path, std::ios::binary | std::ios::ate);
        if (!in) {
            throw ValidationError("cannot open dataset " + spec.path.string());
        }
        const auto bytes = static_cast<std::size_t>(in.tellg());
        if (bytes % (4 * dim) != 0) {
            throw ValidationError("declared D=" + std::to_string(dim) + " does not divide the file contents (" +
                                  std::to_string(bytes) + " bytes)");
        }
        rows = bytes / (4 * dim);
        in.seekg(0);
        std::vector<unsigned char> raw(bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
        values.resize(rows * dim);
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b) {
                u |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
            }
            const float f = std::bit_cast<float>(u);
            if (!std::isfinite(f)) {
                throw ValidationError("row " + std::to_string(i / dim) + ": non-finite value");
            }
            values[i] = f;
        }
    }
    if (spec.n != 0 && spec.n != rows) {
        throw ValidationError("declared n=" + std::to_string(spec.n) + " but the file holds " +
                              std::to_string(rows) + " rows");
    }
    DataMatrix data(rows, dim, std::move(values));
    if (spec.normalize) {
        data.normalize_rows();
    }
    return data;
}

void save_csv(const DataMatrix& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    char buf[32];
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto row = data.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, row[j]);
            if (j > 0) {
                out << ',';
            }
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

void save_raw_f32(const DataMatrix& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot open " + path.string() + " for writing");
    }
    for (double v : data.values()) {
        const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
        const char bytes[4] = {static_cast<char>(u & 0xFF), static_cast<char>((u >> 8) & 0xFF),
                               static_cast<char>((u >> 16) & 0xFF), static_cast<char>((u >> 24) & 0xFF)};
        out.write(bytes, 4);
    }
}

std::vector<Neighbor> brute_force_top_t(const DataMatrix& data, std::span<const double> query, std::size_t T) {
    if (T > data.rows()) {
        throw ValidationError("T=" + std::to_string(T) + " exceeds n=" + std::to_string(data.rows()));
    }
    if (query.size() != data.cols()) {
        throw ValidationError("query dimension does not match the data");
    }
    std::vector<Neighbor> all(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        all[i] = {static_cast<PointId>(i), dot(data.row(i), query)};
    }
    auto better = [](const Neighbor& a, const Neighbor& b) {
        return a.similarity != b.similarity ? a.similarity > b.similarity : a.id < b.id;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(T), all.end(), better);
    all.resize(T);
    return all;
}

namespace {

std::vector<double> random_unit(std::mt19937_64& rng, std::normal_distribution<double>& normal, std::size_t dim) {
    std::vector<double> v(dim);
    double norm2 = 0.0;
    for (double& x : v) {
        x = normal(rng);
        norm2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) {
        x *= inv;
    }
    return v;
}

void planted_point(std::span<double> out, std::span<const double> centre, double a, std::mt19937_64& rng,
                   std::normal_distribution<double>& normal) {
    auto g = random_unit(rng, normal, centre.size());
    const double along = dot(g, centre);
    double norm2 = 0.0;
    for (std::size_t d = 0; d < g.size(); ++d) {
        g[d] -= along * centre[d];
        norm2 += g[d] * g[d];
    }
    const double scale = std::sqrt(1.0 - a * a) / std::sqrt(norm2);
    double out_norm2 = 0.0;
    for (std::size_t d = 0; d < g.size(); ++d) {
        out[d] = a * centre[d] + scale * g[d];
        out_norm2 += out[d] * out[d];
    }
    const double inv = 1.0 / std::sqrt(out_norm2);
    for (double& x : out) {
        x *= inv;
    }
}

} // namespace

PlantedDataset make_planted_dataset(const PlantedSpec& spec) {
    if (spec.n == 0 || spec.dim < 2 || spec.clusters == 0 || spec.clusters > spec.n) {
        throw ValidationError("planted dataset needs n >= clusters >= 1 and dim >= 2");
    }
    if (!(spec.member_rho_min > 0.0) || !(spec.member_rho_max < 1.0) ||
        !(spec.member_rho_min <= spec.member_rho_max) || !(spec.query_rho > 0.0 && spec.query_rho < 1.0)) {
        throw ValidationError("planted similarities must lie in (0, 1)");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> member_rho(spec.member_rho_min, spec.member_rho_max);

    std::vector<std::vector<double>> centres;
    centres.reserve(spec.clusters);
    for (std::size_t c = 0; c < spec.clusters; ++c) {
        centres.push_back(random_unit(rng, normal, spec.dim));
    }

    PlantedDataset out{DataMatrix(spec.n, spec.dim), DataMatrix(spec.queries, spec.dim)};
    for (std::size_t i = 0; i < spec.n; ++i) {
        planted_point(out.data.row(i), centres[i % spec.clusters], member_rho(rng), rng, normal);
    }
    std::uniform_int_distribution<std::size_t> pick(0, spec.clusters - 1);
    for (std::size_t q = 0; q < spec.queries; ++q) {
        planted_point(out.queries.row(q), centres[pick(rng)], spec.query_rho, rng, normal);
    }
    return out;
}

} // namespace twobit

#include "twobit/coding.hpp"

#include "twobit/error.hpp"
#include "twobit/normal_math.hpp"

#include <cmath>
#include <string>

namespace twobit {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double unit_open(std::uint64_t h) {
    // (0, 1]: never zero, so the log below is finite.
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

void require_w(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) {
        throw ValidationError("bin width / threshold must be positive, got " + std::to_string(w));
    }
}

// Joint (x, y) code pair -> cell group, indexed by 4*x + y.
constexpr std::array<std::uint8_t, 16> kPairGroup = [] {
    std::array<std::uint8_t, 16> t{};
    for (int x = 0; x < 4; ++x) {
        for (int y = 0; y < 4; ++y) {
            const bool same_half = (x >= 2) == (y >= 2);
            const bool xo = x == 0 || x == 3;
            const bool yo = y == 0 || y == 3;
            const int base = xo == yo ? (xo ? 2 : 0) : 1;
            t[4 * x + y] = static_cast<std::uint8_t>(base + (same_half ? 0 : 3));
        }
    }
    return t;
}();

} // namespace

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw ValidationError("matrix value count " + std::to_string(values_.size()) + " does not match " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void DataMatrix::normalize_rows() {
    for (std::size_t i = 0; i < rows_; ++i) {
        auto r = row(i);
        const double norm = std::sqrt(dot(r, r));
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw ValidationError("row " + std::to_string(i) + " has zero or non-finite norm");
        }
        for (double& v : r) {
            v /= norm;
        }
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double projection_entry(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(row ^ splitmix64(col)));
    const double u1 = unit_open(splitmix64(key));
    const double u2 = unit_open(splitmix64(key ^ 0xD1B54A32D192ED03ull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

DataMatrix projection_matrix(const ProjectionSpec& spec) {
    if (spec.k < 1 || spec.dim < 1) {
        throw ValidationError("projection spec needs k >= 1 and dim >= 1");
    }
    DataMatrix r(spec.dim, spec.k);
    for (std::size_t d = 0; d < spec.dim; ++d) {
        for (std::size_t j = 0; j < spec.k; ++j) {
            r(d, j) = projection_entry(spec.seed, d, j);
        }
    }
    return r;
}

DataMatrix project(const DataMatrix& data, const ProjectionSpec& spec) {
    if (data.cols() != spec.dim) {
        throw ValidationError("data dimension " + std::to_string(data.cols()) +
                              " does not match projection dimension " + std::to_string(spec.dim));
    }
    return project(data, projection_matrix(spec));
}

DataMatrix project(const DataMatrix& data, const DataMatrix& projection) {
    if (data.cols() != projection.rows()) {
        throw ValidationError("data dimension " + std::to_string(data.cols()) +
                              " does not match projection dimension " + std::to_string(projection.rows()));
    }
    const std::size_t k = projection.cols();
    DataMatrix out(data.rows(), k);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const auto src = data.row(i);
        auto dst = out.row(i);
        for (std::size_t d = 0; d < src.size(); ++d) {
            const double v = src[d];
            if (v == 0.0) {
                continue;
            }
            const auto r = projection.row(d);
            for (std::size_t j = 0; j < k; ++j) {
                dst[j] += v * r[j];
            }
        }
    }
    return out;
}

std::vector<double> project_row(std::span<const double> row, const DataMatrix& projection) {
    if (row.size() != projection.rows()) {
        throw ValidationError("query dimension " + std::to_string(row.size()) +
                              " does not match projection dimension " + std::to_string(projection.rows()));
    }
    std::vector<double> out(projection.cols(), 0.0);
    for (std::size_t d = 0; d < row.size(); ++d) {
        const auto r = projection.row(d);
        for (std::size_t j = 0; j < out.size(); ++j) {
            out[j] += row[d] * r[j];
        }
    }
    return out;
}

TwoBitCode encode_2bit(double x, double w) {
    require_w(w);
    if (x > 0.0) {
        return x > w ? 3 : 2;
    }
    return x > -w ? 1 : 0;
}

std::vector<TwoBitCode> encode_2bit(std::span<const double> xs, double w) {
    std::vector<TwoBitCode> codes;
    codes.reserve(xs.size());
    for (double x : xs) {
        codes.push_back(encode_2bit(x, w));
    }
    return codes;
}

std::int64_t encode_uniform(double x, double w) {
    require_w(w);
    return static_cast<std::int64_t>(std::floor(x / w));
}

std::int64_t encode_offset(double x, double w, double q) {
    require_w(w);
    if (!(q >= 0.0) || !(q < w)) {
        throw ValidationError("offset q must lie in [0, w), got " + std::to_string(q));
    }
    return static_cast<std::int64_t>(std::floor((x + q) / w));
}

std::uint8_t encode_1bit(double x) { return x > 0.0 ? 1 : 0; }

CellGroup cell_group(TwoBitCode x, TwoBitCode y) {
    if (x > 3 || y > 3) {
        throw ValidationError("2-bit code out of range");
    }
    return static_cast<CellGroup>(kPairGroup[4 * x + y]);
}

std::int64_t CellCounts::total() const {
    std::int64_t t = 0;
    for (auto c : cells) {
        t += c;
    }
    return t;
}

std::int64_t CellCounts::same_sign() const {
    return cells[0] + cells[1] + cells[2];
}

CellCounts tally_cells(std::span<const TwoBitCode> codes_x, std::span<const TwoBitCode> codes_y) {
    if (codes_x.size() != codes_y.size()) {
        throw ValidationError("code sequences differ in length: " + std::to_string(codes_x.size()) + " vs " +
                              std::to_string(codes_y.size()));
    }
    CellCounts counts;
    for (std::size_t j = 0; j < codes_x.size(); ++j) {
        const TwoBitCode x = codes_x[j];
        const TwoBitCode y = codes_y[j];
        if (x > 3 || y > 3) {
            throw ValidationError("2-bit code out of range at position " + std::to_string(j));
        }
        ++counts[cell_group(x, y)];
    }
    return counts;
}

CellCounts tally_cells(std::span<const std::uint8_t> packed_x, std::span<const std::uint8_t> packed_y,
                       std::size_t k) {
    const std::size_t stride = (k + 3) / 4;
    if (packed_x.size() < stride || packed_y.size() < stride) {
        throw ValidationError("packed sketch shorter than k=" + std::to_string(k) + " codes");
    }
    CellCounts counts;
    for (std::size_t j = 0; j < k; ++j) {
        const unsigned shift = 2 * (j & 3);
        const unsigned x = (packed_x[j >> 2] >> shift) & 3u;
        const unsigned y = (packed_y[j >> 2] >> shift) & 3u;
        ++counts.cells[kPairGroup[4 * x + y]];
    }
    return counts;
}

PackedCodes::PackedCodes(std::span<const TwoBitCode> codes)
    : size_(codes.size()), bytes_((codes.size() + 3) / 4, 0) {
    for (std::size_t j = 0; j < codes.size(); ++j) {
        if (codes[j] > 3) {
            throw ValidationError("2-bit code out of range at position " + std::to_string(j));
        }
        bytes_[j >> 2] |= static_cast<std::uint8_t>(codes[j] << (2 * (j & 3)));
    }
}

std::vector<TwoBitCode> PackedCodes::unpack() const {
    std::vector<TwoBitCode> codes(size_);
    for (std::size_t j = 0; j < size_; ++j) {
        codes[j] = (*this)[j];
    }
    return codes;
}

} // namespace twobit

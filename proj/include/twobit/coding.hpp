#pragma once

#include "twobit/data_matrix.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace twobit {

/// Identifies a Gaussian projection matrix R (dim x k). Entries are produced by
/// a counter-based generator keyed on (seed, row, column), so a spec fully
/// determines R and any block of it can be generated independently.
struct ProjectionSpec {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::size_t dim = 0;
};

/// Entry (row, col) of the projection matrix described by `seed`; N(0,1).
double projection_entry(std::uint64_t seed, std::uint64_t row, std::uint64_t col);

/// Materialises R as a dim x k row-major matrix.
DataMatrix projection_matrix(const ProjectionSpec& spec);

/// data (n x dim) times R (dim x k).
DataMatrix project(const DataMatrix& data, const ProjectionSpec& spec);
DataMatrix project(const DataMatrix& data, const DataMatrix& projection);
std::vector<double> project_row(std::span<const double> row, const DataMatrix& projection);

/// 2-bit code: 0 <-> x <= -w, 1 <-> -w < x <= 0, 2 <-> 0 < x <= w, 3 <-> x > w.
using TwoBitCode = std::uint8_t;

TwoBitCode encode_2bit(double x, double w);
/// floor(x / w)
std::int64_t encode_uniform(double x, double w);
/// floor((x + q) / w) with offset q in [0, w)
std::int64_t encode_offset(double x, double w, double q);
/// 1 if x > 0 else 0
std::uint8_t encode_1bit(double x);

std::vector<TwoBitCode> encode_2bit(std::span<const double> xs, double w);

/// The six symmetric cell groups of the 2-bit likelihood. Each group is the
/// set of cells sharing one base region evaluated at +rho or -rho.
enum class CellGroup : std::uint8_t {
    DiagInner = 0,    // (2,2) (1,1)                   P22(+rho)
    AdjSame = 1,      // (2,3) (3,2) (0,1) (1,0)       P23(+rho)
    DiagOuter = 2,    // (3,3) (0,0)                   P33(+rho)
    DiagInnerNeg = 3, // (1,2) (2,1)                   P22(-rho)
    AdjOpp = 4,       // (0,2) (1,3) (2,0) (3,1)       P23(-rho)
    DiagOuterNeg = 5, // (0,3) (3,0)                   P33(-rho)
};

inline constexpr std::size_t kCellGroups = 6;

CellGroup cell_group(TwoBitCode x, TwoBitCode y);

struct CellCounts {
    std::array<std::int64_t, kCellGroups> cells{};

    std::int64_t& operator[](CellGroup g) { return cells[static_cast<std::size_t>(g)]; }
    std::int64_t operator[](CellGroup g) const { return cells[static_cast<std::size_t>(g)]; }

    std::int64_t total() const;
    /// Pairs whose codes agree in sign (both in {2,3} or both in {0,1}).
    std::int64_t same_sign() const;
    /// k00 + k11 + k22 + k33: pairs with equal codes (DiagInner + DiagOuter).
    std::int64_t exact_diagonal() const { return cells[0] + cells[2]; }
};

CellCounts tally_cells(std::span<const TwoBitCode> codes_x, std::span<const TwoBitCode> codes_y);

/// 2-bit codes packed four per byte; code j lives in byte j/4 at bit 2*(j%4).
class PackedCodes {
public:
    PackedCodes() = default;
    explicit PackedCodes(std::span<const TwoBitCode> codes);

    std::size_t size() const { return size_; }
    TwoBitCode operator[](std::size_t j) const { return (bytes_[j >> 2] >> (2 * (j & 3))) & 3u; }
    std::span<const std::uint8_t> bytes() const { return bytes_; }
    std::vector<TwoBitCode> unpack() const;

private:
    std::size_t size_ = 0;
    std::vector<std::uint8_t> bytes_;
};

CellCounts tally_cells(std::span<const std::uint8_t> packed_x, std::span<const std::uint8_t> packed_y,
                       std::size_t k);

enum class SketchScheme : std::uint8_t { TwoBit = 2 };

/// Per-point packed 2-bit codes used for similarity estimation.
///
/// File layout (little-endian), 48-byte header then rows:
///   0  char[4] "TBSK"
///   4  u32     version = 1
///   8  u8      scheme tag (2 = two-bit threshold codes)
///   9  u8[7]   zero padding
///   16 f64     w
///   24 u32     k
///   28 u32     zero padding
///   32 u64     n
///   40 u64     projection seed
///   48 n rows of ceil(k/4) bytes, packed as in PackedCodes
/// The data dimensionality is not stored; the seed alone fixes every column of R.
class SketchStore {
public:
    SketchStore() = default;
    SketchStore(std::size_t k, double w, std::uint64_t seed);

    /// Projects and codes every row of data with ProjectionSpec{k, seed, data.cols()}.
    static SketchStore encode(const DataMatrix& data, std::size_t k, double w, std::uint64_t seed);

    void append(std::span<const TwoBitCode> codes);
    PackedCodes encode_query(std::span<const double> query, std::size_t dim) const;

    std::size_t size() const { return n_; }
    std::size_t k() const { return k_; }
    double w() const { return w_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t stride() const { return (k_ + 3) / 4; }

    /// Packed row i; throws ValidationError naming the id when i is out of range.
    std::span<const std::uint8_t> row(std::size_t i) const;

    void save(const std::filesystem::path& path) const;
    static SketchStore load(const std::filesystem::path& path);

private:
    std::size_t k_ = 0;
    double w_ = 0.0;
    std::uint64_t seed_ = 0;
    std::size_t n_ = 0;
    std::vector<std::uint8_t> bytes_;
};

} // namespace twobit

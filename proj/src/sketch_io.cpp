#include "binary_io.hpp"
#include "twobit/coding.hpp"
#include "twobit/error.hpp"

#include <fstream>
#include <string>

namespace twobit {

namespace {
constexpr std::string_view kSketchMagic = "TBSK";
constexpr std::uint32_t kSketchVersion = 1;
} // namespace

SketchStore::SketchStore(std::size_t k, double w, std::uint64_t seed) : k_(k), w_(w), seed_(seed) {
    if (k < 1) {
        throw ValidationError("sketch needs k >= 1");
    }
    if (!(w > 0.0)) {
        throw ValidationError("sketch threshold w must be positive");
    }
}

SketchStore SketchStore::encode(const DataMatrix& data, std::size_t k, double w, std::uint64_t seed) {
    SketchStore store(k, w, seed);
    const DataMatrix projected = project(data, ProjectionSpec{k, seed, data.cols()});
    store.bytes_.reserve(data.rows() * store.stride());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        store.append(encode_2bit(projected.row(i), w));
    }
    return store;
}

void SketchStore::append(std::span<const TwoBitCode> codes) {
    if (codes.size() != k_) {
        throw ValidationError("sketch row has " + std::to_string(codes.size()) + " codes, expected " +
                              std::to_string(k_));
    }
    const PackedCodes packed(codes);
    bytes_.insert(bytes_.end(), packed.bytes().begin(), packed.bytes().end());
    ++n_;
}

PackedCodes SketchStore::encode_query(std::span<const double> query, std::size_t dim) const {
    const auto projected = project_row(query, projection_matrix(ProjectionSpec{k_, seed_, dim}));
    return PackedCodes(encode_2bit(projected, w_));
}

std::span<const std::uint8_t> SketchStore::row(std::size_t i) const {
    if (i >= n_) {
        throw ValidationError("no sketch stored for point id " + std::to_string(i));
    }
    return {bytes_.data() + i * stride(), stride()};
}

void SketchStore::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    io::write_magic(out, kSketchMagic);
    io::write_u32(out, kSketchVersion);
    io::write_u8(out, static_cast<std::uint8_t>(SketchScheme::TwoBit));
    for (int i = 0; i < 7; ++i) {
        io::write_u8(out, 0);
    }
    io::write_f64(out, w_);
    io::write_u32(out, static_cast<std::uint32_t>(k_));
    io::write_u32(out, 0);
    io::write_u64(out, n_);
    io::write_u64(out, seed_);
    out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
    if (!out) {
        throw FormatError("write failed: " + path.string());
    }
}

SketchStore SketchStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    io::expect_magic(in, kSketchMagic);
    if (const auto version = io::read_u32(in); version != kSketchVersion) {
        throw FormatError("unsupported sketch version " + std::to_string(version));
    }
    if (const auto scheme = io::read_u8(in); scheme != static_cast<std::uint8_t>(SketchScheme::TwoBit)) {
        throw FormatError("unsupported sketch scheme tag " + std::to_string(scheme));
    }
    for (int i = 0; i < 7; ++i) {
        io::read_u8(in);
    }
    const double w = io::read_f64(in);
    const std::uint32_t k = io::read_u32(in);
    io::read_u32(in);
    const std::uint64_t n = io::read_u64(in);
    const std::uint64_t seed = io::read_u64(in);
    if (k == 0 || !(w > 0.0)) {
        throw FormatError("corrupt sketch header in " + path.string());
    }
    SketchStore store(k, w, seed);
    store.n_ = n;
    store.bytes_.resize(n * store.stride());
    in.read(reinterpret_cast<char*>(store.bytes_.data()), static_cast<std::streamsize>(store.bytes_.size()));
    if (!in) {
        throw FormatError("sketch file truncated: " + path.string());
    }
    return store;
}

} // namespace twobit

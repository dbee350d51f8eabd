#pragma once

// Little-endian scalar encoding shared by the table, sketch and index formats.

#include "twobit/error.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace twobit::io {

template <typename U>
void write_le(std::ostream& out, U value) {
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFu);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename U>
U read_le(std::istream& in) {
    std::array<unsigned char, sizeof(U)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) {
        throw FormatError("unexpected end of file");
    }
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        value |= static_cast<U>(bytes[i]) << (8 * i);
    }
    return value;
}

inline void write_u8(std::ostream& out, std::uint8_t v) { write_le<std::uint8_t>(out, v); }
inline void write_u32(std::ostream& out, std::uint32_t v) { write_le<std::uint32_t>(out, v); }
inline void write_u64(std::ostream& out, std::uint64_t v) { write_le<std::uint64_t>(out, v); }
inline void write_f64(std::ostream& out, double v) { write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint8_t read_u8(std::istream& in) { return read_le<std::uint8_t>(in); }
inline std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
inline std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
inline double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

inline void write_magic(std::ostream& out, std::string_view magic) { out.write(magic.data(), magic.size()); }

inline void expect_magic(std::istream& in, std::string_view magic) {
    std::string got(magic.size(), '\0');
    in.read(got.data(), got.size());
    if (!in || got != magic) {
        throw FormatError("bad magic: expected '" + std::string(magic) + "'");
    }
}

} // namespace twobit::io

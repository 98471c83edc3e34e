#pragma once

// Little-endian encoding helpers shared by the binary formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

#include "fuzzyseek/error.hpp"

namespace fuzzyseek::bytes {

template <typename T>
void put_uint(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
    }
}

inline void put_f64(std::string& out, double value) { put_uint(out, std::bit_cast<std::uint64_t>(value)); }

inline void put_string(std::string& out, std::string_view s) {
    put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

inline void require(std::span<const unsigned char> in, std::size_t pos, std::size_t n) {
    if (pos > in.size() || in.size() - pos < n) {
        throw Error(ErrorCode::CorruptIndex, "unexpected end of data");
    }
}

template <typename T>
T get_uint(std::span<const unsigned char> in, std::size_t& pos) {
    require(in, pos, sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(in[pos + i]) << (8 * i);
    pos += sizeof(T);
    return static_cast<T>(v);
}

inline double get_f64(std::span<const unsigned char> in, std::size_t& pos) {
    return std::bit_cast<double>(get_uint<std::uint64_t>(in, pos));
}

inline std::string get_string(std::span<const unsigned char> in, std::size_t& pos) {
    const auto len = get_uint<std::uint32_t>(in, pos);
    require(in, pos, len);
    std::string s(reinterpret_cast<const char*>(in.data() + pos), len);
    pos += len;
    return s;
}

inline std::span<const unsigned char> as_bytes(std::string_view s) {
    return {reinterpret_cast<const unsigned char*>(s.data()), s.size()};
}

}  // namespace fuzzyseek::bytes

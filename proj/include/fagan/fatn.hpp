#pragma once

// FATN binary tensor container:
//   magic "FATN", version u8 (1), dtype u8 (0 = f32, 1 = f64), rank u8,
//   dims as u32 little-endian, then raw little-endian values row-major.

#include "fagan/tensor.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace fagan {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
constexpr std::uint8_t fatn_dtype() {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    return sizeof(T) == 4 ? 0 : 1;
}

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("FATN: truncated header");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

}  // namespace detail

template <typename T>
void fatn_write(std::ostream& os, const Shape& shape, std::span<const T> data) {
    if (shape_numel(shape) != data.size()) throw ContractError("fatn_write: shape/data mismatch");
    os.write("FATN", 4);
    const std::uint8_t version = 1, dtype = detail::fatn_dtype<T>(),
                       rank = static_cast<std::uint8_t>(shape.size());
    os.put(static_cast<char>(version));
    os.put(static_cast<char>(dtype));
    os.put(static_cast<char>(rank));
    for (std::size_t d : shape) detail::write_u32(os, static_cast<std::uint32_t>(d));
    // assumes a little-endian host, as does every platform this builds on
    os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(T)));
    if (!os) throw IoError("fatn_write: stream failure");
}

template <typename T>
std::pair<Shape, std::vector<T>> fatn_read(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "FATN") throw IoError("FATN: bad magic");
    const int version = is.get(), dtype = is.get(), rank = is.get();
    if (version != 1) throw IoError("FATN: unsupported version " + std::to_string(version));
    if (dtype != detail::fatn_dtype<T>())
        throw IoError("FATN: dtype tag " + std::to_string(dtype) + " does not match requested precision");
    if (rank < 0 || rank > 8) throw IoError("FATN: implausible rank");
    Shape shape(static_cast<std::size_t>(rank));
    for (auto& d : shape) d = detail::read_u32(is);
    std::vector<T> data(shape_numel(shape));
    is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(T)));
    if (!is) throw IoError("FATN: truncated payload");
    return {std::move(shape), std::move(data)};
}

template <typename T>
void fatn_save(const std::string& path, const Tensor<T>& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("fatn_save: cannot open " + path);
    fatn_write<T>(os, t.shape(), t.data());
}

template <typename T>
Tensor<T> fatn_load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("fatn_load: cannot open " + path);
    auto [shape, data] = fatn_read<T>(is);
    return Tensor<T>(std::move(shape), std::move(data));
}

}  // namespace fagan

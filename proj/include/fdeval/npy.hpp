#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fdeval/error.hpp"

namespace fdeval::npy {

enum class Dtype { U8, U16, F32, F64 };

const char* dtype_descr(Dtype dtype);

/// Raw NPY v1.0 array: little-endian, C-contiguous payload plus shape.
struct Array {
    Dtype dtype = Dtype::U8;
    std::vector<std::int64_t> shape;
    std::vector<std::uint8_t> raw;

    std::size_t element_count() const;
    std::vector<double> as_doubles() const;        // F32/F64
    std::vector<std::int32_t> as_int_labels() const;  // U8/U16
    std::vector<std::uint8_t> as_u8() const;       // U8
};

Array load(const std::filesystem::path& path);

void save(const std::filesystem::path& path, const Array& array);

Array from_u8(std::vector<std::int64_t> shape, std::vector<std::uint8_t> values);
Array from_f64(std::vector<std::int64_t> shape, std::span<const double> values);
Array from_f32(std::vector<std::int64_t> shape, std::span<const float> values);
Array from_u16(std::vector<std::int64_t> shape, std::span<const std::uint16_t> values);

}  // namespace fdeval::npy

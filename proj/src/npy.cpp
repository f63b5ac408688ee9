#include "fdeval/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace fdeval::npy {

static_assert(std::endian::native == std::endian::little,
              "the NPY layer assumes a little-endian host");

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

std::size_t dtype_size(Dtype dtype) {
    switch (dtype) {
        case Dtype::U8: return 1;
        case Dtype::U16: return 2;
        case Dtype::F32: return 4;
        case Dtype::F64: return 8;
    }
    return 0;
}

Dtype parse_descr(const std::string& descr) {
    if (descr == "|u1" || descr == "<u1") return Dtype::U8;
    if (descr == "<u2") return Dtype::U16;
    if (descr == "<f4") return Dtype::F32;
    if (descr == "<f8") return Dtype::F64;
    throw EvalError(ErrorCode::UnsupportedDtype, "dtype '" + descr + "' is not supported");
}

// Pulls the value substring that follows '<key>': in the header dict.
std::string header_value(const std::string& header, const std::string& key) {
    auto pos = header.find("'" + key + "'");
    if (pos == std::string::npos) {
        throw EvalError(ErrorCode::BadMagic, "header lacks key '" + key + "'");
    }
    pos = header.find(':', pos);
    if (pos == std::string::npos) {
        throw EvalError(ErrorCode::BadMagic, "malformed header near '" + key + "'");
    }
    ++pos;
    while (pos < header.size() && header[pos] == ' ') ++pos;
    return header.substr(pos);
}

}  // namespace

const char* dtype_descr(Dtype dtype) {
    switch (dtype) {
        case Dtype::U8: return "|u1";
        case Dtype::U16: return "<u2";
        case Dtype::F32: return "<f4";
        case Dtype::F64: return "<f8";
    }
    return "";
}

std::size_t Array::element_count() const {
    std::size_t n = 1;
    for (auto d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

std::vector<double> Array::as_doubles() const {
    std::size_t n = element_count();
    std::vector<double> out(n);
    if (dtype == Dtype::F64) {
        std::memcpy(out.data(), raw.data(), n * sizeof(double));
    } else if (dtype == Dtype::F32) {
        const float* src = reinterpret_cast<const float*>(raw.data());
        for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(src[i]);
    } else {
        throw EvalError(ErrorCode::UnsupportedDtype, "expected a float array");
    }
    return out;
}

std::vector<std::int32_t> Array::as_int_labels() const {
    std::size_t n = element_count();
    std::vector<std::int32_t> out(n);
    if (dtype == Dtype::U8) {
        for (std::size_t i = 0; i < n; ++i) out[i] = raw[i];
    } else if (dtype == Dtype::U16) {
        const std::uint16_t* src = reinterpret_cast<const std::uint16_t*>(raw.data());
        for (std::size_t i = 0; i < n; ++i) out[i] = src[i];
    } else {
        throw EvalError(ErrorCode::UnsupportedDtype, "expected an integer label array");
    }
    return out;
}

std::vector<std::uint8_t> Array::as_u8() const {
    if (dtype != Dtype::U8) {
        throw EvalError(ErrorCode::UnsupportedDtype, "expected a u8 array");
    }
    return raw;
}

Array load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw EvalError(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    }
    char magic[6];
    in.read(magic, 6);
    if (!in || std::memcmp(magic, kMagic, 6) != 0) {
        throw EvalError(ErrorCode::BadMagic, "'" + path.string() + "' is not an NPY file");
    }
    unsigned char version[2];
    in.read(reinterpret_cast<char*>(version), 2);
    if (!in || version[0] != 1 || version[1] != 0) {
        throw EvalError(ErrorCode::BadMagic, "'" + path.string() + "' is not NPY version 1.0");
    }
    unsigned char len_bytes[2];
    in.read(reinterpret_cast<char*>(len_bytes), 2);
    if (!in) throw EvalError(ErrorCode::BadMagic, "truncated NPY header");
    std::size_t header_len = static_cast<std::size_t>(len_bytes[0]) |
                             (static_cast<std::size_t>(len_bytes[1]) << 8);
    std::string header(header_len, '\0');
    in.read(header.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw EvalError(ErrorCode::BadMagic, "truncated NPY header");

    // descr
    std::string descr_part = header_value(header, "descr");
    if (descr_part.empty() || descr_part[0] != '\'') {
        throw EvalError(ErrorCode::BadMagic, "malformed descr entry");
    }
    auto close = descr_part.find('\'', 1);
    Dtype dtype = parse_descr(descr_part.substr(1, close - 1));

    // fortran_order
    std::string order_part = header_value(header, "fortran_order");
    if (order_part.rfind("True", 0) == 0) {
        throw EvalError(ErrorCode::FortranOrderUnsupported,
                        "'" + path.string() + "' stores Fortran-ordered data");
    }
    if (order_part.rfind("False", 0) != 0) {
        throw EvalError(ErrorCode::BadMagic, "malformed fortran_order entry");
    }

    // shape tuple
    std::string shape_part = header_value(header, "shape");
    if (shape_part.empty() || shape_part[0] != '(') {
        throw EvalError(ErrorCode::BadMagic, "malformed shape entry");
    }
    std::vector<std::int64_t> shape;
    std::size_t pos = 1;
    while (pos < shape_part.size() && shape_part[pos] != ')') {
        while (pos < shape_part.size() && (shape_part[pos] == ' ' || shape_part[pos] == ',')) {
            ++pos;
        }
        if (pos >= shape_part.size() || shape_part[pos] == ')') break;
        std::size_t end = pos;
        while (end < shape_part.size() && shape_part[end] >= '0' && shape_part[end] <= '9') {
            ++end;
        }
        if (end == pos) throw EvalError(ErrorCode::BadMagic, "malformed shape entry");
        shape.push_back(std::stoll(shape_part.substr(pos, end - pos)));
        pos = end;
    }

    Array array;
    array.dtype = dtype;
    array.shape = std::move(shape);
    std::size_t payload = array.element_count() * dtype_size(dtype);
    array.raw.resize(payload);
    in.read(reinterpret_cast<char*>(array.raw.data()), static_cast<std::streamsize>(payload));
    if (!in) {
        throw EvalError(ErrorCode::IoError, "'" + path.string() + "' payload is truncated");
    }
    return array;
}

void save(const std::filesystem::path& path, const Array& array) {
    std::string dict = "{'descr': '";
    dict += dtype_descr(array.dtype);
    dict += "', 'fortran_order': False, 'shape': (";
    for (std::size_t i = 0; i < array.shape.size(); ++i) {
        dict += std::to_string(array.shape[i]);
        if (array.shape.size() == 1 || i + 1 < array.shape.size()) dict += ",";
        if (i + 1 < array.shape.size()) dict += " ";
    }
    dict += "), }";
    // pad so the payload starts on a 64-byte boundary, newline-terminated
    std::size_t unpadded = 10 + dict.size() + 1;
    std::size_t padding = (64 - unpadded % 64) % 64;
    dict.append(padding, ' ');
    dict += '\n';

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw EvalError(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    }
    out.write(kMagic, 6);
    unsigned char version[2] = {1, 0};
    out.write(reinterpret_cast<const char*>(version), 2);
    auto header_len = static_cast<std::uint16_t>(dict.size());
    unsigned char len_bytes[2] = {static_cast<unsigned char>(header_len & 0xff),
                                  static_cast<unsigned char>(header_len >> 8)};
    out.write(reinterpret_cast<const char*>(len_bytes), 2);
    out.write(dict.data(), static_cast<std::streamsize>(dict.size()));
    out.write(reinterpret_cast<const char*>(array.raw.data()),
              static_cast<std::streamsize>(array.raw.size()));
    if (!out) {
        throw EvalError(ErrorCode::IoError, "failed writing '" + path.string() + "'");
    }
}

Array from_u8(std::vector<std::int64_t> shape, std::vector<std::uint8_t> values) {
    Array array;
    array.dtype = Dtype::U8;
    array.shape = std::move(shape);
    array.raw = std::move(values);
    if (array.raw.size() != array.element_count()) {
        throw EvalError(ErrorCode::BadValue, "value count does not match shape");
    }
    return array;
}

Array from_f64(std::vector<std::int64_t> shape, std::span<const double> values) {
    Array array;
    array.dtype = Dtype::F64;
    array.shape = std::move(shape);
    if (values.size() != array.element_count()) {
        throw EvalError(ErrorCode::BadValue, "value count does not match shape");
    }
    array.raw.resize(values.size() * sizeof(double));
    std::memcpy(array.raw.data(), values.data(), array.raw.size());
    return array;
}

Array from_f32(std::vector<std::int64_t> shape, std::span<const float> values) {
    Array array;
    array.dtype = Dtype::F32;
    array.shape = std::move(shape);
    if (values.size() != array.element_count()) {
        throw EvalError(ErrorCode::BadValue, "value count does not match shape");
    }
    array.raw.resize(values.size() * sizeof(float));
    std::memcpy(array.raw.data(), values.data(), array.raw.size());
    return array;
}

Array from_u16(std::vector<std::int64_t> shape, std::span<const std::uint16_t> values) {
    Array array;
    array.dtype = Dtype::U16;
    array.shape = std::move(shape);
    if (values.size() != array.element_count()) {
        throw EvalError(ErrorCode::BadValue, "value count does not match shape");
    }
    array.raw.resize(values.size() * sizeof(std::uint16_t));
    std::memcpy(array.raw.data(), values.data(), array.raw.size());
    return array;
}

}  // namespace fdeval::npy

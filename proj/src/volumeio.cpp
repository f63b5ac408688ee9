#include "fdeval/volumeio.hpp"

#include <cmath>

namespace fdeval {

namespace {

std::vector<std::int64_t> volume_dims(const npy::Array& array, std::size_t expected_d,
                                      std::size_t leading_channels,
                                      const std::filesystem::path& path) {
    std::size_t expected_axes = expected_d + (leading_channels > 0 ? 1 : 0);
    if (array.shape.size() != expected_axes) {
        throw EvalError(ErrorCode::BadValue,
                        "'" + path.string() + "' has " + std::to_string(array.shape.size()) +
                            " axes, expected " + std::to_string(expected_axes));
    }
    if (leading_channels > 0 && static_cast<std::size_t>(array.shape[0]) != leading_channels) {
        throw EvalError(ErrorCode::BadValue,
                        "'" + path.string() + "' has " + std::to_string(array.shape[0]) +
                            " channels, expected " + std::to_string(leading_channels));
    }
    return {array.shape.end() - static_cast<std::ptrdiff_t>(expected_d), array.shape.end()};
}

}  // namespace

LabelMap read_label_map(const std::filesystem::path& path, const std::vector<double>& spacing,
                        LabelMode mode, const std::vector<std::int32_t>& class_ids) {
    auto array = npy::load(path);
    if (array.dtype != npy::Dtype::U8 && array.dtype != npy::Dtype::U16) {
        throw EvalError(ErrorCode::UnsupportedDtype,
                        "'" + path.string() + "' must store u8 or u16 labels");
    }
    if (mode == LabelMode::Exclusive) {
        auto dims = volume_dims(array, spacing.size(), 0, path);
        return LabelMap::exclusive(dims, spacing, class_ids, array.as_int_labels());
    }
    auto dims = volume_dims(array, spacing.size(), class_ids.size(), path);
    auto labels = array.as_int_labels();
    std::vector<std::uint8_t> masks(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 1) {
            throw EvalError(ErrorCode::ValueOutOfRange,
                            "'" + path.string() + "' region masks must be binary");
        }
        masks[i] = static_cast<std::uint8_t>(labels[i]);
    }
    return LabelMap::regions(dims, spacing, class_ids, std::move(masks));
}

ConfidenceMap read_confidence_map(const std::filesystem::path& path) {
    auto array = npy::load(path);
    if (array.dtype != npy::Dtype::F32 && array.dtype != npy::Dtype::F64) {
        throw EvalError(ErrorCode::UnsupportedDtype,
                        "'" + path.string() + "' must store f32 or f64 confidences");
    }
    if (array.shape.size() != 2 && array.shape.size() != 3) {
        throw EvalError(ErrorCode::BadValue, "'" + path.string() + "' must be 2D or 3D");
    }
    auto values = array.as_doubles();
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw EvalError(ErrorCode::ValueOutOfRange,
                            "'" + path.string() + "' has confidence values outside [0,1]");
        }
    }
    return ConfidenceMap(array.shape, std::move(values));
}

ProbabilityMap read_probability_map(const std::filesystem::path& path,
                                    const std::vector<double>& spacing, LabelMode mode,
                                    const std::vector<std::int32_t>& class_ids) {
    auto array = npy::load(path);
    if (array.dtype != npy::Dtype::F32 && array.dtype != npy::Dtype::F64) {
        throw EvalError(ErrorCode::UnsupportedDtype,
                        "'" + path.string() + "' must store f32 or f64 probabilities");
    }
    std::size_t channels =
        mode == LabelMode::Exclusive ? class_ids.size() + 1 : class_ids.size();
    auto dims = volume_dims(array, spacing.size(), channels, path);
    return ProbabilityMap(dims, spacing, mode, class_ids, array.as_doubles());
}

std::vector<double> read_feature_values(const std::filesystem::path& path) {
    auto array = npy::load(path);
    if (array.dtype != npy::Dtype::F32 && array.dtype != npy::Dtype::F64) {
        throw EvalError(ErrorCode::UnsupportedDtype,
                        "'" + path.string() + "' must store f32 or f64 features");
    }
    if (array.shape.size() != 1) {
        throw EvalError(ErrorCode::BadValue,
                        "'" + path.string() + "' must be a 1D feature vector");
    }
    auto values = array.as_doubles();
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw EvalError(ErrorCode::NonfiniteInput,
                            "'" + path.string() + "' has non-finite feature values");
        }
    }
    return values;
}

void write_label_map(const std::filesystem::path& path, const LabelMap& map) {
    if (map.mode() == LabelMode::Exclusive) {
        std::vector<std::uint8_t> data(map.voxel_count());
        for (std::size_t i = 0; i < data.size(); ++i) {
            auto v = map.labels()[i];
            if (v < 0 || v > 255) {
                throw EvalError(ErrorCode::ValueOutOfRange,
                                "labels beyond u8 range are not written by this tool");
            }
            data[i] = static_cast<std::uint8_t>(v);
        }
        npy::save(path, npy::from_u8(map.dims(), std::move(data)));
        return;
    }
    std::vector<std::int64_t> shape;
    shape.push_back(static_cast<std::int64_t>(map.class_ids().size()));
    shape.insert(shape.end(), map.dims().begin(), map.dims().end());
    std::vector<std::uint8_t> data;
    data.reserve(map.class_ids().size() * map.voxel_count());
    for (std::size_t r = 0; r < map.class_ids().size(); ++r) {
        const std::uint8_t* ch = map.region_channel(r);
        data.insert(data.end(), ch, ch + map.voxel_count());
    }
    npy::save(path, npy::from_u8(std::move(shape), std::move(data)));
}

void write_confidence_map(const std::filesystem::path& path, const ConfidenceMap& map) {
    npy::save(path, npy::from_f64(map.dims(), map.values()));
}

}  // namespace fdeval

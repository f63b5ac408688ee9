#include "fdeval/aggregation.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>

#include "fdeval/numeric.hpp"

namespace fdeval {

namespace {

std::vector<std::uint8_t> transition_voxels(const LabelMap& pred) {
    Grid grid = pred.grid();
    std::vector<std::uint8_t> out(grid.size(), 0);
    auto differs = [&](std::size_t a, std::size_t b) {
        if (pred.mode() == LabelMode::Exclusive) {
            return pred.labels()[a] != pred.labels()[b];
        }
        for (std::size_t r = 0; r < pred.class_ids().size(); ++r) {
            const std::uint8_t* ch = pred.region_channel(r);
            if (ch[a] != ch[b]) return true;
        }
        return false;
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool hit = false;
        grid.for_each_face_neighbor(i, [&](std::size_t j) {
            if (!hit && differs(i, j)) hit = true;
        });
        out[i] = hit ? 1 : 0;
    }
    return out;
}

// Chebyshev dilation by radius r = separable per-axis max filter with a
// (2r+1)-wide box window.
void dilate_chebyshev(std::vector<std::uint8_t>& mask, const Grid& grid, int radius) {
    if (radius <= 0) return;
    const auto& dims = grid.dims();
    std::vector<std::uint8_t> tmp(mask.size());
    for (std::size_t ax = 0; ax < dims.size(); ++ax) {
        auto n = static_cast<std::int64_t>(dims[ax]);
        std::size_t stride = 1;
        for (std::size_t i = ax + 1; i < dims.size(); ++i) {
            stride *= static_cast<std::size_t>(dims[i]);
        }
        std::size_t lines = mask.size() / static_cast<std::size_t>(n);
        std::size_t block = stride * static_cast<std::size_t>(n);
        for (std::size_t line = 0; line < lines; ++line) {
            std::size_t base = (line / stride) * block + (line % stride);
            for (std::int64_t q = 0; q < n; ++q) {
                std::uint8_t v = 0;
                std::int64_t lo = std::max<std::int64_t>(0, q - radius);
                std::int64_t hi = std::min<std::int64_t>(n - 1, q + radius);
                for (std::int64_t j = lo; j <= hi && !v; ++j) {
                    v = mask[base + static_cast<std::size_t>(j) * stride];
                }
                tmp[base + static_cast<std::size_t>(q) * stride] = v;
            }
        }
        mask.swap(tmp);
    }
}

double masked_mean(const std::vector<double>& values, const std::vector<std::uint8_t>& keep,
                   std::size_t kept) {
    KahanSum acc;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (keep[i]) acc.add(values[i]);
    }
    return acc.value() / static_cast<double>(kept);
}

}  // namespace

std::vector<std::uint8_t> boundary_mask(const LabelMap& pred, int width) {
    if (width < 1) throw EvalError(ErrorCode::BadWidth, "boundary width must be >= 1");
    Grid grid = pred.grid();
    auto mask = transition_voxels(pred);
    dilate_chebyshev(mask, grid, width - 1);
    return mask;
}

double agg_mean(const ConfidenceMap& conf) {
    if (conf.values().empty()) throw EvalError(ErrorCode::EmptyMap, "confidence map is empty");
    return compensated_mean(conf.values());
}

double agg_non_boundary(const ConfidenceMap& conf, const LabelMap& pred, int width) {
    validate_conf_pair(conf, pred);
    auto boundary = boundary_mask(pred, width);
    std::size_t kept = 0;
    for (auto& b : boundary) {
        b = b ? 0 : 1;  // invert: keep non-boundary
        kept += b;
    }
    if (kept == 0) return agg_mean(conf);
    return masked_mean(conf.values(), boundary, kept);
}

double agg_mean_foreground(const ConfidenceMap& conf, const LabelMap& pred, int width) {
    validate_conf_pair(conf, pred);
    auto fg = pred.foreground_mask();
    auto boundary = boundary_mask(pred, width);
    std::vector<std::uint8_t> keep(fg.size());
    std::size_t kept = 0;
    for (std::size_t i = 0; i < fg.size(); ++i) {
        keep[i] = (fg[i] && !boundary[i]) ? 1 : 0;
        kept += keep[i];
    }
    if (kept > 0) return masked_mean(conf.values(), keep, kept);
    std::size_t fg_count = 0;
    for (auto v : fg) fg_count += v;
    if (fg_count > 0) return masked_mean(conf.values(), fg, fg_count);
    return agg_mean(conf);
}

double agg_patch_min(const ConfidenceMap& conf, int patch_size) {
    if (patch_size < 1) throw EvalError(ErrorCode::BadPatch, "patch size must be >= 1");
    Grid grid = conf.grid();
    const auto& dims = grid.dims();
    std::int64_t stride = std::max<std::int64_t>(1, patch_size / 2);

    // window start offsets per axis; the last window is clamped to the border
    std::vector<std::vector<std::int64_t>> starts(dims.size());
    for (std::size_t ax = 0; ax < dims.size(); ++ax) {
        std::int64_t n = dims[ax];
        if (n <= patch_size) {
            starts[ax] = {0};
            continue;
        }
        for (std::int64_t s = 0; s + patch_size < n; s += stride) starts[ax].push_back(s);
        starts[ax].push_back(n - patch_size);
    }

    const auto& values = conf.values();
    double best = std::numeric_limits<double>::infinity();
    std::array<std::size_t, 3> pick{0, 0, 0};
    while (true) {
        // window mean at the current start combination
        std::array<std::int64_t, 3> lo{0, 0, 0}, len{1, 1, 1};
        for (std::size_t ax = 0; ax < dims.size(); ++ax) {
            lo[ax] = starts[ax][pick[ax]];
            len[ax] = std::min<std::int64_t>(patch_size, dims[ax]);
        }
        KahanSum acc;
        std::size_t count = 0;
        std::array<std::int64_t, 3> c{0, 0, 0};
        for (c[0] = 0; c[0] < len[0]; ++c[0]) {
            for (c[1] = 0; c[1] < (dims.size() > 1 ? len[1] : 1); ++c[1]) {
                for (c[2] = 0; c[2] < (dims.size() > 2 ? len[2] : 1); ++c[2]) {
                    std::array<std::int64_t, 3> p{lo[0] + c[0], lo[1] + c[1], lo[2] + c[2]};
                    acc.add(values[grid.index(p)]);
                    ++count;
                }
            }
        }
        best = std::min(best, acc.value() / static_cast<double>(count));

        // advance the start combination odometer-style
        std::size_t ax = dims.size();
        while (ax-- > 0) {
            if (++pick[ax] < starts[ax].size()) break;
            pick[ax] = 0;
            if (ax == 0) return best;
        }
    }
}

std::size_t connected_components(const std::vector<std::uint8_t>& mask,
                                 const std::vector<std::int64_t>& dims) {
    Grid grid(dims);
    std::vector<std::uint8_t> visited(mask.size(), 0);
    std::deque<std::size_t> queue;
    std::size_t components = 0;
    for (std::size_t seed = 0; seed < mask.size(); ++seed) {
        if (!mask[seed] || visited[seed]) continue;
        ++components;
        visited[seed] = 1;
        queue.push_back(seed);
        while (!queue.empty()) {
            std::size_t i = queue.front();
            queue.pop_front();
            grid.for_each_face_neighbor(i, [&](std::size_t j) {
                if (mask[j] && !visited[j]) {
                    visited[j] = 1;
                    queue.push_back(j);
                }
            });
        }
    }
    return components;
}

const std::vector<std::string>& simple_feature_schema() {
    static const std::vector<std::string> schema = {
        "mean_conf_fg", "mean_conf_bg", "mean_conf_boundary", "fg_fraction", "n_components"};
    return schema;
}

FeatureVector simple_features(const ConfidenceMap& conf, const LabelMap& pred, int width) {
    validate_conf_pair(conf, pred);
    auto fg = pred.foreground_mask();
    auto boundary = boundary_mask(pred, width);

    std::size_t n_fg = 0, n_boundary = 0;
    for (auto v : fg) n_fg += v;
    for (auto v : boundary) n_boundary += v;
    std::size_t n = fg.size();
    std::size_t n_bg = n - n_fg;

    std::vector<std::uint8_t> bg(n);
    for (std::size_t i = 0; i < n; ++i) bg[i] = fg[i] ? 0 : 1;

    // absent region carries no uncertainty
    double mean_fg = n_fg > 0 ? masked_mean(conf.values(), fg, n_fg) : 1.0;
    double mean_bg = n_bg > 0 ? masked_mean(conf.values(), bg, n_bg) : 1.0;
    double mean_boundary =
        n_boundary > 0 ? masked_mean(conf.values(), boundary, n_boundary) : 1.0;
    double fg_fraction = static_cast<double>(n_fg) / static_cast<double>(n);
    double components = static_cast<double>(connected_components(fg, pred.dims()));

    return FeatureVector({mean_fg, mean_bg, mean_boundary, fg_fraction, components},
                         simple_feature_schema());
}

}  // namespace fdeval

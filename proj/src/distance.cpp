#include "fdeval/distance.hpp"

#include <limits>

#include "fdeval/grid.hpp"

namespace fdeval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared-distance transform by lower envelope of parabolas
// (Felzenszwalb/Huttenlocher), generalized to non-unit sample spacing by
// working in physical coordinates x = i * step.
void transform_line(const double* f, double* out, std::size_t n, double step,
                    std::vector<int>& v, std::vector<double>& z) {
    v.resize(n);
    z.resize(n + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (std::size_t q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        double xq = static_cast<double>(q) * step;
        while (true) {
            if (f[v[k]] == kInf) {
                // previous vertex unreachable; replace it outright
                if (k == 0) {
                    v[0] = static_cast<int>(q);
                    z[0] = -kInf;
                    z[1] = kInf;
                    break;
                }
                --k;
                continue;
            }
            double xv = static_cast<double>(v[k]) * step;
            double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * xq - 2.0 * xv);
            if (s <= z[k]) {
                --k;
                continue;
            }
            ++k;
            v[k] = static_cast<int>(q);
            z[k] = s;
            z[k + 1] = kInf;
            break;
        }
    }
    if (f[v[0]] == kInf) {
        // no finite parabola on this line
        for (std::size_t q = 0; q < n; ++q) out[q] = kInf;
        return;
    }
    k = 0;
    for (std::size_t q = 0; q < n; ++q) {
        double xq = static_cast<double>(q) * step;
        while (z[k + 1] < xq) ++k;
        double dx = xq - static_cast<double>(v[k]) * step;
        out[q] = dx * dx + f[v[k]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const std::vector<std::int64_t>& dims,
                                               const std::vector<double>& spacing,
                                               const std::vector<std::uint8_t>& sources) {
    Grid grid(dims);
    std::vector<double> dist(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) dist[i] = sources[i] ? 0.0 : kInf;

    std::vector<double> line_in, line_out;
    std::vector<int> v;
    std::vector<double> z;

    // Per-axis passes; each pass minimizes over one coordinate while holding
    // the others fixed, which is exact for the squared Euclidean metric.
    for (std::size_t ax = 0; ax < dims.size(); ++ax) {
        auto n = static_cast<std::size_t>(dims[ax]);
        if (n == 1) continue;
        line_in.resize(n);
        line_out.resize(n);

        // stride along this axis, and number of lines to sweep
        std::size_t stride = 1;
        for (std::size_t i = ax + 1; i < dims.size(); ++i) {
            stride *= static_cast<std::size_t>(dims[i]);
        }
        std::size_t lines = grid.size() / n;
        std::size_t block = stride * n;  // span of one axis-run within the flat array

        for (std::size_t line = 0; line < lines; ++line) {
            std::size_t base = (line / stride) * block + (line % stride);
            for (std::size_t q = 0; q < n; ++q) line_in[q] = dist[base + q * stride];
            transform_line(line_in.data(), line_out.data(), n, spacing[ax], v, z);
            for (std::size_t q = 0; q < n; ++q) dist[base + q * stride] = line_out[q];
        }
    }
    return dist;
}

}  // namespace fdeval

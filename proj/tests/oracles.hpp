// Brute-force reference implementations used only by tests. These are kept
// deliberately naive (explicit loops, all-pairs scans, exhaustive
// permutations) and independent of the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "fdeval/datamodel.hpp"

namespace oracles {

// per-class Dice by direct voxel counting over raw exclusive labels
inline double dsc_of_class(const std::vector<std::int32_t>& pred,
                           const std::vector<std::int32_t>& gt, std::int32_t cls) {
    std::size_t inter = 0, p = 0, g = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        bool in_p = pred[i] == cls;
        bool in_g = gt[i] == cls;
        if (in_p) ++p;
        if (in_g) ++g;
        if (in_p && in_g) ++inter;
    }
    if (p + g == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(p + g);
}

inline double mean_dsc(const std::vector<std::int32_t>& pred,
                       const std::vector<std::int32_t>& gt,
                       const std::vector<std::int32_t>& classes) {
    double sum = 0.0;
    for (auto cls : classes) sum += dsc_of_class(pred, gt, cls);
    return sum / static_cast<double>(classes.size());
}

inline double generalized_dsc(const std::vector<std::int32_t>& pred,
                              const std::vector<std::int32_t>& gt,
                              const std::vector<std::int32_t>& classes) {
    double num = 0.0, den = 0.0;
    for (auto cls : classes) {
        double inter = 0, p = 0, g = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (pred[i] == cls) p += 1;
            if (gt[i] == cls) g += 1;
            if (pred[i] == cls && gt[i] == cls) inter += 1;
        }
        double w = 1.0 / (std::max(g, 1.0) * std::max(g, 1.0));
        num += 2.0 * w * inter;
        den += w * (p + g);
    }
    return den == 0.0 ? 1.0 : num / den;
}

// boundary voxels of a 2D mask: in-mask voxels with a face neighbor outside
// the mask or on the image border
inline std::vector<std::pair<int, int>> boundary_2d(const std::vector<std::uint8_t>& mask,
                                                    int ny, int nx) {
    std::vector<std::pair<int, int>> out;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            if (!mask[static_cast<std::size_t>(y) * nx + x]) continue;
            bool edge = y == 0 || y == ny - 1 || x == 0 || x == nx - 1;
            if (!edge) {
                if (!mask[static_cast<std::size_t>(y - 1) * nx + x] ||
                    !mask[static_cast<std::size_t>(y + 1) * nx + x] ||
                    !mask[static_cast<std::size_t>(y) * nx + x - 1] ||
                    !mask[static_cast<std::size_t>(y) * nx + x + 1]) {
                    edge = true;
                }
            }
            if (edge) out.emplace_back(y, x);
        }
    }
    return out;
}

// all-pairs normalized surface distance on a 2D grid
inline double nsd_2d(const std::vector<std::uint8_t>& pred, const std::vector<std::uint8_t>& gt,
                     int ny, int nx, double sy, double sx, double tolerance) {
    auto bp = boundary_2d(pred, ny, nx);
    auto bg = boundary_2d(gt, ny, nx);
    if (bp.empty() && bg.empty()) return 1.0;
    if (bp.empty() || bg.empty()) return 0.0;
    double tol2 = tolerance * tolerance;
    auto min_d2 = [&](const std::pair<int, int>& a,
                      const std::vector<std::pair<int, int>>& others) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& b : others) {
            double dy = (a.first - b.first) * sy;
            double dx = (a.second - b.second) * sx;
            best = std::min(best, dy * dy + dx * dx);
        }
        return best;
    };
    std::size_t hits = 0;
    for (const auto& v : bp) {
        if (min_d2(v, bg) <= tol2) ++hits;
    }
    for (const auto& v : bg) {
        if (min_d2(v, bp) <= tol2) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(bp.size() + bg.size());
}

// AURC by cumulative means of the admitted prefix; requires tie-free
// confidences
inline double aurc_cumulative_means(std::vector<double> risks, std::vector<double> confs) {
    std::size_t n = risks.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return confs[a] > confs[b]; });
    double area = 0.0, cum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cum += risks[order[k]];
        area += cum / static_cast<double>(k + 1);
    }
    return area / static_cast<double>(n);
}

// exhaustive minimum AURC over every admission order (n <= 8)
inline double aurc_exhaustive_min(const std::vector<double>& risks) {
    std::size_t n = risks.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double cum = 0.0, area = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            cum += risks[perm[k]];
            area += cum / static_cast<double>(k + 1);
        }
        best = std::min(best, area / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// AUROC by explicit pair enumeration with half credit for ties
inline double auroc_pairs(const std::vector<std::uint8_t>& labels,
                          const std::vector<double>& scores) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

// textbook Pearson over hand-computed fractional ranks
inline std::vector<double> ranks_by_hand(const std::vector<double>& v) {
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double below = 0, equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i]) below += 1;
            if (v[j] == v[i]) equal += 1;
        }
        ranks[i] = below + (equal + 1.0) / 2.0;
    }
    return ranks;
}

inline double pearson_by_hand(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

// random exclusive label map over the given classes (plus background)
inline fdeval::LabelMap random_label_map(std::mt19937_64& rng,
                                         const std::vector<std::int64_t>& dims,
                                         const std::vector<std::int32_t>& classes) {
    std::size_t n = 1;
    for (auto d : dims) n *= static_cast<std::size_t>(d);
    std::vector<std::int32_t> labels(n);
    for (auto& v : labels) {
        auto pick = rng() % (classes.size() + 1);
        v = pick == 0 ? 0 : classes[pick - 1];
    }
    std::vector<double> spacing(dims.size(), 1.0);
    return fdeval::LabelMap::exclusive(dims, spacing, classes, std::move(labels));
}

inline std::vector<std::uint8_t> random_mask(std::mt19937_64& rng, std::size_t n,
                                             double density = 0.5) {
    std::vector<std::uint8_t> mask(n);
    for (auto& v : mask) {
        v = (static_cast<double>(rng() >> 11) * 0x1.0p-53) < density ? 1 : 0;
    }
    return mask;
}

inline double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace oracles

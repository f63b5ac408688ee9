#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fdeval {

/// Index arithmetic for a D-dimensional C-contiguous grid (D = 2 or 3).
/// Axis order is slowest-first: (z, y, x) in 3D, (y, x) in 2D.
class Grid {
public:
    explicit Grid(const std::vector<std::int64_t>& dims) : dims_(dims) {
        strides_.resize(dims.size());
        std::int64_t s = 1;
        for (std::size_t i = dims.size(); i-- > 0;) {
            strides_[i] = s;
            s *= dims[i];
        }
        size_ = static_cast<std::size_t>(s);
    }

    std::size_t size() const { return size_; }
    std::size_t ndim() const { return dims_.size(); }
    const std::vector<std::int64_t>& dims() const { return dims_; }

    std::size_t index(const std::array<std::int64_t, 3>& c) const {
        std::int64_t idx = 0;
        for (std::size_t i = 0; i < dims_.size(); ++i) idx += c[i] * strides_[i];
        return static_cast<std::size_t>(idx);
    }

    std::array<std::int64_t, 3> coords(std::size_t idx) const {
        std::array<std::int64_t, 3> c{0, 0, 0};
        auto rem = static_cast<std::int64_t>(idx);
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            c[i] = rem / strides_[i];
            rem %= strides_[i];
        }
        return c;
    }

    /// Visits the up-to-2D face neighbors of idx.
    template <typename Fn>
    void for_each_face_neighbor(std::size_t idx, Fn&& fn) const {
        auto c = coords(idx);
        for (std::size_t ax = 0; ax < dims_.size(); ++ax) {
            if (c[ax] > 0) fn(idx - static_cast<std::size_t>(strides_[ax]));
            if (c[ax] + 1 < dims_[ax]) fn(idx + static_cast<std::size_t>(strides_[ax]));
        }
    }

    /// True if the voxel touches the grid border along any axis.
    bool on_border(std::size_t idx) const {
        auto c = coords(idx);
        for (std::size_t ax = 0; ax < dims_.size(); ++ax) {
            if (c[ax] == 0 || c[ax] + 1 == dims_[ax]) return true;
        }
        return false;
    }

private:
    std::vector<std::int64_t> dims_;
    std::vector<std::int64_t> strides_;
    std::size_t size_ = 0;
};

}  // namespace fdeval

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mvd/errors.hpp"
#include "mvd/grid.hpp"
#include "mvd/quadrature.hpp"

namespace mvd {

/**
 * Space-time array shaped like R^{N+1} x (R^{M-1})^{N+1} x R^{N+1}: a left
 * trace at x_0, N+1 interior rows, and a right trace at x_M. The tag keeps
 * solution-space and residual-space elements apart; they carry different
 * norms.
 */
template <class Tag>
class GridField {
public:
    explicit GridField(const GridSpec& grid)
        : grid_(grid),
          width_(grid.interior_size()),
          left_(grid.n_steps() + 1, 0.0),
          right_(grid.n_steps() + 1, 0.0),
          rows_((grid.n_steps() + 1) * grid.interior_size(), 0.0) {}

    const GridSpec& grid() const noexcept { return grid_; }
    /// Number of time levels N + 1.
    std::size_t levels() const noexcept { return left_.size(); }
    /// Number of interior nodes M - 1.
    std::size_t width() const noexcept { return width_; }

    std::span<double> left() noexcept { return left_; }
    std::span<const double> left() const noexcept { return left_; }
    std::span<double> right() noexcept { return right_; }
    std::span<const double> right() const noexcept { return right_; }

    std::span<double> row(std::size_t n) noexcept { return {rows_.data() + n * width_, width_}; }
    std::span<const double> row(std::size_t n) const noexcept { return {rows_.data() + n * width_, width_}; }
    InteriorView row_view(std::size_t n) const { return InteriorView(row(n), grid_.h()); }

    /// Value at node i in [0, M] of time level n, boundaries included.
    double node(std::size_t n, std::size_t i) const noexcept {
        if (i == 0) return left_[n];
        if (i == width_ + 1) return right_[n];
        return rows_[n * width_ + i - 1];
    }

    GridField& operator+=(const GridField& o) {
        check_same(o);
        for (std::size_t j = 0; j < left_.size(); ++j) left_[j] += o.left_[j];
        for (std::size_t j = 0; j < right_.size(); ++j) right_[j] += o.right_[j];
        for (std::size_t j = 0; j < rows_.size(); ++j) rows_[j] += o.rows_[j];
        return *this;
    }

    GridField& operator-=(const GridField& o) {
        check_same(o);
        for (std::size_t j = 0; j < left_.size(); ++j) left_[j] -= o.left_[j];
        for (std::size_t j = 0; j < right_.size(); ++j) right_[j] -= o.right_[j];
        for (std::size_t j = 0; j < rows_.size(); ++j) rows_[j] -= o.rows_[j];
        return *this;
    }

    GridField& operator*=(double c) noexcept {
        for (double& v : left_) v *= c;
        for (double& v : right_) v *= c;
        for (double& v : rows_) v *= c;
        return *this;
    }

    friend GridField operator+(GridField a, const GridField& b) { return a += b; }
    friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
    friend GridField operator*(double c, GridField a) { return a *= c; }

    friend bool operator==(const GridField& a, const GridField& b) {
        return a.grid_ == b.grid_ && a.left_ == b.left_ && a.right_ == b.right_ && a.rows_ == b.rows_;
    }

private:
    void check_same(const GridField& o) const {
        if (!(grid_ == o.grid_)) throw DimensionMismatch("grid fields live on different grids");
    }

    GridSpec grid_;
    std::size_t width_;
    std::vector<double> left_;
    std::vector<double> right_;
    std::vector<double> rows_;
};

struct SolutionSpaceTag {};
struct ResidualSpaceTag {};

/// Element (V_0, V^0, ..., V^N, V_M) of the discrete solution space.
using XhElement = GridField<SolutionSpaceTag>;
/// Element (P_0, P^0, ..., P^N, P_M) of the residual space.
using ResidualBundle = GridField<ResidualSpaceTag>;
/// Full nodal history U_i^n produced by the explicit scheme.
using SolutionHistory = XhElement;

}  // namespace mvd

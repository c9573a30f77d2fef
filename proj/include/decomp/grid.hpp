#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace decomp {

/// Discretization of |Du| per cell: Euclidean magnitude or component-wise l1.
enum class TvMode { isotropic, anisotropic };

std::string to_string(TvMode mode);
TvMode tv_mode_from_string(const std::string& s);

/// Scalar field sampled at cell centers of a uniform grid over [0,1]^d, d in {1,2}.
/// Spacing is 1/n per axis. An optional mask restricts the active domain:
/// inactive cells hold the value 0 and are excluded from norms, means and
/// gradients (edges touching an inactive cell carry no variation).
class GridField {
public:
    GridField() = default;
    GridField(int nx, std::vector<double> values);            // 1D
    GridField(int nx, int ny, std::vector<double> values);    // 2D, row-major rows of nx

    static GridField zeros(int nx);
    static GridField zeros(int nx, int ny);
    static GridField constant(int nx, double c);
    static GridField constant(int nx, int ny, double c);

    int dims() const { return dims_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return values_.size(); }

    double hx() const { return 1.0 / nx_; }
    double hy() const { return 1.0 / ny_; }
    /// h^d, the measure of one cell.
    double cell_measure() const { return dims_ == 1 ? hx() : hx() * hy(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    double at(int ix, int iy = 0) const { return values_[idx(ix, iy)]; }
    double& at(int ix, int iy = 0) { return values_[idx(ix, iy)]; }
    std::size_t idx(int ix, int iy = 0) const {
        return static_cast<std::size_t>(iy) * nx_ + ix;
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Mask: one byte per cell, nonzero = active. Empty mask = all cells active.
    /// Values on inactive cells are forced to 0.
    void set_mask(std::vector<std::uint8_t> mask);
    bool masked() const { return !mask_.empty(); }
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    bool active(std::size_t i) const { return mask_.empty() || mask_[i] != 0; }
    std::size_t active_count() const;

    bool same_grid(const GridField& other) const;
    void check_finite(const char* what = "GridField") const;

private:
    int dims_ = 0;
    int nx_ = 0;
    int ny_ = 1;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

/// Per-cell vector field living on forward-difference edges: component a at
/// cell i pairs cells i and i+e_a. Components on outflow boundary edges (last
/// cell along the axis, or edges leaving the active mask) are identically 0,
/// which encodes the zero normal trace [z,nu] = 0 structurally.
class DualField {
public:
    DualField() = default;
    explicit DualField(const GridField& like);

    int dims() const { return dims_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return x_.size(); }

    const std::vector<double>& x() const { return x_; }
    std::vector<double>& x() { return x_; }
    const std::vector<double>& y() const { return y_; }
    std::vector<double>& y() { return y_; }

    const std::vector<std::uint8_t>& mask() const { return mask_; }
    bool masked() const { return !mask_.empty(); }

    /// sup over cells of the per-cell magnitude: Euclidean for isotropic,
    /// max component magnitude for anisotropic.
    double sup_norm(TvMode mode) const;

    /// True when every boundary-edge component (grid or mask boundary) is 0.
    bool boundary_components_zero() const;
    /// Force boundary-edge components to 0.
    void zero_boundary_components();

private:
    int dims_ = 0;
    int nx_ = 0;
    int ny_ = 1;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<std::uint8_t> mask_;
};

}  // namespace decomp

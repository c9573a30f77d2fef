#include "decomp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decomp/kernels.hpp"

namespace decomp {

std::string to_string(TvMode mode) {
    return mode == TvMode::isotropic ? "isotropic" : "anisotropic";
}

TvMode tv_mode_from_string(const std::string& s) {
    if (s == "iso" || s == "isotropic") return TvMode::isotropic;
    if (s == "aniso" || s == "anisotropic") return TvMode::anisotropic;
    throw std::invalid_argument("unknown TV mode: " + s);
}

GridField::GridField(int nx, std::vector<double> values)
    : dims_(1), nx_(nx), ny_(1), values_(std::move(values)) {
    if (nx_ < 1) throw std::invalid_argument("GridField: nx must be >= 1");
    if (values_.size() != static_cast<std::size_t>(nx_))
        throw std::invalid_argument("GridField: value count does not match shape");
    check_finite();
}

GridField::GridField(int nx, int ny, std::vector<double> values)
    : dims_(2), nx_(nx), ny_(ny), values_(std::move(values)) {
    if (nx_ < 1 || ny_ < 1) throw std::invalid_argument("GridField: shape must be >= 1");
    if (values_.size() != static_cast<std::size_t>(nx_) * ny_)
        throw std::invalid_argument("GridField: value count does not match shape");
    check_finite();
}

GridField GridField::zeros(int nx) { return GridField(nx, std::vector<double>(nx, 0.0)); }

GridField GridField::zeros(int nx, int ny) {
    return GridField(nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, 0.0));
}

GridField GridField::constant(int nx, double c) {
    return GridField(nx, std::vector<double>(nx, c));
}

GridField GridField::constant(int nx, int ny, double c) {
    return GridField(nx, ny, std::vector<double>(static_cast<std::size_t>(nx) * ny, c));
}

void GridField::set_mask(std::vector<std::uint8_t> mask) {
    if (mask.empty()) {
        mask_.clear();
        return;
    }
    if (mask.size() != values_.size())
        throw std::invalid_argument("GridField: mask size does not match shape");
    mask_ = std::move(mask);
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (mask_[i] == 0) values_[i] = 0.0;
}

std::size_t GridField::active_count() const {
    if (mask_.empty()) return values_.size();
    std::size_t n = 0;
    for (auto m : mask_) n += (m != 0);
    return n;
}

bool GridField::same_grid(const GridField& other) const {
    return dims_ == other.dims_ && nx_ == other.nx_ && ny_ == other.ny_ &&
           mask_ == other.mask_;
}

void GridField::check_finite(const char* what) const {
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": non-finite value");
}

DualField::DualField(const GridField& like)
    : dims_(like.dims()),
      nx_(like.nx()),
      ny_(like.dims() == 2 ? like.ny() : 1),
      x_(like.size(), 0.0),
      mask_(like.mask()) {
    if (dims_ == 2) y_.assign(like.size(), 0.0);
}

double DualField::sup_norm(TvMode mode) const {
    double mx = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double ax = x_[i];
        const double ay = dims_ == 2 ? y_[i] : 0.0;
        const double m = mode == TvMode::isotropic ? std::sqrt(ax * ax + ay * ay)
                                                   : std::max(std::abs(ax), std::abs(ay));
        mx = std::max(mx, m);
    }
    return mx;
}

bool DualField::boundary_components_zero() const {
    kernels::GridSpec g;
    g.nx = nx_;
    g.ny = ny_;
    g.mask = mask_.empty() ? nullptr : mask_.data();
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * nx_ + ix;
            const bool ex =
                ix < nx_ - 1 && (g.mask == nullptr || (g.mask[i] && g.mask[i + 1]));
            const bool ey = dims_ == 2 && iy < ny_ - 1 &&
                            (g.mask == nullptr || (g.mask[i] && g.mask[i + nx_]));
            if (!ex && x_[i] != 0.0) return false;
            if (dims_ == 2 && !ey && y_[i] != 0.0) return false;
        }
    }
    return true;
}

void DualField::zero_boundary_components() {
    for (int iy = 0; iy < ny_; ++iy) {
        for (int ix = 0; ix < nx_; ++ix) {
            const std::size_t i = static_cast<std::size_t>(iy) * nx_ + ix;
            const bool mx = !mask_.empty();
            const bool ex =
                ix < nx_ - 1 && (!mx || (mask_[i] && mask_[i + 1]));
            const bool ey = dims_ == 2 && iy < ny_ - 1 &&
                            (!mx || (mask_[i] && mask_[i + nx_]));
            if (!ex) x_[i] = 0.0;
            if (dims_ == 2 && !ey) y_[i] = 0.0;
        }
    }
}

}  // namespace decomp

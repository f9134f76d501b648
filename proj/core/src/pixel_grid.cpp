#include "tvspline/pixel_grid.hpp"

#include <cmath>

namespace tvspline {

PixelGrid PixelGrid::unit_spacing(std::vector<int> counts) {
    PixelGrid g;
    g.lower.assign(counts.size(), 0.0);
    g.upper.reserve(counts.size());
    for (int mu : counts) g.upper.push_back(static_cast<double>(mu));
    g.counts = std::move(counts);
    g.validate();
    return g;
}

int PixelGrid::pixel_of(int axis, double x) const {
    const double p = pixel_size(axis);
    int beta = static_cast<int>(std::floor((x - lower[axis]) / p));
    if (beta < 0) beta = 0;
    if (beta >= counts[axis]) beta = counts[axis] - 1;
    return beta;
}

std::size_t PixelGrid::pixel_count() const {
    std::size_t total = 1;
    for (int mu : counts) total *= static_cast<std::size_t>(mu);
    return total;
}

void PixelGrid::validate() const {
    if (counts.empty()) throw std::invalid_argument("PixelGrid: no axes");
    if (lower.size() != counts.size() || upper.size() != counts.size())
        throw std::invalid_argument("PixelGrid: axis count mismatch");
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] < 1) throw std::invalid_argument("PixelGrid: need at least one pixel per axis");
        if (!(lower[j] < upper[j])) throw std::invalid_argument("PixelGrid: empty interval");
    }
    if (!(intensity_min < intensity_max))
        throw std::invalid_argument("PixelGrid: empty intensity range");
}

std::size_t InpaintingMask::unknown_count() const {
    std::size_t n = 0;
    for (char u : unknown) n += (u != 0);
    return n;
}

bool InpaintingMask::touches_border() const {
    const int d = static_cast<int>(dims.size());
    std::vector<int> beta(d, 0);
    for (std::size_t flat = 0; flat < unknown.size(); ++flat) {
        if (unknown[flat]) {
            for (int j = 0; j < d; ++j) {
                if (beta[j] == 0 || beta[j] == dims[j] - 1) return true;
            }
        }
        for (int j = d - 1; j >= 0; --j) {  // odometer, last axis fastest
            if (++beta[j] < dims[j]) break;
            beta[j] = 0;
        }
    }
    return false;
}

void validate_mask(const InpaintingMask& mask) {
    std::size_t total = 1;
    for (int mu : mask.dims) total *= static_cast<std::size_t>(mu);
    if (mask.unknown.size() != total)
        throw std::invalid_argument("mask: flag count does not match dimensions");
    const std::size_t n = mask.unknown_count();
    if (n == 0) throw std::invalid_argument("mask: no unknown pixels");
    if (n == total) throw std::invalid_argument("mask: all pixels unknown");
    if (mask.touches_border())
        throw std::invalid_argument("mask: unknown pixels touch the image border");
}

}  // namespace tvspline

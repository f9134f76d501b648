#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tvspline {

/// Discrete image geometry: mu_j pixels per axis over the rectangle
/// R = (x) [a_j, b_j]. Pixel beta (0-based) covers the half-open rectangle
/// [a_j + beta_j*p_j, a_j + (beta_j+1)*p_j) with p_j = (b_j - a_j)/mu_j,
/// and carries the image value at its center.
struct PixelGrid {
    std::vector<int> counts;           // mu_j
    std::vector<double> lower, upper;  // a_j, b_j
    double intensity_min = 0.0;
    double intensity_max = 255.0;

    /// Grid in pixel units: R = (x) [0, mu_j], p_j = 1.
    static PixelGrid unit_spacing(std::vector<int> counts);

    int dim() const { return static_cast<int>(counts.size()); }

    double pixel_size(int axis) const {
        return (upper[axis] - lower[axis]) / counts[axis];
    }

    /// Center coordinate of pixel index beta (0-based) along an axis.
    double center(int axis, int beta) const {
        return lower[axis] + (beta + 0.5) * pixel_size(axis);
    }

    /// Pixel index (0-based) whose half-open rectangle contains coordinate x
    /// along an axis; x == b_j belongs to the last pixel.
    int pixel_of(int axis, double x) const;

    std::size_t pixel_count() const;

    void validate() const;
};

/// Flags the pixels whose values are unknown. Flat indices are lexicographic
/// with the last axis fastest (row-major for 2-D images).
///
/// The struct itself may represent an empty mask (nothing unknown); the model
/// requirements -- nonempty, strict subset, no unknown pixel on the outer
/// ring -- are enforced by validate_mask() at load and pipeline entry.
struct InpaintingMask {
    std::vector<int> dims;      // pixel counts per axis
    std::vector<char> unknown;  // one flag per pixel

    std::size_t unknown_count() const;
    bool empty() const { return unknown_count() == 0; }

    /// True if some unknown pixel lies on the outer pixel ring of any axis.
    bool touches_border() const;
};

/// Rejects masks violating the model requirements: the unknown set must be
/// nonempty, a strict subset of all pixels, and keep off the outer ring.
/// Throws std::invalid_argument with a reason otherwise.
void validate_mask(const InpaintingMask& mask);

}  // namespace tvspline

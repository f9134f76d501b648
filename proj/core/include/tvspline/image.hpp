#pragma once

#include <cstddef>
#include <vector>

namespace tvspline {

/// Grayscale raster: row-major values, axis 0 = rows, axis 1 = columns.
/// Values are real-valued in memory; quantization happens only at file
/// boundaries.
struct PixelImage {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
    std::size_t pixel_count() const { return values.size(); }

    static PixelImage constant(int rows, int cols, double value) {
        PixelImage img;
        img.rows = rows;
        img.cols = cols;
        img.values.assign(static_cast<std::size_t>(rows) * cols, value);
        return img;
    }
};

}  // namespace tvspline

#include "tvspline/baseline_tv.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tvspline {

std::vector<double> pixel_gradient(const PixelImage& image) {
    const int rows = image.rows, cols = image.cols;
    std::vector<double> g(2 * image.pixel_count(), 0.0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            if (r + 1 < rows) g[2 * i] = image.values[i + cols] - image.values[i];
            if (c + 1 < cols) g[2 * i + 1] = image.values[i + 1] - image.values[i];
        }
    }
    return g;
}

std::vector<double> pixel_divergence(std::span<const double> p, int rows, int cols) {
    std::vector<double> div(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            double v = 0.0;
            if (r + 1 < rows) v += p[2 * i];
            if (r > 0) v -= p[2 * (i - cols)];
            if (c + 1 < cols) v += p[2 * i + 1];
            if (c > 0) v -= p[2 * (i - 1) + 1];
            div[i] = v;
        }
    }
    return div;
}

double pixel_tv(const PixelImage& image) {
    const auto g = pixel_gradient(image);
    double total = 0.0;
    for (std::size_t i = 0; i < image.pixel_count(); ++i)
        total += std::hypot(g[2 * i], g[2 * i + 1]);
    return total;
}

PixelTvResult solve_pixel_tv(const PixelImage& image, const InpaintingMask& mask,
                             const SolverConfig& config, PixelStart start, std::uint64_t seed) {
    const int rows = image.rows, cols = image.cols;
    if (mask.dims != std::vector<int>{rows, cols})
        throw std::invalid_argument("mask dimensions do not match the image");
    if (mask.unknown_count() == 0)
        throw std::invalid_argument("mask flags no unknown pixels");
    if (mask.unknown_count() == image.pixel_count())
        throw std::invalid_argument("mask flags every pixel as unknown");

    const double L = config.operator_norm > 0.0 ? config.operator_norm : std::sqrt(8.0);
    const double tau = config.tau > 0.0 ? config.tau : 0.95 / L;
    const double sigma = config.sigma > 0.0 ? config.sigma : 0.95 / L;
    if (sigma * tau * L * L >= 1.0)
        throw std::invalid_argument("step sizes violate sigma * tau * |K|^2 < 1");

    PixelTvResult result;
    result.image = image;
    auto& u = result.image.values;

    if (start == PixelStart::random) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(0.0, 255.0);
        for (std::size_t i = 0; i < u.size(); ++i)
            if (mask.unknown[i]) u[i] = dist(rng);
    } else {
        double sum = 0.0;
        std::size_t known = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (!mask.unknown[i]) {
                sum += u[i];
                ++known;
            }
        }
        const double mean = sum / static_cast<double>(known);
        for (std::size_t i = 0; i < u.size(); ++i)
            if (mask.unknown[i]) u[i] = mean;
    }

    auto& diag = result.diagnostics;
    diag.operator_norm = L;

    std::vector<double> y(2 * u.size(), 0.0);
    std::vector<double> ubar = u;
    std::vector<double> best_u = u;
    double best_objective = pixel_tv(result.image);

    PixelImage scratch = result.image;
    auto objective_of = [&](const std::vector<double>& v) {
        scratch.values = v;
        return pixel_tv(scratch);
    };

    for (int k = 0; k < config.max_iterations; ++k) {
        scratch.values = ubar;
        const auto g = pixel_gradient(scratch);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * g[i];
        prox_f_star(y, 2);
        for (std::size_t i = 0; i + 2 <= y.size(); i += 2) {
            const double nrm = std::hypot(y[i], y[i + 1]);
            diag.max_dual_block_norm = std::max(diag.max_dual_block_norm, nrm);
        }

        const auto div = pixel_divergence(y, rows, cols);
        double diff = 0.0, base = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double next = mask.unknown[i] ? u[i] + tau * div[i] : image.values[i];
            const double dlt = next - u[i];
            diff += dlt * dlt;
            base += u[i] * u[i];
            ubar[i] = next + config.theta * (next - u[i]);
            u[i] = next;
        }
        const double residual = std::sqrt(diff) / std::max(std::sqrt(base), 1e-30);

        const double obj = objective_of(u);
        diag.objective_history.push_back(obj);
        diag.residual_history.push_back(residual);
        diag.iterations = k + 1;
        diag.final_residual = residual;
        if (obj < best_objective) {
            best_objective = obj;
            best_u = u;
        }
        if (residual < config.tolerance) {
            diag.converged = true;
            break;
        }
    }

    if (!diag.converged) u = best_u;
    diag.final_objective = objective_of(u);
    return result;
}

}  // namespace tvspline

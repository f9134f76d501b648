#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tvspline/baseline_tv.hpp"
#include "tvspline/image.hpp"
#include "tvspline/imaging.hpp"
#include "tvspline/optimizer.hpp"

namespace tvspline {

enum class StartStrategy { random, mean };

const char* to_string(StartStrategy start);
StartStrategy start_strategy_from_string(const std::string& name);

struct InpaintSettings {
    int order = 2;               // spline order on both axes
    int quadrature_points = 0;   // per-axis points per cell; 0 uses the order
    InterpolationMode mode = InterpolationMode::exact;
    /// Relaxed data weight, balancing the mean squared data residual of the
    /// [0,1]-normalized intensities against TV of the unit-scaled image.
    /// Behavior of a given value is image-size independent and calibrated so
    /// the useful range spans roughly 1 (flattens the image) to 250 (keeps
    /// the noise), with typical sweet spots near 50.
    double epsilon = 0.0;
    StartStrategy start = StartStrategy::mean;
    std::uint64_t seed = 0;
    SolverConfig solver;
};

struct InpaintOutcome {
    PixelImage image;
    std::vector<double> coefficients;
    SolveDiagnostics diagnostics;
};

/// Reconstructs the masked pixels in the spline space: exact mode enforces
/// interpolation of the known pixels and integrates TV over the free region;
/// relaxed mode penalizes the data misfit with weight epsilon and integrates
/// TV over the whole domain. Relaxed solves run on intensities normalized to
/// [0, 1]; reported objectives are rescaled back.
InpaintOutcome inpaint_image(const PixelImage& image, const InpaintingMask& mask,
                             const InpaintSettings& settings);

struct DenoiseOutcome {
    PixelImage image;
    std::vector<double> coefficients;
    InpaintingMask implied_mask;
    SolveDiagnostics diagnostics;
};

/// Denoising as relaxed inpainting: pixels at the intensity extremes form
/// the unknown set (they carry no data term), every other pixel enters the
/// relaxed data term. settings.mode is ignored; epsilon must be positive.
DenoiseOutcome denoise_image(const PixelImage& noisy, const InpaintSettings& settings);

struct SweepPoint {
    double epsilon = 0.0;
    double snr_db = 0.0;
    DenoiseOutcome outcome;
};

/// Runs denoise_image once per epsilon and scores each reconstruction
/// against the reference.
std::vector<SweepPoint> epsilon_sweep(const PixelImage& noisy, const PixelImage& reference,
                                      std::span<const double> epsilons,
                                      const InpaintSettings& settings);

struct ImageEntry {
    std::string id;
    PixelImage image;
};

/// One benchmark campaign: every trial re-draws each mask with seed
/// seed_base + trial, corrupts each image, and runs every method on it.
struct ExperimentConfig {
    std::vector<ImageEntry> images;
    std::vector<MaskSpec> masks;
    std::vector<int> orders;                              // spline methods
    std::vector<StartStrategy> starts = {StartStrategy::mean};
    bool include_baseline = false;
    std::vector<double> epsilons;  // extra relaxed-mode spline runs
    SolverConfig solver;
    int trials = 1;
    std::uint64_t seed_base = 0;
    int jobs = 1;

    void validate() const;
};

struct ResultRow {
    std::string image;
    std::string method;     // spline-order-k or baseline-tv
    std::string mask_kind;  // random | scratches | bitmap
    std::string mask_param;
    std::string start;
    double epsilon = 0.0;  // 0 for exact-mode methods
    int iters = 0;
    double snr_db = 0.0;
    double wall_ms = 0.0;
    bool failed = false;    // row kept, error recorded, run continued
    std::string error;
};

/// Executes the campaign, up to config.jobs trials concurrently. Rows come
/// back in deterministic order (trial, image, mask, method, start) no matter
/// how execution interleaves; a failing run yields a failed row instead of
/// aborting the campaign.
std::vector<ResultRow> run_benchmark(const ExperimentConfig& config);

inline constexpr const char* kResultCsvHeader =
    "image,method,mask_kind,mask_param,start,epsilon,iters,snr_db,wall_ms";

void write_csv(std::span<const ResultRow> rows, std::ostream& out, bool include_header);

struct MethodSummary {
    std::string method;
    std::string start;
    double mean_snr_db = 0.0;  // over finite, non-failed rows
    int rows = 0;
    int failures = 0;
};

/// Per-(method, start) mean SNR in row-appearance order.
std::vector<MethodSummary> summarize(std::span<const ResultRow> rows);

}  // namespace tvspline

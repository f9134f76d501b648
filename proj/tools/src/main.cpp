// Command-line front end: inpainting, denoising, benchmark campaigns, and
// mask generation on top of the tvspline core library.
//
// Exit codes: 0 success, 2 invalid arguments or validation failure, 3 I/O
// failure, 4 solver finished without reaching the convergence tolerance
// (outputs and diagnostics are still written).
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tvspline/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNonConvergence = 4;

using nlohmann::json;
using namespace tvspline;

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

json snr_json(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    return value;
}

json diagnostics_json(const SolveDiagnostics& diag) {
    json j;
    j["iterations"] = diag.iterations;
    j["converged"] = diag.converged;
    j["final_residual"] = diag.final_residual;
    j["final_objective"] = diag.final_objective;
    j["operator_norm"] = diag.operator_norm;
    return j;
}

void write_sidecar(const std::string& image_path, const json& body) {
    const std::string path = image_path + ".json";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << body.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Options shared by the solver-backed subcommands.
struct SolverFlags {
    int order = 0;  // 0: resolved from the profile
    int iters = 100;
    double tol = 1e-6;
    std::string start = "mean";
    std::uint64_t seed = 0;
    std::string profile = "cartoon";
    std::string out_dir = ".";
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
    cmd->add_option("--order", flags.order, "Spline order on both axes (degree + 1)")
        ->check(CLI::Range(2, 32));
    cmd->add_option("--iters", flags.iters, "Maximum solver iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", flags.tol, "Relative change threshold for convergence")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--start", flags.start, "Starting guess for unknown values")
        ->check(CLI::IsMember({"mean", "random"}))
        ->capture_default_str();
    cmd->add_option("--seed", flags.seed, "Seed for randomized choices")->capture_default_str();
    cmd->add_option("--profile", flags.profile,
                    "Image profile choosing the default order: cartoon = 2, natural = 3")
        ->check(CLI::IsMember({"cartoon", "natural"}))
        ->capture_default_str();
    cmd->add_option("--out", flags.out_dir, "Output directory")
        ->envname("TVSPLINE_OUT")
        ->capture_default_str();
}

InpaintSettings to_settings(const SolverFlags& flags) {
    InpaintSettings settings;
    settings.order = flags.order > 0 ? flags.order : (flags.profile == "natural" ? 3 : 2);
    settings.solver.max_iterations = flags.iters;
    settings.solver.tolerance = flags.tol;
    settings.start = start_strategy_from_string(flags.start);
    settings.seed = flags.seed;
    return settings;
}

int run_inpaint(const SolverFlags& flags, const std::string& image_path,
                const std::string& mask_path, const std::string& output_name,
                const std::string& reference_path, double epsilon, bool relaxed) {
    const PixelImage image = read_image(image_path);
    const InpaintingMask mask = read_mask(mask_path);

    InpaintSettings settings = to_settings(flags);
    if (relaxed) {
        settings.mode = InterpolationMode::relaxed;
        settings.epsilon = epsilon;
    }

    const auto outcome = inpaint_image(image, mask, settings);

    ensure_out_dir(flags.out_dir);
    const std::string out_path = join_path(
        flags.out_dir, output_name.empty() ? stem_of(image_path) + "_inpainted.png"
                                           : output_name);
    write_image(out_path, outcome.image);

    json sidecar;
    sidecar["command"] = "inpaint";
    sidecar["image"] = image_path;
    sidecar["mask"] = mask_path;
    sidecar["order"] = settings.order;
    sidecar["mode"] = relaxed ? "relaxed" : "exact";
    if (relaxed) sidecar["epsilon"] = epsilon;
    sidecar["start"] = flags.start;
    sidecar["seed"] = flags.seed;
    sidecar["output"] = out_path;
    sidecar.update(diagnostics_json(outcome.diagnostics));
    if (!reference_path.empty()) {
        const PixelImage reference = read_image(reference_path);
        sidecar["snr_db"] = snr_json(snr_db(reference, outcome.image));
    }
    write_sidecar(out_path, sidecar);

    std::cout << (outcome.diagnostics.converged ? "converged" : "stopped") << " after "
              << outcome.diagnostics.iterations << " iterations, objective "
              << outcome.diagnostics.final_objective << ", wrote " << out_path << "\n";
    return outcome.diagnostics.converged ? kExitOk : kExitNonConvergence;
}

int run_denoise(const SolverFlags& flags, const std::string& image_path,
                const std::string& output_name, const std::string& reference_path,
                double epsilon, const std::vector<double>& sweep) {
    const PixelImage image = read_image(image_path);
    InpaintSettings settings = to_settings(flags);

    ensure_out_dir(flags.out_dir);
    const std::string base = output_name.empty() ? stem_of(image_path) + "_denoised.png"
                                                 : output_name;

    if (!sweep.empty()) {
        if (reference_path.empty())
            throw std::invalid_argument("--sweep needs --reference to score the candidates");
        const PixelImage reference = read_image(reference_path);
        const auto points = epsilon_sweep(image, reference, sweep, settings);

        const std::string csv_path = join_path(flags.out_dir, stem_of(base) + "_sweep.csv");
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot open for writing: " + csv_path);
        csv << "epsilon,snr_db\n";
        bool all_converged = true;
        const SweepPoint* best = nullptr;
        for (const auto& point : points) {
            csv << point.epsilon << "," << point.snr_db << "\n";
            all_converged = all_converged && point.outcome.diagnostics.converged;
            if (!best || point.snr_db > best->snr_db) best = &point;
        }
        if (!csv) throw std::runtime_error("write failed: " + csv_path);

        const std::string out_path = join_path(flags.out_dir, base);
        write_image(out_path, best->outcome.image);
        json sidecar;
        sidecar["command"] = "denoise";
        sidecar["image"] = image_path;
        sidecar["order"] = settings.order;
        sidecar["sweep_csv"] = csv_path;
        sidecar["best_epsilon"] = best->epsilon;
        sidecar["snr_db"] = snr_json(best->snr_db);
        sidecar["output"] = out_path;
        sidecar.update(diagnostics_json(best->outcome.diagnostics));
        write_sidecar(out_path, sidecar);

        std::cout << "best epsilon " << best->epsilon << " at " << best->snr_db
                  << " dB, wrote " << out_path << " and " << csv_path << "\n";
        return all_converged ? kExitOk : kExitNonConvergence;
    }

    settings.epsilon = epsilon;
    const auto outcome = denoise_image(image, settings);
    const std::string out_path = join_path(flags.out_dir, base);
    write_image(out_path, outcome.image);

    json sidecar;
    sidecar["command"] = "denoise";
    sidecar["image"] = image_path;
    sidecar["order"] = settings.order;
    sidecar["epsilon"] = epsilon;
    sidecar["start"] = flags.start;
    sidecar["seed"] = flags.seed;
    sidecar["unknown_pixels"] = outcome.implied_mask.unknown_count();
    sidecar["output"] = out_path;
    sidecar.update(diagnostics_json(outcome.diagnostics));
    if (!reference_path.empty()) {
        const PixelImage reference = read_image(reference_path);
        sidecar["snr_db"] = snr_json(snr_db(reference, outcome.image));
    }
    write_sidecar(out_path, sidecar);

    std::cout << (outcome.diagnostics.converged ? "converged" : "stopped") << " after "
              << outcome.diagnostics.iterations << " iterations, wrote " << out_path << "\n";
    return outcome.diagnostics.converged ? kExitOk : kExitNonConvergence;
}

int run_mask(const std::string& out_dir, const std::string& output_name, int rows, int cols,
             double random_fraction, int scratches, int width, const std::string& bitmap,
             std::uint64_t seed) {
    MaskSpec spec;
    spec.seed = seed;
    const int kinds = (random_fraction > 0 ? 1 : 0) + (scratches > 0 ? 1 : 0) +
                      (bitmap.empty() ? 0 : 1);
    if (kinds != 1)
        throw std::invalid_argument(
            "choose exactly one of --random, --scratches, or --bitmap");
    if (random_fraction > 0) {
        spec.kind = MaskKind::random_fraction;
        spec.fraction = random_fraction;
    } else if (scratches > 0) {
        spec.kind = MaskKind::scratches;
        spec.scratch_count = scratches;
        spec.scratch_width = width;
    } else {
        spec.kind = MaskKind::text_bitmap;
        spec.bitmap_path = bitmap;
    }

    const auto mask = make_mask(spec, {rows, cols});
    ensure_out_dir(out_dir);
    const std::string out_path = join_path(out_dir, output_name);
    write_mask(out_path, mask);
    std::cout << "wrote " << out_path << " with " << mask.unknown_count()
              << " unknown pixels\n";
    return kExitOk;
}

struct BenchmarkFlags {
    std::vector<std::string> images;
    std::vector<double> mask_random;
    int mask_scratches = 0;
    int scratch_width = 4;
    std::vector<std::string> mask_bitmaps;
    std::vector<int> orders{2};
    bool baseline = false;
    std::vector<std::string> starts{"mean"};
    std::vector<double> epsilons;
    int trials = 1;
    std::uint64_t seed_base = 0;
    int jobs = 1;
    int iters = 100;
    double tol = 1e-6;
    std::string out_dir = ".";
    std::string csv_name = "results.csv";
    bool append = false;
};

int run_benchmark_cmd(const BenchmarkFlags& flags) {
    ExperimentConfig config;
    for (const auto& path : flags.images)
        config.images.push_back({stem_of(path), read_image(path)});

    for (double fraction : flags.mask_random) {
        MaskSpec spec;
        spec.kind = MaskKind::random_fraction;
        spec.fraction = fraction;
        config.masks.push_back(spec);
    }
    if (flags.mask_scratches > 0) {
        MaskSpec spec;
        spec.kind = MaskKind::scratches;
        spec.scratch_count = flags.mask_scratches;
        spec.scratch_width = flags.scratch_width;
        config.masks.push_back(spec);
    }
    for (const auto& path : flags.mask_bitmaps) {
        MaskSpec spec;
        spec.kind = MaskKind::text_bitmap;
        spec.bitmap_path = path;
        config.masks.push_back(spec);
    }

    config.orders = flags.orders;
    config.include_baseline = flags.baseline;
    config.starts.clear();
    for (const auto& name : flags.starts)
        config.starts.push_back(start_strategy_from_string(name));
    config.epsilons = flags.epsilons;
    config.trials = flags.trials;
    config.seed_base = flags.seed_base;
    config.jobs = flags.jobs;
    config.solver.max_iterations = flags.iters;
    config.solver.tolerance = flags.tol;

    const auto rows = run_benchmark(config);

    ensure_out_dir(flags.out_dir);
    const std::string csv_path = join_path(flags.out_dir, flags.csv_name);
    const bool exists = std::filesystem::exists(csv_path) &&
                        std::filesystem::file_size(csv_path) > 0;
    std::ofstream csv(csv_path, flags.append ? std::ios::app : std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open for writing: " + csv_path);
    write_csv(rows, csv, !(flags.append && exists));
    if (!csv) throw std::runtime_error("write failed: " + csv_path);

    int failures = 0;
    for (const auto& row : rows)
        if (row.failed) ++failures;

    std::cout << rows.size() << " rows -> " << csv_path << "\n";
    for (const auto& summary : summarize(rows)) {
        std::cout << summary.method << " (" << summary.start << " start): mean "
                  << summary.mean_snr_db << " dB over " << summary.rows << " runs";
        if (summary.failures > 0) std::cout << ", " << summary.failures << " failed";
        std::cout << "\n";
    }
    if (failures > 0) std::cerr << failures << " runs failed; see the CSV rows\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Total-variation image reconstruction in a tensor-product spline space"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    // inpaint
    auto* inpaint = app.add_subcommand("inpaint", "Reconstruct masked pixels of an image");
    SolverFlags inpaint_flags;
    std::string inpaint_image_path, inpaint_mask_path, inpaint_output, inpaint_reference;
    double inpaint_epsilon = 0.0;
    inpaint->add_option("image", inpaint_image_path, "Input image (PGM or PNG)")->required();
    inpaint->add_option("mask", inpaint_mask_path, "Mask file (image or run-length text)")
        ->required();
    add_solver_flags(inpaint, inpaint_flags);
    inpaint->add_option("--output", inpaint_output, "Output file name inside --out");
    inpaint->add_option("--reference", inpaint_reference,
                        "Ground-truth image for SNR reporting");
    auto* eps_opt = inpaint->add_option(
        "--epsilon", inpaint_epsilon,
        "Use the quadratic data penalty with this weight instead of exact interpolation");

    // denoise
    auto* denoise = app.add_subcommand("denoise",
                                       "Remove noise, treating extreme-valued pixels as unknown");
    SolverFlags denoise_flags;
    std::string denoise_image_path, denoise_output, denoise_reference;
    double denoise_epsilon = 50.0;
    std::vector<double> denoise_sweep;
    denoise->add_option("image", denoise_image_path, "Input image (PGM or PNG)")->required();
    add_solver_flags(denoise, denoise_flags);
    denoise->add_option("--epsilon", denoise_epsilon, "Data penalty weight")
        ->capture_default_str();
    denoise->add_option("--sweep", denoise_sweep,
                        "Comma-separated epsilon list; scores each against --reference")
        ->delimiter(',');
    denoise->add_option("--output", denoise_output, "Output file name inside --out");
    denoise->add_option("--reference", denoise_reference,
                        "Ground-truth image for SNR reporting");

    // benchmark
    auto* benchmark = app.add_subcommand("benchmark", "Run an inpainting experiment campaign");
    BenchmarkFlags bench;
    benchmark->add_option("--image", bench.images, "Input image (repeatable)")->required();
    benchmark->add_option("--mask-random", bench.mask_random,
                          "Random mask with this unknown fraction (repeatable)");
    benchmark->add_option("--mask-scratches", bench.mask_scratches,
                          "Scratch mask with this many segments");
    benchmark->add_option("--width", bench.scratch_width, "Scratch width in pixels")
        ->capture_default_str();
    benchmark->add_option("--mask-bitmap", bench.mask_bitmaps, "Mask file (repeatable)");
    benchmark->add_option("--orders", bench.orders, "Spline orders to run")
        ->delimiter(',')
        ->capture_default_str();
    benchmark->add_flag("--baseline", bench.baseline, "Also run the pixel-domain TV solver");
    benchmark->add_option("--starts", bench.starts, "Start strategies to run")
        ->delimiter(',')
        ->capture_default_str();
    benchmark->add_option("--epsilons", bench.epsilons,
                          "Additional relaxed-mode runs with these weights")
        ->delimiter(',');
    benchmark->add_option("--trials", bench.trials, "Trials per combination")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    benchmark->add_option("--seed-base", bench.seed_base, "Trial i uses seed base + i")
        ->capture_default_str();
    benchmark->add_option("--jobs", bench.jobs, "Concurrent trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    benchmark->add_option("--iters", bench.iters, "Maximum solver iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    benchmark->add_option("--tol", bench.tol, "Convergence tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    benchmark->add_option("--out", bench.out_dir, "Output directory")
        ->envname("TVSPLINE_OUT")
        ->capture_default_str();
    benchmark->add_option("--csv", bench.csv_name, "CSV file name inside --out")
        ->capture_default_str();
    benchmark->add_flag("--append", bench.append,
                        "Append to an existing CSV instead of overwriting");

    // mask
    auto* mask_cmd = app.add_subcommand("mask", "Generate an inpainting mask file");
    std::string mask_out_dir = ".", mask_output = "mask.png", mask_bitmap;
    int mask_rows = 0, mask_cols = 0, mask_scratches = 0, mask_width = 4;
    double mask_random = 0.0;
    std::uint64_t mask_seed = 0;
    mask_cmd->add_option("--rows", mask_rows, "Image height in pixels")->required();
    mask_cmd->add_option("--cols", mask_cols, "Image width in pixels")->required();
    mask_cmd->add_option("--random", mask_random, "Fraction of pixels to drop, in (0,1)");
    mask_cmd->add_option("--scratches", mask_scratches, "Number of scratch segments");
    mask_cmd->add_option("--width", mask_width, "Scratch width in pixels")
        ->capture_default_str();
    mask_cmd->add_option("--bitmap", mask_bitmap, "Copy the mask from this file");
    mask_cmd->add_option("--seed", mask_seed, "Seed for mask generation")
        ->capture_default_str();
    mask_cmd->add_option("--out", mask_out_dir, "Output directory")
        ->envname("TVSPLINE_OUT")
        ->capture_default_str();
    mask_cmd->add_option("--output", mask_output, "Output file name inside --out")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (app.got_subcommand(inpaint))
            return run_inpaint(inpaint_flags, inpaint_image_path, inpaint_mask_path,
                               inpaint_output, inpaint_reference, inpaint_epsilon,
                               eps_opt->count() > 0);
        if (app.got_subcommand(denoise))
            return run_denoise(denoise_flags, denoise_image_path, denoise_output,
                               denoise_reference, denoise_epsilon, denoise_sweep);
        if (app.got_subcommand(benchmark)) return run_benchmark_cmd(bench);
        if (app.got_subcommand(mask_cmd))
            return run_mask(mask_out_dir, mask_output, mask_rows, mask_cols, mask_random,
                            mask_scratches, mask_width, mask_bitmap, mask_seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}

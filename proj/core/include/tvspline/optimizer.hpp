#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "tvspline/pixel_grid.hpp"
#include "tvspline/quadrature.hpp"
#include "tvspline/sparse.hpp"

namespace tvspline {

enum class InterpolationMode { exact, relaxed };

/// One inpainting problem: minimize the quadrature total variation subject
/// to interpolation of the known pixel values, either exactly or through the
/// quadratic penalty (epsilon/2)|Bf - g|^2.
struct ProblemData {
    GradientOperator gradient;
    SparseOperator collocation;
    std::vector<double> rhs;
    InterpolationMode mode = InterpolationMode::exact;
    double epsilon = 0.0;

    void validate() const;
};

/// Factored data-term solver shared across iterations: in exact mode the
/// Euclidean projection onto {f : Bf = g} via a factorization of B B^T, in
/// relaxed mode the prox of the quadratic penalty via a factorization of
/// (I + lambda_epsilon B^T B).
class ProjectionSolver {
  public:
    static ProjectionSolver exact_interpolation(const SparseOperator& collocation);
    static ProjectionSolver relaxed_interpolation(const SparseOperator& collocation,
                                                  double lambda_epsilon);

    /// Exact mode: f - B^T (B B^T)^{-1} (B f - g).
    /// Relaxed mode: (I + le B^T B)^{-1} (f + le B^T g).
    std::vector<double> apply(std::span<const double> f, std::span<const double> g) const;

    bool exact_mode() const;
    double lambda_epsilon() const;

    ProjectionSolver(ProjectionSolver&&) noexcept;
    ProjectionSolver& operator=(ProjectionSolver&&) noexcept;
    ~ProjectionSolver();

  private:
    ProjectionSolver();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Blockwise projection of the dual variable onto the unit balls,
/// y_k <- y_k / max(1, |y_k|_2). The formal prox parameter lambda does not
/// enter the projection and is accepted only to make that checkable.
void prox_f_star(std::span<double> y, int block_dim, double lambda = 1.0);

/// Projection onto the interpolation constraint through an exact-mode
/// solver. Independent of lambda like prox_f_star.
std::vector<double> prox_g_exact(const ProjectionSolver& projector, std::span<const double> f,
                                 std::span<const double> g, double lambda = 1.0);

/// Prox of the quadratic penalty through a relaxed-mode solver; the prox
/// parameter is fixed at factorization time as part of lambda_epsilon.
std::vector<double> prox_g_relaxed(const ProjectionSolver& projector, std::span<const double> f,
                                   std::span<const double> g);

/// Quadrature total variation of the coefficient vector.
double objective(const ProblemData& data, std::span<const double> f);

struct SolverConfig {
    double tau = 0.0;    // <= 0 picks 0.95 / operator_norm
    double sigma = 0.0;  // <= 0 picks 0.95 / operator_norm
    double theta = 1.0;
    int max_iterations = 100;
    double tolerance = 1e-6;      // fixed-point residual |f_new - f| / |f|
    double operator_norm = 0.0;   // <= 0 estimates |K| by power iteration
};

struct SolveDiagnostics {
    int iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
    double final_objective = 0.0;
    double operator_norm = 0.0;
    double max_dual_block_norm = 0.0;  // largest block norm seen after any dual step
    std::vector<double> objective_history;
    std::vector<double> residual_history;
};

struct SolveResult {
    std::vector<double> coefficients;
    SolveDiagnostics diagnostics;
};

/// First-order primal-dual iteration:
///   y <- prox_F*(y + sigma K fbar), f <- prox_G(f - tau K^T y),
///   fbar <- f + theta (f - f_prev).
/// Stops on the fixed-point residual or after max_iterations; without
/// convergence the best-objective iterate is returned and the flag cleared.
/// In exact mode the returned coefficients are post-projected onto the
/// interpolation constraint.
SolveResult solve(const ProblemData& data, const SolverConfig& config,
                  std::span<const double> start);

/// Independent coefficients, uniform on [lo, hi), reproducible by seed.
std::vector<double> starting_guess_random(std::size_t count, std::uint64_t seed, double lo = 0.0,
                                          double hi = 255.0);

/// Mean of the known pixel values, projected onto the interpolation
/// constraint: the constant-image guess.
std::vector<double> starting_guess_mean(std::span<const double> pixel_values,
                                        const InpaintingMask& mask,
                                        const ProjectionSolver& exact_projector,
                                        std::span<const double> rhs, std::size_t coeff_count);

/// Largest singular value estimate by power iteration on K^T K
/// (200 iterations or relative change below 1e-6).
double estimate_operator_norm(const SparseOperator& op);

}  // namespace tvspline

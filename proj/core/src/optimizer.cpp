#include "tvspline/optimizer.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <random>
#include <stdexcept>

namespace tvspline {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseOperator& op) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(op.nonzeros());
    for (std::size_t r = 0; r < op.rows(); ++r) {
        const auto cols = op.row_cols(r);
        const auto vals = op.row_vals(r);
        for (std::size_t i = 0; i < cols.size(); ++i)
            trips.emplace_back(static_cast<int>(r), static_cast<int>(cols[i]), vals[i]);
    }
    Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(op.rows()),
                                  static_cast<Eigen::Index>(op.cols()));
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

double norm(std::span<const double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    return std::sqrt(sq);
}

}  // namespace

void ProblemData::validate() const {
    if (gradient.op.cols() != collocation.cols())
        throw std::invalid_argument("gradient and collocation operators disagree on coefficients");
    if (rhs.size() != collocation.rows())
        throw std::invalid_argument("right-hand side does not match the collocation rows");
    if (mode == InterpolationMode::relaxed && !(epsilon > 0.0))
        throw std::invalid_argument("relaxed mode needs a positive epsilon");
}

struct ProjectionSolver::Impl {
    bool exact = false;
    double lambda_epsilon = 0.0;
    Eigen::SparseMatrix<double> B;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factorization;
};

ProjectionSolver::ProjectionSolver() : impl_(new Impl) {}
ProjectionSolver::ProjectionSolver(ProjectionSolver&&) noexcept = default;
ProjectionSolver& ProjectionSolver::operator=(ProjectionSolver&&) noexcept = default;
ProjectionSolver::~ProjectionSolver() = default;

ProjectionSolver ProjectionSolver::exact_interpolation(const SparseOperator& collocation) {
    ProjectionSolver solver;
    solver.impl_->exact = true;
    solver.impl_->B = to_eigen(collocation);
    Eigen::SparseMatrix<double> gram =
        solver.impl_->B * Eigen::SparseMatrix<double>(solver.impl_->B.transpose());
    solver.impl_->factorization.compute(gram);
    if (solver.impl_->factorization.info() != Eigen::Success)
        throw std::runtime_error("interpolation system factorization failed");
    return solver;
}

ProjectionSolver ProjectionSolver::relaxed_interpolation(const SparseOperator& collocation,
                                                         double lambda_epsilon) {
    if (!(lambda_epsilon > 0.0))
        throw std::invalid_argument("relaxed interpolation needs lambda_epsilon > 0");
    ProjectionSolver solver;
    solver.impl_->exact = false;
    solver.impl_->lambda_epsilon = lambda_epsilon;
    solver.impl_->B = to_eigen(collocation);
    Eigen::SparseMatrix<double> normal =
        Eigen::SparseMatrix<double>(solver.impl_->B.transpose()) * solver.impl_->B;
    normal *= lambda_epsilon;
    Eigen::SparseMatrix<double> identity(solver.impl_->B.cols(), solver.impl_->B.cols());
    identity.setIdentity();
    normal += identity;
    solver.impl_->factorization.compute(normal);
    if (solver.impl_->factorization.info() != Eigen::Success)
        throw std::runtime_error("relaxed system factorization failed");
    return solver;
}

std::vector<double> ProjectionSolver::apply(std::span<const double> f,
                                            std::span<const double> g) const {
    const auto& B = impl_->B;
    if (f.size() != static_cast<std::size_t>(B.cols()) ||
        g.size() != static_cast<std::size_t>(B.rows()))
        throw std::invalid_argument("projection input sizes do not match the operator");

    Eigen::Map<const Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(f.size()));
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
    Eigen::VectorXd out;
    if (impl_->exact) {
        Eigen::VectorXd residual = B * fv - gv;
        out = fv - B.transpose() * impl_->factorization.solve(residual);
    } else {
        Eigen::VectorXd rhs = fv + impl_->lambda_epsilon * (B.transpose() * gv);
        out = impl_->factorization.solve(rhs);
    }
    return std::vector<double>(out.data(), out.data() + out.size());
}

bool ProjectionSolver::exact_mode() const { return impl_->exact; }
double ProjectionSolver::lambda_epsilon() const { return impl_->lambda_epsilon; }

void prox_f_star(std::span<double> y, int block_dim, double) {
    for (std::size_t i = 0; i + block_dim <= y.size(); i += static_cast<std::size_t>(block_dim)) {
        double sq = 0.0;
        for (int j = 0; j < block_dim; ++j) sq += y[i + j] * y[i + j];
        const double nrm = std::sqrt(sq);
        if (nrm > 1.0) {
            for (int j = 0; j < block_dim; ++j) y[i + j] /= nrm;
        }
    }
}

std::vector<double> prox_g_exact(const ProjectionSolver& projector, std::span<const double> f,
                                 std::span<const double> g, double) {
    if (!projector.exact_mode())
        throw std::invalid_argument("prox_g_exact needs an exact-mode solver");
    return projector.apply(f, g);
}

std::vector<double> prox_g_relaxed(const ProjectionSolver& projector, std::span<const double> f,
                                   std::span<const double> g) {
    if (projector.exact_mode())
        throw std::invalid_argument("prox_g_relaxed needs a relaxed-mode solver");
    return projector.apply(f, g);
}

double objective(const ProblemData& data, std::span<const double> f) {
    return data.gradient.objective(f);
}

double estimate_operator_norm(const SparseOperator& op) {
    if (op.rows() == 0 || op.cols() == 0) return 0.0;

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(op.cols());
    for (auto& x : v) x = dist(rng);
    const double v0 = norm(v);
    if (v0 == 0.0) return 0.0;
    for (auto& x : v) x /= v0;

    std::vector<double> u(op.rows()), w(op.cols());
    double estimate = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        op.apply(v, u);
        const double s = norm(u);
        if (s == 0.0) return 0.0;
        op.apply_transpose(u, w);
        const double t = norm(w);
        if (t == 0.0) return s;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / t;
        if (iter > 0 && std::abs(s - estimate) <= 1e-6 * s) {
            estimate = s;
            break;
        }
        estimate = s;
    }
    return estimate;
}

SolveResult solve(const ProblemData& data, const SolverConfig& config,
                  std::span<const double> start) {
    data.validate();
    const std::size_t ncoef = data.collocation.cols();
    if (start.size() != ncoef)
        throw std::invalid_argument("starting guess has the wrong length");

    const double L = config.operator_norm > 0.0 ? config.operator_norm
                                                : estimate_operator_norm(data.gradient.op);
    double tau = config.tau > 0.0 ? config.tau : 0.95 / std::max(L, 1e-30);
    double sigma = config.sigma > 0.0 ? config.sigma : 0.95 / std::max(L, 1e-30);
    if (sigma * tau * L * L >= 1.0)
        throw std::invalid_argument("step sizes violate sigma * tau * |K|^2 < 1");

    const ProjectionSolver projector =
        data.mode == InterpolationMode::exact
            ? ProjectionSolver::exact_interpolation(data.collocation)
            : ProjectionSolver::relaxed_interpolation(data.collocation, tau * data.epsilon);

    const int d = data.gradient.dim;
    std::vector<double> f(start.begin(), start.end());
    std::vector<double> fbar = f;
    std::vector<double> y(data.gradient.op.rows(), 0.0);
    std::vector<double> kf(data.gradient.op.rows());
    std::vector<double> kty(ncoef);
    std::vector<double> fnext(ncoef);

    SolveResult result;
    auto& diag = result.diagnostics;
    diag.operator_norm = L;

    std::vector<double> best_f = f;
    double best_objective = objective(data, f);

    for (int k = 0; k < config.max_iterations; ++k) {
        data.gradient.op.apply(fbar, kf);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += sigma * kf[i];
        prox_f_star(y, d);
        for (std::size_t i = 0; i + d <= y.size(); i += static_cast<std::size_t>(d)) {
            double sq = 0.0;
            for (int j = 0; j < d; ++j) sq += y[i + j] * y[i + j];
            diag.max_dual_block_norm = std::max(diag.max_dual_block_norm, std::sqrt(sq));
        }

        data.gradient.op.apply_transpose(y, kty);
        for (std::size_t i = 0; i < ncoef; ++i) fnext[i] = f[i] - tau * kty[i];
        fnext = projector.apply(fnext, data.rhs);

        double diff = 0.0, base = 0.0;
        for (std::size_t i = 0; i < ncoef; ++i) {
            const double dlt = fnext[i] - f[i];
            diff += dlt * dlt;
            base += f[i] * f[i];
        }
        const double residual = std::sqrt(diff) / std::max(std::sqrt(base), 1e-30);

        for (std::size_t i = 0; i < ncoef; ++i)
            fbar[i] = fnext[i] + config.theta * (fnext[i] - f[i]);
        f.swap(fnext);

        const double obj = objective(data, f);
        diag.objective_history.push_back(obj);
        diag.residual_history.push_back(residual);
        diag.iterations = k + 1;
        diag.final_residual = residual;
        if (obj < best_objective) {
            best_objective = obj;
            best_f = f;
        }
        if (residual < config.tolerance) {
            diag.converged = true;
            break;
        }
    }

    result.coefficients = diag.converged ? std::move(f) : std::move(best_f);
    if (data.mode == InterpolationMode::exact)
        result.coefficients = projector.apply(result.coefficients, data.rhs);
    diag.final_objective = objective(data, result.coefficients);
    return result;
}

std::vector<double> starting_guess_random(std::size_t count, std::uint64_t seed, double lo,
                                          double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> f(count);
    for (auto& v : f) v = dist(rng);
    return f;
}

std::vector<double> starting_guess_mean(std::span<const double> pixel_values,
                                        const InpaintingMask& mask,
                                        const ProjectionSolver& exact_projector,
                                        std::span<const double> rhs, std::size_t coeff_count) {
    if (pixel_values.size() != mask.unknown.size())
        throw std::invalid_argument("pixel values do not match the mask");
    double sum = 0.0;
    std::size_t known = 0;
    for (std::size_t i = 0; i < pixel_values.size(); ++i) {
        if (!mask.unknown[i]) {
            sum += pixel_values[i];
            ++known;
        }
    }
    if (known == 0) throw std::invalid_argument("no known pixels to average");
    const double mean = sum / static_cast<double>(known);
    const std::vector<double> constant(coeff_count, mean);
    return prox_g_exact(exact_projector, constant, rhs);
}

}  // namespace tvspline

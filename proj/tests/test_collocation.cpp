#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "eigen_support.hpp"
#include "tvspline/collocation.hpp"
#include "tvspline/pixel_grid.hpp"
#include "tvspline/spline_basis.hpp"

using namespace tvspline;

namespace {

InpaintingMask empty_mask(const PixelGrid& px) {
    InpaintingMask mask;
    mask.dims = px.counts;
    mask.unknown.assign(px.pixel_count(), 0);
    return mask;
}

InpaintingMask mask_with(const PixelGrid& px, const std::vector<std::vector<int>>& pixels) {
    InpaintingMask mask = empty_mask(px);
    for (const auto& beta : pixels) mask.unknown[flat_index(px.counts, beta)] = 1;
    return mask;
}

std::vector<double> centers_of(const PixelGrid& px, int axis) {
    std::vector<double> c(static_cast<std::size_t>(px.counts[axis]));
    for (int b = 0; b < px.counts[axis]; ++b) c[static_cast<std::size_t>(b)] = px.center(axis, b);
    return c;
}

}  // namespace

TEST_CASE("Greville abscissae average the interior knots") {
    SUBCASE("order 3") {
        auto grid = build_knot_grid(PixelGrid::unit_spacing({5}), std::vector<int>{3});
        const auto xi = greville_axis(grid.axes[0]);
        const std::vector<double> expect{0, 0.5, 1.5, 2.5, 3.5, 4.5, 5};
        REQUIRE(xi.size() == expect.size());
        for (std::size_t i = 0; i < xi.size(); ++i)
            CHECK(std::abs(xi[i] - expect[i]) <= 1e-14);
    }
    SUBCASE("order 2") {
        auto grid = build_knot_grid(PixelGrid::unit_spacing({4}), std::vector<int>{2});
        const auto xi = greville_axis(grid.axes[0]);
        const std::vector<double> expect{0, 0.5, 1.5, 2.5, 3.5, 4};
        REQUIRE(xi.size() == expect.size());
        for (std::size_t i = 0; i < xi.size(); ++i)
            CHECK(std::abs(xi[i] - expect[i]) <= 1e-14);
    }
    SUBCASE("endpoints for any axis") {
        for (int n = 2; n <= 5; ++n) {
            for (int mu = n; mu <= 12; ++mu) {
                auto grid = build_knot_grid(PixelGrid::unit_spacing({mu}), std::vector<int>{n});
                const auto xi = greville_axis(grid.axes[0]);
                CHECK(xi.front() == 0.0);
                CHECK(xi.back() == static_cast<double>(mu));
                CHECK(std::is_sorted(xi.begin(), xi.end()));
            }
        }
    }
}

TEST_CASE("snapping pulls boundary abscissae onto pixel centers") {
    SUBCASE("order 3 needs no motion") {
        PixelGrid px = PixelGrid::unit_spacing({5});
        auto grid = build_knot_grid(px, std::vector<int>{3});
        const auto xi = greville_axis(grid.axes[0]);
        const auto sites = snap_axis_sites(xi, centers_of(px, 0));
        REQUIRE(sites.size() == xi.size());
        for (std::size_t i = 0; i < sites.size(); ++i)
            CHECK(std::abs(sites[i] - xi[i]) <= 1e-14);
    }
    SUBCASE("order 2 needs no motion") {
        PixelGrid px = PixelGrid::unit_spacing({4});
        auto grid = build_knot_grid(px, std::vector<int>{2});
        const auto xi = greville_axis(grid.axes[0]);
        const auto sites = snap_axis_sites(xi, centers_of(px, 0));
        for (std::size_t i = 0; i < sites.size(); ++i)
            CHECK(std::abs(sites[i] - xi[i]) <= 1e-14);
    }
    SUBCASE("every order keeps all centers and stays near them") {
        for (int n = 2; n <= 6; ++n) {
            for (int mu = std::max(n, 4); mu <= 16; ++mu) {
                PixelGrid px = PixelGrid::unit_spacing({mu});
                auto grid = build_knot_grid(px, std::vector<int>{n});
                const auto centers = centers_of(px, 0);
                const auto sites = snap_axis_sites(greville_axis(grid.axes[0]), centers);

                CHECK(std::is_sorted(sites.begin(), sites.end()));
                for (std::size_t i = 0; i + 1 < sites.size(); ++i) CHECK(sites[i] < sites[i + 1]);
                for (double c : centers) {
                    bool present = false;
                    for (double s : sites) present |= (std::abs(s - c) <= 1e-12);
                    CHECK(present);
                }
                // Each site sits within half a pixel of the center of its pixel.
                for (double s : sites) {
                    const int beta = px.pixel_of(0, s);
                    const double offset = s - px.center(0, beta);
                    CHECK(offset > -0.5 - 1e-12);
                    CHECK(offset <= 0.5 + 1e-12);
                }
                // Schoenberg-Whitney: every site lies inside its own support.
                for (std::size_t g = 0; g < sites.size(); ++g) {
                    const auto& ax = grid.axes[0];
                    CHECK(sites[g] >= ax.support_begin(static_cast<int>(g)));
                    CHECK(sites[g] <= ax.support_end(static_cast<int>(g)));
                    CHECK(eval_axis_bspline(ax, static_cast<int>(g), sites[g]) > 0.0);
                }
            }
        }
    }
    SUBCASE("equidistant pair resolves to the lower index") {
        // Order 5 on 8 pixels: abscissae 0.25 and 0.75 tie for the center at
        // 0.5; the lower one moves.
        PixelGrid px = PixelGrid::unit_spacing({8});
        auto grid = build_knot_grid(px, std::vector<int>{5});
        const auto xi = greville_axis(grid.axes[0]);
        CHECK(std::abs(xi[1] - 0.25) <= 1e-14);
        CHECK(std::abs(xi[2] - 0.75) <= 1e-14);
        const auto sites = snap_axis_sites(xi, centers_of(px, 0));
        CHECK(std::abs(sites[1] - 0.5) <= 1e-14);
        CHECK(std::abs(sites[2] - 0.75) <= 1e-14);
    }
    SUBCASE("the nearest abscissa moves even when an earlier one is farther") {
        // Order 4 on 8 pixels: abscissae 1/6 and 2/3 both have 0.5 as their
        // nearest center; 2/3 is closer and takes it.
        PixelGrid px = PixelGrid::unit_spacing({8});
        auto grid = build_knot_grid(px, std::vector<int>{4});
        const auto xi = greville_axis(grid.axes[0]);
        CHECK(std::abs(xi[1] - 1.0 / 6.0) <= 1e-14);
        CHECK(std::abs(xi[2] - 2.0 / 3.0) <= 1e-14);
        const auto sites = snap_axis_sites(xi, centers_of(px, 0));
        CHECK(std::abs(sites[1] - 1.0 / 6.0) <= 1e-14);
        CHECK(std::abs(sites[2] - 0.5) <= 1e-14);
    }
}

TEST_CASE("site sets classify sites by their pixel") {
    PixelGrid px = PixelGrid::unit_spacing({8, 8});
    const std::vector<int> orders{3, 3};
    auto grid = build_knot_grid(px, orders);

    SUBCASE("empty mask constrains everything") {
        auto sites = build_site_sets(grid, px, empty_mask(px));
        CHECK(sites.site_count() == grid.basis_count());
        CHECK(sites.constrained_index.size() == grid.basis_count());
    }
    SUBCASE("one unknown interior pixel frees exactly one site") {
        auto sites = build_site_sets(grid, px, mask_with(px, {{4, 4}}));
        CHECK(sites.site_count() - sites.constrained_index.size() == 1);
    }
    SUBCASE("every known pixel center is a constrained site") {
        auto mask = mask_with(px, {{3, 3}, {3, 4}, {5, 2}});
        auto sites = build_site_sets(grid, px, mask);
        std::set<std::size_t> constrained(sites.constrained_index.begin(),
                                          sites.constrained_index.end());
        for (int b0 = 0; b0 < 8; ++b0) {
            for (int b1 = 0; b1 < 8; ++b1) {
                const std::vector<int> beta{b0, b1};
                if (mask.unknown[flat_index(px.counts, beta)]) continue;
                // Locate the per-axis site equal to this center.
                std::vector<int> site_idx(2, -1);
                for (int j = 0; j < 2; ++j) {
                    const double c = px.center(j, beta[j]);
                    for (std::size_t g = 0; g < sites.axis_sites[j].size(); ++g) {
                        if (std::abs(sites.axis_sites[j][g] - c) <= 1e-12) {
                            site_idx[j] = static_cast<int>(g);
                            break;
                        }
                    }
                    REQUIRE(site_idx[j] >= 0);
                }
                CHECK(constrained.count(flat_index(sites.dims, site_idx)) == 1);
            }
        }
    }
    SUBCASE("random mask frees at least one site per unknown pixel") {
        PixelGrid big = PixelGrid::unit_spacing({128, 128});
        auto big_grid = build_knot_grid(big, orders);
        std::mt19937 rng(42);
        std::uniform_int_distribution<int> coord(1, 126);
        InpaintingMask mask = empty_mask(big);
        std::size_t unknown = 0;
        while (unknown < 491) {
            const std::vector<int> beta{coord(rng), coord(rng)};
            auto& cell = mask.unknown[flat_index(big.counts, beta)];
            if (!cell) {
                cell = 1;
                ++unknown;
            }
        }
        auto sites = build_site_sets(big_grid, big, mask);
        CHECK(sites.site_count() - sites.constrained_index.size() >= unknown);
    }
    SUBCASE("mismatched mask is rejected") {
        InpaintingMask mask;
        mask.dims = {8, 7};
        mask.unknown.assign(56, 0);
        CHECK_THROWS_AS(build_site_sets(grid, px, mask), std::invalid_argument);
    }
}

TEST_CASE("collocation matrix properties") {
    PixelGrid px = PixelGrid::unit_spacing({7, 6});
    const std::vector<int> orders{3, 2};
    auto grid = build_knot_grid(px, orders);
    auto sites = build_site_sets(grid, px, mask_with(px, {{3, 3}}));

    SUBCASE("square matrix with positive owner diagonal and unit row sums") {
        auto op = assemble_collocation(grid, sites, SiteSelection::all_sites);
        REQUIRE(op.rows() == grid.basis_count());
        REQUIRE(op.cols() == grid.basis_count());
        for (std::size_t r = 0; r < op.rows(); ++r) {
            const auto cols = op.row_cols(r);
            const auto vals = op.row_vals(r);
            double sum = 0.0;
            double diag = 0.0;
            for (std::size_t i = 0; i < cols.size(); ++i) {
                sum += vals[i];
                if (cols[i] == r) diag = vals[i];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            CHECK(diag > 0.0);
        }
    }
    SUBCASE("restricted matrix keeps exactly the constrained rows") {
        auto op = assemble_collocation(grid, sites, SiteSelection::constrained_only);
        CHECK(op.rows() == sites.constrained_index.size());
        CHECK(op.rows() == grid.basis_count() - 1);
    }
    SUBCASE("square solve reproduces sampled data") {
        auto op = assemble_collocation(grid, sites, SiteSelection::all_sites);
        auto A = oracle::to_eigen(op);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
        REQUIRE(lu.info() == Eigen::Success);

        std::mt19937 rng(3);
        std::uniform_real_distribution<double> dist(0.0, 255.0);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd g(A.rows());
            for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = dist(rng);
            Eigen::VectorXd f = lu.solve(g);
            Eigen::VectorXd back = A * f;
            CHECK((back - g).norm() / g.norm() <= 1e-8);
        }
    }
    SUBCASE("constant data yields constant coefficients") {
        auto op = assemble_collocation(grid, sites, SiteSelection::all_sites);
        auto A = oracle::to_eigen(op);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
        REQUIRE(lu.info() == Eigen::Success);
        Eigen::VectorXd g = Eigen::VectorXd::Constant(A.rows(), 7.5);
        Eigen::VectorXd f = lu.solve(g);
        for (Eigen::Index i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] - 7.5) <= 1e-10);
    }
}

TEST_CASE("restricted collocation has full row rank") {
    PixelGrid px = PixelGrid::unit_spacing({32, 32});
    for (int n = 2; n <= 3; ++n) {
        const std::vector<int> orders{n, n};
        auto grid = build_knot_grid(px, orders);
        std::mt19937 rng(1000 + n);
        std::uniform_int_distribution<int> coord(1, 30);
        InpaintingMask mask = empty_mask(px);
        for (int i = 0; i < 60; ++i) {
            const std::vector<int> beta{coord(rng), coord(rng)};
            mask.unknown[flat_index(px.counts, beta)] = 1;
        }
        auto sites = build_site_sets(grid, px, mask);
        auto op = assemble_collocation(grid, sites, SiteSelection::constrained_only);
        auto B = oracle::to_eigen(op);
        Eigen::SparseMatrix<double> gram = B * Eigen::SparseMatrix<double>(B.transpose());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(gram);
        CHECK(ldlt.info() == Eigen::Success);
        Eigen::VectorXd diag = ldlt.vectorD();
        CHECK(diag.minCoeff() > 0.0);
    }
}

TEST_CASE("right-hand side picks up pixel values at sites") {
    PixelGrid px = PixelGrid::unit_spacing({6, 5});
    const std::vector<int> orders{2, 2};
    auto grid = build_knot_grid(px, orders);
    auto sites = build_site_sets(grid, px, mask_with(px, {{2, 2}}));

    std::vector<double> values(px.pixel_count());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i);

    auto rhs = collocation_rhs(sites, px, values, SiteSelection::constrained_only);
    REQUIRE(rhs.size() == sites.constrained_index.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) {
        const auto x = sites.site_coords(sites.constrained_index[i]);
        const std::vector<int> beta{px.pixel_of(0, x[0]), px.pixel_of(1, x[1])};
        CHECK(rhs[i] == values[flat_index(px.counts, beta)]);
    }

    CHECK_THROWS_AS(collocation_rhs(sites, px, std::vector<double>(7, 0.0),
                                    SiteSelection::all_sites),
                    std::invalid_argument);
}

#include <doctest.h>

#include <random>

#include "gho/errors.hpp"
#include "gho/oracle.hpp"
#include "gho/states.hpp"
#include "support.hpp"

using namespace gho;
using testing::pi;

namespace {

const GridSpec kTdseGrid{-10, 10, 2048};
const GridSpec kContour{-4, 4, 401};

WavePacket ground(const GridSpec& g) { return sho_eigenstate(0, g, 1.0); }

}  // namespace

TEST_CASE("inner products") {
    const auto p0 = ground(kTdseGrid);
    const auto p1 = sho_eigenstate(1, kTdseGrid, 1.0);
    CHECK(std::abs(inner_product(p0, p0) - 1.0) < 1e-10);
    CHECK(std::abs(inner_product(p0, p1)) < 1e-10);
    CHECK(std::abs(inner_product(p0, p0, [](double x) { return x; })) < 1e-10);
    CHECK_THROWS_AS(inner_product(p0, ground(GridSpec{-10, 10, 1024})), GridMismatch);
    auto later = p0;
    later.t = 1.0;
    CHECK_THROWS_AS(inner_product(p0, later), GridMismatch);
}

TEST_CASE("Crank-Nicolson keeps the ground state stationary") {
    const auto s = testing::sho(0.0, 2.0);
    const auto p0 = ground(kTdseGrid);
    const auto p1 = evolve_tdse(s, p0, 1.0, {1e-3, kTdseGrid});
    auto p0_late = p0;
    p0_late.t = 1.0;
    const auto overlap = inner_product(p0_late, p1);
    CHECK(std::abs(overlap) > 1 - 1e-8);
    CHECK(std::abs(std::arg(overlap) + 0.5) < 1e-4);
    CHECK(std::abs(norm(p1) - 1.0) < 1e-8);
}

TEST_CASE("Crank-Nicolson free spreading and Ehrenfest drift") {
    const auto free = testing::free_particle();
    const auto spread = evolve_tdse(free, ground(kTdseGrid), 1.0, {1e-3, kTdseGrid});
    CHECK(position_moments(spread).variance == doctest::Approx(1.0).epsilon(1e-4));

    auto driven = testing::sho(0.0, 3.0);
    driven.force = CoefficientFn::constant(1.0);
    const auto part = solve_particular(driven);
    auto psi = ground(kTdseGrid);
    for (double t : {0.5, 1.0, 2.0}) {
        psi = evolve_tdse(driven, psi, t, {1e-3, kTdseGrid});
        CHECK(std::abs(position_moments(psi).mean - part.at(t).x) < 1e-4);
        CHECK(std::abs(part.at(t).x - (1 - std::cos(t))) < 1e-9);
    }
}

TEST_CASE("Crank-Nicolson norm drift over 1000 steps with gauge terms") {
    const auto s = testing::gauge_heavy();
    const auto out = evolve_tdse(s, ground(kTdseGrid), 1.0, {1e-3, kTdseGrid});
    CHECK(std::abs(norm(out) - 1.0) < 1e-8);
}

TEST_CASE("Crank-Nicolson argument checks") {
    const auto s = testing::sho();
    CHECK_THROWS_AS(evolve_tdse(s, ground(kTdseGrid), 1.0, {1e-3, GridSpec{-10, 10, 1024}}), GridMismatch);
    CHECK_THROWS_AS(evolve_tdse(s, ground(kTdseGrid), 1.0, {0.0, kTdseGrid}), std::invalid_argument);
}

TEST_CASE("grid evolution agrees with kernel propagation") {
    for (const auto& s : {testing::sho(0.0, 2.0), testing::parametric(2.0), testing::gauge_heavy()}) {
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        auto packet = make_packet(kTdseGrid, 0.0);
        for (int i = 0; i < kTdseGrid.n_points; ++i)
            packet.samples[i] = std::pow(pi, -0.25) * std::exp(-0.5 * std::pow(kTdseGrid.x(i) - 1.0, 2));
        const auto analytic = propagate(packet, basis, part, 1.0);
        const auto grid = evolve_tdse(s, packet, 1.0, {1e-3, kTdseGrid});
        CHECK(l2_distance(analytic, grid) < 1e-4);
    }
}

TEST_CASE("path integral oracle") {
    SUBCASE("free particle, four slices") {
        const auto s = testing::free_particle();
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        const KernelQuery q{0.0, 1.0, {-0.4}, {0.9}};
        const auto k = path_integral_oracle(basis, part, q, 4, GridSpec{-6, 6, 401});
        CHECK(testing::rel_err(k, testing::free_kernel(1.0, 0.9, -0.4)) < 1e-6);
    }
    SUBCASE("SHO, eight slices, random endpoints") {
        const auto s = testing::sho(0.0, 3.0);
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> pos(-2.0, 2.0);
        for (int k = 0; k < 5; ++k) {
            const KernelQuery q{0.5, 1.5, {pos(rng)}, {pos(rng)}};
            CHECK(testing::rel_err(path_integral_oracle(basis, part, q, 8, kContour), kernel(basis, part, q)) < 1e-5);
        }
    }
    SUBCASE("all coefficients time dependent") {
        const auto s = testing::gauge_heavy();
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        const KernelQuery q{0.2, 1.2, {0.3}, {-0.7}};
        CHECK(testing::rel_err(path_integral_oracle(basis, part, q, 8, kContour), kernel(basis, part, q)) < 1e-5);
    }
    SUBCASE("single slice is the kernel") {
        const auto s = testing::sho(0.0, 3.0);
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        const KernelQuery q{0.5, 1.5, {0.2}, {0.1}};
        CHECK(path_integral_oracle(basis, part, q, 1, kContour) == kernel(basis, part, q));
    }
    SUBCASE("too short a contour is reported") {
        const auto s = testing::sho(0.0, 3.0);
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        const KernelQuery q{0.5, 1.5, {0.2}, {0.1}};
        CHECK_THROWS_AS(path_integral_oracle(basis, part, q, 8, GridSpec{-0.5, 0.5, 101}), GridTooNarrow);
    }
}

TEST_CASE("path integral converges under grid refinement") {
    const auto s = testing::free_particle();
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const KernelQuery q{0.0, 1.0, {-0.4}, {0.9}};
    const auto exact = testing::free_kernel(1.0, 0.9, -0.4);
    double previous = 1e300;
    for (int n : {17, 25, 33}) {
        const double err = testing::rel_err(path_integral_oracle(basis, part, q, 4, GridSpec{-5, 5, n}), exact);
        CHECK(err < previous);
        previous = err;
    }
}

TEST_CASE("composition across a focal point") {
    const auto s = testing::sho(0.0, 5.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const double xa[] = {0.3}, xc[] = {-0.6};
    const auto composed = composition_oracle(basis, part, 0.0, xa, 3 * pi / 4, 5 * pi / 4, xc, GridSpec{-16, 16, 1601});
    const auto direct = kernel(basis, part, {0.0, 5 * pi / 4, {0.3}, {-0.6}});
    CHECK(testing::rel_err(composed, direct) < 1e-5);
}

TEST_CASE("Schrodinger residual detector") {
    const auto s = testing::sho(0.0, 3.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const GridSpec g{-6, 6, 1201};
    const Field psi0 = [&](double t, double x) { return eigenmode(basis, part, 0, t, x); };
    CHECK(schrodinger_residual(psi0, s, 1.0, g) < 1e-4);
    const Field slice = [&](double t, double x) { return KernelSlice(basis, part, 0.0, t)(x, 0.3); };
    CHECK(schrodinger_residual(slice, s, 0.7, g) < 1e-4);
    const Field corrupted = [&](double t, double x) { return (1 + 0.1 * x) * eigenmode(basis, part, 0, t, x); };
    CHECK(schrodinger_residual(corrupted, s, 1.0, g) > 1e-2);
}

TEST_CASE("eigenmodes solve the full equation") {
    auto driven = testing::sho(0.0, 3.0);
    driven.force = CoefficientFn(Sinusoidal{0.7, 1.3, 0.0, 0.0});
    const GridSpec g{-8, 8, 1601};
    for (const auto& s : {testing::sho(0.0, 3.0), driven, testing::parametric(3.0), testing::gauge_heavy()}) {
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        for (int n = 0; n <= 5; ++n) {
            const Field f = [&](double t, double x) { return eigenmode(basis, part, n, t, x); };
            CHECK(schrodinger_residual(f, s, 1.3, g) < 1e-4);
        }
        const Field k = [&](double t, double x) { return kernel(basis, part, {0.2, t, {0.4}, {x}}); };
        CHECK(schrodinger_residual(k, s, 1.1, g) < 1e-4);
    }
}

TEST_CASE("invariant is conserved along grid evolution") {
    const auto s = testing::parametric(5.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    // Second-order differences: the drift is dominated by dx^2 dispersion.
    const GridSpec g{-10, 10, 8192};
    auto packet = make_packet(g, 0.0);
    for (int i = 0; i < g.n_points; ++i)
        packet.samples[i] = std::pow(pi, -0.25) * std::exp(-0.5 * std::pow(g.x(i) - 1.0, 2));
    const double start = invariant_expectation(packet, basis, part).value;
    double drift = 0.0;
    for (double t = 1.0; t <= 5.0; t += 1.0) {
        packet = evolve_tdse(s, packet, t, {1e-3, g});
        drift = std::max(drift, std::abs(invariant_expectation(packet, basis, part).value - start) / start);
    }
    CHECK(drift < 1e-5);
}

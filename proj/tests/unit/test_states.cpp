#include <doctest.h>

#include <sstream>

#include "gho/errors.hpp"
#include "gho/oracle.hpp"
#include "gho/states.hpp"
#include "support.hpp"

using namespace gho;
using testing::pi;

namespace {

// Explicit power-series form of H_5.
double h5_series(double y) { return 32 * std::pow(y, 5) - 160 * std::pow(y, 3) + 120 * y; }

const GridSpec kGrid{-12, 12, 1024};

}  // namespace

TEST_CASE("hermite recurrence") {
    CHECK(hermite(0, 3.7) == 1.0);
    CHECK(hermite(2, 1.0) == doctest::Approx(2.0));
    CHECK(std::abs(hermite(5, 0.7) - h5_series(0.7)) / std::abs(h5_series(0.7)) < 1e-12);
    CHECK_THROWS_AS(hermite(201, 0.1), std::invalid_argument);
    // hermite_function is the normalized version.
    const double y = 0.9;
    CHECK(hermite_function(5, y) ==
          doctest::Approx(h5_series(y) * std::exp(-y * y / 2) / std::sqrt(32.0 * 120.0 * std::sqrt(pi))).epsilon(1e-13));
}

TEST_CASE("eigenmode reference values") {
    const auto s = testing::sho(0.0, 4.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const auto v0 = eigenmode(basis, part, 0, 0.0, 0.0);
    CHECK(v0.real() == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-12));
    CHECK(std::abs(v0.imag()) < 1e-14);
    const auto v1 = eigenmode(basis, part, 0, pi / 2, 0.0);
    CHECK(std::abs(v1) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-10));
    CHECK(std::arg(v1) == doctest::Approx(-pi / 4).epsilon(1e-9));

    auto driven = s;
    driven.particular = InitialData{1.0, 0.0};
    const auto dpart = solve_particular(driven);
    CHECK(std::abs(eigenmode(basis, dpart, 1, 0.8, std::cos(0.8))) < 1e-9);
}

TEST_CASE("eigenmode phase is continuous across many periods") {
    const auto s = testing::sho(0.0, 20.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    // psi_n(t, 0.3) = psi_n(0, 0.3) e^{-i(n+1/2)t} for the SHO.
    for (double t : {3.0, 7.5, 19.0}) {
        const auto got = eigenmode(basis, part, 3, t, 0.3);
        const auto want = eigenmode(basis, part, 3, 0.0, 0.3) * std::polar(1.0, -3.5 * t);
        CHECK(std::abs(got - want) < 1e-8);
    }
}

TEST_CASE("Gram matrix at three times") {
    for (const auto& s : {testing::sho(0.0, 4.0), testing::parametric(4.0), testing::gauge_heavy()}) {
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        for (double t : {0.0, 1.3, 2.9}) {
            std::vector<WavePacket> modes;
            for (int n = 0; n <= 10; ++n) modes.push_back(eigenmode_packet(basis, part, n, t, kGrid));
            double worst = 0.0;
            for (int m = 0; m <= 10; ++m)
                for (int n = 0; n <= 10; ++n)
                    worst = std::max(worst, std::abs(inner_product(modes[m], modes[n]) - (m == n ? 1.0 : 0.0)));
            CHECK(worst < 1e-8);
        }
    }
}

TEST_CASE("mode sum kernel") {
    const auto s = testing::sho(0.0, 4.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const KernelQuery q{0.2, 1.1, {0.4}, {-0.3}};
    const KernelQuery r{1.1, 0.2, {-0.3}, {0.4}};
    CHECK(mode_sum_kernel(basis, part, 0, q) ==
          eigenmode(basis, part, 0, 1.1, -0.3) * std::conj(eigenmode(basis, part, 0, 0.2, 0.4)));
    CHECK(mode_sum_kernel(basis, part, 7, r) == std::conj(mode_sum_kernel(basis, part, 7, q)));
}

TEST_CASE("mode-sum propagation agrees with kernel propagation") {
    const auto s = testing::gauge_heavy();
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const GridSpec g{-14, 14, 1024};
    // Displaced Gaussian, mean occupation around 5 in the t = 0 modes.
    auto packet = make_packet(g, 0.0);
    for (int i = 0; i < g.n_points; ++i)
        packet.samples[i] = std::pow(pi, -0.25) * std::exp(-0.5 * std::pow(g.x(i) - 3.0, 2)) * std::polar(1.0, 0.5 * g.x(i));
    const auto direct = propagate(packet, basis, part, 1.7);
    const auto summed = mode_sum_propagate(packet, basis, part, 1.7, 60);
    CHECK(l2_distance(direct, summed) < 1e-6);
}

TEST_CASE("SHO eigenstates on a grid") {
    const auto p0 = sho_eigenstate(0, kGrid, 1.0);
    CHECK(norm(p0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p0.samples[512].real() == doctest::Approx(std::pow(pi, -0.25) * std::exp(-0.5 * std::pow(kGrid.x(512), 2))));
    const auto p3 = sho_eigenstate(3, kGrid, 1.0);
    CHECK(norm(p3) == doctest::Approx(1.0).epsilon(1e-8));
    for (int n = 0; n < 3; ++n) CHECK(std::abs(inner_product(sho_eigenstate(n, kGrid, 1.0), p3)) < 1e-8);

    Scenario unit = testing::sho();
    const auto p2 = sho_eigenstate(2, kGrid, 1.0);
    const auto h = apply_hamiltonian(unit, 0.0, kGrid, p2.samples);
    WavePacket hp{kGrid, h, 0.0};
    CHECK(inner_product(p2, hp).real() == doctest::Approx(2.5).epsilon(1e-6));

    CHECK_THROWS_AS(sho_eigenstate(0, GridSpec{-3, 3, 64}, 1.0), GridTooNarrow);
    CHECK_THROWS_AS(sho_eigenstate(40, GridSpec{-12, 12, 64}, 1.0), GridTooNarrow);
}

TEST_CASE("U_F and U_S") {
    auto s = testing::sho(0.0, 4.0);
    const auto psi = sho_eigenstate(0, kGrid, 1.0);
    {
        const auto part = solve_particular(s);
        const auto out = apply_U_F(psi, part, 0.0);
        CHECK(l2_distance(out, psi) < 1e-12);
    }
    s.particular = InitialData{1.0, 0.0};
    const auto part = solve_particular(s);
    const auto shifted = apply_U_F(psi, part, 0.0);
    CHECK(std::abs(norm(shifted) - 1.0) < 1e-12);
    CHECK(position_moments(shifted).mean == doctest::Approx(1.0).epsilon(1e-8));
    const auto moved = apply_U_F(psi, part, 1.0);
    CHECK(std::abs(norm(moved) - 1.0) < 1e-12);

    const auto basis = solve_homogeneous_basis(s);
    CHECK(l2_distance(apply_U_S(psi, basis, 0.0), psi) < 1e-12);
    const auto squeezed_basis = solve_homogeneous_basis(s, BasisInitialData{{1, 0}, {0, 2}});
    const auto squeezed = apply_U_S(psi, squeezed_basis, 0.0);
    CHECK(std::abs(norm(squeezed) - 1.0) < 1e-12);
    CHECK(position_moments(squeezed).variance == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(std::abs(norm(apply_U_S(psi, squeezed_basis, 1.0)) - 1.0) < 1e-12);

    s.particular = InitialData{20.0, 0.0};
    CHECK_THROWS_AS(apply_U_F(psi, solve_particular(s), 0.0), GridTooNarrow);
}

TEST_CASE("coherent and squeezed states") {
    auto s = testing::sho(0.0, 4.0);
    const auto basis = solve_homogeneous_basis(s);
    for (int n = 0; n < 4; ++n) {
        const auto built = build_generalized_coherent_state(basis, solve_particular(s), n, 0.0, kGrid);
        CHECK(l2_distance(built, sho_eigenstate(n, kGrid, 1.0)) < 1e-12);
    }

    s.particular = InitialData{1.0, 0.0};
    const auto part = solve_particular(s);
    for (double t : {0.0, 0.5, 1.0}) {
        const auto p = build_generalized_coherent_state(basis, part, 0, t, kGrid);
        CHECK(std::abs(position_moments(p).mean - std::cos(t)) < 1e-8);
    }

    s.particular.reset();
    const auto sq = solve_homogeneous_basis(s, BasisInitialData{{1, 0}, {0, 2}});
    const auto zero = solve_particular(s);
    for (double t : {0.0, pi / 2, 2.0}) {
        const auto p = build_generalized_coherent_state(sq, zero, 0, t, kGrid);
        const double want = (std::pow(std::cos(t), 2) + 4 * std::pow(std::sin(t), 2)) / 4;
        CHECK(std::abs(position_moments(p).variance - want) / want < 1e-6);
    }
}

TEST_CASE("coherent construction equals the eigenmode") {
    for (const auto& s : {testing::gauge_heavy(), testing::parametric(4.0)}) {
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        for (int n : {0, 2, 5})
            for (double t : {0.0, 1.1, 2.7}) {
                const auto a = build_generalized_coherent_state(basis, part, n, t, kGrid);
                const auto b = eigenmode_packet(basis, part, n, t, kGrid);
                CHECK(l2_distance(a, b) < 1e-9);
            }
    }
}

TEST_CASE("invariant expectation") {
    const auto s = testing::sho(0.0, 4.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    for (int n = 0; n < 4; ++n) {
        const auto inv = invariant_expectation(sho_eigenstate(n, kGrid, 1.0), basis, part);
        CHECK(inv.value == doctest::Approx(n + 0.5).epsilon(1e-6));
        CHECK(std::abs(inv.imaginary) < 1e-8);
    }
    const auto g = testing::gauge_heavy();
    const auto gb = solve_homogeneous_basis(g);
    const auto gp = solve_particular(g);
    // The gauge phases chirp faster; fourth-order differences need a finer grid.
    const GridSpec fine{-12, 12, 2048};
    for (int n : {0, 3})
        for (double t : {0.5, 2.0}) {
            const auto inv = invariant_expectation(build_generalized_coherent_state(gb, gp, n, t, fine), gb, gp);
            CHECK(std::abs(inv.value - (n + 0.5)) < 1e-6);
        }
}

TEST_CASE("packet CSV header") {
    const auto p = sho_eigenstate(0, GridSpec{-8, 8, 32}, 1.0);
    std::ostringstream out;
    write_packet_csv(out, p, "abc");
    CHECK(out.str().rfind("# t=0\n# grid=-8,8,32\n# scenario=abc\nx,re,im,modulus2\n", 0) == 0);
}

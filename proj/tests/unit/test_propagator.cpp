#include <doctest.h>

#include <random>
#include <sstream>

#include "gho/errors.hpp"
#include "gho/propagator.hpp"
#include "gho/states.hpp"
#include "support.hpp"

using namespace gho;
using testing::pi;

namespace {

KernelQuery query(double ta, double xa, double tb, double xb) { return {ta, tb, {xa}, {xb}}; }

}  // namespace

TEST_CASE("SHO kernel matches Mehler at random points") {
    const auto s = testing::sho(0.0, 3.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> time(0.0, 3.0), pos(-3.0, 3.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        double ta = time(rng), tb = time(rng);
        if (ta > tb) std::swap(ta, tb);
        if (tb - ta < 0.05 || tb - ta > 3.0) continue;
        const double xa = pos(rng), xb = pos(rng);
        worst = std::max(worst, testing::rel_err(kernel(basis, part, query(ta, xa, tb, xb)),
                                                 testing::mehler(tb - ta, xb, xa)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("free kernel with non-unit mass and hbar") {
    auto s = testing::free_particle();
    s.hbar = 0.7;
    s.mass = CoefficientFn::constant(2.5);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const auto k = kernel(basis, part, query(0.3, -0.4, 1.9, 1.1));
    CHECK(testing::rel_err(k, testing::free_kernel(1.6, 1.1, -0.4, 0.7, 2.5)) < 1e-10);
}

TEST_CASE("Morse index past the first focal point") {
    const auto s = testing::sho(0.0, 8.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const auto report = caustic_times(basis, 0.0);
    REQUIRE(report.times.size() == 2);
    CHECK(report.times[0] == doctest::Approx(pi).epsilon(1e-9));
    CHECK(report.times[1] == doctest::Approx(2 * pi).epsilon(1e-9));

    // Between pi and 2 pi the continued Mehler kernel carries exp(-i pi/2).
    const KernelSlice slice(basis, part, 0.0, 4.0);
    CHECK(slice.morse_index() == 1);
    const double t = 4.0, xa = 0.3, xb = -0.8;
    const std::complex<double> pref = std::sqrt(1.0 / (2.0 * pi * std::abs(std::sin(t)))) * std::polar(1.0, -3 * pi / 4);
    const std::complex<double> want =
        pref * std::polar(1.0, ((xa * xa + xb * xb) * std::cos(t) - 2 * xa * xb) / (2 * std::sin(t)));
    CHECK(testing::rel_err(slice(xb, xa), want) < 1e-10);
}

TEST_CASE("kernel at a focal point throws") {
    const auto s = testing::sho(0.0, 8.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    CHECK_THROWS_AS(kernel(basis, part, query(0.0, 0.1, pi, 0.2)), CausticEncountered);
    CHECK_THROWS_AS(kernel(basis, part, query(1.0, 0.1, 1.0 + 2 * pi, 0.2)), CausticEncountered);
    try {
        kernel(basis, part, query(0.5, 0.1, 0.5 + pi, 0.2));
        FAIL("expected a caustic");
    } catch (const CausticEncountered& e) {
        CHECK(e.time() == doctest::Approx(0.5 + pi).epsilon(1e-8));
    }
    CHECK_THROWS_AS(kernel(basis, part, query(1.0, 0.1, 1.0, 0.2)), std::invalid_argument);
}

TEST_CASE("conjugation symmetry K(a,b) = K(b,a)*") {
    for (const auto& s : {testing::sho(0.0, 3.0), testing::parametric(3.0), testing::gauge_heavy()}) {
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        const auto ab = kernel(basis, part, query(0.4, 0.7, 2.1, -0.3));
        const auto ba = kernel(basis, part, query(2.1, -0.3, 0.4, 0.7));
        CHECK(std::abs(ab - std::conj(ba)) / std::abs(ab) < 1e-12);
    }
}

TEST_CASE("kernel does not depend on the classical solutions") {
    auto s = testing::sho(0.0, 3.0);
    const auto reference = [&] {
        const auto basis = solve_homogeneous_basis(s);
        const auto part = solve_particular(s);
        return kernel(basis, part, query(0.2, 0.5, 1.7, -1.2));
    }();
    const BasisInitialData bases[] = {{{1, 0}, {0, 1}}, {{1, 0}, {0, 2}}, {{1, 1}, {-0.5, 2}}};
    const InitialData particulars[] = {{0, 0}, {1, 0}};
    for (const auto& b : bases) {
        for (const auto& p : particulars) {
            const auto basis = solve_homogeneous_basis(s, b);
            const auto part = solve_particular(s, p);
            CHECK(testing::rel_err(kernel(basis, part, query(0.2, 0.5, 1.7, -1.2)), reference) < 1e-10);
        }
    }
}

TEST_CASE("N-dimensional kernel is a product with one f phase") {
    auto s = testing::gauge_heavy();
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    s.dimension = 2;
    const auto basis2 = solve_homogeneous_basis(s);
    const auto part2 = solve_particular(s);
    const auto k1 = kernel(basis, part, query(0.1, 0.4, 1.3, -0.2));
    const auto k2 = kernel(basis, part, query(0.1, -0.6, 1.3, 0.9));
    const auto kn = kernel(basis2, part2, {0.1, 1.3, {0.4, -0.6}, {-0.2, 0.9}});
    const KernelSlice slice(basis, part, 0.1, 1.3);
    CHECK(std::abs(kn - k1 * k2 / slice.f_phase()) / std::abs(kn) < 1e-12);
    CHECK_THROWS_AS(kernel(basis2, part2, query(0.1, 0.4, 1.3, -0.2)), std::invalid_argument);
}

TEST_CASE("green function vanishes backward in time") {
    const auto s = testing::sho(0.0, 3.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    CHECK(green_function(basis, part, query(1.0, 0.0, 0.5, 0.0)) == ComplexAmplitude{});
    CHECK(green_function(basis, part, query(0.5, 0.0, 1.0, 0.0)) == kernel(basis, part, query(0.5, 0.0, 1.0, 0.0)));
}

TEST_CASE("propagate keeps the SHO ground state stationary") {
    const auto s = testing::sho(0.0, 8.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const GridSpec g{-10, 10, 512};
    const auto psi0 = sho_eigenstate(0, g, 1.0);
    for (double t : {0.01, 1.0, 4.0}) {
        auto expected = psi0;
        expected.t = t;
        for (auto& z : expected.samples) z *= std::polar(1.0, -t / 2);
        const auto got = propagate(psi0, basis, part, t);
        CHECK(l2_distance(got, expected) < 1e-9);
    }
}

TEST_CASE("delta limit distance shrinks linearly") {
    const auto s = testing::sho(0.0, 3.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const GridSpec g{-10, 10, 1024};
    // Displaced ground state; any smooth dark-edged packet works.
    auto packet = make_packet(g, 0.0);
    for (int i = 0; i < g.n_points; ++i) packet.samples[i] = std::pow(pi, -0.25) * std::exp(-0.5 * std::pow(g.x(i) - 1, 2));
    const double d1 = kernel_delta_check(basis, part, 0.0, 1e-3, packet);
    const double d2 = kernel_delta_check(basis, part, 0.0, 5e-4, packet);
    CHECK(d1 < 1e-2);
    CHECK(d2 / d1 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("propagate rejects wide packets") {
    const auto s = testing::sho(0.0, 3.0);
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const GridSpec g{-2, 2, 128};
    auto packet = make_packet(g, 0.0);
    for (int i = 0; i < g.n_points; ++i) packet.samples[i] = std::exp(-0.5 * g.x(i) * g.x(i));
    CHECK_THROWS_AS(propagate(packet, basis, part, 1.0), GridTooNarrow);
}

TEST_CASE("kernel scan CSV shape") {
    const auto s = testing::free_particle();
    const auto basis = solve_homogeneous_basis(s);
    const auto part = solve_particular(s);
    const auto xs = GridSpec{-1, 1, 21}.nodes();
    std::ostringstream out;
    write_kernel_scan_csv(out, basis, part, 0.0, 1.0, xs, xs);
    std::istringstream in(out.str());
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 441);
    CHECK(out.str().rfind("t_a,x_a,t_b,x_b,re,im,modulus,phase\n", 0) == 0);
}

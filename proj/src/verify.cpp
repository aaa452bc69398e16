#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "format.hpp"
#include "gho/classical.hpp"
#include "gho/cli.hpp"
#include "gho/errors.hpp"
#include "gho/oracle.hpp"
#include "gho/propagator.hpp"
#include "gho/states.hpp"

namespace gho::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Context {
    const Scenario& s;
    ClassicalBasis basis;
    ParticularSolution part;
    GridSpec grid;
    std::vector<double> times;
    const std::map<std::string, double>& tol;
};

// n = 0 state of the default frame, displaced and boosted so that it moves
// (an undisplaced or merely shifted one can be stationary, e.g. under a constant force).
WavePacket test_packet(const Context& c, double t) {
    const auto& s = c.s;
    const auto basis = solve_homogeneous_basis(s, BasisInitialData{{1.0, 0.0}, {0.0, 1.0 / s.mass.value(s.t0)}});
    const auto ics = default_particular_ics(s);
    const auto part = solve_particular(s, InitialData{ics.x + 1.0, ics.x_dot + 0.5});
    return eigenmode_packet(basis, part, 0, t, c.grid);
}

// Kernel slices chirp without bound in x, so their residual is taken a short
// time after t_a on a window of fixed resolution.
constexpr double kSliceTime = 0.7;
const GridSpec kSliceWindow{-6.0, 6.0, 1201};

void require_packets(const Context& c) {
    if (c.s.dimension != 1) throw std::domain_error("packet checks need dimension 1");
}

void require_modes(const Context& c) {
    require_packets(c);
    if (!(c.basis.omega() > 0.0)) throw std::domain_error("eigenmodes need Omega > 0");
}

std::vector<double> origin(const Context& c, double x) { return std::vector<double>(c.s.dimension, x); }

using Check = std::function<double(const Context&)>;

struct NamedCheck {
    const char* name;
    Check run;
};

std::vector<NamedCheck> suite() {
    return {
        {"classical.wronskian", [](const Context& c) { return c.basis.max_wronskian_drift(); }},
        {"classical.invariant",
         [](const Context& c) {
             const auto& s = c.s;
             const auto ics = default_particular_ics(s);
             const auto traj = solve_particular(s, InitialData{ics.x + 1.0, ics.x_dot + 0.5});
             auto value = [&](double t) {
                 const auto q = traj.at(t);
                 const double m = s.mass.value(t);
                 const double p = m * q.x_dot + 2.0 * m * s.a.value(t) * q.x + s.b.value(t);
                 return classical_invariant(c.basis, c.part, q.x, p, t);
             };
             const double start = value(s.t0);
             double worst = 0.0;
             for (int k = 1; k <= 16; ++k)
                 worst = std::max(worst, std::abs(value(s.t0 + (s.t1 - s.t0) * k / 16.0) - start) / start);
             return worst;
         }},
        {"kernel.conjugation",
         [](const Context& c) {
             const KernelQuery ab{c.times[0], c.times[1], origin(c, 0.4), origin(c, -0.3)};
             const KernelQuery ba{c.times[1], c.times[0], origin(c, -0.3), origin(c, 0.4)};
             const auto k = kernel(c.basis, c.part, ab);
             return std::abs(k - std::conj(kernel(c.basis, c.part, ba))) / std::abs(k);
         }},
        {"kernel.composition",
         [](const Context& c) {
             const double t[] = {c.times[0], c.times[1], c.times[2]};
             const auto xa = origin(c, 0.3), xc = origin(c, -0.5);
             const auto composed =
                 composition_oracle(c.basis, c.part, t[0], xa, t[1], t[2], xc, default_contour(c.basis, c.part, t));
             const auto direct = kernel(c.basis, c.part, {t[0], t[2], xa, xc});
             return std::abs(composed - direct) / std::abs(direct);
         }},
        {"kernel.delta",
         [](const Context& c) {
             require_packets(c);
             return kernel_delta_check(c.basis, c.part, c.times[0], 1e-3, test_packet(c, c.times[0]));
         }},
        {"kernel.delta_halving",
         [](const Context& c) {
             require_packets(c);
             const auto p = test_packet(c, c.times[0]);
             const double d1 = kernel_delta_check(c.basis, c.part, c.times[0], 1e-3, p);
             const double d2 = kernel_delta_check(c.basis, c.part, c.times[0], 5e-4, p);
             return std::abs(d2 / d1 - 0.5);
         }},
        {"kernel.basis_invariance",
         [](const Context& c) {
             const KernelQuery q{c.times[0], c.times[1], origin(c, 0.5), origin(c, -0.2)};
             const auto reference = kernel(c.basis, c.part, q);
             const auto b = c.basis.initial_data();
             const auto p = c.part.initial_data();
             const ClassicalBasis alt(c.s, BasisInitialData{{b.u.x + b.v.x, b.u.x_dot + b.v.x_dot}, {b.v.x * 2.0, b.v.x_dot * 2.0}},
                                      c.basis.options());
             const auto alt_part = solve_particular(c.s, InitialData{p.x + 1.0, p.x_dot - 0.5});
             return std::abs(kernel(alt, alt_part, q) - reference) / std::abs(reference);
         }},
        {"kernel.residual",
         [](const Context& c) {
             require_packets(c);
             const double t_b = c.times[0] + std::min(kSliceTime, 0.5 * (c.s.t1 - c.times[0]));
             const Field f = [&](double t, double x) {
                 const KernelSlice k(c.basis, c.part, c.times[0], t);
                 return k.f_phase() * k(x, 0.3);
             };
             return schrodinger_residual(f, c.s, t_b, kSliceWindow);
         }},
        {"modes.residual",
         [](const Context& c) {
             require_modes(c);
             double worst = 0.0;
             for (int n = 0; n <= 5; ++n) {
                 const Field f = [&](double t, double x) { return eigenmode(c.basis, c.part, n, t, x); };
                 worst = std::max(worst, schrodinger_residual(f, c.s, c.times[1], c.grid));
             }
             return worst;
         }},
        {"modes.orthonormality",
         [](const Context& c) {
             require_modes(c);
             double worst = 0.0;
             for (double t : c.times) {
                 std::vector<WavePacket> modes;
                 for (int n = 0; n <= 10; ++n) modes.push_back(eigenmode_packet(c.basis, c.part, n, t, c.grid));
                 for (int m = 0; m <= 10; ++m)
                     for (int n = 0; n <= 10; ++n)
                         worst = std::max(worst, std::abs(inner_product(modes[m], modes[n]) - (m == n ? 1.0 : 0.0)));
             }
             return worst;
         }},
        {"modes.mode_sum",
         [](const Context& c) {
             require_modes(c);
             const auto p = test_packet(c, c.times[0]);
             return l2_distance(propagate(p, c.basis, c.part, c.times[1]),
                                mode_sum_propagate(p, c.basis, c.part, c.times[1], 60));
         }},
        {"states.coherent_equivalence",
         [](const Context& c) {
             require_modes(c);
             // The two constructions differ by e^{i(n+1/2) theta0}; compare after removing it.
             const double theta0 = c.basis.at(c.s.t0).phase;
             double worst = 0.0;
             for (double t : c.times)
                 for (int n : {0, 1, 3}) {
                     auto built = build_generalized_coherent_state(c.basis, c.part, n, t, c.grid);
                     for (auto& z : built.samples) z *= std::polar(1.0, (n + 0.5) * theta0);
                     worst = std::max(worst, l2_distance(built, eigenmode_packet(c.basis, c.part, n, t, c.grid)));
                 }
             return worst;
         }},
        {"states.unitarity",
         [](const Context& c) {
             require_modes(c);
             const auto psi = sho_eigenstate(0, c.grid, c.s.hbar);
             const double t = c.times[1];
             return std::max(std::abs(norm(apply_U_F(psi, c.part, t)) - 1.0),
                             std::abs(norm(apply_U_S(psi, c.basis, t)) - 1.0));
         }},
        {"states.invariant",
         [](const Context& c) {
             require_modes(c);
             double worst = 0.0;
             for (double t : c.times)
                 for (int n = 0; n <= 3; ++n) {
                     const auto inv = invariant_expectation(eigenmode_packet(c.basis, c.part, n, t, c.grid), c.basis, c.part);
                     worst = std::max(worst, std::abs(inv.value - c.s.hbar * (n + 0.5)));
                 }
             return worst;
         }},
        {"oracle.path_integral",
         [](const Context& c) {
             const double t_b = c.times[0] + std::min(1.0, c.times[1] - c.times[0]);
             const KernelQuery q{c.times[0], t_b, origin(c, 0.3), origin(c, -0.5)};
             std::vector<double> t(9);
             for (int k = 0; k <= 8; ++k) t[k] = q.t_a + (q.t_b - q.t_a) * k / 8.0;
             const auto k = path_integral_oracle(c.basis, c.part, q, 8, default_contour(c.basis, c.part, t));
             const auto direct = kernel(c.basis, c.part, q);
             return std::abs(k - direct) / std::abs(direct);
         }},
        {"oracle.tdse",
         [](const Context& c) {
             require_packets(c);
             const double t_b = c.times[0] + std::min(1.0, c.s.t1 - c.times[0]);
             const auto p = test_packet(c, c.times[0]);
             const auto analytic = propagate(p, c.basis, c.part, t_b);
             const auto grid = evolve_tdse(c.s, p, t_b, {c.tol.at("dt"), c.grid});
             return l2_distance(analytic, grid);
         }},
    };
}

// Grid wide enough for modes n <= 10 of both frames over the whole interval
// and fine enough for the second-order grid evolution.
GridSpec auto_grid(const Scenario& s, const ClassicalBasis& basis, const ParticularSolution& part) {
    const auto frame = solve_homogeneous_basis(s, BasisInitialData{{1.0, 0.0}, {0.0, 1.0 / s.mass.value(s.t0)}});
    const auto ics = default_particular_ics(s);
    const auto boosted = solve_particular(s, InitialData{ics.x + 1.0, ics.x_dot + 0.5});
    double reach = 0.0, w_min = std::numeric_limits<double>::infinity(), w_max = 0.0;
    for (int k = 0; k <= 32; ++k) {
        const double t = s.t0 + (s.t1 - s.t0) * k / 32.0;
        reach = std::max({reach, std::abs(part.at(t).x), std::abs(boosted.at(t).x)});
        for (const auto* b : {&basis, &frame}) {
            if (!(b->omega() > 0.0)) continue;
            const double w = rho(*b, t).rho * std::sqrt(s.hbar / b->omega());
            w_min = std::min(w_min, w);
            w_max = std::max(w_max, w);
        }
    }
    if (!(w_max > 0.0) || !std::isfinite(reach)) return {-10.0, 10.0, 2048};
    const double half = reach + w_max * (std::sqrt(21.0) + 7.0);
    const double n = std::ceil(2.0 * half / (w_min / 100.0)) + 1.0;
    return {-half, half, static_cast<int>(std::clamp(n, 2048.0, 16384.0))};
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> table = {
        {"classical.wronskian", 1e-8},
        {"classical.invariant", 1e-6},
        {"kernel.conjugation", 1e-12},
        {"kernel.composition", 1e-6},
        {"kernel.delta", 1e-2},
        {"kernel.delta_halving", 0.05},
        {"kernel.basis_invariance", 1e-10},
        {"kernel.residual", 1e-4},
        {"modes.residual", 1e-4},
        {"modes.orthonormality", 1e-8},
        {"modes.mode_sum", 1e-6},
        {"states.coherent_equivalence", 1e-9},
        {"states.unitarity", 1e-12},
        {"states.invariant", 1e-6},
        {"oracle.path_integral", 1e-5},
        {"oracle.tdse", 1e-4},
        {"invariant.spread", 1e-5},
        {"dt", 1e-3},
    };
    return table;
}

std::string format_check(const CheckResult& c) {
    using detail::num;
    std::string status;
    switch (c.status) {
        case Status::Pass: status = "PASS"; break;
        case Status::Fail: status = c.reason.empty() ? "FAIL" : "FAIL(" + c.reason + ")"; break;
        case Status::Skip: status = "SKIP(" + c.reason + ")"; break;
    }
    return fmt::format("CHECK {} value={} tol={} {}", c.name, num(c.value), num(c.tolerance), status);
}

std::vector<CheckResult> run_verify(const Scenario& s, const ExperimentSpec& spec, std::ostream& report) {
    auto tol = default_tolerances();
    for (const auto& [k, v] : spec.tolerances) tol[k] = v;

    std::vector<double> times = spec.times;
    if (times.empty()) times = {s.t0, s.t0 + 0.5 * (s.t1 - s.t0), s.t1};
    while (times.size() < 3) times.push_back(s.t1);

    auto basis = solve_homogeneous_basis(s, spec.basis.value_or(default_basis_ics(s)));
    auto part = solve_particular(s, spec.xp.value_or(default_particular_ics(s)));
    const GridSpec grid = spec.grid ? *spec.grid : auto_grid(s, basis, part);
    const Context c{s, std::move(basis), std::move(part), grid, times, tol};

    std::vector<CheckResult> results;
    for (const auto& check : suite()) {
        CheckResult r{check.name, kNaN, tol.at(check.name), Status::Fail, {}};
        try {
            r.value = check.run(c);
            r.status = r.value <= r.tolerance ? Status::Pass : Status::Fail;
        } catch (const CausticEncountered& e) {
            r.status = Status::Skip;
            r.reason = fmt::format("caustic at t={}", detail::num(e.time()));
        } catch (const std::domain_error& e) {
            r.status = Status::Skip;
            r.reason = e.what();
        } catch (const std::exception& e) {
            r.status = Status::Fail;
            r.reason = e.what();
        }
        report << format_check(r) << '\n';
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace gho::cli

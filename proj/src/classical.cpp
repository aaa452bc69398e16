#include "gho/classical.hpp"

#include <cmath>
#include <numbers>

#include "dense_trajectory.hpp"
#include "format.hpp"
#include "gho/errors.hpp"

namespace gho {

namespace {

struct MassFrequency {
    double mass;
    double w;
};

MassFrequency mass_frequency(const Scenario& s, double t, bool left) {
    if (left) return {s.mass.left_value(t), s.frequency.left_value(t)};
    return {s.mass.value(t), s.frequency.value(t)};
}

detail::OdeTolerance tolerance(const SolverOptions& o) { return {o.relative_tolerance, o.absolute_tolerance}; }

double max_step(const Scenario& s, const SolverOptions& o) { return (s.t1 - s.t0) * o.max_step_fraction; }

}  // namespace

// ---------------------------------------------------------------------------
// ClassicalBasis: state (u, M u', v, M v', tau)

ClassicalBasis::ClassicalBasis(const Scenario& s, const BasisInitialData& ics, const SolverOptions& opts)
    : scenario_(std::make_shared<const Scenario>(s)), ics_(ics), opts_(opts) {
    const double m0 = s.mass.value(s.t0);
    omega_ = m0 * (ics.u.x * ics.v.x_dot - ics.v.x * ics.u.x_dot);
    const double scale = m0 * (std::abs(ics.u.x * ics.v.x_dot) + std::abs(ics.v.x * ics.u.x_dot));
    if (omega_ == 0.0 || std::abs(omega_) <= 1e-14 * scale)
        throw DegenerateBasis("initial data for u and v are linearly dependent (Wronskian is zero)");
    phase0_ = std::atan2(-ics.v.x, ics.u.x);

    const double omega = omega_;
    auto rhs = [sc = scenario_, omega](const std::array<double, 5>& y, std::array<double, 5>& dy, double t, bool left) {
        const auto [m, w] = mass_frequency(*sc, t, left);
        const double k = m * w * w;
        dy[0] = y[1] / m;
        dy[1] = -k * y[0];
        dy[2] = y[3] / m;
        dy[3] = -k * y[2];
        dy[4] = omega / (m * (y[0] * y[0] + y[2] * y[2]));
    };
    const std::array<double, 5> y0{ics.u.x, m0 * ics.u.x_dot, ics.v.x, m0 * ics.v.x_dot, 0.0};
    trajectory_ = std::make_shared<const detail::DenseTrajectory<5>>(rhs, s.t0, s.t1, s.ode_breakpoints(), y0,
                                                               tolerance(opts), max_step(s, opts));
    if (max_wronskian_drift() > 1e-4)
        throw IntegrationFailure("Wronskian drifted beyond 1e-4 relative; classical solve is unreliable");
}

BasisPoint ClassicalBasis::make_point(double t, const std::array<double, 5>& y) const {
    const double m = scenario_->mass.value(t);
    const double principal = std::atan2(-y[2], y[0]);
    // arg(u - iv) decreases at rate Omega/(M rho^2) = tau', so phase0 - tau
    // tracks the continuous branch; snap the principal value onto it.
    const double guide = phase0_ - y[4];
    const double turns = std::round((guide - principal) / (2.0 * std::numbers::pi));
    return {t, m, y[0], y[1] / m, y[2], y[3] / m, y[4], principal + 2.0 * std::numbers::pi * turns};
}

BasisPoint ClassicalBasis::at(double t) const { return make_point(t, trajectory_->at(t)); }

const std::vector<double>& ClassicalBasis::node_times() const { return trajectory_->node_times(); }

BasisPoint ClassicalBasis::node(std::size_t i) const {
    return make_point(trajectory_->node_times()[i], trajectory_->node_state(i));
}

double ClassicalBasis::max_wronskian_drift() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < trajectory_->node_count(); ++i) {
        const auto& y = trajectory_->node_state(i);
        const double w = y[0] * y[3] - y[2] * y[1];
        worst = std::max(worst, std::abs(w - omega_) / std::abs(omega_));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// ParticularSolution: state (x_p, M x_p', xi)

ParticularSolution::ParticularSolution(const Scenario& s, const InitialData& ics, const SolverOptions& opts)
    : scenario_(std::make_shared<const Scenario>(s)), ics_(ics) {
    auto rhs = [sc = scenario_](const std::array<double, 3>& y, std::array<double, 3>& dy, double t, bool left) {
        const auto [m, w] = mass_frequency(*sc, t, left);
        const double force = left ? sc->force.left_value(t) : sc->force.value(t);
        const double k = m * w * w;
        dy[0] = y[1] / m;
        dy[1] = -k * y[0] + force;
        dy[2] = 0.5 * (k * y[0] * y[0] - y[1] * y[1] / m);
    };
    const double m0 = s.mass.value(s.t0);
    const std::array<double, 3> y0{ics.x, m0 * ics.x_dot, 0.0};
    trajectory_ = std::make_shared<const detail::DenseTrajectory<3>>(rhs, s.t0, s.t1, s.ode_breakpoints(), y0,
                                                               tolerance(opts), max_step(s, opts));
}

ParticularPoint ParticularSolution::make_point(double t, const std::array<double, 3>& y) const {
    return {t, y[0], y[1] / scenario_->mass.value(t), y[2]};
}

ParticularPoint ParticularSolution::at(double t) const { return make_point(t, trajectory_->at(t)); }

const std::vector<double>& ParticularSolution::node_times() const { return trajectory_->node_times(); }

ParticularPoint ParticularSolution::node(std::size_t i) const {
    return make_point(trajectory_->node_times()[i], trajectory_->node_state(i));
}

// ---------------------------------------------------------------------------

BasisInitialData default_basis_ics(const Scenario& s) {
    if (s.basis) return *s.basis;
    return {{1.0, 0.0}, {0.0, 1.0 / s.mass.value(s.t0)}};
}

InitialData default_particular_ics(const Scenario& s) { return s.particular.value_or(InitialData{}); }

ClassicalBasis solve_homogeneous_basis(const Scenario& s, const BasisInitialData& ics, const SolverOptions& opts) {
    return ClassicalBasis(s, ics, opts);
}

ClassicalBasis solve_homogeneous_basis(const Scenario& s, const SolverOptions& opts) {
    return ClassicalBasis(s, default_basis_ics(s), opts);
}

ParticularSolution solve_particular(const Scenario& s, const InitialData& ics, const SolverOptions& opts) {
    return ParticularSolution(s, ics, opts);
}

ParticularSolution solve_particular(const Scenario& s, const SolverOptions& opts) {
    return ParticularSolution(s, default_particular_ics(s), opts);
}

double wronskian(const ClassicalBasis& basis, double t) {
    const auto p = basis.at(t);
    return p.mass * (p.u * p.v_dot - p.v * p.u_dot);
}

RhoValue rho(const BasisPoint& p) {
    const double r = std::hypot(p.u, p.v);
    if (r == 0.0) throw ZeroRho("u and v vanish simultaneously; the basis is corrupted");
    return {r, (p.u * p.u_dot + p.v * p.v_dot) / r};
}

RhoValue rho(const ClassicalBasis& basis, double t) { return rho(basis.at(t)); }

double tau_map(const ClassicalBasis& basis, double t) { return basis.at(t).tau; }

double classical_invariant(const ClassicalBasis& basis, const ParticularSolution& part, double x, double p, double t) {
    const auto bp = basis.at(t);
    const auto pp = part.at(t);
    const auto r = rho(bp);
    const auto& s = basis.scenario();
    const double kinetic_p = p - 2.0 * bp.mass * s.a.value(t) * x - s.b.value(t);
    const double omega = basis.omega();
    const double dx = x - pp.x;
    const double dp = kinetic_p - bp.mass * pp.x_dot;
    const double mixed = bp.mass * r.rho_dot * dx - r.rho * dp;
    return (omega * omega / (r.rho * r.rho) * dx * dx + mixed * mixed) / (2.0 * omega);
}

void write_classical_csv(std::ostream& out, const ClassicalBasis& basis, const ParticularSolution& part,
                         std::span<const double> times) {
    using detail::num;
    out << "t,u,u_dot,v,v_dot,x_p,x_p_dot,xi,rho,rho_dot,tau\n";
    for (double t : times) {
        const auto b = basis.at(t);
        const auto p = part.at(t);
        const auto r = rho(b);
        out << num(t) << ',' << num(b.u) << ',' << num(b.u_dot) << ',' << num(b.v) << ',' << num(b.v_dot) << ','
            << num(p.x) << ',' << num(p.x_dot) << ',' << num(p.xi) << ',' << num(r.rho) << ',' << num(r.rho_dot)
            << ',' << num(b.tau) << '\n';
    }
}

}  // namespace gho

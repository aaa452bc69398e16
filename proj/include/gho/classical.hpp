#pragma once

#include <array>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "gho/params.hpp"

namespace gho {

namespace detail {
template <std::size_t Dim>
class DenseTrajectory;
}

struct SolverOptions {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-12;
    /// Upper bound on checkpoint spacing as a fraction of the interval.
    double max_step_fraction = 1.0 / 64.0;
};

/// Homogeneous basis (u, v) at one time, plus the rescaled time tau(t).
struct BasisPoint {
    double t;
    double mass;
    double u;
    double u_dot;
    double v;
    double v_dot;
    double tau;
    /// arg(u - i v), unwrapped continuously from t0.
    double phase;
};

/// Two independent solutions of d/dt(M x') + M w^2 x = 0 over [t0, t1], with
/// tau(t) = int_{t0}^t Omega / (M rho^2) integrated alongside.
class ClassicalBasis {
public:
    ClassicalBasis(const Scenario& s, const BasisInitialData& ics, const SolverOptions& opts);

    BasisPoint at(double t) const;

    /// M (u v' - v u') evaluated from the initial data.
    double omega() const { return omega_; }
    const Scenario& scenario() const { return *scenario_; }
    const BasisInitialData& initial_data() const { return ics_; }
    const SolverOptions& options() const { return opts_; }

    /// Checkpoint times of the adaptive solve (solver nodes).
    const std::vector<double>& node_times() const;
    BasisPoint node(std::size_t i) const;

    /// Largest relative deviation of the Wronskian from Omega over the nodes.
    double max_wronskian_drift() const;

private:
    BasisPoint make_point(double t, const std::array<double, 5>& y) const;

    // Immutable after the solve; copies share it.
    std::shared_ptr<const Scenario> scenario_;
    BasisInitialData ics_;
    SolverOptions opts_;
    double omega_ = 0.0;
    double phase0_ = 0.0;
    std::shared_ptr<const detail::DenseTrajectory<5>> trajectory_;
};

struct ParticularPoint {
    double t;
    double x;
    double x_dot;
    double xi;
};

/// Driven solution x_p of d/dt(M x') + M w^2 x = F with
/// xi(t) = int_{t0}^t (M w^2 x_p^2 - M x_p'^2)/2.
class ParticularSolution {
public:
    ParticularSolution(const Scenario& s, const InitialData& ics, const SolverOptions& opts);

    ParticularPoint at(double t) const;
    const std::vector<double>& node_times() const;
    ParticularPoint node(std::size_t i) const;
    const InitialData& initial_data() const { return ics_; }
    const Scenario& scenario() const { return *scenario_; }

private:
    ParticularPoint make_point(double t, const std::array<double, 3>& y) const;

    std::shared_ptr<const Scenario> scenario_;
    InitialData ics_;
    std::shared_ptr<const detail::DenseTrajectory<3>> trajectory_;
};

/// Scenario basis data when present, otherwise u = (1, 0), v = (0, 1/M(t0)) so
/// that Omega = 1.
BasisInitialData default_basis_ics(const Scenario& s);
/// Scenario particular data when present, otherwise (0, 0).
InitialData default_particular_ics(const Scenario& s);

/// Throws DegenerateBasis when the initial Wronskian vanishes.
ClassicalBasis solve_homogeneous_basis(const Scenario& s, const BasisInitialData& ics, const SolverOptions& opts = {});
ClassicalBasis solve_homogeneous_basis(const Scenario& s, const SolverOptions& opts = {});
ParticularSolution solve_particular(const Scenario& s, const InitialData& ics, const SolverOptions& opts = {});
ParticularSolution solve_particular(const Scenario& s, const SolverOptions& opts = {});

double wronskian(const ClassicalBasis& basis, double t);

struct RhoValue {
    double rho;
    double rho_dot;
};

/// rho = sqrt(u^2 + v^2) and its derivative. Throws ZeroRho when u = v = 0.
RhoValue rho(const ClassicalBasis& basis, double t);
RhoValue rho(const BasisPoint& p);

double tau_map(const ClassicalBasis& basis, double t);

/// Lewis action variable for classical (x, p). p is the canonical momentum;
/// the gauge terms a, b are removed as p - 2 M a x - b before use, so for
/// a = b = 0 this is the textbook expression.
double classical_invariant(const ClassicalBasis& basis, const ParticularSolution& part, double x, double p, double t);

/// CSV with columns t,u,u_dot,v,v_dot,x_p,x_p_dot,xi,rho,rho_dot,tau.
void write_classical_csv(std::ostream& out, const ClassicalBasis& basis, const ParticularSolution& part,
                         std::span<const double> times);

}  // namespace gho

#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gho/classical.hpp"
#include "gho/grid.hpp"
#include "gho/propagator.hpp"

namespace gho {

struct QuantumNumbers {
    std::vector<int> n;
};

/// Physicists' Hermite polynomial by the three-term recurrence; 0 <= n <= 200.
double hermite(int n, double y);

/// Hermite function H_n(y) e^{-y^2/2} / sqrt(2^n n! sqrt(pi)), computed by the
/// normalized recurrence so it neither overflows nor underflows early.
double hermite_function(int n, double y);

/// psi_n(t, r) of the complete set. Includes the a, b gauge phases and the
/// f(t) phase (once, not per dimension). The (u - i v)/rho power uses the
/// phase of u - i v unwrapped from t0. Needs Omega > 0 (std::invalid_argument
/// otherwise).
ComplexAmplitude eigenmode(const ClassicalBasis& basis, const ParticularSolution& part, const QuantumNumbers& qn,
                           double t, std::span<const double> r);

/// One-dimensional psi_n(t, x).
ComplexAmplitude eigenmode(const ClassicalBasis& basis, const ParticularSolution& part, int n, double t, double x);

/// psi_n(t, .) sampled on a grid (N = 1).
WavePacket eigenmode_packet(const ClassicalBasis& basis, const ParticularSolution& part, int n, double t,
                            const GridSpec& grid);

/// sum_{n_i <= n_max} psi_n(b) psi_n(a)^*, every component truncated at n_max.
ComplexAmplitude mode_sum_kernel(const ClassicalBasis& basis, const ParticularSolution& part, int n_max,
                                 const KernelQuery& q);

/// Projects the packet on psi_0..psi_{n_max} at packet.t and resums at t_b.
WavePacket mode_sum_propagate(const WavePacket& packet, const ClassicalBasis& basis, const ParticularSolution& part,
                              double t_b, int n_max);

/// n-th eigenstate of p^2/2 + x^2/2. Throws GridTooNarrow when the grid does
/// not reach past the turning points or has fewer than 8 points per local
/// wavelength.
WavePacket sho_eigenstate(int n, const GridSpec& grid, double hbar);

/// (U_F psi)(x) = e^{i xi/hbar} e^{i M x_p' x / hbar} psi(x - x_p), at time t.
/// Off-grid samples come from band-limited interpolation.
WavePacket apply_U_F(const WavePacket& packet, const ParticularSolution& part, double t);

/// (U_S psi)(x) = e^{i M rho' x^2 / (2 hbar rho)} (Omega/rho^2)^{1/4} psi(sqrt(Omega/rho^2) x).
WavePacket apply_U_S(const WavePacket& packet, const ClassicalBasis& basis, double t);

/// e^{-i(n+1/2) tau} U_F U_S phi_n, times the a, b and f phases so that it
/// solves the full system. Equals eigenmode_packet up to the constant
/// e^{i(n+1/2) theta0}, theta0 = arg(u - i v) at t0, which is 1 for the
/// default basis.
WavePacket build_generalized_coherent_state(const ClassicalBasis& basis, const ParticularSolution& part, int n,
                                            double t, const GridSpec& grid);

struct InvariantExpectation {
    double value;
    /// Imaginary part of <psi|I|psi>/<psi|psi>; a discretization diagnostic.
    double imaginary;
};

/// <I> with I = [(Omega/rho)^2 X^2 + (M rho' X - rho Pi)^2] / (2 Omega), where
/// X = x - x_p and Pi = p - 2 M a x - b - M x_p'. Derivatives are 4th-order
/// finite differences.
InvariantExpectation invariant_expectation(const WavePacket& packet, const ClassicalBasis& basis,
                                           const ParticularSolution& part);

/// Header lines "# t=", "# grid=xmin,xmax,n", "# scenario=<hash>", then
/// columns x,re,im,modulus2.
void write_packet_csv(std::ostream& out, const WavePacket& packet, const std::string& scenario_hash);

}  // namespace gho

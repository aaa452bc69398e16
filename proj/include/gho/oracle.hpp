#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "gho/classical.hpp"
#include "gho/grid.hpp"
#include "gho/params.hpp"
#include "gho/propagator.hpp"

namespace gho {

/// Crank-Nicolson stepping with the Hamiltonian sampled at step midpoints.
struct EvolverConfig {
    double dt = 1e-3;
    GridSpec grid;
};

/// Grid solution of i hbar psi_t = H psi with
///   H = -hbar^2/(2M) d^2 + i hbar a (x d + d x) + i hbar (b/M) d + M c x^2/2 + d x + b^2/(2M) - f
/// using second-order differences and zero Dirichlet walls. The a and b terms
/// are discretized as skew-symmetric central differences, so the discrete H is
/// Hermitian and each step is unitary. N = 1 only.
WavePacket evolve_tdse(const Scenario& s, const WavePacket& packet, double t_end, const EvolverConfig& cfg);

/// H psi at time t with fourth-order differences (one-sided at the edges).
std::vector<Complex> apply_hamiltonian(const Scenario& s, double t, const GridSpec& grid,
                                       std::span<const Complex> psi);

/// Product of exact short-time kernels over times[0] < times[1] < ... (or the
/// reversed order), integrated over every intermediate position. Each
/// intermediate variable runs along z = c_k + s e^{i phi_k}, with c_k on the
/// classical path through the endpoints, s on the grid nodes and
/// phi_k = sign(B_k) pi/8 for the z_k^2 coefficient B_k. The rotated contour
/// makes the oscillatory Gaussian integrals absolutely convergent; the
/// rotation is legitimate because the integrand is entire. N-dimensional
/// endpoints are handled component by component.
/// Throws GridTooNarrow when the integrand is not negligible at the grid ends.
ComplexAmplitude chain_integral(const ClassicalBasis& basis, const ParticularSolution& part,
                                std::span<const double> times, std::span<const double> r_a,
                                std::span<const double> r_b, const GridSpec& grid);

/// Contour grid for chain_integral over the given times: half-width 16
/// Gaussian widths of the loosest intermediate variable, with enough nodes to
/// resolve the chirp at the ends.
GridSpec default_contour(const ClassicalBasis& basis, const ParticularSolution& part, std::span<const double> times);

/// Time-sliced path integral with n_slices equal slices; n_slices = 1 returns
/// kernel(q) exactly. Needs every partial interval to be caustic-free.
ComplexAmplitude path_integral_oracle(const ClassicalBasis& basis, const ParticularSolution& part,
                                      const KernelQuery& q, int n_slices, const GridSpec& grid);

/// int K(t_c, r_c; t_b, z) K(t_b, z; t_a, r_a) dz.
ComplexAmplitude composition_oracle(const ClassicalBasis& basis, const ParticularSolution& part, double t_a,
                                    std::span<const double> r_a, double t_b, double t_c, std::span<const double> r_c,
                                    const GridSpec& grid);

using Field = std::function<ComplexAmplitude(double t, double x)>;

/// Per-node |(-i hbar d_t + H) field| over interior nodes, divided by
/// max |H field|. d_t is a centered difference with step 1e-5.
std::vector<double> residual_map(const Field& field, const Scenario& s, double t, const GridSpec& grid);

/// Maximum of residual_map.
double schrodinger_residual(const Field& field, const Scenario& s, double t, const GridSpec& grid);

/// CSV with columns x,residual (interior nodes).
void write_residual_csv(std::ostream& out, const Field& field, const Scenario& s, double t, const GridSpec& grid);

/// int p1^* p2 dx by trapezoid. GridMismatch unless grids and times agree.
ComplexAmplitude inner_product(const WavePacket& p1, const WavePacket& p2);

/// int p1^* w(x) p2 dx.
ComplexAmplitude inner_product(const WavePacket& p1, const WavePacket& p2, const std::function<double(double)>& weight);

}  // namespace gho

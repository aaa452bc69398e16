#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "gho/classical.hpp"
#include "gho/grid.hpp"

namespace gho {

/// Arguments (b; a) of the kernel K(t_b, r_b; t_a, r_a).
struct KernelQuery {
    double t_a = 0.0;
    double t_b = 0.0;
    std::vector<double> r_a;
    std::vector<double> r_b;
};

/// Zeros of D(t) = v(t) u(t_a) - u(t) v(t_a) in (t_a, t_limit].
struct CausticReport {
    double t_a = 0.0;
    std::vector<double> times;

    /// Number of zeros strictly before t_b.
    int morse_index(double t_b) const;
};

/// Zeros in (t_a, t1], bracketed by sign changes over solver nodes and
/// bisected to 1e-10.
CausticReport caustic_times(const ClassicalBasis& basis, double t_a);

/// Caustic detection thresholds.
struct CausticTolerance {
    /// |D| below relative * max(|u_b|,|v_b|) * (|u_a|+|v_a|) is a caustic.
    double relative = 1e-12;
    /// t_b within this distance of a located zero of D is a caustic.
    double time = 1e-9;
};

/// One-dimensional factor of the kernel for fixed (t_a, t_b):
///   K_1(x_b, x_a) = P exp{i [A_a Y^2 + A_b X^2 + C X Y + G_b(x_b) - G_a(x_a)]}
/// with X = x_b - x_p(t_b), Y = x_a - x_p(t_a) and the gauge/drive phase
///   G(x) = (M a x^2 + b x + M x_p' x + xi) / hbar.
/// The prefactor P = (Omega / (2 pi i hbar D))^{1/2} takes its branch from the
/// short-time limit and gains exp(-i pi/2) per zero of D crossed. The f(t)
/// phase is not included (it enters once per kernel, not per dimension).
/// Positions may be complex: the exponent is a polynomial, so the factor
/// continues analytically (used by contour-rotated quadrature).
class KernelSlice {
public:
    KernelSlice(const ClassicalBasis& basis, const ParticularSolution& part, double t_a, double t_b,
                const CausticTolerance& tol = {});

    Complex operator()(Complex x_b, Complex x_a) const;
    Complex operator()(double x_b, double x_a) const { return (*this)(Complex(x_b), Complex(x_a)); }
    /// log(K / prefactor); finite where K itself would overflow off the real axis.
    Complex exponent(Complex x_b, Complex x_a) const;

    double t_a() const { return t_a_; }
    double t_b() const { return t_b_; }
    /// v(t_b) u(t_a) - u(t_b) v(t_a).
    double denominator() const { return denominator_; }
    Complex prefactor() const { return prefactor_; }
    int morse_index() const { return morse_index_; }
    /// exp(i/hbar int_{t_a}^{t_b} f).
    Complex f_phase() const { return f_phase_; }

    double coeff_a() const { return coeff_a_; }          ///< A_a
    double coeff_b() const { return coeff_b_; }          ///< A_b
    double coeff_cross() const { return coeff_cross_; }  ///< C
    double xp_a() const { return xp_a_; }
    double xp_b() const { return xp_b_; }

    /// G_b(x) and G_a(x) as polynomials: g2 x^2 + g1 x + g0.
    struct Gauge {
        double g2, g1, g0;
        Complex operator()(Complex x) const { return (g2 * x + g1) * x + g0; }
        double slope(double x) const { return 2.0 * g2 * x + g1; }
    };
    const Gauge& gauge_a() const { return gauge_a_; }
    const Gauge& gauge_b() const { return gauge_b_; }

private:
    double t_a_, t_b_;
    double denominator_;
    int morse_index_ = 0;
    Complex prefactor_;
    Complex f_phase_;
    double coeff_a_, coeff_b_, coeff_cross_;
    double xp_a_, xp_b_;
    Gauge gauge_a_, gauge_b_;
};

/// Kernel of the N-dimensional isotropic system; the same particular
/// solution drives every component. Throws CausticEncountered at focal
/// points and std::invalid_argument for equal times or wrong dimension.
ComplexAmplitude kernel(const ClassicalBasis& basis, const ParticularSolution& part, const KernelQuery& q);

/// K(b, a) for t_b > t_a and exactly zero for t_b < t_a.
ComplexAmplitude green_function(const ClassicalBasis& basis, const ParticularSolution& part, const KernelQuery& q);

struct PropagateOptions {
    /// Input edge amplitude limit relative to the packet maximum.
    double edge_threshold = 1e-10;
    /// Quadrature nodes per shortest integrand wavelength, divided by 2 pi.
    double oversampling = 1.5;
};

/// psi(t_b, x) = int K(t_b, x; t_a, y) psi(t_a, y) dy by trapezoidal quadrature.
/// The quadrature grid is the packet grid, uniformly refined (with band-limited
/// resampling of psi) until the integrand's local frequency is resolved; short
/// times need this because the kernel chirp outruns the packet grid.
WavePacket propagate(const WavePacket& packet, const ClassicalBasis& basis, const ParticularSolution& part,
                     double t_b, const PropagateOptions& opts = {});

/// L2 distance between propagate(packet, t_a -> t_a + epsilon) and the packet.
double kernel_delta_check(const ClassicalBasis& basis, const ParticularSolution& part, double t_a, double epsilon,
                          const WavePacket& test_packet);

/// CSV with columns t_a,x_a,t_b,x_b,re,im,modulus,phase; one row per (x_a, x_b)
/// pair, x_a outer. N = 1 only.
void write_kernel_scan_csv(std::ostream& out, const ClassicalBasis& basis, const ParticularSolution& part, double t_a,
                           double t_b, std::span<const double> xs_a, std::span<const double> xs_b);

}  // namespace gho

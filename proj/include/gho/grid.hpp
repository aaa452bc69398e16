#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gho {

using Complex = std::complex<double>;
/// Complex kernel or wavefunction value.
using ComplexAmplitude = Complex;

/// Uniform grid x_i = x_min + i dx, i = 0..n_points-1, endpoints included.
struct GridSpec {
    double x_min = -10.0;
    double x_max = 10.0;
    int n_points = 1024;

    double dx() const { return (x_max - x_min) / (n_points - 1); }
    double x(int i) const { return x_min + i * dx(); }
    std::vector<double> nodes() const;
    bool operator==(const GridSpec&) const = default;
};

/// Throws std::invalid_argument unless x_min < x_max and n_points >= 16.
void validate(const GridSpec& g);

/// Samples of a one-dimensional wavefunction at time t.
struct WavePacket {
    GridSpec grid;
    std::vector<Complex> samples;
    double t = 0.0;
};

WavePacket make_packet(const GridSpec& g, double t);

/// Trapezoidal quadrature of uniformly spaced samples.
Complex trapezoid(std::span<const Complex> f, double dx);
double trapezoid(std::span<const double> f, double dx);

double norm(const WavePacket& p);

/// L2 distance between packets on the same grid.
double l2_distance(const WavePacket& a, const WavePacket& b);

/// Largest edge amplitude relative to the packet maximum.
double edge_ratio(const WavePacket& p);

/// Throws GridTooNarrow when the edge amplitude exceeds threshold * max|psi|.
void require_dark_edges(const WavePacket& p, double threshold, const char* context);

/// <x> and Var(x) of |psi|^2 by quadrature (packet need not be normalized).
struct Moments {
    double mean;
    double variance;
};
Moments position_moments(const WavePacket& p);

/// Fourth-order centered differences with fourth-order one-sided closures at
/// the two outermost nodes on each side.
std::vector<Complex> first_derivative(std::span<const Complex> f, double dx);
std::vector<Complex> second_derivative(std::span<const Complex> f, double dx);

/// Band-limited interpolation of periodic-extended samples. Points outside
/// [x_min, x_min + n dx) evaluate to zero, which is exact for edge-dark packets.
class TrigInterpolant {
public:
    TrigInterpolant(const GridSpec& g, std::span<const Complex> samples);

    Complex operator()(double x) const;
    std::vector<Complex> evaluate(std::span<const double> xs) const;

    /// Smallest wavenumber beyond which every Fourier coefficient is below
    /// rel_cutoff times the largest one.
    double bandwidth(double rel_cutoff) const;

private:
    double x_min_;
    double period_;
    int n_;
    int m_lo_;
    std::vector<Complex> coefficients_;  // for m = m_lo_ .. m_lo_ + size - 1
};

}  // namespace gho

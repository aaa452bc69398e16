#include "gho/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "format.hpp"
#include "gho/errors.hpp"

namespace gho {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeDark = 1e-8;

// Everything in psi_n at time t that does not depend on x or n.
struct ModeFrame {
    double omega;
    double hbar;
    double mass;
    double rho;
    double rho_dot;
    double theta;
    double xp;
    double xp_dot;
    double xi;
    double a;
    double b;

    ModeFrame(const ClassicalBasis& basis, const ParticularSolution& part, double t) {
        const auto& s = basis.scenario();
        omega = basis.omega();
        if (!(omega > 0.0)) throw std::invalid_argument("eigenmodes need Omega > 0; swap u and v");
        hbar = s.hbar;
        const auto p = basis.at(t);
        const auto r = gho::rho(p);
        const auto q = part.at(t);
        mass = p.mass;
        rho = r.rho;
        rho_dot = r.rho_dot;
        theta = p.phase;
        xp = q.x;
        xp_dot = q.x_dot;
        xi = q.xi;
        a = s.a.value(t);
        b = s.b.value(t);
    }

    // Without the f phase.
    Complex operator()(int n, double x) const {
        const double X = x - xp;
        const double y = std::sqrt(omega / hbar) * X / rho;
        const double amp = std::pow(omega / (hbar * rho * rho), 0.25) * hermite_function(n, y);
        const double phase = (n + 0.5) * theta + mass * rho_dot * X * X / (2.0 * hbar * rho) +
                             (xi + mass * a * x * x + (mass * xp_dot + b) * x) / hbar;
        return std::polar(amp, phase);
    }
};

Complex f_phase_since_start(const Scenario& s, double t) { return std::polar(1.0, s.f.integral(s.t0, t) / s.hbar); }

void require_one_dimension(const Scenario& s, const char* what) {
    if (s.dimension != 1) throw std::invalid_argument(fmt::format("{}: wave packets are one-dimensional", what));
}

// Output of an interpolating map must keep the input norm; otherwise support
// left the grid.
void require_norm_kept(const WavePacket& in, const WavePacket& out, const char* what) {
    const double n_in = norm(in);
    const double n_out = norm(out);
    if (std::abs(n_out - n_in) > 1e-6 * n_in)
        throw GridTooNarrow(fmt::format("{}: norm changed from {:.12g} to {:.12g}; widen the grid", what, n_in, n_out));
    require_dark_edges(out, kEdgeDark, what);
}

}  // namespace

double hermite(int n, double y) {
    if (n < 0 || n > 200) throw std::invalid_argument("hermite: 0 <= n <= 200");
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = 2.0 * y;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * y * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_function(int n, double y) {
    if (n < 0) throw std::invalid_argument("hermite_function: n >= 0");
    double prev = 0.0;
    double cur = std::pow(kPi, -0.25) * std::exp(-0.5 * y * y);
    for (int k = 0; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * y * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

ComplexAmplitude eigenmode(const ClassicalBasis& basis, const ParticularSolution& part, const QuantumNumbers& qn,
                           double t, std::span<const double> r) {
    const auto& s = basis.scenario();
    const auto dim = static_cast<std::size_t>(s.dimension);
    if (qn.n.size() != dim || r.size() != dim)
        throw std::invalid_argument(fmt::format("eigenmode: expected {} quantum numbers and coordinates", dim));
    for (int n : qn.n)
        if (n < 0) throw std::invalid_argument("eigenmode: quantum numbers must be non-negative");
    const ModeFrame frame(basis, part, t);
    Complex value = f_phase_since_start(s, t);
    for (std::size_t i = 0; i < dim; ++i) value *= frame(qn.n[i], r[i]);
    return value;
}

ComplexAmplitude eigenmode(const ClassicalBasis& basis, const ParticularSolution& part, int n, double t, double x) {
    require_one_dimension(basis.scenario(), "eigenmode");
    const double r[] = {x};
    return eigenmode(basis, part, QuantumNumbers{{n}}, t, r);
}

WavePacket eigenmode_packet(const ClassicalBasis& basis, const ParticularSolution& part, int n, double t,
                            const GridSpec& grid) {
    require_one_dimension(basis.scenario(), "eigenmode_packet");
    if (n < 0) throw std::invalid_argument("eigenmode_packet: n >= 0");
    const ModeFrame frame(basis, part, t);
    const Complex fp = f_phase_since_start(basis.scenario(), t);
    auto out = make_packet(grid, t);
    for (int i = 0; i < grid.n_points; ++i) out.samples[static_cast<std::size_t>(i)] = fp * frame(n, grid.x(i));
    return out;
}

ComplexAmplitude mode_sum_kernel(const ClassicalBasis& basis, const ParticularSolution& part, int n_max,
                                 const KernelQuery& q) {
    if (n_max < 0) throw std::invalid_argument("mode_sum_kernel: n_max >= 0");
    const auto& s = basis.scenario();
    const auto dim = static_cast<std::size_t>(s.dimension);
    if (q.r_a.size() != dim || q.r_b.size() != dim)
        throw std::invalid_argument(fmt::format("mode_sum_kernel: positions must have {} components", dim));
    const ModeFrame at_a(basis, part, q.t_a);
    const ModeFrame at_b(basis, part, q.t_b);
    // The sum over multi-indices factorizes into per-component sums.
    Complex value = f_phase_since_start(s, q.t_b) * std::conj(f_phase_since_start(s, q.t_a));
    for (std::size_t i = 0; i < dim; ++i) {
        Complex sum{};
        for (int n = 0; n <= n_max; ++n) sum += at_b(n, q.r_b[i]) * std::conj(at_a(n, q.r_a[i]));
        value *= sum;
    }
    return value;
}

WavePacket mode_sum_propagate(const WavePacket& packet, const ClassicalBasis& basis, const ParticularSolution& part,
                              double t_b, int n_max) {
    require_one_dimension(basis.scenario(), "mode_sum_propagate");
    if (n_max < 0) throw std::invalid_argument("mode_sum_propagate: n_max >= 0");
    require_dark_edges(packet, kEdgeDark, "mode_sum_propagate");
    const auto& g = packet.grid;
    auto out = make_packet(g, t_b);
    std::vector<Complex> product(packet.samples.size());
    for (int n = 0; n <= n_max; ++n) {
        const auto mode_a = eigenmode_packet(basis, part, n, packet.t, g);
        for (std::size_t i = 0; i < product.size(); ++i) product[i] = std::conj(mode_a.samples[i]) * packet.samples[i];
        const Complex c = trapezoid(product, g.dx());
        const auto mode_b = eigenmode_packet(basis, part, n, t_b, g);
        for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += c * mode_b.samples[i];
    }
    return out;
}

WavePacket sho_eigenstate(int n, const GridSpec& grid, double hbar) {
    if (n < 0) throw std::invalid_argument("sho_eigenstate: n >= 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("sho_eigenstate: hbar > 0");
    validate(grid);
    const double k_max = std::sqrt((2.0 * n + 1.0) / hbar);
    const double wavelength = 2.0 * kPi / k_max;
    if (grid.dx() > wavelength / 8.0)
        throw GridTooNarrow(fmt::format("sho_eigenstate: dx = {:.4g} exceeds 1/8 of the local wavelength {:.4g}",
                                        grid.dx(), wavelength));
    const double turning = std::sqrt(hbar * (2.0 * n + 1.0));
    if (grid.x_min > -turning || grid.x_max < turning)
        throw GridTooNarrow("sho_eigenstate: grid does not contain the classical turning points");
    auto out = make_packet(grid, 0.0);
    const double scale = std::pow(hbar, -0.25);
    for (int i = 0; i < grid.n_points; ++i)
        out.samples[static_cast<std::size_t>(i)] = scale * hermite_function(n, grid.x(i) / std::sqrt(hbar));
    require_dark_edges(out, kEdgeDark, "sho_eigenstate");
    return out;
}

WavePacket apply_U_F(const WavePacket& packet, const ParticularSolution& part, double t) {
    const auto& s = part.scenario();
    require_one_dimension(s, "apply_U_F");
    require_dark_edges(packet, kEdgeDark, "apply_U_F");
    const auto q = part.at(t);
    const double mass = s.mass.value(t);
    const TrigInterpolant interp(packet.grid, packet.samples);
    auto out = make_packet(packet.grid, t);
    for (int i = 0; i < packet.grid.n_points; ++i) {
        const double x = packet.grid.x(i);
        const double phase = (q.xi + mass * q.x_dot * x) / s.hbar;
        out.samples[static_cast<std::size_t>(i)] = std::polar(1.0, phase) * interp(x - q.x);
    }
    require_norm_kept(packet, out, "apply_U_F");
    return out;
}

WavePacket apply_U_S(const WavePacket& packet, const ClassicalBasis& basis, double t) {
    const auto& s = basis.scenario();
    require_one_dimension(s, "apply_U_S");
    require_dark_edges(packet, kEdgeDark, "apply_U_S");
    const auto p = basis.at(t);
    const auto r = gho::rho(p);
    const double omega = basis.omega();
    if (!(omega > 0.0)) throw std::invalid_argument("apply_U_S: needs Omega > 0");
    const double stretch = std::sqrt(omega) / r.rho;
    const double jacobian = std::sqrt(stretch);
    const TrigInterpolant interp(packet.grid, packet.samples);
    auto out = make_packet(packet.grid, t);
    for (int i = 0; i < packet.grid.n_points; ++i) {
        const double x = packet.grid.x(i);
        const double phase = p.mass * r.rho_dot * x * x / (2.0 * s.hbar * r.rho);
        out.samples[static_cast<std::size_t>(i)] = std::polar(jacobian, phase) * interp(stretch * x);
    }
    require_norm_kept(packet, out, "apply_U_S");
    return out;
}

WavePacket build_generalized_coherent_state(const ClassicalBasis& basis, const ParticularSolution& part, int n,
                                            double t, const GridSpec& grid) {
    const auto& s = basis.scenario();
    require_one_dimension(s, "build_generalized_coherent_state");
    const auto ground = sho_eigenstate(n, grid, s.hbar);
    auto out = apply_U_F(apply_U_S(ground, basis, t), part, t);
    const double tau = basis.at(t).tau;
    const Complex global = std::polar(1.0, -(n + 0.5) * tau) * f_phase_since_start(s, t);
    const double a = s.a.value(t);
    const double b = s.b.value(t);
    const double mass = s.mass.value(t);
    for (int i = 0; i < grid.n_points; ++i) {
        const double x = grid.x(i);
        out.samples[static_cast<std::size_t>(i)] *= global * std::polar(1.0, (mass * a * x * x + b * x) / s.hbar);
    }
    return out;
}

InvariantExpectation invariant_expectation(const WavePacket& packet, const ClassicalBasis& basis,
                                           const ParticularSolution& part) {
    const auto& s = basis.scenario();
    require_one_dimension(s, "invariant_expectation");
    require_dark_edges(packet, kEdgeDark, "invariant_expectation");
    const double t = packet.t;
    const auto p = basis.at(t);
    const auto r = gho::rho(p);
    const auto q = part.at(t);
    const double omega = basis.omega();
    const double hbar = s.hbar;
    const double mass = p.mass;
    const double a = s.a.value(t);
    const double b = s.b.value(t);
    const auto& g = packet.grid;
    const double dx = g.dx();
    const auto& psi = packet.samples;
    const auto d1 = first_derivative(psi, dx);
    const auto d2 = second_derivative(psi, dx);
    const Complex i_hbar(0.0, hbar);
    const double g_slope = 2.0 * mass * a;

    std::vector<Complex> braket(psi.size());
    std::vector<double> density(psi.size());
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double x = g.x(static_cast<int>(j));
        const double X = x - q.x;
        const double gx = 2.0 * mass * a * x + b + mass * q.x_dot;
        const Complex sym = -i_hbar * (2.0 * X * d1[j] + psi[j]) - 2.0 * X * gx * psi[j];  // (X Pi + Pi X) psi
        const Complex pi2 = -hbar * hbar * d2[j] + i_hbar * (2.0 * gx * d1[j] + g_slope * psi[j]) + gx * gx * psi[j];
        const Complex ipsi = ((omega * omega / (r.rho * r.rho) + mass * mass * r.rho_dot * r.rho_dot) * X * X * psi[j] -
                              mass * r.rho * r.rho_dot * sym + r.rho * r.rho * pi2) /
                             (2.0 * omega);
        braket[j] = std::conj(psi[j]) * ipsi;
        density[j] = std::norm(psi[j]);
    }
    const Complex value = trapezoid(braket, dx) / trapezoid(density, dx);
    return {value.real(), value.imag()};
}

void write_packet_csv(std::ostream& out, const WavePacket& packet, const std::string& scenario_hash) {
    using detail::num;
    const auto& g = packet.grid;
    out << "# t=" << num(packet.t) << '\n';
    out << "# grid=" << num(g.x_min) << ',' << num(g.x_max) << ',' << g.n_points << '\n';
    out << "# scenario=" << scenario_hash << '\n';
    out << "x,re,im,modulus2\n";
    for (int i = 0; i < g.n_points; ++i) {
        const Complex z = packet.samples[static_cast<std::size_t>(i)];
        out << num(g.x(i)) << ',' << num(z.real()) << ',' << num(z.imag()) << ',' << num(std::norm(z)) << '\n';
    }
}

}  // namespace gho

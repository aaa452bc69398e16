#include "gho/propagator.hpp"

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

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double focal_denominator(const BasisPoint& at_t, const BasisPoint& at_a) { return at_t.v * at_a.u - at_t.u * at_a.v; }

// Zeros of D in (t_a, limit]. Brackets come from sign changes over solver
// nodes; the leading sign is sign(Omega) because D ~ (t - t_a) Omega / M(t_a).
std::vector<double> scan_zeros(const ClassicalBasis& basis, double t_a, double limit) {
    constexpr double kRefineWidth = 1e-10;
    const auto pa = basis.at(t_a);
    const auto& nodes = basis.node_times();
    const auto& s = basis.scenario();
    const double skip = 1e-8 * (s.t1 - s.t0);

    auto refine = [&](double lo, int sign_lo, double hi) {
        while (hi - lo > kRefineWidth) {
            const double mid = 0.5 * (lo + hi);
            const int sm = sign_of(focal_denominator(basis.at(mid), pa));
            if (sm == 0) return mid;
            if (sm == sign_lo) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    std::vector<double> zeros;
    int prev_sign = sign_of(basis.omega());
    double prev_t = t_a;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double t = nodes[i];
        if (t <= t_a + skip) continue;
        if (prev_t > limit) break;
        const int sn = sign_of(focal_denominator(basis.node(i), pa));
        if (sn == 0) {
            zeros.push_back(t);
            prev_sign = -prev_sign;
        } else if (sn != prev_sign) {
            zeros.push_back(refine(prev_t, prev_sign, t));
            prev_sign = sn;
        }
        prev_t = t;
    }
    std::erase_if(zeros, [&](double z) { return z > limit; });
    return zeros;
}

}  // namespace

int CausticReport::morse_index(double t_b) const {
    return static_cast<int>(std::count_if(times.begin(), times.end(), [&](double z) { return z < t_b; }));
}

CausticReport caustic_times(const ClassicalBasis& basis, double t_a) {
    return {t_a, scan_zeros(basis, t_a, basis.scenario().t1)};
}

// ---------------------------------------------------------------------------

KernelSlice::KernelSlice(const ClassicalBasis& basis, const ParticularSolution& part, double t_a, double t_b,
                         const CausticTolerance& tol)
    : t_a_(t_a), t_b_(t_b) {
    if (t_a == t_b) throw std::invalid_argument("kernel: equal times are only reachable as the delta limit");
    const auto& s = basis.scenario();
    const double hbar = s.hbar;
    const bool forward = t_b > t_a;
    const double early = std::min(t_a, t_b);
    const double late = std::max(t_a, t_b);

    for (double z : scan_zeros(basis, early, late + tol.time)) {
        if (std::abs(z - late) <= tol.time)
            throw CausticEncountered(fmt::format("kernel: focal point at t = {:.12g}", z), z);
        if (z < late) ++morse_index_;
    }

    const auto pa = basis.at(t_a);
    const auto pb = basis.at(t_b);
    denominator_ = focal_denominator(pb, pa);
    const double scale = std::max(std::abs(pb.u), std::abs(pb.v)) * (std::abs(pa.u) + std::abs(pa.v));
    if (std::abs(denominator_) < tol.relative * scale)
        throw CausticEncountered(fmt::format("kernel: focal point at t = {:.12g}", t_b), t_b);

    const double omega = basis.omega();
    const double d = denominator_;
    coeff_a_ = pa.mass * (pb.u * pa.v_dot - pa.u_dot * pb.v) / (2.0 * hbar * d);
    coeff_b_ = pb.mass * (pa.u * pb.v_dot - pb.u_dot * pa.v) / (2.0 * hbar * d);
    coeff_cross_ = -omega / (hbar * d);

    // Forward in time the phase is exp(-i pi/4) at short times and loses pi/2
    // per focal point; backward kernels are the conjugates.
    const double magnitude = std::sqrt(std::abs(omega / (2.0 * kPi * hbar * d)));
    const double phase = -(kPi / 4.0 + morse_index_ * kPi / 2.0);
    prefactor_ = std::polar(magnitude, forward ? phase : -phase);
    f_phase_ = std::polar(1.0, s.f.integral(t_a, t_b) / hbar);

    const auto xa = part.at(t_a);
    const auto xb = part.at(t_b);
    xp_a_ = xa.x;
    xp_b_ = xb.x;
    gauge_a_ = {pa.mass * s.a.value(t_a) / hbar, (s.b.value(t_a) + pa.mass * xa.x_dot) / hbar, xa.xi / hbar};
    gauge_b_ = {pb.mass * s.a.value(t_b) / hbar, (s.b.value(t_b) + pb.mass * xb.x_dot) / hbar, xb.xi / hbar};
}

Complex KernelSlice::exponent(Complex x_b, Complex x_a) const {
    const Complex X = x_b - xp_b_;
    const Complex Y = x_a - xp_a_;
    const Complex phase = coeff_a_ * Y * Y + coeff_b_ * X * X + coeff_cross_ * X * Y + gauge_b_(x_b) - gauge_a_(x_a);
    return Complex(0.0, 1.0) * phase;
}

Complex KernelSlice::operator()(Complex x_b, Complex x_a) const { return prefactor_ * std::exp(exponent(x_b, x_a)); }

ComplexAmplitude kernel(const ClassicalBasis& basis, const ParticularSolution& part, const KernelQuery& q) {
    const auto n = static_cast<std::size_t>(basis.scenario().dimension);
    if (q.r_a.size() != n || q.r_b.size() != n)
        throw std::invalid_argument(fmt::format("kernel: positions must have {} components", n));
    const KernelSlice slice(basis, part, q.t_a, q.t_b);
    Complex value = slice.f_phase();
    for (std::size_t i = 0; i < n; ++i) value *= slice(q.r_b[i], q.r_a[i]);
    return value;
}

ComplexAmplitude green_function(const ClassicalBasis& basis, const ParticularSolution& part, const KernelQuery& q) {
    if (q.t_b == q.t_a) throw std::invalid_argument("green_function: t_b == t_a");
    if (q.t_b < q.t_a) return {0.0, 0.0};
    return kernel(basis, part, q);
}

// ---------------------------------------------------------------------------

WavePacket propagate(const WavePacket& packet, const ClassicalBasis& basis, const ParticularSolution& part, double t_b,
                     const PropagateOptions& opts) {
    if (basis.scenario().dimension != 1) throw std::invalid_argument("propagate: wave packets are one-dimensional");
    require_dark_edges(packet, opts.edge_threshold, "propagate");
    const KernelSlice slice(basis, part, packet.t, t_b);
    const auto& g = packet.grid;
    const int n = g.n_points;
    const double dx = g.dx();

    // Support of the input; everything outside is numerically zero.
    double peak = 0.0;
    for (const auto& v : packet.samples) peak = std::max(peak, std::abs(v));
    int lo = 0;
    int hi = n - 1;
    while (lo < hi && std::abs(packet.samples[static_cast<std::size_t>(lo)]) <= 1e-16 * peak) ++lo;
    while (hi > lo && std::abs(packet.samples[static_cast<std::size_t>(hi)]) <= 1e-16 * peak) --hi;
    lo = std::max(0, lo - 1);
    hi = std::min(n - 1, hi + 1);
    const double y_lo = g.x(lo);
    const double y_hi = g.x(hi);

    // Local integrand frequency in y is linear in (x, y); its extremes sit on
    // the corners of the (output grid) x (input support) box.
    const TrigInterpolant interp(g, packet.samples);
    const double packet_band = interp.bandwidth(1e-13);
    double kernel_band = 0.0;
    for (double x : {g.x_min, g.x_max}) {
        for (double y : {y_lo, y_hi}) {
            const double rate = 2.0 * slice.coeff_a() * (y - slice.xp_a()) +
                                slice.coeff_cross() * (x - slice.xp_b()) - slice.gauge_a().slope(y);
            kernel_band = std::max(kernel_band, std::abs(rate));
        }
    }
    const double needed = 2.0 * kPi / (opts.oversampling * (kernel_band + packet_band));
    const int refine = std::max(1, static_cast<int>(std::ceil(dx / needed)));
    const double h = dx / refine;
    const int m = (hi - lo) * refine + 1;

    // g_j = w_j psi(y_j) exp(i (A_a Y_j^2 - G_a(y_j))); the y-dependent part of
    // the kernel that does not couple to x.
    std::vector<Complex> weighted(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double y = y_lo + j * h;
        const Complex psi = refine == 1 ? packet.samples[static_cast<std::size_t>(lo + j)] : interp(y);
        const double Y = y - slice.xp_a();
        const double phase = slice.coeff_a() * Y * Y - slice.gauge_a()(y).real();
        const double w = (j == 0 || j == m - 1) ? 0.5 * h : h;
        weighted[static_cast<std::size_t>(j)] = w * psi * std::polar(1.0, phase);
    }

    WavePacket out = make_packet(g, t_b);
    const double y0 = y_lo - slice.xp_a();
    for (int i = 0; i < n; ++i) {
        const double x = g.x(i);
        const double X = x - slice.xp_b();
        const double k = slice.coeff_cross() * X;
        const Complex step = std::polar(1.0, k * h);
        Complex phase;
        Complex acc{};
        for (int j = 0; j < m; ++j) {
            if (j % 256 == 0) phase = std::polar(1.0, k * (y0 + j * h));
            acc += weighted[static_cast<std::size_t>(j)] * phase;
            phase *= step;
        }
        const double outer = slice.coeff_b() * X * X + slice.gauge_b()(x).real();
        out.samples[static_cast<std::size_t>(i)] = slice.prefactor() * slice.f_phase() * std::polar(1.0, outer) * acc;
    }
    return out;
}

double kernel_delta_check(const ClassicalBasis& basis, const ParticularSolution& part, double t_a, double epsilon,
                          const WavePacket& test_packet) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("kernel_delta_check: epsilon must be positive");
    WavePacket start = test_packet;
    start.t = t_a;
    const auto moved = propagate(start, basis, part, t_a + epsilon);
    return l2_distance(moved, start);
}

void write_kernel_scan_csv(std::ostream& out, const ClassicalBasis& basis, const ParticularSolution& part, double t_a,
                           double t_b, std::span<const double> xs_a, std::span<const double> xs_b) {
    using detail::num;
    if (basis.scenario().dimension != 1) throw std::invalid_argument("kernel scan: N = 1 only");
    const KernelSlice slice(basis, part, t_a, t_b);
    out << "t_a,x_a,t_b,x_b,re,im,modulus,phase\n";
    for (double xa : xs_a) {
        for (double xb : xs_b) {
            const Complex k = slice.f_phase() * slice(xb, xa);
            out << num(t_a) << ',' << num(xa) << ',' << num(t_b) << ',' << num(xb) << ',' << num(k.real()) << ','
                << num(k.imag()) << ',' << num(std::abs(k)) << ',' << num(std::arg(k)) << '\n';
        }
    }
}

}  // namespace gho

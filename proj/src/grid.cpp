#include "gho/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "gho/errors.hpp"

namespace gho {

std::vector<double> GridSpec::nodes() const {
    std::vector<double> xs(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) xs[static_cast<std::size_t>(i)] = x(i);
    return xs;
}

void validate(const GridSpec& g) {
    if (!(g.x_min < g.x_max) || !std::isfinite(g.x_min) || !std::isfinite(g.x_max))
        throw std::invalid_argument("grid needs finite x_min < x_max");
    if (g.n_points < 16) throw std::invalid_argument("grid needs at least 16 points");
}

WavePacket make_packet(const GridSpec& g, double t) {
    validate(g);
    return {g, std::vector<Complex>(static_cast<std::size_t>(g.n_points)), t};
}

Complex trapezoid(std::span<const Complex> f, double dx) {
    if (f.empty()) return {};
    Complex acc{};
    for (const auto& v : f) acc += v;
    acc -= 0.5 * (f.front() + f.back());
    return acc * dx;
}

double trapezoid(std::span<const double> f, double dx) {
    if (f.empty()) return 0.0;
    double acc = 0.0;
    for (double v : f) acc += v;
    acc -= 0.5 * (f.front() + f.back());
    return acc * dx;
}

double norm(const WavePacket& p) {
    std::vector<double> density(p.samples.size());
    std::transform(p.samples.begin(), p.samples.end(), density.begin(), [](Complex z) { return std::norm(z); });
    return std::sqrt(trapezoid(density, p.grid.dx()));
}

double l2_distance(const WavePacket& a, const WavePacket& b) {
    if (!(a.grid == b.grid)) throw GridMismatch("l2_distance: packets live on different grids");
    std::vector<double> d(a.samples.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(a.samples[i] - b.samples[i]);
    return std::sqrt(trapezoid(d, a.grid.dx()));
}

double edge_ratio(const WavePacket& p) {
    double peak = 0.0;
    for (const auto& v : p.samples) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0.0;
    return std::max(std::abs(p.samples.front()), std::abs(p.samples.back())) / peak;
}

void require_dark_edges(const WavePacket& p, double threshold, const char* context) {
    const double r = edge_ratio(p);
    if (r > threshold)
        throw GridTooNarrow(fmt::format("{}: edge amplitude ratio {:.3g} exceeds {:.3g}; widen the grid", context, r,
                                        threshold));
}

Moments position_moments(const WavePacket& p) {
    const auto n = p.samples.size();
    std::vector<double> w(n), wx(n), wxx(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = p.grid.x(static_cast<int>(i));
        w[i] = std::norm(p.samples[i]);
        wx[i] = w[i] * x;
        wxx[i] = w[i] * x * x;
    }
    const double dx = p.grid.dx();
    const double mass = trapezoid(w, dx);
    const double mean = trapezoid(wx, dx) / mass;
    // Central second moment, computed about the mean to avoid cancellation.
    for (std::size_t i = 0; i < n; ++i) {
        const double d = p.grid.x(static_cast<int>(i)) - mean;
        wxx[i] = w[i] * d * d;
    }
    return {mean, trapezoid(wxx, dx) / mass};
}

std::vector<Complex> first_derivative(std::span<const Complex> f, double dx) {
    const auto n = f.size();
    if (n < 5) throw std::invalid_argument("first_derivative needs at least 5 samples");
    std::vector<Complex> d(n);
    const double s = 1.0 / (12.0 * dx);
    d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = s * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    d[n - 2] = -s * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] = -s * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    return d;
}

std::vector<Complex> second_derivative(std::span<const Complex> f, double dx) {
    const auto n = f.size();
    if (n < 6) throw std::invalid_argument("second_derivative needs at least 6 samples");
    std::vector<Complex> d(n);
    const double s = 1.0 / (12.0 * dx * dx);
    d[0] = s * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]);
    d[1] = s * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]);
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = s * (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]);
    d[n - 2] = s * (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]);
    d[n - 1] =
        s * (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5] - 10.0 * f[n - 6]);
    return d;
}

// ---------------------------------------------------------------------------

TrigInterpolant::TrigInterpolant(const GridSpec& g, std::span<const Complex> samples)
    : x_min_(g.x_min), period_(g.dx() * g.n_points), n_(g.n_points) {
    if (static_cast<int>(samples.size()) != n_) throw std::invalid_argument("TrigInterpolant: sample count mismatch");
    // Modes m_lo .. m_hi; for even n the Nyquist coefficient is split evenly
    // between +n/2 and -n/2 so the interpolant is real for real data.
    const int half = n_ / 2;
    m_lo_ = -half;
    const int m_hi = half;
    const auto count = static_cast<std::size_t>(m_hi - m_lo_ + 1);
    coefficients_.assign(count, Complex{});

    std::vector<Complex> twiddle(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) twiddle[static_cast<std::size_t>(k)] = std::polar(1.0, -2.0 * std::numbers::pi * k / n_);
    for (int m = m_lo_; m <= m_hi; ++m) {
        Complex acc{};
        const int mm = ((m % n_) + n_) % n_;
        long long idx = 0;
        for (int j = 0; j < n_; ++j) {
            acc += samples[static_cast<std::size_t>(j)] * twiddle[static_cast<std::size_t>(idx)];
            idx += mm;
            if (idx >= n_) idx -= n_;
        }
        coefficients_[static_cast<std::size_t>(m - m_lo_)] = acc / static_cast<double>(n_);
    }
    if (n_ % 2 == 0) {
        coefficients_.front() *= 0.5;
        coefficients_.back() *= 0.5;
    }
}

Complex TrigInterpolant::operator()(double x) const {
    const double s = x - x_min_;
    if (s < 0.0 || s >= period_) return {};
    const double theta = 2.0 * std::numbers::pi * s / period_;
    const Complex step = std::polar(1.0, theta);
    Complex phase = std::polar(1.0, theta * m_lo_);
    Complex acc{};
    for (std::size_t k = 0; k < coefficients_.size(); ++k) {
        // Re-anchor the recurrence periodically to bound rounding drift.
        if (k % 128 == 0) phase = std::polar(1.0, theta * (m_lo_ + static_cast<double>(k)));
        acc += coefficients_[k] * phase;
        phase *= step;
    }
    return acc;
}

std::vector<Complex> TrigInterpolant::evaluate(std::span<const double> xs) const {
    std::vector<Complex> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
    return out;
}

double TrigInterpolant::bandwidth(double rel_cutoff) const {
    double peak = 0.0;
    for (const auto& c : coefficients_) peak = std::max(peak, std::abs(c));
    int widest = 0;
    for (std::size_t k = 0; k < coefficients_.size(); ++k) {
        if (std::abs(coefficients_[k]) > rel_cutoff * peak)
            widest = std::max(widest, std::abs(m_lo_ + static_cast<int>(k)));
    }
    return 2.0 * std::numbers::pi * widest / period_;
}

}  // namespace gho

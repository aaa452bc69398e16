#include "gho/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "format.hpp"
#include "gho/errors.hpp"

namespace gho {

namespace {

constexpr double kPi = std::numbers::pi;

void require_one_dimension(const Scenario& s, const char* what) {
    if (s.dimension != 1) throw std::invalid_argument(fmt::format("{}: wave packets are one-dimensional", what));
}

// Solves a x_{j-1} + b x_j + c x_{j+1} = d in place of d.
void solve_tridiagonal(const std::vector<Complex>& lower, const std::vector<Complex>& diag,
                       const std::vector<Complex>& upper, std::vector<Complex>& rhs) {
    const std::size_t n = diag.size();
    std::vector<Complex> c_prime(n);
    Complex pivot = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) pivot = diag[i] - lower[i] * c_prime[i - 1];
        if (!(std::abs(pivot) > 1e-300) || !std::isfinite(std::abs(pivot)))
            throw LinearSolveFailure(fmt::format("Crank-Nicolson solve: zero pivot at row {}", i));
        c_prime[i] = upper[i] / pivot;
        rhs[i] = (i > 0 ? rhs[i] - lower[i] * rhs[i - 1] : rhs[i]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c_prime[i] * rhs[i + 1];
}

}  // namespace

WavePacket evolve_tdse(const Scenario& s, const WavePacket& packet, double t_end, const EvolverConfig& cfg) {
    require_one_dimension(s, "evolve_tdse");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("evolve_tdse: dt must be positive");
    if (!(packet.grid == cfg.grid)) throw GridMismatch("evolve_tdse: packet grid differs from the evolver grid");
    require_dark_edges(packet, 1e-8, "evolve_tdse");

    const double span = t_end - packet.t;
    WavePacket out = packet;
    out.t = t_end;
    if (span == 0.0) return out;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(span) / cfg.dt - 1e-9)));
    const double h = span / steps;

    const auto& g = cfg.grid;
    const auto n = static_cast<std::size_t>(g.n_points);
    const double dx = g.dx();
    const auto xs = g.nodes();
    const double hbar = s.hbar;
    const Complex i_unit(0.0, 1.0);
    const double lambda = h / (2.0 * hbar);

    std::vector<Complex> lower(n), diag(n), upper(n), rhs(n);
    std::vector<Complex> h_lower(n), h_diag(n), h_upper(n);
    auto& psi = out.samples;
    for (int k = 0; k < steps; ++k) {
        const double tm = packet.t + (k + 0.5) * h;
        const auto c = hamiltonian_snapshot(s, tm);
        const double kin = hbar * hbar / (2.0 * c.mass * dx * dx);
        const double drift = hbar * c.b / (c.mass * 2.0 * dx);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = xs[j];
            h_diag[j] = 2.0 * kin + 0.5 * c.mass * c.c * x * x + c.d * x + c.b * c.b / (2.0 * c.mass) - c.f;
            const double right = j + 1 < n ? hbar * c.a * (x + xs[j + 1]) / (2.0 * dx) : 0.0;
            const double left = j > 0 ? hbar * c.a * (x + xs[j - 1]) / (2.0 * dx) : 0.0;
            h_upper[j] = -kin + i_unit * (right + drift);
            h_lower[j] = -kin - i_unit * (left + drift);
        }
        for (std::size_t j = 0; j < n; ++j) {
            Complex hpsi = h_diag[j] * psi[j];
            if (j > 0) hpsi += h_lower[j] * psi[j - 1];
            if (j + 1 < n) hpsi += h_upper[j] * psi[j + 1];
            rhs[j] = psi[j] - i_unit * lambda * hpsi;
            diag[j] = 1.0 + i_unit * lambda * h_diag[j];
            lower[j] = i_unit * lambda * h_lower[j];
            upper[j] = i_unit * lambda * h_upper[j];
        }
        solve_tridiagonal(lower, diag, upper, rhs);
        psi.swap(rhs);
    }
    require_dark_edges(out, 1e-8, "evolve_tdse");
    return out;
}

std::vector<Complex> apply_hamiltonian(const Scenario& s, double t, const GridSpec& grid,
                                       std::span<const Complex> psi) {
    const auto c = hamiltonian_snapshot(s, t);
    const double dx = grid.dx();
    const auto d1 = first_derivative(psi, dx);
    const auto d2 = second_derivative(psi, dx);
    const double hbar = s.hbar;
    const Complex i_hbar(0.0, hbar);
    std::vector<Complex> out(psi.size());
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double x = grid.x(static_cast<int>(j));
        const double potential = 0.5 * c.mass * c.c * x * x + c.d * x + c.b * c.b / (2.0 * c.mass) - c.f;
        out[j] = -hbar * hbar / (2.0 * c.mass) * d2[j] + i_hbar * c.a * (2.0 * x * d1[j] + psi[j]) +
                 i_hbar * (c.b / c.mass) * d1[j] + potential * psi[j];
    }
    return out;
}

// ---------------------------------------------------------------------------

ComplexAmplitude chain_integral(const ClassicalBasis& basis, const ParticularSolution& part,
                                std::span<const double> times, std::span<const double> r_a,
                                std::span<const double> r_b, const GridSpec& grid) {
    const auto dim = static_cast<std::size_t>(basis.scenario().dimension);
    if (r_a.size() != dim || r_b.size() != dim)
        throw std::invalid_argument(fmt::format("chain_integral: positions must have {} components", dim));
    if (times.size() < 2) throw std::invalid_argument("chain_integral: needs at least two times");
    const bool forward = times.back() > times.front();
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        if (forward ? !(times[k + 1] > times[k]) : !(times[k + 1] < times[k]))
            throw std::invalid_argument("chain_integral: times must be strictly monotone");
    }
    validate(grid);

    const std::size_t steps = times.size() - 1;
    std::vector<KernelSlice> slices;
    slices.reserve(steps);
    Complex value{1.0, 0.0};
    for (std::size_t k = 0; k < steps; ++k) {
        slices.emplace_back(basis, part, times[k], times[k + 1]);
        value *= slices.back().f_phase();
    }
    if (steps == 1) {
        for (std::size_t d = 0; d < dim; ++d) value *= slices[0](r_b[d], r_a[d]);
        return value;
    }

    // Contour centers on the classical path x_p + alpha u + beta v through the
    // endpoints; the whole-interval slice doubles as the caustic check.
    [[maybe_unused]] const KernelSlice whole(basis, part, times.front(), times.back());
    const auto pa = basis.at(times.front());
    const auto pb = basis.at(times.back());
    const double det = pa.u * pb.v - pa.v * pb.u;
    std::vector<BasisPoint> mid_basis;
    std::vector<double> mid_xp;
    for (std::size_t k = 1; k < steps; ++k) {
        mid_basis.push_back(basis.at(times[k]));
        mid_xp.push_back(part.at(times[k]).x);
    }

    const auto m = static_cast<std::size_t>(grid.n_points);
    const double ds = grid.dx();
    const auto nodes = grid.nodes();
    const std::size_t centre = static_cast<std::size_t>(
        std::min_element(nodes.begin(), nodes.end(), [](double p, double q) { return std::abs(p) < std::abs(q); }) -
        nodes.begin());

    // Individual slices can overflow off the real axis even where their
    // product decays, so the recursion runs on logarithms.
    std::vector<double> mag(m);
    auto log_sum = [&](const std::vector<Complex>& logs, std::size_t stage, bool check) {
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& l : logs) top = std::max(top, l.real());
        Complex acc{};
        for (std::size_t j = 0; j < m; ++j) {
            const Complex e = std::exp(logs[j] - top);
            mag[j] = std::abs(e);
            acc += e;
        }
        if (check) {
            const double edge = std::max(mag.front(), mag.back());
            if (edge > 1e-10)
                throw GridTooNarrow(fmt::format(
                    "chain_integral: integrand at the contour ends is {:.3g} of its peak (stage {}); widen the grid",
                    edge, stage));
        }
        return top + std::log(acc);
    };

    for (std::size_t d = 0; d < dim; ++d) {
        const double ya = r_a[d] - part.at(times.front()).x;
        const double yb = r_b[d] - part.at(times.back()).x;
        const double alpha = (ya * pb.v - yb * pa.v) / det;
        const double beta = (pa.u * yb - pb.u * ya) / det;

        // Contour for intermediate variable k (1..steps-1).
        std::vector<std::vector<Complex>> contour(steps);
        std::vector<Complex> direction(steps);
        for (std::size_t k = 1; k < steps; ++k) {
            const auto& p = mid_basis[k - 1];
            const double centre_k = mid_xp[k - 1] + alpha * p.u + beta * p.v;
            const double curvature = slices[k - 1].coeff_b() + slices[k].coeff_a();
            direction[k] = std::polar(1.0, (curvature < 0.0 ? -1.0 : 1.0) * kPi / 8.0);
            contour[k].resize(m);
            for (std::size_t j = 0; j < m; ++j) contour[k][j] = centre_k + nodes[j] * direction[k];
        }
        auto log_weight = [&](std::size_t j, std::size_t k) {
            return std::log(((j == 0 || j + 1 == m) ? 0.5 * ds : ds) * direction[k]);
        };

        Complex log_value{};
        for (std::size_t k = 0; k < steps; ++k) log_value += std::log(slices[k].prefactor());

        std::vector<Complex> cur(m), next(m), terms(m);
        for (std::size_t j = 0; j < m; ++j) cur[j] = slices[0].exponent(contour[1][j], Complex(r_a[d]));
        for (std::size_t k = 1; k + 1 < steps; ++k) {
            for (std::size_t j = 0; j < m; ++j) cur[j] += log_weight(j, k);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) terms[j] = slices[k].exponent(contour[k + 1][i], contour[k][j]) + cur[j];
                next[i] = log_sum(terms, k, i == centre);
            }
            cur.swap(next);
        }
        for (std::size_t j = 0; j < m; ++j)
            terms[j] = slices[steps - 1].exponent(Complex(r_b[d]), contour[steps - 1][j]) + cur[j] + log_weight(j, steps - 1);
        log_value += log_sum(terms, steps - 1, true);
        value *= std::exp(log_value);
    }
    return value;
}

GridSpec default_contour(const ClassicalBasis& basis, const ParticularSolution& part, std::span<const double> times) {
    if (times.size() < 3) return {-1.0, 1.0, 16};
    double loosest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < times.size(); ++k) {
        const KernelSlice before(basis, part, times[k - 1], times[k]);
        const KernelSlice after(basis, part, times[k], times[k + 1]);
        loosest = std::min(loosest, std::abs(before.coeff_b() + after.coeff_a()));
    }
    // Along the rotated contour |e^{iBz^2}| = e^{-|B| s^2 sin(pi/4)} and the
    // phase advances at 2 |B| s cos(pi/4).
    const double decay = loosest * std::sin(kPi / 4.0);
    const double half_width = 16.0 / std::sqrt(decay);
    const double edge_rate = 2.0 * loosest * std::cos(kPi / 4.0) * half_width;
    const int n = static_cast<int>(std::ceil(4.0 * half_width * edge_rate / kPi)) | 1;
    return {-half_width, half_width, std::max(n, 101)};
}

ComplexAmplitude path_integral_oracle(const ClassicalBasis& basis, const ParticularSolution& part,
                                      const KernelQuery& q, int n_slices, const GridSpec& grid) {
    if (n_slices < 1) throw std::invalid_argument("path_integral_oracle: n_slices >= 1");
    if (n_slices == 1) return kernel(basis, part, q);
    std::vector<double> times(static_cast<std::size_t>(n_slices) + 1);
    for (int k = 0; k <= n_slices; ++k) times[static_cast<std::size_t>(k)] = q.t_a + (q.t_b - q.t_a) * k / n_slices;
    times.back() = q.t_b;
    return chain_integral(basis, part, times, q.r_a, q.r_b, grid);
}

ComplexAmplitude composition_oracle(const ClassicalBasis& basis, const ParticularSolution& part, double t_a,
                                    std::span<const double> r_a, double t_b, double t_c, std::span<const double> r_c,
                                    const GridSpec& grid) {
    const double times[] = {t_a, t_b, t_c};
    return chain_integral(basis, part, times, r_a, r_c, grid);
}

// ---------------------------------------------------------------------------

std::vector<double> residual_map(const Field& field, const Scenario& s, double t, const GridSpec& grid) {
    require_one_dimension(s, "schrodinger_residual");
    validate(grid);
    constexpr double kDt = 1e-5;
    const auto n = static_cast<std::size_t>(grid.n_points);
    std::vector<Complex> now(n), later(n), earlier(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.x(static_cast<int>(j));
        now[j] = field(t, x);
        later[j] = field(t + kDt, x);
        earlier[j] = field(t - kDt, x);
    }
    const auto hpsi = apply_hamiltonian(s, t, grid, now);
    const Complex i_hbar(0.0, s.hbar);
    std::vector<double> residual;
    double scale = 0.0;
    for (std::size_t j = 2; j + 2 < n; ++j) {
        const Complex dt_psi = (later[j] - earlier[j]) / (2.0 * kDt);
        residual.push_back(std::abs(-i_hbar * dt_psi + hpsi[j]));
        scale = std::max(scale, std::abs(hpsi[j]));
    }
    if (scale > 0.0)
        for (auto& r : residual) r /= scale;
    return residual;
}

double schrodinger_residual(const Field& field, const Scenario& s, double t, const GridSpec& grid) {
    const auto r = residual_map(field, s, t, grid);
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

void write_residual_csv(std::ostream& out, const Field& field, const Scenario& s, double t, const GridSpec& grid) {
    using detail::num;
    const auto r = residual_map(field, s, t, grid);
    out << "x,residual\n";
    for (std::size_t j = 0; j < r.size(); ++j) out << num(grid.x(static_cast<int>(j + 2))) << ',' << num(r[j]) << '\n';
}

ComplexAmplitude inner_product(const WavePacket& p1, const WavePacket& p2) {
    return inner_product(p1, p2, [](double) { return 1.0; });
}

ComplexAmplitude inner_product(const WavePacket& p1, const WavePacket& p2, const std::function<double(double)>& weight) {
    if (!(p1.grid == p2.grid)) throw GridMismatch("inner_product: packets live on different grids");
    if (p1.t != p2.t) throw GridMismatch("inner_product: packets are at different times");
    std::vector<Complex> f(p1.samples.size());
    for (std::size_t j = 0; j < f.size(); ++j)
        f[j] = std::conj(p1.samples[j]) * weight(p1.grid.x(static_cast<int>(j))) * p2.samples[j];
    return trapezoid(f, p1.grid.dx());
}

}  // namespace gho

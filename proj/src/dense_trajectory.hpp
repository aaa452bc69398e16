#pragma once

// Adaptive Runge-Kutta-Fehlberg 7(8) integration with checkpointed dense
// output. Evaluating at an arbitrary time re-integrates from the nearest
// preceding checkpoint with the same tolerances, so every evaluation carries
// solver accuracy (no low-order interpolant between nodes).

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "gho/errors.hpp"

namespace gho::detail {

struct OdeTolerance {
    double relative = 1e-10;
    double absolute = 1e-12;
};

template <std::size_t Dim>
class DenseTrajectory {
public:
    using State = std::array<double, Dim>;
    /// rhs(y, dydt, t, at_segment_end): at_segment_end asks for left-limit
    /// coefficient values (piecewise coefficients jump at segment ends).
    using Rhs = std::function<void(const State&, State&, double, bool)>;

    DenseTrajectory() = default;

    DenseTrajectory(Rhs rhs, double t0, double t1, const std::vector<double>& breakpoints, const State& y0,
                    OdeTolerance tol, double max_step)
        : rhs_(std::move(rhs)), tol_(tol), t0_(t0), t1_(t1) {
        segment_ends_ = breakpoints;
        segment_ends_.push_back(t1);

        State y = y0;
        record(t0, y);
        double lo = t0;
        for (double hi : segment_ends_) {
            const int chunks = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_step)));
            for (int c = 0; c < chunks; ++c) {
                const double a = lo + (hi - lo) * c / chunks;
                const double b = c + 1 == chunks ? hi : lo + (hi - lo) * (c + 1) / chunks;
                integrate(y, a, b, hi, this);
            }
            lo = hi;
        }
    }

    double t0() const { return t0_; }
    double t1() const { return t1_; }
    const std::vector<double>& node_times() const { return times_; }
    const State& node_state(std::size_t i) const { return states_[i]; }
    std::size_t node_count() const { return times_.size(); }

    /// Solution at t. Times slightly outside [t0, t1] are reached by continued
    /// integration (finite-difference stencils near the ends need this).
    State at(double t) const {
        const double margin = 1e-3 * (t1_ - t0_) + 1e-6;
        if (!(t >= t0_ - margin && t <= t1_ + margin))
            throw std::out_of_range(fmt::format("time {:.17g} outside the solved interval [{:.17g}, {:.17g}]", t,
                                                t0_, t1_));
        if (t <= t0_) {
            State y = states_.front();
            if (t < t0_) integrate(y, t0_, t, t0_ - 1.0, nullptr);
            return y;
        }
        auto it = std::upper_bound(times_.begin(), times_.end(), t);
        const auto k = static_cast<std::size_t>(it - times_.begin()) - 1;
        State y = states_[k];
        if (times_[k] == t) return y;
        integrate(y, times_[k], t, segment_end_after(times_[k], t), nullptr);
        return y;
    }

private:
    void record(double t, const State& y) {
        times_.push_back(t);
        states_.push_back(y);
    }

    // First coefficient segment end strictly after `from`; beyond t1 there is none.
    double segment_end_after(double from, double target) const {
        auto it = std::upper_bound(segment_ends_.begin(), segment_ends_.end(), from);
        return it != segment_ends_.end() ? *it : target + 1.0;
    }

    // Integrates y from `from` to `to`; when `sink` is set, every accepted step
    // is recorded as a checkpoint.
    void integrate(State& y, double from, double to, double segment_hi, DenseTrajectory* sink) const {
        namespace odeint = boost::numeric::odeint;
        if (from == to) return;
        const double hi_tol = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(segment_hi) + 1.0);
        // Backward integration never sits at a segment end from the left.
        const bool forward = to > from;
        auto system = [&](const State& x, State& dxdt, double t) {
            rhs_(x, dxdt, t, forward && t >= segment_hi - hi_tol);
        };
        auto stepper = odeint::make_controlled(tol_.absolute, tol_.relative, odeint::runge_kutta_fehlberg78<State>());
        double dt = to - from;
        if (sink) dt = std::copysign(std::min(std::abs(dt), 0.05 * std::abs(to - from) + 1e-3), dt);
        try {
            if (sink) {
                odeint::integrate_adaptive(stepper, system, y, from, to, dt, [&](const State& x, double t) {
                    if (t == from) return;
                    for (double v : x)
                        if (!std::isfinite(v)) throw IntegrationFailure("non-finite classical solution");
                    sink->record(t, x);
                });
                // The final accepted step may miss `to` by an ulp.
                sink->times_.back() = to;
            } else {
                odeint::integrate_adaptive(stepper, system, y, from, to, dt);
            }
        } catch (const IntegrationFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw IntegrationFailure(std::string("classical integration failed: ") + e.what());
        }
        for (double v : y)
            if (!std::isfinite(v)) throw IntegrationFailure("non-finite classical solution");
    }

    Rhs rhs_;
    OdeTolerance tol_;
    double t0_ = 0.0;
    double t1_ = 0.0;
    std::vector<double> segment_ends_;
    std::vector<double> times_;
    std::vector<State> states_;
};

}  // namespace gho::detail

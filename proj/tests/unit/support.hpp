#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "gho/classical.hpp"
#include "gho/params.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

inline gho::Scenario scenario(const std::string& yaml) { return gho::load_scenario(yaml); }

inline gho::Scenario sho(double t0 = 0.0, double t1 = 8.0) {
    gho::Scenario s;
    s.t0 = t0;
    s.t1 = t1;
    return s;
}

inline gho::Scenario free_particle(double t0 = 0.0, double t1 = 4.0) {
    auto s = sho(t0, t1);
    s.frequency = gho::CoefficientFn::constant(0.0);
    return s;
}

inline gho::Scenario parametric(double t1 = 6.0) {
    return scenario("interval: [0, " + std::to_string(t1) +
                    "]\n"
                    "frequency: {kind: sinusoidal, amplitude: 0.1, omega: 2, offset: 1}\n");
}

// Every coefficient time dependent and the gauge terms switched on.
inline gho::Scenario gauge_heavy() {
    return scenario(R"(interval: [0, 3]
mass: {kind: polynomial, coefficients: [1.0, 0.2]}
frequency: {kind: sinusoidal, amplitude: 0.2, omega: 1.3, offset: 1.1}
force: {kind: sinusoidal, amplitude: 0.5, omega: 0.7}
a: {kind: polynomial, coefficients: [0.1, 0.05]}
b: {kind: sinusoidal, amplitude: 0.3, omega: 1.0}
f: {kind: polynomial, coefficients: [0.2, -0.1]}
)");
}

// Mehler kernel of the unit SHO; t in (0, pi).
inline std::complex<double> mehler(double t, double xb, double xa, double hbar = 1.0) {
    const double s = std::sin(t);
    const std::complex<double> pref = std::sqrt(1.0 / (2.0 * pi * hbar * s)) * std::polar(1.0, -pi / 4.0);
    const double phase = ((xa * xa + xb * xb) * std::cos(t) - 2.0 * xa * xb) / (2.0 * hbar * s);
    return pref * std::polar(1.0, phase);
}

inline std::complex<double> free_kernel(double t, double xb, double xa, double hbar = 1.0, double mass = 1.0) {
    const std::complex<double> pref = std::sqrt(mass / (2.0 * pi * hbar * t)) * std::polar(1.0, -pi / 4.0);
    return pref * std::polar(1.0, mass * (xb - xa) * (xb - xa) / (2.0 * hbar * t));
}

inline double rel_err(std::complex<double> got, std::complex<double> want) { return std::abs(got - want) / std::abs(want); }

}  // namespace testing

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace gho {

// Closed set of analytic coefficient shapes. Each carries an exact
// derivative and antiderivative.
struct Constant {
    double value = 0.0;
};

/// c0 + c1 t + c2 t^2 + ...
struct Polynomial {
    std::vector<double> coefficients;
};

/// amplitude * cos(omega t + phase) + offset
struct Sinusoidal {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    double offset = 0.0;
};

/// values[i] on [breakpoints[i-1], breakpoints[i]); values.size() == breakpoints.size() + 1.
/// Exactly at a breakpoint the right-limit value applies.
struct PiecewiseConstant {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

/// amplitude * exp(rate t)
struct Exponential {
    double amplitude = 0.0;
    double rate = 0.0;
};

struct ValueAndDerivative {
    double value;
    double derivative;
};

class CoefficientFn {
public:
    using Variant = std::variant<Constant, Polynomial, Sinusoidal, PiecewiseConstant, Exponential>;

    CoefficientFn() : form_(Constant{0.0}) {}
    CoefficientFn(Variant form);  // NOLINT(google-explicit-constructor)
    template <class Kind>
        requires std::is_constructible_v<Variant, Kind>
    CoefficientFn(Kind kind) : CoefficientFn(Variant(std::move(kind))) {}  // NOLINT(google-explicit-constructor)

    static CoefficientFn constant(double v) { return CoefficientFn(Constant{v}); }

    ValueAndDerivative evaluate(double t) const;
    double value(double t) const { return evaluate(t).value; }
    double derivative(double t) const { return evaluate(t).derivative; }

    /// Left limit at t; differs from value(t) only on piecewise breakpoints.
    double left_value(double t) const;

    /// Exact integral over [from, to].
    double integral(double from, double to) const;

    /// Breakpoints (empty unless piecewise-constant).
    std::vector<double> breakpoints() const;

    std::string_view kind_name() const;
    const Variant& form() const { return form_; }

    bool is_constant() const { return std::holds_alternative<Constant>(form_); }
    bool operator==(const CoefficientFn& other) const;

private:
    Variant form_;
};

/// (eval_coefficient) value and analytic first derivative at t.
inline ValueAndDerivative eval_coefficient(const CoefficientFn& fn, double t) { return fn.evaluate(t); }

/// Initial data (value, time derivative) for one classical solution.
struct InitialData {
    double x = 0.0;
    double x_dot = 0.0;
    bool operator==(const InitialData&) const = default;
};

struct BasisInitialData {
    InitialData u;
    InitialData v;
    bool operator==(const BasisInitialData&) const = default;
};

/// A time-dependent quadratic system: L = sum_i [M x_i'^2/2 - M w^2 x_i^2/2 + F x_i
///   + d/dt(M a x_i^2) + d/dt(b x_i)] + f, on the interval [t0, t1].
struct Scenario {
    int dimension = 1;
    double hbar = 1.0;
    double t0 = 0.0;
    double t1 = 1.0;
    CoefficientFn mass = CoefficientFn::constant(1.0);
    CoefficientFn frequency = CoefficientFn::constant(1.0);
    CoefficientFn force = CoefficientFn::constant(0.0);
    CoefficientFn a = CoefficientFn::constant(0.0);
    CoefficientFn b = CoefficientFn::constant(0.0);
    CoefficientFn f = CoefficientFn::constant(0.0);

    // Optional classical initial data carried by the scenario file.
    std::optional<BasisInitialData> basis;
    std::optional<InitialData> particular;

    bool operator==(const Scenario& other) const;

    /// Breakpoints of M, w and F strictly inside (t0, t1), sorted and unique.
    std::vector<double> ode_breakpoints() const;
};

/// Throws ValidationError when an invariant is violated.
void validate(const Scenario& s);

/// Parses YAML scenario text. ParseError on malformed text, ValidationError on
/// invariant violations.
Scenario load_scenario(std::string_view config_text);
Scenario load_scenario_file(const std::string& path);

/// YAML text that load_scenario maps back to an equal Scenario.
std::string serialize_scenario(const Scenario& s);

/// FNV-1a of the serialized scenario, 16 hex digits.
std::string scenario_hash(const Scenario& s);

struct HamiltonianCoeffs {
    double c;  ///< w^2 + 4a^2 - 2 a' - 2 (M'/M) a
    double d;  ///< 2ab - b' - F
};

HamiltonianCoeffs hamiltonian_coefficients(const Scenario& s, double t);

/// All coefficient functions of the Hamiltonian
///   H = p^2/2M - a(xp+px) + M c x^2/2 - (b/M) p + d x + (b^2/2M - f)
/// evaluated at one time.
struct HamiltonianSnapshot {
    double mass;
    double a;
    double b;
    double f;
    double c;
    double d;
};

HamiltonianSnapshot hamiltonian_snapshot(const Scenario& s, double t);

}  // namespace gho

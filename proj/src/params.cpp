#include "gho/params.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "gho/errors.hpp"

namespace gho {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Index of the piece containing t; right-limit semantics at breakpoints.
std::size_t piece_index(const PiecewiseConstant& p, double t) {
    return static_cast<std::size_t>(std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t) -
                                    p.breakpoints.begin());
}

double polynomial_value(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double polynomial_derivative(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * t + static_cast<double>(k) * c[k];
    return acc;
}

double polynomial_antiderivative(const std::vector<double>& c, double t) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * t + c[k] / static_cast<double>(k + 1);
    return acc * t;
}

}  // namespace

CoefficientFn::CoefficientFn(Variant form) : form_(std::move(form)) {}

ValueAndDerivative CoefficientFn::evaluate(double t) const {
    return std::visit(
        Overloaded{
            [](const Constant& c) { return ValueAndDerivative{c.value, 0.0}; },
            [t](const Polynomial& p) {
                return ValueAndDerivative{polynomial_value(p.coefficients, t),
                                          polynomial_derivative(p.coefficients, t)};
            },
            [t](const Sinusoidal& s) {
                const double arg = s.omega * t + s.phase;
                return ValueAndDerivative{s.amplitude * std::cos(arg) + s.offset,
                                          -s.amplitude * s.omega * std::sin(arg)};
            },
            [t](const PiecewiseConstant& p) { return ValueAndDerivative{p.values[piece_index(p, t)], 0.0}; },
            [t](const Exponential& e) {
                const double v = e.amplitude * std::exp(e.rate * t);
                return ValueAndDerivative{v, e.rate * v};
            },
        },
        form_);
}

double CoefficientFn::left_value(double t) const {
    if (const auto* p = std::get_if<PiecewiseConstant>(&form_)) {
        const auto idx = static_cast<std::size_t>(
            std::lower_bound(p->breakpoints.begin(), p->breakpoints.end(), t) - p->breakpoints.begin());
        return p->values[idx];
    }
    return value(t);
}

double CoefficientFn::integral(double from, double to) const {
    return std::visit(
        Overloaded{
            [&](const Constant& c) { return c.value * (to - from); },
            [&](const Polynomial& p) {
                return polynomial_antiderivative(p.coefficients, to) - polynomial_antiderivative(p.coefficients, from);
            },
            [&](const Sinusoidal& s) {
                double osc = 0.0;
                if (s.omega != 0.0) {
                    osc = s.amplitude / s.omega * (std::sin(s.omega * to + s.phase) - std::sin(s.omega * from + s.phase));
                } else {
                    osc = s.amplitude * std::cos(s.phase) * (to - from);
                }
                return osc + s.offset * (to - from);
            },
            [&](const PiecewiseConstant& p) {
                const double sign = to >= from ? 1.0 : -1.0;
                const double lo = std::min(from, to);
                const double hi = std::max(from, to);
                double acc = 0.0;
                double cursor = lo;
                std::size_t idx = piece_index(p, lo);
                while (cursor < hi) {
                    const double next = idx < p.breakpoints.size() ? std::min(hi, p.breakpoints[idx]) : hi;
                    acc += p.values[idx] * (next - cursor);
                    cursor = next;
                    ++idx;
                }
                return sign * acc;
            },
            [&](const Exponential& e) {
                if (e.rate == 0.0) return e.amplitude * (to - from);
                return e.amplitude / e.rate * (std::exp(e.rate * to) - std::exp(e.rate * from));
            },
        },
        form_);
}

std::vector<double> CoefficientFn::breakpoints() const {
    if (const auto* p = std::get_if<PiecewiseConstant>(&form_)) return p->breakpoints;
    return {};
}

std::string_view CoefficientFn::kind_name() const {
    return std::visit(Overloaded{
                          [](const Constant&) { return std::string_view("constant"); },
                          [](const Polynomial&) { return std::string_view("polynomial"); },
                          [](const Sinusoidal&) { return std::string_view("sinusoidal"); },
                          [](const PiecewiseConstant&) { return std::string_view("piecewise"); },
                          [](const Exponential&) { return std::string_view("exponential"); },
                      },
                      form_);
}

bool CoefficientFn::operator==(const CoefficientFn& other) const {
    if (form_.index() != other.form_.index()) return false;
    return std::visit(
        [&](const auto& lhs) {
            using T = std::decay_t<decltype(lhs)>;
            const auto& rhs = std::get<T>(other.form_);
            if constexpr (std::is_same_v<T, Constant>) return lhs.value == rhs.value;
            if constexpr (std::is_same_v<T, Polynomial>) return lhs.coefficients == rhs.coefficients;
            if constexpr (std::is_same_v<T, Sinusoidal>)
                return lhs.amplitude == rhs.amplitude && lhs.omega == rhs.omega && lhs.phase == rhs.phase &&
                       lhs.offset == rhs.offset;
            if constexpr (std::is_same_v<T, PiecewiseConstant>)
                return lhs.breakpoints == rhs.breakpoints && lhs.values == rhs.values;
            if constexpr (std::is_same_v<T, Exponential>) return lhs.amplitude == rhs.amplitude && lhs.rate == rhs.rate;
        },
        form_);
}

bool Scenario::operator==(const Scenario& o) const {
    return dimension == o.dimension && hbar == o.hbar && t0 == o.t0 && t1 == o.t1 && mass == o.mass &&
           frequency == o.frequency && force == o.force && a == o.a && b == o.b && f == o.f && basis == o.basis &&
           particular == o.particular;
}

std::vector<double> Scenario::ode_breakpoints() const {
    std::set<double> points;
    for (const auto* fn : {&mass, &frequency, &force}) {
        for (double bp : fn->breakpoints()) {
            if (bp > t0 && bp < t1) points.insert(bp);
        }
    }
    return {points.begin(), points.end()};
}

// ---------------------------------------------------------------------------
// validation

namespace {

void check_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw ValidationError(what + " must be finite");
}

void validate_coefficient(const CoefficientFn& fn, const std::string& name) {
    std::visit(Overloaded{
                   [&](const Constant& c) { check_finite(c.value, name + ".value"); },
                   [&](const Polynomial& p) {
                       for (double c : p.coefficients) check_finite(c, name + ".coefficients");
                   },
                   [&](const Sinusoidal& s) {
                       check_finite(s.amplitude, name + ".amplitude");
                       check_finite(s.omega, name + ".omega");
                       check_finite(s.phase, name + ".phase");
                       check_finite(s.offset, name + ".offset");
                   },
                   [&](const PiecewiseConstant& p) {
                       if (p.values.size() != p.breakpoints.size() + 1)
                           throw ValidationError(name + ": piecewise needs exactly one more value than breakpoints");
                       for (double v : p.values) check_finite(v, name + ".values");
                       for (std::size_t i = 0; i < p.breakpoints.size(); ++i) {
                           check_finite(p.breakpoints[i], name + ".breakpoints");
                           if (i > 0 && !(p.breakpoints[i] > p.breakpoints[i - 1]))
                               throw ValidationError(name + ": breakpoints must be strictly increasing");
                       }
                   },
                   [&](const Exponential& e) {
                       check_finite(e.amplitude, name + ".amplitude");
                       check_finite(e.rate, name + ".rate");
                   },
               },
               fn.form());
}

}  // namespace

void validate(const Scenario& s) {
    if (s.dimension < 1) throw ValidationError("dimension must be >= 1");
    check_finite(s.hbar, "hbar");
    if (!(s.hbar > 0.0)) throw ValidationError("hbar must be positive");
    check_finite(s.t0, "interval start");
    check_finite(s.t1, "interval end");
    if (!(s.t0 < s.t1)) throw ValidationError("interval must satisfy t0 < t1");
    validate_coefficient(s.mass, "mass");
    validate_coefficient(s.frequency, "frequency");
    validate_coefficient(s.force, "force");
    validate_coefficient(s.a, "a");
    validate_coefficient(s.b, "b");
    validate_coefficient(s.f, "f");

    constexpr int samples = 2000;
    auto check_mass = [&](double t, double m) {
        if (!(m > 0.0) || !std::isfinite(m))
            throw ValidationError(fmt::format("mass must be positive on the interval; M({:.17g}) = {:.17g}", t, m));
    };
    for (int k = 0; k <= samples; ++k) {
        const double t = s.t0 + (s.t1 - s.t0) * k / samples;
        check_mass(t, s.mass.value(t));
    }
    for (double bp : s.mass.breakpoints()) {
        if (bp >= s.t0 && bp <= s.t1) {
            check_mass(bp, s.mass.value(bp));
            check_mass(bp, s.mass.left_value(bp));
        }
    }
    if (s.basis) {
        for (double v : {s.basis->u.x, s.basis->u.x_dot, s.basis->v.x, s.basis->v.x_dot})
            check_finite(v, "basis initial data");
    }
    if (s.particular) {
        check_finite(s.particular->x, "particular.x0");
        check_finite(s.particular->x_dot, "particular.xdot0");
    }
}

// ---------------------------------------------------------------------------
// YAML schema

namespace {

double as_double(const YAML::Node& node, const std::string& what) {
    if (!node || !node.IsScalar()) throw ParseError(what + ": expected a number");
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        throw ParseError(what + ": expected a number, got '" + node.Scalar() + "'");
    }
}

std::vector<double> as_doubles(const YAML::Node& node, const std::string& what) {
    if (!node || !node.IsSequence()) throw ParseError(what + ": expected a list of numbers");
    std::vector<double> out;
    out.reserve(node.size());
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(as_double(node[i], what));
    return out;
}

void reject_unknown_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParseError(where + ": unknown key '" + key + "'");
    }
}

double optional_double(const YAML::Node& map, const char* key, double fallback, const std::string& where) {
    const auto node = map[key];
    if (!node) return fallback;
    return as_double(node, where + "." + key);
}

CoefficientFn parse_coefficient(const YAML::Node& node, const std::string& name) {
    if (node.IsScalar()) return CoefficientFn::constant(as_double(node, name));
    if (!node.IsMap()) throw ParseError(name + ": expected a number or a mapping with 'kind'");
    const auto kind_node = node["kind"];
    if (!kind_node) throw ParseError(name + ": missing 'kind'");
    const auto kind = kind_node.as<std::string>();
    if (kind == "constant") {
        reject_unknown_keys(node, {"kind", "value"}, name);
        return Constant{as_double(node["value"], name + ".value")};
    }
    if (kind == "polynomial") {
        reject_unknown_keys(node, {"kind", "coefficients"}, name);
        return Polynomial{as_doubles(node["coefficients"], name + ".coefficients")};
    }
    if (kind == "sinusoidal") {
        reject_unknown_keys(node, {"kind", "amplitude", "omega", "phase", "offset"}, name);
        return Sinusoidal{as_double(node["amplitude"], name + ".amplitude"), as_double(node["omega"], name + ".omega"),
                          optional_double(node, "phase", 0.0, name), optional_double(node, "offset", 0.0, name)};
    }
    if (kind == "piecewise") {
        reject_unknown_keys(node, {"kind", "breakpoints", "values"}, name);
        return PiecewiseConstant{as_doubles(node["breakpoints"], name + ".breakpoints"),
                                 as_doubles(node["values"], name + ".values")};
    }
    if (kind == "exponential") {
        reject_unknown_keys(node, {"kind", "amplitude", "rate"}, name);
        return Exponential{as_double(node["amplitude"], name + ".amplitude"), as_double(node["rate"], name + ".rate")};
    }
    throw ParseError(name + ": unknown kind '" + kind + "'");
}

void emit_coefficient(YAML::Emitter& out, const char* name, const CoefficientFn& fn) {
    out << YAML::Key << name << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << std::string(fn.kind_name());
    std::visit(Overloaded{
                   [&](const Constant& c) { out << YAML::Key << "value" << YAML::Value << c.value; },
                   [&](const Polynomial& p) {
                       out << YAML::Key << "coefficients" << YAML::Value << YAML::Flow << p.coefficients;
                   },
                   [&](const Sinusoidal& s) {
                       out << YAML::Key << "amplitude" << YAML::Value << s.amplitude;
                       out << YAML::Key << "omega" << YAML::Value << s.omega;
                       out << YAML::Key << "phase" << YAML::Value << s.phase;
                       out << YAML::Key << "offset" << YAML::Value << s.offset;
                   },
                   [&](const PiecewiseConstant& p) {
                       out << YAML::Key << "breakpoints" << YAML::Value << YAML::Flow << p.breakpoints;
                       out << YAML::Key << "values" << YAML::Value << YAML::Flow << p.values;
                   },
                   [&](const Exponential& e) {
                       out << YAML::Key << "amplitude" << YAML::Value << e.amplitude;
                       out << YAML::Key << "rate" << YAML::Value << e.rate;
                   },
               },
               fn.form());
    out << YAML::EndMap;
}

}  // namespace

Scenario load_scenario(std::string_view config_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(config_text));
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("malformed scenario: ") + e.what());
    }
    if (!root.IsMap()) throw ParseError("scenario must be a mapping");
    reject_unknown_keys(root,
                        {"dimension", "hbar", "interval", "mass", "frequency", "force", "a", "b", "f", "basis",
                         "particular"},
                        "scenario");

    Scenario s;
    if (const auto n = root["dimension"]) {
        const double d = as_double(n, "dimension");
        if (d != std::floor(d)) throw ParseError("dimension must be an integer");
        s.dimension = static_cast<int>(d);
    }
    if (const auto n = root["hbar"]) s.hbar = as_double(n, "hbar");
    const auto interval = root["interval"];
    if (!interval) throw ParseError("scenario: missing 'interval'");
    const auto bounds = as_doubles(interval, "interval");
    if (bounds.size() != 2) throw ParseError("interval must be [t0, t1]");
    s.t0 = bounds[0];
    s.t1 = bounds[1];

    if (const auto n = root["mass"]) s.mass = parse_coefficient(n, "mass");
    if (const auto n = root["frequency"]) s.frequency = parse_coefficient(n, "frequency");
    if (const auto n = root["force"]) s.force = parse_coefficient(n, "force");
    if (const auto n = root["a"]) s.a = parse_coefficient(n, "a");
    if (const auto n = root["b"]) s.b = parse_coefficient(n, "b");
    if (const auto n = root["f"]) s.f = parse_coefficient(n, "f");

    if (const auto n = root["basis"]) {
        if (!n.IsMap()) throw ParseError("basis: expected a mapping");
        reject_unknown_keys(n, {"u0", "udot0", "v0", "vdot0"}, "basis");
        s.basis = BasisInitialData{{as_double(n["u0"], "basis.u0"), as_double(n["udot0"], "basis.udot0")},
                                   {as_double(n["v0"], "basis.v0"), as_double(n["vdot0"], "basis.vdot0")}};
    }
    if (const auto n = root["particular"]) {
        if (!n.IsMap()) throw ParseError("particular: expected a mapping");
        reject_unknown_keys(n, {"x0", "xdot0"}, "particular");
        s.particular = InitialData{as_double(n["x0"], "particular.x0"), as_double(n["xdot0"], "particular.xdot0")};
    }
    validate(s);
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_scenario(buffer.str());
}

std::string serialize_scenario(const Scenario& s) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "dimension" << YAML::Value << s.dimension;
    out << YAML::Key << "hbar" << YAML::Value << s.hbar;
    out << YAML::Key << "interval" << YAML::Value << YAML::Flow << std::vector<double>{s.t0, s.t1};
    emit_coefficient(out, "mass", s.mass);
    emit_coefficient(out, "frequency", s.frequency);
    emit_coefficient(out, "force", s.force);
    emit_coefficient(out, "a", s.a);
    emit_coefficient(out, "b", s.b);
    emit_coefficient(out, "f", s.f);
    if (s.basis) {
        out << YAML::Key << "basis" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "u0" << YAML::Value << s.basis->u.x;
        out << YAML::Key << "udot0" << YAML::Value << s.basis->u.x_dot;
        out << YAML::Key << "v0" << YAML::Value << s.basis->v.x;
        out << YAML::Key << "vdot0" << YAML::Value << s.basis->v.x_dot;
        out << YAML::EndMap;
    }
    if (s.particular) {
        out << YAML::Key << "particular" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "x0" << YAML::Value << s.particular->x;
        out << YAML::Key << "xdot0" << YAML::Value << s.particular->x_dot;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string scenario_hash(const Scenario& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : serialize_scenario(s)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return fmt::format("{:016x}", h);
}

// ---------------------------------------------------------------------------

HamiltonianCoeffs hamiltonian_coefficients(const Scenario& s, double t) {
    const auto [m, m_dot] = s.mass.evaluate(t);
    const auto [w, w_dot] = s.frequency.evaluate(t);
    const auto [a, a_dot] = s.a.evaluate(t);
    const auto [b, b_dot] = s.b.evaluate(t);
    const double force = s.force.value(t);
    (void)w_dot;
    return {w * w + 4.0 * a * a - 2.0 * a_dot - 2.0 * (m_dot / m) * a, 2.0 * a * b - b_dot - force};
}

HamiltonianSnapshot hamiltonian_snapshot(const Scenario& s, double t) {
    const auto hc = hamiltonian_coefficients(s, t);
    return {s.mass.value(t), s.a.value(t), s.b.value(t), s.f.value(t), hc.c, hc.d};
}

}  // namespace gho

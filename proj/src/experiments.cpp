#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "format.hpp"
#include "gho/classical.hpp"
#include "gho/cli.hpp"
#include "gho/errors.hpp"
#include "gho/oracle.hpp"
#include "gho/propagator.hpp"
#include "gho/states.hpp"

namespace gho::cli {

namespace {

using detail::num;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

template <class T>
T parse_number(const std::string& text, const char* flag) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw std::invalid_argument(fmt::format("{}: '{}' is not a number", flag, text));
    return value;
}

std::vector<double> parse_list(const std::string& text, const char* flag, std::size_t expected = 0) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_number<double>(part, flag));
    if (expected != 0 && out.size() != expected)
        throw std::invalid_argument(fmt::format("{}: expected {} comma-separated values", flag, expected));
    return out;
}

std::filesystem::path prepare_out_dir(const ExperimentSpec& spec) {
    std::filesystem::path dir(spec.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    return f;
}

std::vector<double> default_times(const Scenario& s, const ExperimentSpec& spec, int count) {
    if (!spec.times.empty()) return spec.times;
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = s.t0 + (s.t1 - s.t0) * k / (count - 1);
    return t;
}

// Analytic propagation that splits the step when the direct kernel would sit
// on a focal point.
WavePacket propagate_robust(const WavePacket& p, const ClassicalBasis& basis, const ParticularSolution& part,
                            double t_b, int depth = 0) {
    try {
        return propagate(p, basis, part, t_b);
    } catch (const CausticEncountered&) {
        if (depth > 4) throw;
        const double mid = p.t + 0.5 * (t_b - p.t);
        return propagate_robust(propagate_robust(p, basis, part, mid, depth + 1), basis, part, t_b, depth + 1);
    }
}

struct Frame {
    ClassicalBasis basis;
    ParticularSolution part;
};

Frame frame(const Scenario& s) { return {solve_homogeneous_basis(s), solve_particular(s)}; }

int run_kernel_scan(const Scenario& s, const ExperimentSpec& spec, std::ostream& out) {
    const auto f = frame(s);
    const auto times = spec.times.empty() ? std::vector<double>{s.t0, s.t0 + std::min(1.0, s.t1 - s.t0)} : spec.times;
    if (times.size() != 2) throw std::invalid_argument("kernel-scan: --times takes exactly t_a,t_b");
    const auto xs = spec.grid.value_or(GridSpec{-5.0, 5.0, 21}).nodes();
    const auto path = prepare_out_dir(spec) / "kernel_scan.csv";
    auto file = open_csv(path);
    write_kernel_scan_csv(file, f.basis, f.part, times[0], times[1], xs, xs);
    out << "wrote " << path.string() << '\n';
    return kExitOk;
}

int run_modes(const Scenario& s, const ExperimentSpec& spec, std::ostream& out) {
    const auto f = frame(s);
    const auto [n0, n1] = spec.modes.value_or(std::pair{0, 3});
    const auto times = spec.times.empty() ? std::vector<double>{s.t0} : spec.times;
    const auto grid = spec.grid.value_or(GridSpec{-10.0, 10.0, 1024});
    const auto dir = prepare_out_dir(spec);
    const auto hash = scenario_hash(s);
    auto summary = open_csv(dir / "modes.csv");
    summary << "n,t,norm,file\n";
    for (int n = n0; n <= n1; ++n) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto packet = eigenmode_packet(f.basis, f.part, n, times[k], grid);
            const auto name = fmt::format("mode_n{}_t{}.csv", n, k);
            auto file = open_csv(dir / name);
            write_packet_csv(file, packet, hash);
            summary << n << ',' << num(times[k]) << ',' << num(norm(packet)) << ',' << name << '\n';
        }
    }
    out << "wrote " << (dir / "modes.csv").string() << '\n';
    return kExitOk;
}

int run_evolve(const Scenario& s, const ExperimentSpec& spec, std::ostream& out) {
    const auto f = frame(s);
    const int n = spec.modes ? spec.modes->first : 0;
    const auto times = default_times(s, spec, 5);
    const auto grid = spec.grid.value_or(GridSpec{-10.0, 10.0, 2048});
    const double dt = spec.tolerances.contains("dt") ? spec.tolerances.at("dt") : default_tolerances().at("dt");
    const auto dir = prepare_out_dir(spec);
    const auto hash = scenario_hash(s);

    auto analytic = eigenmode_packet(f.basis, f.part, n, times.front(), grid);
    auto numeric = analytic;
    auto summary = open_csv(dir / "evolve.csv");
    summary << "t,norm,mean,variance,tdse_distance\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0) {
            analytic = propagate_robust(analytic, f.basis, f.part, times[k]);
            numeric = evolve_tdse(s, numeric, times[k], {dt, grid});
        }
        const auto m = position_moments(analytic);
        summary << num(times[k]) << ',' << num(norm(analytic)) << ',' << num(m.mean) << ',' << num(m.variance) << ','
                << num(l2_distance(analytic, numeric)) << '\n';
        auto file = open_csv(dir / fmt::format("packet_t{}.csv", k));
        write_packet_csv(file, analytic, hash);
    }
    out << "wrote " << (dir / "evolve.csv").string() << '\n';
    return kExitOk;
}

int run_invariant(const Scenario& s, const ExperimentSpec& spec, std::ostream& out) {
    const auto f = frame(s);
    const int n = spec.modes ? spec.modes->first : 0;
    const auto times = default_times(s, spec, 11);
    const auto grid = spec.grid.value_or(GridSpec{-10.0, 10.0, 8192});
    auto tol = default_tolerances();
    for (const auto& [k, v] : spec.tolerances) tol[k] = v;
    const auto dir = prepare_out_dir(spec);

    // A mode of the frame displaced by one unit: not an eigenstate of I.
    const auto ics = default_particular_ics(s);
    const auto shifted = solve_particular(s, InitialData{ics.x + 1.0, ics.x_dot});
    auto packet = eigenmode_packet(f.basis, shifted, n, times.front(), grid);

    auto file = open_csv(dir / "invariant.csv");
    file << "t,value,imaginary\n";
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0) packet = evolve_tdse(s, packet, times[k], {tol.at("dt"), grid});
        const auto inv = invariant_expectation(packet, f.basis, f.part);
        lo = std::min(lo, inv.value);
        hi = std::max(hi, inv.value);
        file << num(times[k]) << ',' << num(inv.value) << ',' << num(inv.imaginary) << '\n';
    }
    const double spread = (hi - lo) / std::abs(0.5 * (hi + lo));
    const CheckResult r{"invariant.spread", spread, tol.at("invariant.spread"),
                        spread <= tol.at("invariant.spread") ? Status::Pass : Status::Fail, {}};
    out << "wrote " << (dir / "invariant.csv").string() << '\n' << format_check(r) << '\n';
    return r.status == Status::Pass ? kExitOk : kExitFailure;
}

int run_coherent(const Scenario& s, const ExperimentSpec& spec, std::ostream& out) {
    const auto f = frame(s);
    const int n = spec.modes ? spec.modes->first : 0;
    const auto times = default_times(s, spec, 9);
    const auto grid = spec.grid.value_or(GridSpec{-10.0, 10.0, 1024});
    const auto dir = prepare_out_dir(spec);
    const auto hash = scenario_hash(s);
    auto summary = open_csv(dir / "coherent.csv");
    summary << "t,mean,variance,x_p,squeeze_variance,tau\n";
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        const auto packet = build_generalized_coherent_state(f.basis, f.part, n, t, grid);
        const auto m = position_moments(packet);
        const auto r = rho(f.basis, t);
        summary << num(t) << ',' << num(m.mean) << ',' << num(m.variance) << ',' << num(f.part.at(t).x) << ','
                << num(s.hbar * r.rho * r.rho / (2.0 * f.basis.omega())) << ',' << num(tau_map(f.basis, t)) << '\n';
        auto file = open_csv(dir / fmt::format("coherent_t{}.csv", k));
        write_packet_csv(file, packet, hash);
    }
    auto classical = open_csv(dir / "classical.csv");
    write_classical_csv(classical, f.basis, f.part, times);
    out << "wrote " << (dir / "coherent.csv").string() << '\n';
    return kExitOk;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw std::invalid_argument("--grid: expected xmin,xmax,n");
    GridSpec g{parse_number<double>(parts[0], "--grid"), parse_number<double>(parts[1], "--grid"),
               parse_number<int>(parts[2], "--grid")};
    validate(g);
    return g;
}

std::vector<double> parse_times(const std::string& text) { return parse_list(text, "--times"); }

std::pair<int, int> parse_modes(const std::string& text) {
    const auto dots = text.find("..");
    const int n0 = parse_number<int>(text.substr(0, dots), "--modes");
    const int n1 = dots == std::string::npos ? n0 : parse_number<int>(text.substr(dots + 2), "--modes");
    if (n0 < 0 || n1 < n0) throw std::invalid_argument("--modes: need 0 <= n0 <= n1");
    return {n0, n1};
}

std::optional<BasisInitialData> parse_basis(const std::string& text) {
    if (text == "default") return std::nullopt;
    const std::string prefix = "custom:";
    if (text.rfind(prefix, 0) != 0) throw std::invalid_argument("--basis: expected default or custom:u0,udot0,v0,vdot0");
    const auto v = parse_list(text.substr(prefix.size()), "--basis", 4);
    return BasisInitialData{{v[0], v[1]}, {v[2], v[3]}};
}

InitialData parse_xp(const std::string& text) {
    const auto v = parse_list(text, "--xp", 2);
    return {v[0], v[1]};
}

std::pair<std::string, double> parse_tolerance(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--tol: expected name=value");
    auto name = text.substr(0, eq);
    if (!default_tolerances().contains(name)) throw std::invalid_argument(fmt::format("--tol: unknown name '{}'", name));
    return {name, parse_number<double>(text.substr(eq + 1), "--tol")};
}

int run(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
    Scenario s;
    try {
        s = load_scenario_file(spec.scenario_path);
        if (spec.basis) s.basis = spec.basis;
        if (spec.xp) s.particular = spec.xp;
        validate(s);
        for (const auto& [name, value] : spec.tolerances) {
            if (!default_tolerances().contains(name)) throw std::invalid_argument("unknown tolerance " + name);
            if (!(value > 0.0)) throw std::invalid_argument("tolerance " + name + " must be positive");
        }
    } catch (const std::exception& e) {
        err << "gho " << spec.command << ": " << spec.scenario_path << ": " << e.what() << '\n';
        return kExitInputError;
    }

    try {
        if (spec.command == "verify") {
            const auto results = run_verify(s, spec, out);
            const bool failed =
                std::any_of(results.begin(), results.end(), [](const CheckResult& r) { return r.status == Status::Fail; });
            return failed ? kExitFailure : kExitOk;
        }
        if (spec.command == "kernel-scan") return run_kernel_scan(s, spec, out);
        if (spec.command == "modes") return run_modes(s, spec, out);
        if (spec.command == "evolve") return run_evolve(s, spec, out);
        if (spec.command == "invariant") return run_invariant(s, spec, out);
        if (spec.command == "coherent") return run_coherent(s, spec, out);
        err << "gho: unknown command '" << spec.command << "'\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        err << "gho " << spec.command << ": " << spec.scenario_path << ": " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace gho::cli

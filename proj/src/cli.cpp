#include "mcflow/cli.hpp"

#include "mcflow/errors.hpp"
#include "mcflow/exact.hpp"
#include "mcflow/exec.hpp"
#include "mcflow/flow.hpp"
#include "mcflow/trajectory_io.hpp"
#include "mcflow/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#ifndef MCFLOW_VERSION
#define MCFLOW_VERSION "0.0.0"
#endif

namespace mcf::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string version() { return MCFLOW_VERSION; }

namespace {

/// A usage problem found after CLI11 parsing succeeded.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------- config file

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// key=value lines; blank lines and lines starting with '#' are skipped.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw UsageError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto key = trim(line.substr(0, eq));
        if (key.starts_with("--"))
            key.erase(0, 2);
        entries.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return entries;
}

/// Fills options not given on the command line from the config file.
void apply_config(CLI::App& app, CLI::App& sub, const std::string& path)
{
    for (const auto& [key, value] : read_config(path)) {
        if (key == "config")
            throw UsageError("config files cannot include other config files");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (!opt)
            opt = app.get_option_no_throw("--" + key);
        if (!opt)
            throw UsageError("unknown config key '" + key + "'");
        if (opt->count() > 0)
            continue;
        if (opt->get_expected_min() == 0) {
            if (value != "true" && value != "false")
                throw UsageError("config key '" + key + "' expects true or false");
            if (value == "false")
                continue;
        }
        opt->add_result(value);
        opt->run_callback();
    }
}

/// Resolved value of every option of `sub`, for the manifest.
ordered_json resolved_options(const CLI::App& sub)
{
    ordered_json cfg = ordered_json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config")
            continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results())
                value += (value.empty() ? "" : ",") + r;
        }
        else {
            value = opt->get_expected_min() == 0 ? "false" : opt->get_default_str();
        }
        cfg[name] = value;
    }
    return cfg;
}

// ---------------------------------------------------------------- manifest

struct Manifest {
    std::string command;
    std::vector<std::string> argv;
    std::optional<std::string> config_file;
    ordered_json config;
    ordered_json seeds = ordered_json::object();
    std::vector<std::string> outputs;
};

/// Written to a temporary name and renamed into place.
void write_manifest(const fs::path& dir, const Manifest& m, double wall_seconds, int exit_code)
{
    ordered_json j;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["config_file"] = m.config_file ? ordered_json(*m.config_file) : ordered_json(nullptr);
    j["config"] = m.config;
    j["seeds"] = m.seeds;
    j["threads"] = thread_count();
    j["version"] = version();
    j["wall_seconds"] = wall_seconds;
    j["outputs"] = m.outputs;
    j["exit_code"] = exit_code;

    const fs::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream os(tmp);
        if (!os)
            throw std::runtime_error("cannot write " + tmp.string());
        os << j.dump(2) << '\n';
        if (!os)
            throw std::runtime_error("failed writing " + tmp.string());
    }
    fs::rename(tmp, dir / "manifest.json");
}

void write_text(const fs::path& dir, const std::string& name, const std::string& text, std::vector<std::string>& outputs,
                const std::string& prefix = {})
{
    std::ofstream os(dir / name);
    if (!os)
        throw std::runtime_error("cannot write " + (dir / name).string());
    os << text;
    outputs.push_back(prefix + name);
}

// ---------------------------------------------------------------- parsing helpers

ParamGrid parse_grid(const std::string& text, Topology topology)
{
    static const std::regex re(R"((\d+)(?:x(\d+))?)");
    std::smatch m;
    if (!std::regex_match(text, m, re))
        throw UsageError("--grid expects WxH, got '" + text + "'");
    const int a = std::stoi(m[1].str());
    const bool has_b = m[2].matched;
    const int b = has_b ? std::stoi(m[2].str()) : 1;
    ParamGrid grid;
    switch (topology) {
    case Topology::Circle:
        if (b != 1)
            throw UsageError("a circle grid is N or Nx1");
        grid = ParamGrid::circle(a);
        break;
    case Topology::Torus2:
    case Topology::LatLongSphere:
        if (!has_b)
            throw UsageError("--grid expects WxH for a surface");
        grid = topology == Topology::Torus2 ? ParamGrid::torus(a, b) : ParamGrid::lat_long(a, b);
        break;
    }
    grid.validate();
    return grid;
}

Perturbation parse_perturbation(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw UsageError("--perturb expects amp:mode, got '" + text + "'");
    Perturbation p;
    try {
        std::size_t used = 0;
        p.amplitude = std::stod(text.substr(0, colon), &used);
        if (used != colon)
            throw std::invalid_argument("amplitude");
        const auto mode_text = text.substr(colon + 1);
        p.mode = std::stoi(mode_text, &used);
        if (used != mode_text.size())
            throw std::invalid_argument("mode");
    }
    catch (const std::exception&) {
        throw UsageError("--perturb expects amp:mode, got '" + text + "'");
    }
    return p;
}

TimeWindow parse_window(const std::string& text)
{
    TimeWindow w;
    if (text.empty())
        return w;
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw UsageError("--window expects tmin:tmax (either side may be empty)");
    try {
        const auto lo = text.substr(0, colon);
        const auto hi = text.substr(colon + 1);
        if (!lo.empty())
            w.t_min = std::stod(lo);
        if (!hi.empty())
            w.t_max = std::stod(hi);
    }
    catch (const std::exception&) {
        throw UsageError("bad --window '" + text + "'");
    }
    if (!(w.t_min < w.t_max))
        throw UsageError("--window needs tmin < tmax");
    return w;
}

std::string csv_line(std::initializer_list<double> values)
{
    std::string s;
    for (double v : values)
        s += (s.empty() ? "" : ",") + format17(v);
    return s + '\n';
}

Topology topology_for(const SolutionSpec& spec)
{
    switch (spec.kind) {
    case SolutionKind::Sphere:
        return spec.n == 1 ? Topology::Circle : Topology::LatLongSphere;
    case SolutionKind::Veronese:
        return Topology::LatLongSphere;
    case SolutionKind::Cylinder:
    case SolutionKind::TorusSeed:
        return Topology::Torus2;
    case SolutionKind::GeodesicCapSphere:
        break;
    }
    throw UsageError("spec '" + std::string(solution_name(spec.kind)) + "' cannot be simulated");
}

std::string default_grid(Topology t)
{
    switch (t) {
    case Topology::Circle:
        return "256";
    case Topology::Torus2:
        return "64x64";
    case Topology::LatLongSphere:
        return "64x128";
    }
    return {};
}

/// Captured defaults must round-trip exactly so a manifest reproduces a run.
void exact_defaults(CLI::App& sub)
{
    for (CLI::Option* opt : sub.get_options()) {
        const std::string& d = opt->get_default_str();
        if (d == "{}") {
            opt->default_str("");
            continue;
        }
        char* end = nullptr;
        const double v = std::strtod(d.c_str(), &end);
        if (!d.empty() && end && *end == '\0' && d.find_first_of(".eE") != std::string::npos)
            opt->default_str(format17(v));
    }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string spec = "sphere";
    int n = 2;
    int k = 1;
    int m = 1;
    double radius = 1;
    double length = 2 * std::numbers::pi;
    std::string grid;
    std::string perturb = "0:0";
    std::string mode = "forward";
    std::optional<double> t_start;
    double t_end = 0;
    double cfl = 0.2;
    std::string integrator = "rk4";
    long max_steps = 1'000'000;
    double blowup_cap = std::numeric_limits<double>::infinity();
    int snapshot_every = 10;
    std::vector<double> record_times;
    std::optional<double> pinch_c;
    double pinch_a = 0;
    double sigma = 0.1;
    double p = 10;
    bool no_polar_filter = false;
    std::string out;
};

void add_simulate_options(CLI::App& sub, SimulateArgs& a)
{
    sub.add_option("--spec", a.spec, "sphere, cylinder, veronese or torus")
        ->check(CLI::IsMember({"sphere", "cylinder", "veronese", "torus"}));
    sub.add_option("--n", a.n, "intrinsic dimension (1 or 2)");
    sub.add_option("--k", a.k, "codimension (veronese: 3, torus: 2 unless given)");
    sub.add_option("--m", a.m, "flat factor dimension of a cylinder");
    sub.add_option("--radius", a.radius, "radius at the start time");
    sub.add_option("--length", a.length, "period of the cylinder's flat factor");
    sub.add_option("--grid", a.grid, "WxH (N for a circle); default 64x128, 64x64 or 256");
    sub.add_option("--perturb", a.perturb, "radial perturbation amp:mode");
    sub.add_option("--mode", a.mode, "forward or ancient")->check(CLI::IsMember({"forward", "ancient"}));
    sub.add_option("--t-start", a.t_start, "start time (forward: 0, ancient: the time with singularity at 0)");
    sub.add_option("--t-end", a.t_end, "end time");
    sub.add_option("--cfl", a.cfl, "CFL factor");
    sub.add_option("--integrator", a.integrator)->check(CLI::IsMember({"rk4", "euler"}));
    sub.add_option("--max-steps", a.max_steps);
    sub.add_option("--blowup-cap", a.blowup_cap, "stop once max |h|^2 exceeds this");
    sub.add_option("--snapshot-every", a.snapshot_every, "record every N steps");
    sub.add_option("--record-times", a.record_times, "extra record times")->delimiter(',');
    sub.add_option("--pinch-c", a.pinch_c, "c of the pinching quantity (default 4/(3n))");
    sub.add_option("--pinch-a", a.pinch_a, "a of the pinching quantity");
    sub.add_option("--sigma", a.sigma, "sigma of the f_sigma functional");
    sub.add_option("--p", a.p, "exponent of the f_sigma functional");
    sub.add_flag("--no-polar-filter", a.no_polar_filter, "disable the longitude filter near the poles");
    sub.add_option("--out", a.out, "output directory")->required();
    sub.get_option("--length")->default_str(format17(a.length));
    exact_defaults(sub);
}

int cmd_simulate(CLI::App& sub, SimulateArgs& a, Manifest& manifest, std::ostream& out, std::ostream& err)
{
    SolutionSpec spec;
    spec.kind = parse_solution(a.spec);
    spec.n = a.n;
    spec.k = a.k;
    if (sub.get_option("--k")->count() == 0) {
        if (spec.kind == SolutionKind::Veronese)
            spec.k = 3;
        else if (spec.kind == SolutionKind::TorusSeed)
            spec.k = 2;
    }
    spec.m = a.m;
    spec.radius = a.radius;
    spec.length = a.length;
    spec.perturbation = parse_perturbation(a.perturb);

    FlowConfig cfg;
    cfg.mode = parse_mode(a.mode);
    double t_start = 0;
    if (a.t_start)
        t_start = *a.t_start;
    else if (cfg.mode == FlowMode::Ancient)
        t_start = -a.radius * a.radius / (2 * homothetic_rate(spec));
    spec.t0 = t_start;
    spec.validate();

    const Topology topology = topology_for(spec);
    const ParamGrid grid = parse_grid(a.grid.empty() ? default_grid(topology) : a.grid, topology);

    cfg.cfl = a.cfl;
    cfg.integrator = parse_integrator(a.integrator);
    cfg.t_end = a.t_end;
    cfg.max_steps = a.max_steps;
    cfg.stop_on_blowup = a.blowup_cap;
    cfg.snapshot_every = a.snapshot_every;
    cfg.record_times = a.record_times;
    cfg.pinch.c = a.pinch_c.value_or(4.0 / (3.0 * spec.n));
    cfg.pinch.a = a.pinch_a;
    cfg.pinch.sigma = a.sigma;
    cfg.pinch.p = a.p;
    cfg.polar_filter = !a.no_polar_filter;
    if (cfg.t_end < t_start)
        throw UsageError("--t-end must not precede the start time " + format17(t_start));
    if (cfg.mode == FlowMode::Ancient && cfg.t_end >= 0)
        throw UsageError("ancient runs must end before t = 0");
    cfg.validate();

    manifest.config["resolved_t_start"] = t_start;
    manifest.config["resolved_k"] = spec.k;
    manifest.config["resolved_grid"] = std::to_string(grid.res[0]) + "x" + std::to_string(grid.res[1]);
    manifest.config["resolved_pinch_c"] = cfg.pinch.c;

    const DiscreteImmersion seed = seed_immersion(spec, grid, t_start);
    const Trajectory traj = run(seed, cfg);

    const fs::path dir = a.out;
    fs::create_directories(dir);
    manifest.outputs = save_trajectory(dir, traj);

    const auto& last = traj.diagnostics.back();
    const auto& first = traj.diagnostics.front();
    out << "stop=" << stop_name(traj.stop) << " records=" << traj.diagnostics.size() << " steps=" << last.step
        << " t=" << format17(last.t) << '\n';
    out << "area_ratio=" << format17(last.area / first.area) << " maxRatio=" << format17(last.maxRatio)
        << " maxH=" << format17(last.maxH) << '\n';
    if (traj.T_singular)
        out << "T_estimate=" << format17(*traj.T_singular) << '\n';
    if (!traj.message.empty())
        err << traj.message << '\n';

    switch (traj.stop) {
    case StopReason::EndTime:
    case StopReason::MaxSteps:
        return kOk;
    case StopReason::Blowup:
        return kBlowup;
    case StopReason::Degenerate:
        return kDegenerate;
    }
    return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    std::string suite;
    long samples = 10000;
    std::uint64_t seed = 42;
    std::optional<int> n;
    std::optional<int> k;
    std::optional<double> c;
    std::optional<double> eps;
    std::optional<double> delta;
    double R_amb = 1;
    std::string out;
};

void add_verify_options(CLI::App& sub, VerifyArgs& a)
{
    sub.add_option("--suite", a.suite,
                   "lemma31, operator-pinch, reaction, adapted-r2, reaction-gap, sphere-case1, sphere-case2, f-bound or all")
        ->required();
    sub.add_option("--samples", a.samples, "samples per (n, k) cell");
    sub.add_option("--seed", a.seed, "master seed");
    sub.add_option("--n", a.n, "restrict to one intrinsic dimension");
    sub.add_option("--k", a.k, "restrict to one codimension");
    sub.add_option("--c", a.c, "pinching ratio for the reaction suite");
    sub.add_option("--eps", a.eps, "operator-pinch margin or sphere offset eps");
    sub.add_option("--delta", a.delta, "sphere-case1 pinching slack");
    sub.add_option("--R-amb", a.R_amb, "ambient sphere radius");
    sub.add_option("--out", a.out, "directory for fuzz_report.csv and manifest.json");
    exact_defaults(sub);
}

int cmd_verify(const VerifyArgs& a, Manifest& manifest, std::ostream& out)
{
    if (!is_suite(a.suite))
        throw UsageError("unknown suite '" + a.suite + "'");
    if (a.samples < 1)
        throw UsageError("--samples must be positive");
    VerifyOptions opt;
    opt.samples = a.samples;
    opt.seed = a.seed;
    opt.n = a.n;
    opt.k = a.k;
    opt.c = a.c;
    opt.eps = a.eps;
    opt.delta = a.delta;
    opt.R_amb = a.R_amb;
    manifest.seeds["seed"] = a.seed;

    out << "seed=" << a.seed << '\n';
    const auto rows = run_suite(a.suite, opt);
    std::ostringstream csv;
    write_fuzz_csv(csv, rows);
    out << csv.str();

    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows)
        if (r.asserted)
            worst = std::min(worst, r.worstMargin);
    const long violations = total_violations(rows);
    out << "violations=" << violations << " worstMargin=" << format17(worst) << '\n';

    if (!a.out.empty()) {
        const fs::path dir = a.out;
        fs::create_directories(dir);
        write_text(dir, "fuzz_report.csv", csv.str(), manifest.outputs);
    }
    return violations > 0 ? kViolations : kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string in;
    std::string rescale;
    std::vector<double> t_j;
    std::vector<double> taus;
    std::string window;
    bool fit_area_decay = false;
    bool classify = false;
    std::string out;
};

void add_report_options(CLI::App& sub, ReportArgs& a)
{
    sub.add_option("--in", a.in, "trajectory directory written by simulate")->required();
    sub.add_option("--rescale", a.rescale, "type1 or type2")->check(CLI::IsMember({"type1", "type2"}));
    sub.add_option("--t-j", a.t_j, "type-I base times (negative)")->delimiter(',');
    sub.add_option("--taus", a.taus, "type-I rescaled times (default 11 values in [-2, -1])")->delimiter(',');
    sub.add_option("--window", a.window, "time window tmin:tmax for type2 and the area fit");
    sub.add_flag("--fit-area-decay", a.fit_area_decay, "fit area = c |t - t_ref|^r");
    sub.add_flag("--classify", a.classify, "type-I / type-II classification");
    sub.add_option("--out", a.out, "output directory (default <in>/report)");
    exact_defaults(sub);
}

/// Three base times spread over the admissible range [t_first / 2, t_last].
std::vector<double> default_t_j(const Trajectory& traj)
{
    const double lo = traj.diagnostics.front().t / 2;
    const double hi = traj.diagnostics.back().t;
    if (!(lo < 0) || !(hi < 0) || lo > hi)
        throw DataError("trajectory too short for type-I rescaling; pass --t-j");
    return {lo, 0.5 * (lo + hi), hi};
}

int cmd_report(const ReportArgs& a, Manifest& manifest, std::ostream& out)
{
    if (a.rescale.empty() && !a.fit_area_decay && !a.classify)
        throw UsageError("report needs --rescale, --fit-area-decay or --classify");
    const TimeWindow window = parse_window(a.window);
    const Trajectory traj = load_trajectory(a.in);
    if (traj.diagnostics.empty())
        throw DataError("trajectory has no records");

    const fs::path dir = a.out.empty() ? fs::path(a.in) / "report" : fs::path(a.out);
    fs::create_directories(dir);
    auto& outputs = manifest.outputs;

    if (a.classify) {
        TypeClass tc;
        try {
            tc = classify_type(traj);
        }
        catch (const std::invalid_argument& e) {
            throw DataError(std::string("cannot classify: ") + e.what());
        }
        char line[160];
        std::snprintf(line, sizeof line, "%s C2=%.6f C=%.6f growth=%.3e", tc.type_I ? "TypeI" : "TypeII", tc.C2, tc.C,
                      tc.growth);
        out << line << '\n';
        write_text(dir, "classification.csv",
                   std::string("type,C2,C,growth,records\n") + (tc.type_I ? "I," : "II,") + format17(tc.C2) + "," +
                       format17(tc.C) + "," + format17(tc.growth) + "," + std::to_string(traj.diagnostics.size()) +
                       "\n",
                   outputs);
    }

    if (a.fit_area_decay) {
        double t_ref = 0;
        if (traj.mode == FlowMode::Forward) {
            if (!traj.T_singular)
                throw DataError("forward trajectory has no singular time estimate");
            t_ref = *traj.T_singular;
        }
        const AreaFit fit = fit_area_decay(traj.diagnostics, window, t_ref);
        if (fit.points < 2)
            throw DataError("fewer than two records in the area-fit window");
        out << "area-decay c=" << format17(fit.c) << " r=" << format17(fit.r) << " points=" << fit.points << '\n';
        write_text(dir, "area_fit.csv",
                   "c,r,points,t_ref,t_min,t_max\n" + format17(fit.c) + "," + format17(fit.r) + "," +
                       std::to_string(fit.points) + "," + format17(t_ref) + "," + format17(window.t_min) + "," +
                       format17(window.t_max) + "\n",
                   outputs);
    }

    if (a.rescale == "type2") {
        const RescaleResult res = blowup_type2(traj, window);
        const auto& slice = res.trajectory.diagnostics[res.base_index];
        out << "type2 L=" << format17(res.L) << " base_node=" << res.base_node << " base_time=" << format17(res.base_time)
            << " maxH(tau=0)=" << format17(slice.maxH) << '\n';
        for (const auto& rel : save_trajectory(dir / "type2", res.trajectory))
            outputs.push_back("type2/" + rel);
        write_text(dir, "type2_summary.csv",
                   "L,base_node,base_time,base_index,maxH_tau0\n" + format17(res.L) + "," +
                       std::to_string(res.base_node) + "," + format17(res.base_time) + "," +
                       std::to_string(res.base_index) + "," + format17(slice.maxH) + "\n",
                   outputs);
    }
    else if (a.rescale == "type1") {
        if (traj.mode != FlowMode::Ancient)
            throw DataError("type-I rescaling needs an ancient trajectory");
        const auto t_js = a.t_j.empty() ? default_t_j(traj) : a.t_j;
        const auto taus = a.taus.empty() ? default_type1_taus() : a.taus;
        std::string table = "t_j,tau,mean_radius\n";
        for (std::size_t j = 0; j < t_js.size(); ++j) {
            RescaleResult res;
            try {
                res = rescale_type1(traj, t_js[j], taus);
            }
            catch (const std::invalid_argument& e) {
                throw DataError(std::string("type-I rescaling: ") + e.what());
            }
            const std::string sub = "type1/tj_" + std::to_string(j);
            for (const auto& rel : save_trajectory(dir / sub, res.trajectory))
                outputs.push_back(sub + "/" + rel);
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (std::size_t i = 0; i < taus.size(); ++i) {
                const double r = mean_radius(res.trajectory.snapshots[i]);
                lo = std::min(lo, r);
                hi = std::max(hi, r);
                table += csv_line({t_js[j], taus[i], r});
            }
            out << "type1 t_j=" << format17(t_js[j]) << " radius in [" << format17(lo) << ", " << format17(hi)
                << "]\n";
        }
        write_text(dir, "type1.csv", table, outputs);
    }

    // report writes next to its inputs; the manifest goes with the outputs
    manifest.config["resolved_out"] = dir.string();
    return kOk;
}

}  // namespace

// ---------------------------------------------------------------- entry

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const auto started = std::chrono::steady_clock::now();

    CLI::App app{"Mean curvature flow of pinched submanifolds: simulation, inequality fuzzing and reports", "mcflow"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", version());
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0: hardware count)")->envname("MCF_THREADS");
    std::string config_path;

    SimulateArgs sim_args;
    VerifyArgs ver_args;
    ReportArgs rep_args;
    CLI::App* sim = app.add_subcommand("simulate", "flow an exact solution seed");
    CLI::App* ver = app.add_subcommand("verify", "run a randomized inequality suite");
    CLI::App* rep = app.add_subcommand("report", "rescale, fit and classify a stored trajectory");
    for (CLI::App* sub : {sim, ver, rep}) {
        sub->fallthrough();
        sub->add_option("--config", config_path, "key=value file; command-line flags take precedence");
    }
    add_simulate_options(*sim, sim_args);
    add_verify_options(*ver, ver_args);
    add_report_options(*rep, rep_args);

    CLI::App* active = nullptr;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        active = app.get_subcommands().front();
        if (!config_path.empty())
            apply_config(app, *active, config_path);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    }
    catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsage;
    }
    catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    set_thread_count(threads);

    Manifest manifest;
    manifest.command = active->get_name();
    manifest.argv = args;
    if (!config_path.empty())
        manifest.config_file = config_path;
    manifest.config = resolved_options(*active);
    manifest.config["threads"] = threads;

    int code = kOk;
    std::optional<fs::path> manifest_dir;
    try {
        if (active == sim) {
            manifest_dir = sim_args.out;
            code = cmd_simulate(*sim, sim_args, manifest, out, err);
        }
        else if (active == ver) {
            code = cmd_verify(ver_args, manifest, out);
            if (!ver_args.out.empty())
                manifest_dir = ver_args.out;
        }
        else {
            code = cmd_report(rep_args, manifest, out);
            manifest_dir = manifest.config["resolved_out"].get<std::string>();
        }
    }
    catch (const DegenerateGeometryError& e) {
        err << "degenerate geometry: " << e.what() << '\n';
        return kDegenerate;
    }
    catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    }
    catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n' << active->help();
        return kUsage;
    }
    catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (manifest_dir) {
        try {
            write_manifest(*manifest_dir, manifest, wall, code);
        }
        catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kDataError;
        }
    }
    return code;
}

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace mcf::cli

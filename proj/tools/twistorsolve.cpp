// twistorsolve: batch front-end over the header library.
//   twistorsolve {solve|glue|backlund|roundtrip|verify} --config FILE [--jobs K] [--out DIR]
// Exit codes: 0 ok, 2 config invalid, 3 solver failure, 4 I/O failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "twistor/twistor.hpp"

using nlohmann::json;
using namespace twistor;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kConfig = 2, kSolver = 3, kIo = 4;

// ---------------------------------------------------------------- logging
enum class Level { debug = 0, info, warn, error, off };

Level log_level() {
    static const Level lv = [] {
        const char* e = std::getenv("TWISTORSOLVE_LOG");
        const std::string s = e ? e : "warn";
        if (s == "debug") return Level::debug;
        if (s == "info") return Level::info;
        if (s == "warn") return Level::warn;
        if (s == "error") return Level::error;
        if (s == "off") return Level::off;
        return Level::warn;
    }();
    return lv;
}

void logmsg(Level lv, const std::string& msg) {
    static const char* tag[] = {"debug", "info", "warn", "error"};
    if (lv >= log_level() && lv != Level::off)
        std::cerr << "twistorsolve [" << tag[int(lv)] << "] " << msg << "\n";
}

// ------------------------------------------------------- schema validation
// Minimal JSON-Schema subset: type, enum, properties, required,
// additionalProperties:false, items, minItems, maxItems.
bool type_matches(const json& j, const std::string& t) {
    if (t == "object") return j.is_object();
    if (t == "array") return j.is_array();
    if (t == "string") return j.is_string();
    if (t == "boolean") return j.is_boolean();
    if (t == "integer") return j.is_number_integer();
    if (t == "number") return j.is_number();
    return true;
}

void validate_schema(const json& j, const json& schema, const std::string& path,
                     std::vector<std::string>& errs) {
    if (schema.contains("type") && !type_matches(j, schema["type"].get<std::string>())) {
        errs.push_back(path + ": expected " + schema["type"].get<std::string>());
        return;
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const json& v : schema["enum"]) hit = hit || v == j;
        if (!hit) errs.push_back(path + ": value " + j.dump() + " not in enum");
    }
    if (j.is_object()) {
        const json props = schema.value("properties", json::object());
        if (schema.contains("required"))
            for (const json& r : schema["required"])
                if (!j.contains(r.get<std::string>()))
                    errs.push_back(path + ": missing required key '" +
                                   r.get<std::string>() + "'");
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (props.contains(it.key()))
                validate_schema(it.value(), props[it.key()], path + "." + it.key(), errs);
            else if (schema.value("additionalProperties", json(true)) == json(false))
                errs.push_back(path + ": unknown key '" + it.key() + "'");
        }
    }
    if (j.is_array()) {
        if (schema.contains("minItems") && j.size() < schema["minItems"].get<std::size_t>())
            errs.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
        if (schema.contains("maxItems") && j.size() > schema["maxItems"].get<std::size_t>())
            errs.push_back(path + ": more than " + schema["maxItems"].dump() + " items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < j.size(); ++i)
                validate_schema(j[i], schema["items"],
                                path + "[" + std::to_string(i) + "]", errs);
    }
}

// ---------------------------------------------------------- config resolve
json resolve_config(const json& cfg, const std::string& command,
                    std::vector<std::string>& errs) {
    json r;
    r["command"] = command;
    if (cfg.contains("command") && cfg["command"] != command)
        errs.push_back("config 'command' = " + cfg["command"].dump() +
                       " does not match subcommand '" + command + "'");
    r["out_dir"] = cfg.value("out_dir", std::string("out"));
    r["lambda"] = cfg.value("lambda", json::array({0.1, 0.2, 10.0}));
    r["target_lambda"] = cfg.value("target_lambda", json::array({1.0, 2.0, 4.0}));

    const json g = cfg.value("grid", json::object());
    if (g.contains("origin") || g.contains("extent") || g.contains("res")) {
        if (!(g.contains("origin") && g.contains("extent") && g.contains("res")))
            errs.push_back("grid: origin, extent and res must be given together");
        else
            r["grid"] = {{"origin", g["origin"]}, {"extent", g["extent"]}, {"res", g["res"]}};
        if (g.contains("radius") || g.contains("points"))
            errs.push_back("grid: give either radius/points or origin/extent/res");
    }
    if (!r.contains("grid")) {
        const double rad = g.value("radius", 0.02);
        const int pts = g.value("points", 5);
        if (pts < 1) errs.push_back("grid.points must be >= 1");
        r["grid"] = {{"origin", {-rad, -rad, -rad}},
                     {"extent", {2.0 * rad, 2.0 * rad, 2.0 * rad}},
                     {"res", {pts, pts, pts}}};
    }
    if (r.contains("grid") && r["grid"].contains("res"))
        for (const json& n : r["grid"]["res"])
            if (n.get<int>() < 1) errs.push_back("grid.res entries must be >= 1");

    const json s = cfg.value("solver", json::object());
    r["solver"] = {{"half_order", s.value("half_order", config::default_half_order)},
                   {"tol", s.value("tol", config::default_tol)},
                   {"max_iters", s.value("max_iters", config::default_max_iters)},
                   {"method", s.value("method", std::string("newton"))}};
    if (r["solver"]["half_order"].get<int>() < 2)
        errs.push_back("solver.half_order must be >= 2");

    const json gl = cfg.value("gluing", json::object());
    r["gluing"] = {{"kind", gl.value("kind", std::string("linear"))},
                   {"quad_coeff", gl.value("quad_coeff", 0.1)},
                   {"path", gl.value("path", std::string())},
                   {"t_max", gl.value("t_max", config::default_t_max)},
                   {"cheb_degree", gl.value("cheb_degree", config::default_cheb_degree)},
                   {"eps1", gl.value("eps1", config::mu_pole_clearance)},
                   {"curve_radius", gl.value("curve_radius", 0.3)}};
    if (command == "solve" && r["gluing"]["kind"] == "file" &&
        r["gluing"]["path"].get<std::string>().empty())
        errs.push_back("gluing.kind = file requires gluing.path");

    const json fx = cfg.value("fixture", json::object());
    const std::string fname = fx.value("name", std::string("exp"));
    json params = fx.value("params", json());
    if (params.is_null())
        params = (fname == "linear") ? json::array({1.0, 1.0, 1.0})
                                     : json::array({1.0, 2.0, 3.0});
    r["fixture"] = {{"name", fname}, {"params", params}};

    const json rt = cfg.value("roundtrip", json::object());
    r["roundtrip"] = {{"orders", rt.value("orders", json::array({8, 16, 32}))}};
    for (const json& n : r["roundtrip"]["orders"])
        if (n.get<int>() < 2) errs.push_back("roundtrip.orders entries must be >= 2");
    return r;
}

// FNV-1a over the canonical dump, out_dir excluded so the hash names the
// computation, not where its files land.
std::string config_hash(const json& resolved) {
    json r = resolved;
    r.erase("out_dir");
    const std::string s = r.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

// --------------------------------------------------------------- plumbing
struct Run {
    json cfg;
    std::string hash;
    fs::path out;
    int jobs = 1;
};

GridBox grid_from(const json& g) {
    GridBox b;
    for (int a = 0; a < 3; ++a) {
        b.origin[std::size_t(a)] = g["origin"][std::size_t(a)].get<double>();
        b.extent[std::size_t(a)] = g["extent"][std::size_t(a)].get<double>();
        b.res[std::size_t(a)] = g["res"][std::size_t(a)].get<int>();
    }
    return b;
}

std::array<cplx, 3> lambdas_from(const json& l) {
    return {cplx(l[0].get<double>()), cplx(l[1].get<double>()), cplx(l[2].get<double>())};
}

SolutionOracle fixture_from(const json& f) {
    std::vector<double> params;
    for (const json& p : f["params"]) params.push_back(p.get<double>());
    return fixture(f["name"].get<std::string>(), params);
}

SolverOptions solver_from(const json& s) {
    SolverOptions opt;
    opt.half_order = s["half_order"].get<int>();
    opt.tol = s["tol"].get<double>();
    opt.max_iters = s["max_iters"].get<int>();
    return opt;
}

GlueOptions glue_from(const Run& run) {
    GlueOptions opt;
    opt.half_order = run.cfg["solver"]["half_order"].get<int>();
    opt.cheb_degree = run.cfg["gluing"]["cheb_degree"].get<std::size_t>();
    opt.t_max = run.cfg["gluing"]["t_max"].get<double>();
    opt.eps1 = run.cfg["gluing"]["eps1"].get<double>();
    opt.jobs = run.jobs;
    return opt;
}

// g(lambda, t) = (t + q t^2) / lambda^2: zero-preserving, index -2, entire in t.
GluingFunction builtin_gluing(double q) {
    return GluingFunction::closed_form(
        [q](cplx l, cplx t) { return (t + q * t * t) / (l * l); },
        [q](cplx l, cplx t) { return (1.0 + 2.0 * q * t) / (l * l); },
        std::numeric_limits<double>::infinity(), true);
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw LeftDomain("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw LeftDomain("write failed on '" + path.string() + "'");
}

json holes_json(const WaveField& wf) {
    json first = json::array();
    for (std::size_t i = 0; i < wf.holes.size() && i < 20; ++i)
        first.push_back({{"index", wf.holes[i].first}, {"code", wf.holes[i].second}});
    return {{"count", wf.holes.size()}, {"first", first}};
}

// CSV + sidecar + gnuplot slice; the hash rides in the sidecar metadata and
// as a trailing comment of the .dat file (the CSV header is fixed).
void write_field_outputs(const ScalarField3& f, const Run& run, const std::string& stem,
                         json meta) {
    meta["config_hash"] = run.hash;
    meta["command"] = run.cfg["command"];
    write_field_csv(f, (run.out / (stem + ".csv")).string());
    write_field_sidecar(f, (run.out / (stem + ".json")).string(), meta);
    const fs::path slice = run.out / ("slice_z0_" + stem + ".dat");
    write_slice_z0(f, slice.string());
    std::ofstream app(slice, std::ios::app);
    app << "# config " << run.hash << "\n";
    logmsg(Level::info, "wrote " + stem + ".csv/.json and " + slice.filename().string());
}

json residual_report(const ScalarField3& f, const ABCTriple& abc) {
    if (f.box.res[0] < 3 || f.box.res[1] < 3 || f.box.res[2] < 3)
        return {{"computed", false}, {"reason", "grid has < 3 points on an axis"}};
    const ScalarField3 r = equation_residual(f, abc);
    double mx = 0.0;
    for (const cplx& v : r.values)
        if (ScalarField3::valid(v)) mx = std::max(mx, std::abs(v));
    return {{"computed", true},
            {"max_abs", mx},
            {"scaled_norm", scaled_residual_norm(f, abc)}};
}

// wave_solution with the homotopy-ODE solver per point; same validation
// and hole protocol as the Newton path.
WaveField wave_solution_homotopy(const GluingFunction& g, cplx l1, cplx l2, cplx l3,
                                 const GridBox& grid, const SolverOptions& opt,
                                 int jobs) {
    if (!g.zero_preserving)
        throw NodePlacement("wave_solution requires a zero-preserving gluing function");
    {
        const int m = 2 * opt.half_order;
        std::vector<cplx> s((std::size_t(m)));
        for (int j = 0; j < m; ++j)
            s[std::size_t(j)] = g.dt(CircleFunction::sample_point(opt.half_order, j),
                                     cplx(0.0));
        const int ind = winding_index(CircleFunction::from_samples(std::move(s)));
        if (ind != -2)
            throw IndexNotOne("wave_solution requires ind dg/dt(.,0) = -2, got " +
                              std::to_string(ind));
    }
    const NodeSet nodes{{l1, l2}, {l3}};
    nodes.validate();
    WaveField out;
    out.field = ScalarField3(grid);
    std::vector<std::vector<std::pair<std::size_t, std::string>>> strip_holes(
        std::size_t(grid.res[0]));
    parallel_strips(grid.res[0], jobs, [&](int i) {
        for (int j = 0; j < grid.res[1]; ++j)
            for (int k = 0; k < grid.res[2]; ++k) {
                const cplx x(grid.coord(0, i)), y(grid.coord(1, j)), z(grid.coord(2, k));
                try {
                    const GluingFamily fam = scaled_value_family(g, nodes, {x, y}, {z});
                    const RiemannSolution sol = solve_riemann_homotopy(fam, opt);
                    out.field.at(i, j, k) = sol.sigma_plus.mode(0);
                } catch (const Error& e) {
                    out.field.at(i, j, k) =
                        cplx(std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN());
                    strip_holes[std::size_t(i)].emplace_back(out.field.index(i, j, k),
                                                             e.code());
                }
            }
    });
    for (auto& sh : strip_holes)
        out.holes.insert(out.holes.end(), sh.begin(), sh.end());
    return out;
}

// ---------------------------------------------------------------- commands
int cmd_solve(const Run& run) {
    const auto [l1, l2, l3] = lambdas_from(run.cfg["lambda"]);
    NodeSet{{l1, l2}, {l3}}.validate();  // reject bad placement before the sweep
    const GridBox grid = grid_from(run.cfg["grid"]);
    SolverOptions opt = solver_from(run.cfg["solver"]);
    const std::string kind = run.cfg["gluing"]["kind"].get<std::string>();

    GluingFunction g;
    if (kind == "file") {
        const SampledGluing sg =
            read_sampled_gluing(run.cfg["gluing"]["path"].get<std::string>());
        opt.half_order = sg.half_order;  // sampled gluings pin the circle grid
        g = sg.as_gluing();
    } else {
        g = builtin_gluing(kind == "quadratic"
                               ? run.cfg["gluing"]["quad_coeff"].get<double>()
                               : 0.0);
    }

    logmsg(Level::info, "solve: " + kind + " gluing, method " +
                            run.cfg["solver"]["method"].get<std::string>());
    const WaveField wf =
        run.cfg["solver"]["method"] == "homotopy"
            ? wave_solution_homotopy(g, l1, l2, l3, grid, opt, run.jobs)
            : wave_solution(g, l1, l2, l3, grid, opt, run.jobs);

    const ABCTriple abc = abc_from_lambda_triple(l1, l2, l3);
    json report = {{"config_hash", run.hash},
                   {"residual", residual_report(wf.field, abc)},
                   {"holes", holes_json(wf)}};
    write_field_outputs(wf.field, run, "field", {{"gluing_kind", kind}});
    write_json_file(report, run.out / "solve_report.json");
    if (!wf.holes.empty()) {
        logmsg(Level::error, std::to_string(wf.holes.size()) + " unsolved grid points");
        return kSolver;
    }
    return kOk;
}

int cmd_glue(const Run& run) {
    const auto [l1, l2, l3] = lambdas_from(run.cfg["lambda"]);
    const SolutionOracle oracle = fixture_from(run.cfg["fixture"]);
    const ABCTriple abc = abc_from_lambda_triple(l1, l2, l3);
    const TransversalCurve Y =
        canonical_Y(oracle, abc, run.cfg["gluing"]["curve_radius"].get<double>());
    const ConditionReport cond = check_condition_10760(oracle, abc, l1, l2, Y);

    const SampledGluing sg = glue_sample(oracle, l1, l2, l3, Y, glue_from(run));
    const int idx = sg.index_at_zero();
    logmsg(Level::info, "glue: fit residual " + std::to_string(sg.fit_residual) +
                            ", index " + std::to_string(idx));

    json gj = sampled_gluing_to_json(sg);
    gj["config_hash"] = run.hash;
    write_json_file(gj, run.out / "gluing.json");
    write_json_file({{"config_hash", run.hash},
                     {"condition_10760",
                      {{"ok", cond.ok},
                       {"lhs", std::isfinite(cond.lhs) ? json(cond.lhs)
                                                       : json("infinity")}}},
                     {"index_at_zero", idx},
                     {"index_expected", -2},
                     {"fit_residual", sg.fit_residual}},
                    run.out / "glue_report.json");
    if (idx != -2) {
        logmsg(Level::error, "gluing index " + std::to_string(idx) + ", expected -2");
        return kSolver;
    }
    return kOk;
}

int cmd_backlund(const Run& run) {
    const auto [l1, l2, l3] = lambdas_from(run.cfg["lambda"]);
    const auto [m1, m2, m3] = lambdas_from(run.cfg["target_lambda"]);
    const GridBox grid = grid_from(run.cfg["grid"]);
    const SolutionOracle oracle = fixture_from(run.cfg["fixture"]);
    const ABCTriple src = abc_from_lambda_triple(l1, l2, l3);
    const ABCTriple tgt = abc_from_lambda_triple(m1, m2, m3);
    const ScalarField3 w = fd::sample(oracle, grid);

    BacklundCoefficients c;
    try {
        c = coefficients(src, tgt);
    } catch (const ProportionalTriples&) {
        // identity transform: v = w up to gauge; flag it instead of tracing
        logmsg(Level::warn, "target triple proportional to source: identity transform");
        write_field_outputs(w, run, "v_field", {{"identity_target", true}});
        write_json_file({{"config_hash", run.hash}, {"identity_target", true}},
                        run.out / "backlund_report.json");
        return kOk;
    }

    logmsg(Level::info, "backlund: tracing leaves on " + std::to_string(grid.res[0]) +
                            "^3 grid");
    const WaveField v = transform(oracle, src, tgt, grid, run.jobs);

    json report = {{"config_hash", run.hash},
                   {"identity_target", false},
                   {"coefficients",
                    {{"alpha", {c.alpha.real(), c.alpha.imag()}},
                     {"beta", {c.beta.real(), c.beta.imag()}},
                     {"gamma", {c.gamma.real(), c.gamma.imag()}}}},
                   {"holes", holes_json(v)}};
    if (grid.res[0] >= 3 && grid.res[1] >= 3 && grid.res[2] >= 3) {
        const SystemReport sys = verify_system(w, v.field, src, tgt);
        report["system_560"] = {{"residual_xy", sys.residual_xy},
                                {"residual_xz", sys.residual_xz},
                                {"minor_max", sys.minor_max}};
        report["eikonal_residual"] = eikonal_residual(oracle, v.field, src);
        report["target_equation"] = residual_report(v.field, tgt);
    } else {
        report["system_560"] = nullptr;
    }
    write_field_outputs(v.field, run, "v_field", {{"identity_target", false}});
    write_json_file(report, run.out / "backlund_report.json");
    if (!v.holes.empty()) {
        logmsg(Level::error, std::to_string(v.holes.size()) + " untraced grid points");
        return kSolver;
    }
    return kOk;
}

int cmd_roundtrip(const Run& run) {
    const auto [l1, l2, l3] = lambdas_from(run.cfg["lambda"]);
    const GridBox grid = grid_from(run.cfg["grid"]);
    const SolutionOracle oracle = fixture_from(run.cfg["fixture"]);
    const ABCTriple abc = abc_from_lambda_triple(l1, l2, l3);
    const TransversalCurve Y =
        canonical_Y(oracle, abc, run.cfg["gluing"]["curve_radius"].get<double>());
    const auto psi = curve_trace(oracle, Y);
    const ScalarField3 exact = fd::sample(oracle, grid);
    const double scale = std::max(exact.max_abs_valid(), 1e-300);

    std::vector<int> orders;
    for (const json& n : run.cfg["roundtrip"]["orders"]) orders.push_back(n.get<int>());
    SolverOptions sopt = solver_from(run.cfg["solver"]);

    json rows = json::array();
    std::size_t holes = 0;
    ScalarField3 last;
    for (int n : orders) {
        GlueOptions go = glue_from(run);
        go.half_order = n;
        const SampledGluing sg = glue_sample(oracle, l1, l2, l3, Y, go);
        const WaveField rec = reconstruct(sg, l1, l2, l3, Y, psi, grid, sopt, run.jobs);
        double mx = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < exact.values.size(); ++i) {
            const double d = std::abs(rec.field.values[i] - exact.values[i]);
            if (!std::isnan(d)) {
                mx = std::max(mx, d);
                sum += d;
            }
        }
        rows.push_back({{"half_order", n},
                        {"fit_residual", sg.fit_residual},
                        {"max_error", mx},
                        {"max_rel_error", mx / scale},
                        {"mean_error", sum / double(exact.values.size())},
                        {"holes", rec.holes.size()}});
        logmsg(Level::info, "roundtrip N=" + std::to_string(n) +
                                ": max rel error " + std::to_string(mx / scale));
        holes += rec.holes.size();
        last = rec.field;
    }
    write_field_outputs(last, run, "reconstructed",
                        {{"half_order", orders.back()}});
    write_json_file({{"config_hash", run.hash},
                     {"convergence", rows},
                     {"final", rows.back()}},
                    run.out / "roundtrip_report.json");
    return holes == 0 ? kOk : kSolver;
}

// Quick invariant sweep: splitting identities, index laws, the linear
// oracle, residual convergence, gluing index.  Deterministic seed.
int cmd_verify(const Run& run) {
    std::mt19937 rng(20240817u);
    auto runif = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    auto crand = [&](double s) { return cplx(runif(-s, s), runif(-s, s)); };
    auto random_trig = [&](int n, double amp, double decay) {
        std::vector<cplx> modes(2 * std::size_t(n), cplx(0.0));
        for (int k = -n; k < n; ++k)
            modes[std::size_t(k + n)] = crand(amp * std::pow(decay, std::abs(k)));
        return CircleFunction::from_modes(n, std::move(modes));
    };
    auto random_nonvanishing = [&](int n) {
        std::vector<cplx> modes(2 * std::size_t(n), cplx(0.0));
        modes[std::size_t(n)] = cplx(1.0);
        for (int k = -n; k < n; ++k)
            if (k != 0) modes[std::size_t(k + n)] = crand(0.04 * std::pow(0.42, std::abs(k)));
        return CircleFunction::from_modes(n, std::move(modes));
    };

    json checks = json::array();
    bool all = true;
    auto add = [&](const std::string& name, double value, double tol) {
        const bool pass = value <= tol;
        all = all && pass;
        checks.push_back({{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}});
        logmsg(pass ? Level::info : Level::error,
               "verify " + name + ": " + (pass ? "pass" : "FAIL") + " (" +
                   std::to_string(value) + " vs " + std::to_string(tol) + ")");
    };
    const int N = 32;

    {  // additive splitting: lambda*H+ + H- = phi exactly in coefficients
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const CircleFunction f = random_trig(N, 1.0, 0.7);
            auto [hp, hm] = h_split(f);
            for (int k = -N; k < N; ++k) {
                const cplx shifted = (k >= 1) ? hp.mode(k - 1) : cplx(0.0);
                worst = std::max(worst, std::abs(shifted + hm.mode(k) - f.mode(k)));
            }
        }
        add("h_split_reconstruction", worst, 0.0);
    }
    {  // multiplicative splitting reconstructs ind-0 inputs
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const CircleFunction f = random_nonvanishing(N);
            auto [mp, mm] = mult_split(f);
            for (int j = 0; j < f.sample_count(); ++j)
                worst = std::max(worst,
                                 std::abs(mp.sample(j) / mm.sample(j) - f.sample(j)));
        }
        add("mult_split_reconstruction", worst, 1e-11);
    }
    {  // index of monomials and additivity under products
        double worst = 0.0;
        for (int k = -8; k <= 8; ++k)
            worst = std::max(worst,
                             std::abs(double(winding_index(CircleFunction::monomial(N, k)) - k)));
        auto product = [](const CircleFunction& a, const CircleFunction& b) {
            std::vector<cplx> s((std::size_t(a.sample_count())));
            for (int j = 0; j < a.sample_count(); ++j)
                s[std::size_t(j)] = a.sample(j) * b.sample(j);
            return CircleFunction::from_samples(std::move(s));
        };
        for (int trial = 0; trial < 25; ++trial) {
            const int k1 = int(runif(-4.0, 4.0)), k2 = int(runif(-4.0, 4.0));
            const CircleFunction f =
                product(CircleFunction::monomial(N, k1), random_nonvanishing(N));
            const CircleFunction g =
                product(CircleFunction::monomial(N, k2), random_nonvanishing(N));
            const CircleFunction fg = product(f, g);
            worst = std::max(
                worst, std::abs(double(winding_index(fg) - winding_index(f) -
                                       winding_index(g))));
        }
        add("winding_index_laws", worst, 0.0);
    }
    {  // linear-gluing oracle: quadratic interpolation through the nodes
        const GluingFunction g = builtin_gluing(0.0);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const cplx x(runif(-0.02, 0.02)), y(runif(-0.02, 0.02)), z(runif(-0.02, 0.02));
            const GridBox pt{{x.real(), y.real(), z.real()}, {0, 0, 0}, {1, 1, 1}};
            const WaveField wf = wave_solution(g, cplx(0.1), cplx(0.2), cplx(10.0), pt);
            // Lagrange through (0.1, x), (0.2, y), (10, 100 z), evaluated at 0
            auto lag = [&](cplx a, cplx b, cplx c, cplx fa, cplx fb, cplx fc) {
                return fa * (0.0 - b) * (0.0 - c) / ((a - b) * (a - c)) +
                       fb * (0.0 - a) * (0.0 - c) / ((b - a) * (b - c)) +
                       fc * (0.0 - a) * (0.0 - b) / ((c - a) * (c - b));
            };
            worst = std::max(worst, std::abs(wf.field.at(0, 0, 0) -
                                             lag(0.1, 0.2, 10.0, x, y, 100.0 * z)));
        }
        add("linear_gluing_oracle", worst, 1e-10);
    }
    {  // FD residual of a genuinely curved solution converges at order ~2
        const SolutionOracle o = fixture("cubic", {1.0, 2.0, 3.0});
        const ABCTriple abc = abc_from_lambda_triple(cplx(0.1), cplx(0.2), cplx(10.0));
        const double r9 = scaled_residual_norm(fd::sample(o, GridBox::centered_cube(0.02, 9)), abc);
        const double r17 = scaled_residual_norm(fd::sample(o, GridBox::centered_cube(0.02, 17)), abc);
        add("residual_convergence_order", std::abs(std::log2(r9 / r17) - 2.0), 0.3);
    }
    {  // sampled gluing has index -2 and passes the admissibility condition
        const SolutionOracle o = fixture_linear(1.0, 1.0, 1.0);
        const ABCTriple abc = abc_from_lambda_triple(cplx(0.1), cplx(0.2), cplx(10.0));
        const TransversalCurve Y = canonical_Y(o, abc, 0.3);
        GlueOptions go;
        go.half_order = 16;
        go.jobs = run.jobs;
        const SampledGluing sg = glue_sample(o, cplx(0.1), cplx(0.2), cplx(10.0), Y, go);
        const ConditionReport cond =
            check_condition_10760(o, abc, cplx(0.1), cplx(0.2), Y);
        add("gluing_index_at_zero", std::abs(double(sg.index_at_zero() + 2)), 0.0);
        add("condition_10760", cond.ok ? 0.0 : 1.0, 0.0);
    }

    write_json_file({{"config_hash", run.hash}, {"pass", all}, {"checks", checks}},
                    run.out / "verify_report.json");
    return all ? kOk : kSolver;
}

// --------------------------------------------------------- error mapping
int classify(const Error& e) {
    static const std::set<std::string> cfg = {
        "NodePlacement", "IndexNotOne",  "DegenerateLambdas",
        "CoincidentPoints", "RatioDegenerate", "LambdaContainsZeroOrInfinity",
        "UnknownFixture", "HypothesisViolated", "DuplicateNodes", "LambdaZero"};
    if (cfg.count(e.code())) return kConfig;
    const std::string what = e.what();
    if (e.code() == "LeftDomain" && (what.find("cannot open") != std::string::npos ||
                                     what.find("write failed") != std::string::npos))
        return kIo;
    return kSolver;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"twistor toolkit batch front-end"};
    app.require_subcommand(1);
    std::string config_path, out_override;
    int jobs = int(std::max(1u, std::thread::hardware_concurrency()));
    for (const char* name : {"solve", "glue", "backlund", "roundtrip", "verify"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--jobs", jobs, "worker threads (default: all cores)");
        sub->add_option("--out", out_override, "output directory override");
    }
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    // config + schema are read before anything is computed
    std::ifstream in(config_path);
    if (!in) {
        logmsg(Level::error, "cannot open config '" + config_path + "'");
        return kIo;
    }
    const char* sp = std::getenv("TWISTORSOLVE_SCHEMA");
    const std::string schema_path = sp ? sp : TWISTORSOLVE_SCHEMA;
    std::ifstream sin(schema_path);
    if (!sin) {
        logmsg(Level::error, "cannot open schema '" + schema_path + "'");
        return kIo;
    }
    json cfg, schema;
    try {
        cfg = json::parse(in);
        schema = json::parse(sin);
    } catch (const json::parse_error& e) {
        logmsg(Level::error, std::string("config parse error: ") + e.what());
        return kConfig;
    }

    std::vector<std::string> errs;
    validate_schema(cfg, schema, "config", errs);
    Run run;
    run.cfg = resolve_config(cfg, command, errs);
    if (!errs.empty()) {
        for (const std::string& e : errs) logmsg(Level::error, e);
        return kConfig;
    }
    if (!out_override.empty()) run.cfg["out_dir"] = out_override;
    run.hash = config_hash(run.cfg);
    run.out = run.cfg["out_dir"].get<std::string>();
    run.jobs = std::max(1, jobs);
    logmsg(Level::debug, "resolved config: " + run.cfg.dump());
    logmsg(Level::info, command + " -> " + run.out.string() + " (config " + run.hash +
                            ", jobs " + std::to_string(run.jobs) + ")");

    try {
        fs::create_directories(run.out);
        write_json_file(run.cfg, run.out / "resolved_config.json");
    } catch (const std::exception& e) {
        logmsg(Level::error, std::string("cannot prepare output directory: ") + e.what());
        return kIo;
    }

    try {
        if (command == "solve") return cmd_solve(run);
        if (command == "glue") return cmd_glue(run);
        if (command == "backlund") return cmd_backlund(run);
        if (command == "roundtrip") return cmd_roundtrip(run);
        return cmd_verify(run);
    } catch (const Error& e) {
        logmsg(Level::error, e.what());
        const int code = classify(e);
        std::cerr << e.what() << "\n";
        return code;
    } catch (const std::ios_base::failure& e) {
        logmsg(Level::error, std::string("I/O failure: ") + e.what());
        return kIo;
    } catch (const std::exception& e) {
        logmsg(Level::error, e.what());
        return kSolver;
    }
}

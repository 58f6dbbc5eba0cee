#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ends/cli.hpp"
#include "ends/errors.hpp"

namespace ends::cli {

namespace {

struct Flags {
    std::string config;
    std::string preset;
    std::string out = "out";
    std::optional<double> rmax, dr, tol, tol_S, tol_F, tol_W, tol_adj;
    std::optional<int> mmax, stencil_order;
    std::string command;
};

Scheme scheme_from(const Config& cfg)
{
    std::string s = cfg.get("run", "scheme", "chebyshev");
    if (s == "chebyshev") return Scheme::chebyshev;
    if (s == "crank_nicolson") return Scheme::crank_nicolson;
    cfg.error_at("run", "scheme", "scheme must be chebyshev or crank_nicolson");
}

Context build_context(const Flags& f)
{
    Context ctx;
    ctx.cfg = f.config.empty() ? Config::parse("", "<none>") : Config::load(f.config);
    const Config& cfg = ctx.cfg;
    if (!f.config.empty()) {
        if (!f.preset.empty()) fail(ErrorKind::validation, "--preset cannot be combined with --config");
        ctx.model = model_from_config(cfg);
    } else {
        ctx.model = model_preset(f.preset.empty() ? "A" : f.preset);
    }
    GridSpec defaults;
    ctx.grid = grid_from_config(cfg, defaults);
    if (f.rmax) ctx.grid.rmax = *f.rmax;
    if (f.dr) ctx.grid.dr = *f.dr;
    if (f.mmax) ctx.grid.mmax = *f.mmax;
    if (f.stencil_order) ctx.grid.stencil_order = *f.stencil_order;
    if (!(ctx.grid.dr > 0.0)) fail(ErrorKind::validation, "--dr must be positive");
    if (ctx.grid.stencil_order != 2 && ctx.grid.stencil_order != 4)
        fail(ErrorKind::validation, "--stencil-order must be 2 or 4");
    if (ctx.grid.mmax < 0) fail(ErrorKind::validation, "--mmax must be >= 0");

    cfg.check_keys("run", {"tol_S", "tol_F", "tol_W", "tol_adj", "tol_res", "scheme", "dt", "max_rho",
                           "absorber_width", "absorber_strength"});
    ctx.tol.S = cfg.get_double("run", "tol_S", ctx.tol.S);
    ctx.tol.F = cfg.get_double("run", "tol_F", ctx.tol.F);
    ctx.tol.W = cfg.get_double("run", "tol_W", ctx.tol.W);
    ctx.tol.adj = cfg.get_double("run", "tol_adj", ctx.tol.adj);
    ctx.tol.res = cfg.get_double("run", "tol_res", ctx.tol.res);
    if (f.tol_S) ctx.tol.S = *f.tol_S;
    if (f.tol_F) ctx.tol.F = *f.tol_F;
    if (f.tol_W) ctx.tol.W = *f.tol_W;
    if (f.tol_adj) ctx.tol.adj = *f.tol_adj;
    if (f.tol) {
        if (f.command == "smatrix") ctx.tol.S = *f.tol;
        if (f.command == "waveop") ctx.tol.W = *f.tol;
        if (f.command == "resolvent") ctx.tol.res = *f.tol;
        if (f.command == "transmission") ctx.tol.stab = *f.tol;
    }
    for (double t : {ctx.tol.S, ctx.tol.F, ctx.tol.W, ctx.tol.adj, ctx.tol.res, ctx.tol.stab})
        if (!(t > 0.0)) fail(ErrorKind::validation, "tolerances must be positive");
    ctx.evolution.scheme = scheme_from(cfg);
    ctx.evolution.dt = cfg.get_double("run", "dt", ctx.evolution.dt);
    ctx.evolution.max_rho = cfg.get_double("run", "max_rho", ctx.evolution.max_rho);
    ctx.evolution.absorber.width = cfg.get_double("run", "absorber_width", 0.0);
    ctx.evolution.absorber.strength = cfg.get_double("run", "absorber_strength", 0.0);
    ctx.out_dir = f.out;
    return ctx;
}

int exit_code(ErrorKind k)
{
    switch (k) {
    case ErrorKind::validation:
    case ErrorKind::precondition:
    case ErrorKind::domain:
        return 2;
    case ErrorKind::convergence:
        return 3;
    case ErrorKind::internal:
        return 1;
    }
    return 1;
}

const char* status_of(ErrorKind k)
{
    switch (exit_code(k)) {
    case 2:
        return "validation_error";
    case 3:
        return "non_convergence";
    default:
        return "internal_error";
    }
}

void add_common(CLI::App* app, Flags& f)
{
    app->add_option("--config", f.config, "configuration file")->check(CLI::ExistingFile);
    app->add_option("--preset", f.preset, "reference model A, B, C, D or free (default A)");
    app->add_option("--out", f.out, "output directory")->capture_default_str();
    app->add_option("--rmax", f.rmax, "grid radius");
    app->add_option("--dr", f.dr, "grid spacing");
    app->add_option("--mmax", f.mmax, "largest angular mode");
    app->add_option("--stencil-order", f.stencil_order, "2 or 4");
    app->add_option("--tol-S", f.tol_S, "S-matrix unitarity tolerance (default 1e-6)");
    app->add_option("--tol-F", f.tol_F, "boundary-limit tolerance (default 1e-4)");
    app->add_option("--tol-W", f.tol_W, "wave-operator Cauchy tolerance (default 1e-3)");
    app->add_option("--tol-adj", f.tol_adj, "adjoint-identity tolerance (default 1e-3)");
}

}  // namespace

void write_file(const Context& ctx, const std::string& name, const std::string& text)
{
    std::filesystem::path p = std::filesystem::path(ctx.out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorKind::validation, "cannot write " + p.string());
    out << text;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

int run(int argc, char** argv)
{
    CLI::App app{"Scattering on surfaces with several ends"};
    app.require_subcommand(1);
    Flags flags;
    ResolventArgs ra;
    SmatrixArgs sa;
    DynamicsArgs da;
    WaveopArgs wa;
    TransmissionArgs ta;
    OracleArgs oa;

    std::string command;
    std::function<void(const Context&, Json&)> action;
    auto sub = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        add_common(s, flags);
        s->callback([&, name] { command = name; });
        return s;
    };

    sub("model-check", "critical energies and potential classes");
    CLI::App* res = sub("resolvent", "limiting resolvent of a Gaussian source");
    res->add_option("--lambda", ra.lambda, "energy")->capture_default_str();
    res->add_option("--sign", ra.sign, "+1 outgoing, -1 incoming")->capture_default_str();
    res->add_option("-m,--mode", ra.m, "angular mode")->capture_default_str();
    res->add_option("--source-s", ra.source_s, "source centre in s")->capture_default_str();
    res->add_option("--source-width", ra.source_width, "source width")->capture_default_str();
    res->add_option("--rhs", ra.rhs, "source CSV s,re,im (overrides the Gaussian)")->check(CLI::ExistingFile);
    res->add_option("--tol", flags.tol, "residual tolerance (default 1e-3)");
    CLI::App* sm = sub("smatrix", "scattering matrix on an energy grid");
    sm->add_option("--lambda-grid", sa.lambda_grid, "lo:hi:n or a,b,c")->capture_default_str();
    sm->add_option("--smatrix-mmax", sa.mmax, "largest mode in S (default grid mmax)");
    sm->add_option("--tol", flags.tol, "alias of --tol-S");
    CLI::App* dy = sub("dynamics", "comparison dynamics U(t) h");
    dy->add_option("--profile", da.profile, "spectral profile (JSON)")->required()->check(CLI::ExistingFile);
    dy->add_option("--times", da.times, "comma-separated times")->capture_default_str();
    dy->add_option("--variant", da.variant, "exact, leading, sr or do")->capture_default_str();
    dy->add_option("--sign", da.sign, "+1 or -1")->capture_default_str();
    dy->add_option("--csv-stride", da.csv_stride, "write every n-th node")->capture_default_str();
    CLI::App* wo = sub("waveop", "wave-operator estimate and Cauchy report");
    wo->add_option("--profile", wa.profile, "spectral profile (JSON)")->required()->check(CLI::ExistingFile);
    wo->add_option("--t-grid", wa.t_grid, "comma-separated increasing times")->capture_default_str();
    wo->add_option("--comparison", wa.comparison, "leading or exact")->capture_default_str();
    wo->add_option("--sign", wa.sign, "+1 or -1")->capture_default_str();
    wo->add_flag("--adjoint", wa.adjoint, "check <psi, W h> against the distorted transform");
    wo->add_option("--panels", wa.panels, "Gauss-Legendre panels per channel")->capture_default_str();
    wo->add_option("--tol", flags.tol, "alias of --tol-W");
    CLI::App* tr = sub("transmission", "cross-ends transmission of an incoming packet");
    tr->add_option("--packet", ta.packet, "packet (JSON)")->required()->check(CLI::ExistingFile);
    tr->add_option("--to", ta.to, "target end (1 or 2; default the other end)");
    tr->add_option("--t-grid", ta.t_grid, "comma-separated increasing times")->capture_default_str();
    tr->add_option("--panels", ta.panels, "Gauss-Legendre panels over the energy window")->capture_default_str();
    tr->add_option("--filter-width", ta.filter_width, "energy filter transition width (0: off)");
    tr->add_option("--tol", flags.tol, "projection-mass stabilization tolerance (default 2e-2)");
    CLI::App* orc = sub("oracle", "brute-force cross-checks");
    orc->add_option("--check", oa.check, "dense2d, small-eps, square-well or all")->capture_default_str();
    orc->add_option("--lambda", oa.lambda, "energy")->capture_default_str();
    orc->add_option("--t", oa.t, "evolution time of the 2D check")->capture_default_str();
    orc->add_option("--ns", oa.ns, "s nodes of the 2D grid")->capture_default_str();
    orc->add_option("--ntheta", oa.ntheta, "angles of the 2D grid")->capture_default_str();
    orc->add_option("--half-length", oa.S, "half-length of the 2D grid in s")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (command == "model-check") action = [&](const Context& c, Json& r) { model_check(c, r); };
    if (command == "resolvent") action = [&](const Context& c, Json& r) { resolvent(c, ra, r); };
    if (command == "smatrix") action = [&](const Context& c, Json& r) { smatrix(c, sa, r); };
    if (command == "dynamics") action = [&](const Context& c, Json& r) { dynamics(c, da, r); };
    if (command == "waveop") action = [&](const Context& c, Json& r) { waveop(c, wa, r); };
    if (command == "transmission") action = [&](const Context& c, Json& r) { transmission(c, ta, r); };
    if (command == "oracle") action = [&](const Context& c, Json& r) { oracle(c, oa, r); };

    Json report;
    report["schema"] = 1;
    report["command"] = command;
    Json body = Json::object();
    int code = 0;
    Context ctx;
    ctx.out_dir = flags.out;
    bool have_dir = false;
    try {
        std::filesystem::create_directories(flags.out);
        have_dir = true;
    } catch (const std::exception& e) {
        std::cerr << "error: cannot create output directory '" << flags.out << "': " << e.what() << "\n";
        return 2;
    }
    try {
        flags.command = command;
        ctx = build_context(flags);
        action(ctx, body);
        report["status"] = "ok";
    } catch (const Error& e) {
        code = exit_code(e.kind());
        report["status"] = status_of(e.kind());
        report["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        code = 1;
        report["status"] = "internal_error";
        report["error"] = {{"kind", "internal"}, {"message", e.what()}};
        std::cerr << "error: " << e.what() << "\n";
    }
    for (auto it = body.begin(); it != body.end(); ++it) report[it.key()] = it.value();
    if (have_dir) {
        try {
            ctx.out_dir = flags.out;
            write_file(ctx, command + ".json", report.dump(2) + "\n");
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return code;
}

}  // namespace ends::cli

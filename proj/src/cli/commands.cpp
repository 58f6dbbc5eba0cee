#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "ends/cli.hpp"
#include "ends/errors.hpp"
#include "ends/oracle.hpp"

namespace ends::cli {

namespace {

double parse_number(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (text.empty() || used != text.size() || !std::isfinite(v))
        fail(ErrorKind::validation, what + ": '" + text + "' is not a number");
    return v;
}

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r\n"), b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

Json cjson(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

// NaN and infinities are written as null.
Json fjson(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string state_csv(const RadialState& st, int stride)
{
    const RadialGrid& g = *st.grid;
    std::string out = "s,r,region,m,re,im\n";
    for (std::size_t i = 0; i < st.modes.size(); ++i)
        for (std::size_t j = 0; j < g.size(); j += std::size_t(stride)) {
            const cplx v = st.values[i][j];
            out += num(g.s[j]) + "," + num(g.r[j]) + "," + std::to_string(g.region[j] + 1) + "," +
                   std::to_string(st.modes[i]) + "," + num(v.real()) + "," + num(v.imag()) + "\n";
        }
    return out;
}

std::string fmt_time(double t)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", t);
    return buf;
}

int check_sign(int sign)
{
    if (sign != 1 && sign != -1) fail(ErrorKind::validation, "--sign must be +1 or -1");
    return sign;
}

Variant parse_variant(const std::string& v)
{
    if (v == "exact") return Variant::exact;
    if (v == "leading") return Variant::leading;
    if (v == "sr") return Variant::sr;
    if (v == "do") return Variant::dollard;
    fail(ErrorKind::validation, "variant must be exact, leading, sr or do");
}

std::vector<double> increasing_times(const std::string& text, const std::string& what)
{
    std::vector<double> t = parse_list(text, what);
    for (std::size_t k = 0; k < t.size(); ++k)
        if (!(t[k] > 0.0) || (k > 0 && !(t[k] > t[k - 1])))
            fail(ErrorKind::validation, what + " must be positive and increasing");
    return t;
}

void check_profile_modes(const SpectralProfile& h, const GridSpec& grid)
{
    for (int m : h.modes())
        if (std::abs(m) > grid.mmax)
            fail(ErrorKind::validation, "profile mode " + std::to_string(m) + " exceeds --mmax");
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Json end_setups(const std::vector<StationarySetup>& setups)
{
    Json a = Json::array();
    for (const auto& st : setups)
        a.push_back({{"end", st.end + 1}, {"m", st.m}, {"lambda1", st.lambda1}, {"r1", st.r1}, {"shift", st.shift}});
    return a;
}

std::vector<double> read_rhs(const std::string& path, const RadialGrid& g, std::vector<double>* im)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::validation, "cannot read " + path);
    std::vector<double> s, re, ii;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(trim(c));
        if (lineno == 1 && !cols.empty() && cols[0] == "s") continue;
        if (cols.size() != 3) fail(ErrorKind::validation, path + ":" + std::to_string(lineno) + ": expected s,re,im");
        const std::string where = path + ":" + std::to_string(lineno);
        s.push_back(parse_number(cols[0], where));
        re.push_back(parse_number(cols[1], where));
        ii.push_back(parse_number(cols[2], where));
        if (s.size() > 1 && !(s.back() > s[s.size() - 2]))
            fail(ErrorKind::validation, where + ": s must be increasing");
    }
    if (s.size() < 2) fail(ErrorKind::validation, path + ": need at least two samples");
    std::vector<double> out(g.size(), 0.0);
    im->assign(g.size(), 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double x = g.s[j];
        if (x < s.front() || x > s.back()) continue;
        std::size_t k = std::upper_bound(s.begin(), s.end(), x) - s.begin();
        k = std::clamp<std::size_t>(k, 1, s.size() - 1);
        const double w = (x - s[k - 1]) / (s[k] - s[k - 1]);
        out[j] = (1.0 - w) * re[k - 1] + w * re[k];
        (*im)[j] = (1.0 - w) * ii[k - 1] + w * ii[k];
    }
    return out;
}

// Family for the adjoint check: outgoing (sign +) or incoming packets inside r < rmax / 8
// on every channel of h.
std::vector<RadialState> adjoint_family(const Problem& pb, const SpectralProfile& h, int sign)
{
    std::vector<RadialState> fam;
    std::set<std::pair<int, int>> seen;
    const double R = pb.grid()->rmax / 8.0;
    for (const auto& ch : h.channels) {
        if (!seen.insert({ch.end, ch.m}).second) continue;
        for (double c : {0.2, 0.33, 0.46})
            for (double f : {1.0 / 3.0, 2.0 / 3.0}) {
                Packet p;
                p.end = ch.end;
                p.m = ch.m;
                p.r_center = c * R;
                p.width = pb.grid()->rmax / 200.0;
                p.k = std::sqrt(2.0 * (ch.lo + f * (ch.hi - ch.lo)));
                p.incoming = sign < 0;
                fam.push_back(gaussian_packet(pb, p));
            }
    }
    return fam;
}

// ||a - b|| / ||b|| with weight (1 + s^2)^{-1} on nodes of the core and r <= r_cut.
double weighted_error(const RadialGrid& g, const std::vector<cplx>& a, const std::vector<cplx>& b,
                      double r_cut)
{
    double num2 = 0.0, den2 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.region[j] >= 0 && g.r[j] > r_cut) continue;
        const double w = 1.0 / (1.0 + g.s[j] * g.s[j]);
        num2 += w * std::norm(a[j] - b[j]);
        den2 += w * std::norm(b[j]);
    }
    return std::sqrt(num2 / den2);
}

bool oracle_dense2d(const Context& ctx, const OracleArgs& args, Json& out)
{
    const ManifoldModel& M = ctx.model;
    oracle::TinyGrid tg{args.S, args.ns, args.ntheta};
    if (!(args.t > 0.0)) fail(ErrorKind::validation, "--t must be positive");
    const int mmax = std::min(3, args.ntheta / 2 - 1);
    auto H2 = oracle::dense_hamiltonian_2d(M, tg);
    Problem line(M, oracle::tiny_line_spec(M, tg, mmax));
    const int ns = tg.ns, nt = tg.ntheta;
    std::vector<cplx> u(std::size_t(ns) * nt);
    for (int j = 0; j < ns; ++j)
        for (int k = 0; k < nt; ++k) {
            const double s = H2.s[j], th = 2.0 * std::numbers::pi * k / nt;
            u[std::size_t(j) * nt + k] = std::exp(-s * s / 0.5) * std::polar(1.0, 1.5 * s) *
                                         (1.0 + 0.5 * std::cos(th) + 0.3 * std::sin(2.0 * th));
        }
    const int nsteps = std::max(1, int(std::ceil(args.t / 0.01)));
    auto u_t = oracle::evolve_2d(H2, u, args.t, nsteps);
    RadialState m0 = oracle::surface_to_modes(line, H2, u, mmax);
    EvolutionConfig cfg;
    cfg.scheme = Scheme::crank_nicolson;
    cfg.dt = args.t / nsteps;
    cfg.cfl_limit = std::numeric_limits<double>::infinity();
    RadialState reduced = evolve(line, m0, args.t, cfg);
    RadialState dense = oracle::surface_to_modes(line, H2, u_t, mmax);
    const double err = (reduced - dense).norm() / dense.norm();
    const double sym = (H2.H - Eigen::SparseMatrix<double>(H2.H.transpose())).norm();
    const bool pass = err <= 1e-3;
    out = {{"ns", ns},
           {"ntheta", nt},
           {"half_length", tg.S},
           {"t", args.t},
           {"steps", nsteps},
           {"mmax", mmax},
           {"relative_error", err},
           {"symmetry_defect", sym},
           {"norm_initial", m0.norm()},
           {"norm_final", dense.norm()},
           {"tolerance", 1e-3},
           {"pass", pass}};
    std::printf("dense2d: relative error %.3e at t = %g\n", err, args.t);
    return pass;
}

bool oracle_small_eps(const Context& ctx, const OracleArgs& args, Json& out)
{
    GridSpec spec = ctx.grid;
    spec.mmax = 0;
    Problem pb(ctx.model, spec);
    auto g = pb.grid();
    RadialState psi = RadialState::zeros(g, {0});
    for (std::size_t j = 0; j < g->size(); ++j) psi.values[0][j] = std::exp(-(g->s[j] - 3.0) * (g->s[j] - 3.0));
    ResolventOptions ro;
    ro.tol_res = ctx.tol.res;
    auto R0 = limiting_resolvent(pb, args.lambda, psi, 1, ro);
    oracle::SmallEpsOptions cap{spec.rmax / 4.0, 0.1};
    const std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
    std::vector<double> errs;
    Json rows = Json::array();
    bool im_positive = true;
    for (double e : eps) {
        auto ph = oracle::small_eps_resolvent(pb.mode(0), args.lambda, e, psi.values[0], cap);
        const double err = weighted_error(*g, ph, R0.phi.values[0], spec.rmax - cap.cap_width);
        cplx ip = 0.0;
        for (std::size_t j = 0; j < g->size(); ++j) ip += g->weights[j] * std::conj(psi.values[0][j]) * ph[j];
        im_positive = im_positive && ip.imag() > 0.0;
        errs.push_back(err);
        rows.push_back({{"eps", e}, {"error", err}, {"im_psi_phi", ip.imag()}});
    }
    const double rate = loglog_slope(eps, errs);
    const bool pass = rate >= 0.5 && im_positive;
    out = {{"lambda", args.lambda},
           {"cap_width", cap.cap_width},
           {"cap_strength", cap.cap_strength},
           {"weight", "(1 + s^2)^(-1/2)"},
           {"series", rows},
           {"rate", rate},
           {"rate_min", 0.5},
           {"im_positive", im_positive},
           {"pass", pass}};
    std::printf("small-eps: fitted rate %.3f\n", rate);
    return pass;
}

bool oracle_square_well(const Context& ctx, const OracleArgs& args, Json& out)
{
    const ManifoldModel& M = ctx.model;
    GridSpec spec = ctx.grid;
    spec.mmax = 0;
    Problem pb(M, spec);
    SmatrixOptions so;
    so.ft.tol_F = ctx.tol.F;
    so.mmax = 0;
    ScatteringData sd = scattering_matrix(pb, args.lambda, so);
    const ModeScattering& s0 = sd.mode(0);
    oracle::ClosedForm cf = M.well.enabled ? oracle::square_well(M.well.V0, M.well.a, args.lambda)
                                           : oracle::square_well(0.0, 0.0, args.lambda);
    const double dt = std::abs(std::abs(s0.entry(1, 0)) - std::abs(cf.t));
    const double drr = std::abs(std::abs(s0.entry(0, 0)) - std::abs(cf.r));
    const double dt2 = std::abs(std::abs(s0.entry(0, 1)) - std::abs(cf.t_right));
    const double dr2 = std::abs(std::abs(s0.entry(1, 1)) - std::abs(cf.r_right));
    const double err = std::max({dt, drr, dt2, dr2});
    const bool pass = err <= 1e-4;
    out = {{"lambda", args.lambda},
           {"V0", M.well.enabled ? M.well.V0 : 0.0},
           {"a", M.well.enabled ? M.well.a : 0.0},
           {"abs_t", std::abs(cf.t)},
           {"abs_r", std::abs(cf.r)},
           {"abs_S21", std::abs(s0.entry(1, 0))},
           {"abs_S11", std::abs(s0.entry(0, 0))},
           {"abs_S12", std::abs(s0.entry(0, 1))},
           {"abs_S22", std::abs(s0.entry(1, 1))},
           {"max_error", err},
           {"tolerance", 1e-4},
           {"pass", pass}};
    std::printf("square-well: max |S| entry error %.3e\n", err);
    return pass;
}

}  // namespace

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number(trim(item), what));
    if (out.empty()) fail(ErrorKind::validation, what + " is empty");
    return out;
}

std::vector<double> parse_range(const std::string& text, const std::string& what)
{
    if (text.find(':') == std::string::npos) return parse_list(text, what);
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(trim(item));
    if (parts.size() != 3) fail(ErrorKind::validation, what + " must be lo:hi:n");
    const double lo = parse_number(parts[0], what), hi = parse_number(parts[1], what);
    const double nd = parse_number(parts[2], what);
    const int n = int(nd);
    if (n < 1 || double(n) != nd) fail(ErrorKind::validation, what + ": n must be a positive integer");
    if (n > 1 && !(hi > lo)) fail(ErrorKind::validation, what + ": need lo < hi");
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) out[k] = n == 1 ? lo : lo + (hi - lo) * k / double(n - 1);
    return out;
}

SpectralProfile load_profile(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::validation, "cannot read " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        fail(ErrorKind::validation, path + ": " + e.what());
    }
    try {
        if (j.value("schema", 0) != 1) fail(ErrorKind::validation, path + ": expected \"schema\": 1");
        SpectralProfile out;
        out.smoothness = j.value("smoothness", 2);
        for (const auto& c : j.at("channels")) {
            const int end = c.at("end").get<int>();
            if (end != 1 && end != 2) fail(ErrorKind::validation, path + ": channel end must be 1 or 2");
            const int m = c.value("m", 0);
            SpectralProfile one;
            if (c.contains("bump")) {
                const auto& b = c.at("bump");
                cplx amp(b.value("amp", 1.0), b.value("amp_im", 0.0));
                const double lo = b.at("lo").get<double>(), hi = b.at("hi").get<double>();
                if (!(hi > lo)) fail(ErrorKind::validation, path + ": bump needs lo < hi");
                one = SpectralProfile::bump(end - 1, m, lo, hi, amp);
            } else {
                auto lam = c.at("lambda").get<std::vector<double>>();
                auto re = c.at("re").get<std::vector<double>>();
                std::vector<double> im = c.contains("im") ? c.at("im").get<std::vector<double>>()
                                                          : std::vector<double>(re.size(), 0.0);
                if (lam.size() != re.size() || lam.size() != im.size())
                    fail(ErrorKind::validation, path + ": lambda, re and im differ in length");
                std::vector<cplx> v(lam.size());
                for (std::size_t k = 0; k < v.size(); ++k) v[k] = cplx(re[k], im[k]);
                one = SpectralProfile::samples(end - 1, m, lam, v);
            }
            out.channels.insert(out.channels.end(), one.channels.begin(), one.channels.end());
        }
        if (out.channels.empty()) fail(ErrorKind::validation, path + ": profile has no channels");
        return out;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, path + ": " + e.what());
    }
}

Packet load_packet(const std::string& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::validation, "cannot read " + path);
    try {
        Json j = Json::parse(in);
        if (j.value("schema", 0) != 1) fail(ErrorKind::validation, path + ": expected \"schema\": 1");
        Packet p;
        const int end = j.at("end").get<int>();
        if (end != 1 && end != 2) fail(ErrorKind::validation, path + ": packet end must be 1 or 2");
        p.end = end - 1;
        p.m = j.value("m", 0);
        p.r_center = j.value("r_center", p.r_center);
        p.width = j.value("width", p.width);
        p.k = j.value("k", p.k);
        const std::string dir = j.value("direction", std::string("incoming"));
        if (dir != "incoming" && dir != "outgoing")
            fail(ErrorKind::validation, path + ": direction must be incoming or outgoing");
        p.incoming = dir == "incoming";
        return p;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::validation, path + ": " + e.what());
    }
}

void model_check(const Context& ctx, Json& report)
{
    const ManifoldModel& M = ctx.model;
    CriticalEnergy ce = critical_energy(M);
    std::vector<ClassFit> fits = classify_fit(M);
    report["model"] = M.name;
    report["r0"] = M.r0;
    report["core_half_width"] = M.core_half_width;
    report["lambda0"] = ce.lambda0;
    report["per_end"] = ce.per_end;
    Json classes = Json::array(), ends = Json::array();
    for (std::size_t e = 0; e < M.ends.size(); ++e) {
        const EndProfile& ep = M.ends[e];
        classes.push_back(to_string(fits[e].tag));
        ends.push_back({{"end", int(e) + 1},
                        {"warp", ep.warp.name},
                        {"v_long", ep.v_long.description},
                        {"v_short", ep.v_short.description},
                        {"curvature_in_q1", ep.curvature_in_q1},
                        {"lambda0", ce.per_end[e]},
                        {"class", to_string(fits[e].tag)},
                        {"decay_exponent", fjson(fits[e].exponent)},
                        {"decay_constant", fjson(fits[e].constant)},
                        {"fit_samples", fits[e].samples}});
    }
    report["classes"] = classes;
    report["ends"] = ends;
    if (M.well.enabled) report["square_well"] = {{"V0", M.well.V0}, {"a", M.well.a}};
    std::printf("lambda0 = %.12g  per_end = (%.12g, %.12g)  classes = (%s, %s)\n", ce.lambda0, ce.per_end[0],
                ce.per_end[1], to_string(fits[0].tag), to_string(fits[1].tag));
}

void resolvent(const Context& ctx, const ResolventArgs& args, Json& report)
{
    const int sign = check_sign(args.sign);
    if (std::abs(args.m) > ctx.grid.mmax) fail(ErrorKind::validation, "--mode exceeds --mmax");
    if (!(args.source_width > 0.0)) fail(ErrorKind::validation, "--source-width must be positive");
    Problem pb(ctx.model, ctx.grid);
    auto g = pb.grid();
    RadialState psi = RadialState::zeros(g, {args.m});
    if (!args.rhs.empty()) {
        std::vector<double> im;
        std::vector<double> re = read_rhs(args.rhs, *g, &im);
        for (std::size_t j = 0; j < g->size(); ++j) psi.values[0][j] = cplx(re[j], im[j]);
    } else {
        for (std::size_t j = 0; j < g->size(); ++j) {
            const double x = (g->s[j] - args.source_s) / args.source_width;
            psi.values[0][j] = std::exp(-0.5 * x * x);
        }
    }
    if (!(psi.norm() > 0.0)) fail(ErrorKind::validation, "source vanishes on the grid");
    report["lambda"] = args.lambda;
    report["sign"] = sign;
    report["mode"] = args.m;
    ResolventOptions ro;
    ro.tol_res = ctx.tol.res;
    ResolventResult R = limiting_resolvent(pb, args.lambda, psi, sign, ro);
    SommerfeldReport som = sommerfeld_check(pb, R.phi, psi, args.lambda, sign, ctx.tol.res);
    BesovNorms bp = besov_norms(psi), bf = besov_norms(R.phi);
    report["residual"] = R.residual;
    report["wronskian_drift"] = R.wronskian_drift;
    report["besov"] = {{"psi_B", bp.B}, {"phi_Bstar", bf.Bstar}, {"phi_B0_defect", bf.B0_defect}};
    report["sommerfeld"] = {{"residual", som.residual},
                            {"tail_defects", som.tail_defects},
                            {"phi_bstar", som.phi_bstar},
                            {"equation_ok", som.equation_ok},
                            {"radiation_ok", som.radiation_ok},
                            {"pass", som.pass}};
    write_file(ctx, "resolvent.csv", state_csv(R.phi, 1));
    std::printf("residual %.3e  sommerfeld %s\n", R.residual, som.pass ? "pass" : "fail");
    if (!som.pass) fail(ErrorKind::convergence, "Sommerfeld check failed");
}

void smatrix(const Context& ctx, const SmatrixArgs& args, Json& report)
{
    const std::vector<double> lambdas = parse_range(args.lambda_grid, "--lambda-grid");
    Problem pb(ctx.model, ctx.grid);
    SmatrixOptions so;
    so.ft.tol_F = ctx.tol.F;
    so.mmax = args.mmax;
    report["tol_S"] = ctx.tol.S;
    report["results"] = Json::array();
    std::string csv = "lambda,m,i,j,re,im,abs\n";
    std::string summary = "lambda,unitarity_defect,sv12,sv21\n";
    double worst = 0.0;
    for (double lam : lambdas) {
        ScatteringData sd = scattering_matrix(pb, lam, so);
        Json modes = Json::array();
        for (const ModeScattering& ms : sd.modes) {
            Json S = Json::array(), open = Json::array();
            const std::size_t n = ms.open_ends.size();
            for (int e : ms.open_ends) open.push_back(e + 1);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx z = ms.S[i * n + j];
                    const int ei = ms.open_ends[i] + 1, ej = ms.open_ends[j] + 1;
                    S.push_back({{"i", ei}, {"j", ej}, {"re", z.real()}, {"im", z.imag()}});
                    csv += num(lam) + "," + std::to_string(ms.m) + "," + std::to_string(ei) + "," +
                           std::to_string(ej) + "," + num(z.real()) + "," + num(z.imag()) + "," +
                           num(std::abs(z)) + "\n";
                }
            modes.push_back({{"m", ms.m},
                             {"open_ends", open},
                             {"unitarity_defect", ms.unitarity_defect},
                             {"condition", ms.condition},
                             {"S", S}});
        }
        Json sv = {{sd.offdiag_sv[0][0], sd.offdiag_sv[0][1]}, {sd.offdiag_sv[1][0], sd.offdiag_sv[1][1]}};
        report["results"].push_back(
            {{"lambda", lam}, {"unitarity_defect", sd.unitarity_defect}, {"offdiag_sv", sv}, {"modes", modes}});
        summary += num(lam) + "," + num(sd.unitarity_defect) + "," + num(sd.offdiag_sv[0][1]) + "," +
                   num(sd.offdiag_sv[1][0]) + "\n";
        worst = std::max(worst, sd.unitarity_defect);
    }
    report["max_unitarity_defect"] = worst;
    write_file(ctx, "smatrix.csv", csv);
    write_file(ctx, "smatrix_summary.csv", summary);
    std::printf("max unitarity defect %.3e over %zu energies\n", worst, lambdas.size());
    if (worst > ctx.tol.S) fail(ErrorKind::convergence, "unitarity defect above tol_S");
}

void dynamics(const Context& ctx, const DynamicsArgs& args, Json& report)
{
    const int sign = check_sign(args.sign);
    const Variant v = parse_variant(args.variant);
    if (args.csv_stride < 1) fail(ErrorKind::validation, "--csv-stride must be >= 1");
    const std::vector<double> times = increasing_times(args.times, "--times");
    SpectralProfile h = load_profile(args.profile);
    check_profile_modes(h, ctx.grid);
    Problem pb(ctx.model, ctx.grid);
    report["variant"] = args.variant;
    report["sign"] = sign;
    report["h_norm"] = h.norm();
    report["setups"] = end_setups(stationary_setups(ctx.model, pb.grid().get(), h));
    SpectralProfile input = h;
    if (v == Variant::sr || v == Variant::dollard) {
        input = modified_profile(ctx.model, h, v == Variant::sr ? ModifierKind::sr : ModifierKind::dollard, sign);
        report["modified_profile_norm"] = input.norm();
    }
    Json series = Json::array();
    std::vector<double> dist;
    for (double t : times) {
        RadialState st = dynamics_state(pb, input, t, v, sign);
        Json row = {{"t", t}, {"norm", st.norm()}, {"csv", "dynamics_t" + fmt_time(t) + ".csv"}};
        if (v == Variant::leading) {
            row["isometry_defect"] = std::abs(st.norm() - h.norm());
        } else {
            RadialState u0 = leading_term(pb, h, t, sign);
            const double d = (st - u0).norm();
            row["distance_to_leading"] = d;
            dist.push_back(d);
        }
        write_file(ctx, "dynamics_t" + fmt_time(t) + ".csv", state_csv(st, args.csv_stride));
        series.push_back(row);
    }
    report["series"] = series;
    if (!dist.empty()) {
        bool decreasing = true;
        for (std::size_t k = 1; k < dist.size(); ++k) decreasing = decreasing && dist[k] < dist[k - 1];
        bool positive = std::all_of(dist.begin(), dist.end(), [](double d) { return d > 0.0; });
        report["decay"] = {{"strictly_decreasing", decreasing},
                           {"slope", positive && dist.size() > 1 ? fjson(loglog_slope(times, dist)) : Json(nullptr)},
                           {"last_over_first", dist.front() > 0.0 ? dist.back() / dist.front() : 0.0}};
    }
    std::printf("dynamics: %zu states written\n", times.size());
}

void waveop(const Context& ctx, const WaveopArgs& args, Json& report)
{
    const int sign = check_sign(args.sign);
    if (args.comparison != "leading" && args.comparison != "exact")
        fail(ErrorKind::validation, "--comparison must be leading or exact");
    if (args.panels < 1) fail(ErrorKind::validation, "--panels must be >= 1");
    const std::vector<double> times = increasing_times(args.t_grid, "--t-grid");
    if (times.size() < 2) fail(ErrorKind::validation, "--t-grid needs at least two times");
    SpectralProfile h = load_profile(args.profile);
    check_profile_modes(h, ctx.grid);
    Problem pb(ctx.model, ctx.grid);
    WaveOpOptions o;
    o.tol_W = ctx.tol.W;
    o.comparison = args.comparison == "exact" ? Variant::exact : Variant::leading;
    o.evolution = ctx.evolution;
    WaveOpReport rep = wave_operator(pb, h, times, sign, o);
    report["comparison"] = args.comparison;
    report["sign"] = sign;
    report["tol_W"] = ctx.tol.W;
    report["times"] = rep.times;
    report["cauchy"] = rep.cauchy;
    report["comparison_norms"] = rep.comparison_norms;
    report["h_norm"] = rep.h_norm;
    report["estimate_norm"] = rep.estimate_norm;
    report["isometry_defect"] = std::abs(rep.estimate_norm - rep.h_norm) / rep.h_norm;
    report["converged"] = rep.converged;
    std::string csv = "t_from,t_to,cauchy\n";
    for (std::size_t k = 0; k + 1 < rep.times.size(); ++k)
        csv += num(rep.times[k]) + "," + num(rep.times[k + 1]) + "," + num(rep.cauchy[k]) + "\n";
    write_file(ctx, "waveop_cauchy.csv", csv);
    write_file(ctx, "waveop_estimate.csv", state_csv(rep.estimate, 1));
    bool adjoint_ok = true;
    if (args.adjoint) {
        FtOptions ft;
        ft.tol_F = ctx.tol.F;
        AdjointReport ad =
            adjoint_identity_check(pb, h, rep.estimate, adjoint_family(pb, h, sign), sign, args.panels, ft);
        Json lhs = Json::array(), rhs = Json::array();
        for (cplx z : ad.lhs) lhs.push_back(cjson(z));
        for (cplx z : ad.rhs) rhs.push_back(cjson(z));
        adjoint_ok = ad.max_defect <= ctx.tol.adj;
        report["adjoint"] = {{"lhs", lhs},
                             {"rhs", rhs},
                             {"defects", ad.defects},
                             {"max_defect", ad.max_defect},
                             {"lambda_nodes", ad.lambda_nodes},
                             {"tol_adj", ctx.tol.adj},
                             {"pass", adjoint_ok}};
    }
    std::printf("last Cauchy difference %.3e (tol %.1e)%s\n", rep.cauchy.back(), ctx.tol.W,
                args.adjoint ? (adjoint_ok ? ", adjoint pass" : ", adjoint fail") : "");
    if (!rep.converged) fail(ErrorKind::convergence, "Cauchy differences above tol_W");
    if (!adjoint_ok) fail(ErrorKind::convergence, "adjoint defect above tol_adj");
}

void transmission(const Context& ctx, const TransmissionArgs& args, Json& report)
{
    Packet p = load_packet(args.packet);
    const int from = p.end;
    if (args.to != 0 && args.to != 1 && args.to != 2) fail(ErrorKind::validation, "--to must be 1 or 2");
    const int to = args.to == 0 ? 1 - from : args.to - 1;
    if (std::abs(p.m) > ctx.grid.mmax) fail(ErrorKind::validation, "packet mode exceeds --mmax");
    if (args.panels < 1) fail(ErrorKind::validation, "--panels must be >= 1");
    if (args.filter_width < 0.0) fail(ErrorKind::validation, "--filter-width must be >= 0");
    Problem pb(ctx.model, ctx.grid);
    RadialState psi = gaussian_packet(pb, p);
    if (args.filter_width > 0.0) {
        FilterReport fr;
        psi = energy_filter(pb, psi, ctx.model.lambda0 + 4.0 * args.filter_width,
                            std::numeric_limits<double>::infinity(), args.filter_width, &fr);
        report["filter"] = {{"width", args.filter_width}, {"terms", fr.terms}, {"tail", fr.tail}, {"norm", psi.norm()}};
    }
    TransmissionOptions o;
    o.t_grid = increasing_times(args.t_grid, "--t-grid");
    o.panels = args.panels;
    o.evolution = ctx.evolution;
    if (o.evolution.absorber.width == 0.0) o.evolution.absorber = {ctx.grid.rmax / 4.0, 1.0};
    o.ft.tol_F = ctx.tol.F;
    o.stab_tol = ctx.tol.stab;
    report["from"] = from + 1;
    report["to"] = to + 1;
    TransmissionReport rep = transmission_experiment(pb, from, to, psi, o);
    report["psi_norm"] = rep.psi_norm;
    report["incoming_fraction"] = rep.incoming_fraction;
    report["dynamic"] = rep.dynamic;
    report["predicted"] = rep.predicted;
    report["predicted_direct"] = rep.predicted_direct;
    report["sigma_min"] = rep.sigma_min;
    report["lower_bound"] = rep.lower_bound;
    report["ratio"] = rep.ratio;
    report["verdict"] = rep.verdict;
    report["projection"] = {{"times", rep.projection.times},
                            {"masses", rep.projection.masses},
                            {"change", rep.projection.change},
                            {"stable", rep.projection.stable}};
    write_file(ctx, "transmission_state.csv", state_csv(rep.projection.state, 1));
    std::printf("transmission %d -> %d: dynamic %.5f predicted %.5f ratio %.4f (%s)\n", from + 1, to + 1,
                rep.dynamic, rep.predicted, rep.ratio, rep.verdict.c_str());
    if (!rep.projection.stable) fail(ErrorKind::convergence, "projected masses did not stabilize");
}

void oracle(const Context& ctx, const OracleArgs& args, Json& report)
{
    const std::string& c = args.check;
    if (c != "all" && c != "dense2d" && c != "small-eps" && c != "square-well")
        fail(ErrorKind::validation, "--check must be dense2d, small-eps, square-well or all");
    if (c == "square-well" && !ctx.model.well.enabled)
        fail(ErrorKind::validation, "the model has no square well");
    bool ok = true;
    if (c == "all" || c == "dense2d") {
        Json out;
        ok = oracle_dense2d(ctx, args, out) && ok;
        report["dense2d"] = out;
    }
    if (c == "all" || c == "small-eps") {
        Json out;
        ok = oracle_small_eps(ctx, args, out) && ok;
        report["small_eps"] = out;
    }
    if ((c == "all" && ctx.model.well.enabled) || c == "square-well") {
        Json out;
        ok = oracle_square_well(ctx, args, out) && ok;
        report["square_well"] = out;
    }
    if (!ok) fail(ErrorKind::convergence, "oracle cross-check failed");
}

}  // namespace ends::cli

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ends/config.hpp"
#include "ends/mode_reduction.hpp"
#include "ends/propagator.hpp"

namespace ends::cli {

using Json = nlohmann::ordered_json;

struct Tolerances {
    double S = 1e-6;
    double F = 1e-4;
    double W = 1e-3;
    double adj = 1e-3;
    double res = 1e-3;
    double stab = 2e-2;  // projection-mass stabilization
};

// Shared run state: model, grid, tolerances and evolution settings after merging the
// config file ([run] section) with command-line flags.
struct Context {
    Config cfg;
    ManifoldModel model;
    GridSpec grid;
    Tolerances tol;
    EvolutionConfig evolution;
    std::string out_dir;
};

struct ResolventArgs {
    double lambda = 0.5;
    int sign = 1;
    int m = 0;
    double source_s = 0.0;
    double source_width = 1.0;
    std::string rhs;  // CSV "s,re,im" on mode m; empty: Gaussian source
};

struct SmatrixArgs {
    std::string lambda_grid = "0.3:1.0:8";
    int mmax = -1;
};

struct DynamicsArgs {
    std::string profile;
    std::string times = "10,20,40,80,160,320,640";
    std::string variant = "leading";
    int sign = 1;
    int csv_stride = 1;
};

struct WaveopArgs {
    std::string profile;
    std::string t_grid = "10,20,40,80,160,320";
    std::string comparison = "leading";
    int sign = 1;
    bool adjoint = false;
    int panels = 16;
};

struct TransmissionArgs {
    std::string packet;
    int to = 0;  // 0: the other end
    std::string t_grid = "120,160,200";
    int panels = 8;
    double filter_width = 0.0;  // > 0: energy filter above lambda0 before the experiment
};

struct OracleArgs {
    std::string check = "all";
    double lambda = 0.5;
    double t = 5.0;
    int ns = 160;
    int ntheta = 48;
    double S = 4.0;
};

// Parses "a,b,c" and "lo:hi:n" (n equispaced points, both ends included).
std::vector<double> parse_list(const std::string& text, const std::string& what);
std::vector<double> parse_range(const std::string& text, const std::string& what);

// Spectral profile / packet files (JSON, "schema": 1).
SpectralProfile load_profile(const std::string& path);
Packet load_packet(const std::string& path);

// Each command fills `report`; a thrown Error leaves the partial report for diagnostics.
void model_check(const Context& ctx, Json& report);
void resolvent(const Context& ctx, const ResolventArgs& args, Json& report);
void smatrix(const Context& ctx, const SmatrixArgs& args, Json& report);
void dynamics(const Context& ctx, const DynamicsArgs& args, Json& report);
void waveop(const Context& ctx, const WaveopArgs& args, Json& report);
void transmission(const Context& ctx, const TransmissionArgs& args, Json& report);
void oracle(const Context& ctx, const OracleArgs& args, Json& report);

// Writes text to out_dir/name.
void write_file(const Context& ctx, const std::string& name, const std::string& text);
// Fixed-format number for CSV output.
std::string num(double v);

// Entry point; returns the process exit code (0 ok, 2 validation, 3 non-convergence).
int run(int argc, char** argv);

}  // namespace ends::cli

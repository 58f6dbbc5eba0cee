#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ends/config.hpp"

namespace ends {

using cplx = std::complex<double>;

// Value with derivatives up to fourth order (unused orders left at zero).
struct Jet {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double d4 = 0.0;
};

// Function of the radial coordinate r with derivatives.
struct RadialFunction {
    std::string description = "none";
    std::function<Jet(double)> eval;
    bool zero = true;
    bool constant = true;

    Jet operator()(double r) const { return zero ? Jet{} : eval(r); }

    static RadialFunction none();
    static RadialFunction power(double c, double p);  // c r^{-p}
    static RadialFunction table(const std::vector<double>& r, const std::vector<double>& v,
                                const std::string& label);
};

// Warp profile f(r) > 0, stored through log f.
struct WarpProfile {
    std::string name;
    std::function<Jet(double)> log_f;
    bool constant_curvature = false;  // (1/8)(g^2 + 2g') independent of r

    static WarpProfile euclidean();
    static WarpProfile hyperbolic();
    static WarpProfile conic(double alpha);
    static WarpProfile cylinder();
    static WarpProfile table(const std::vector<double>& r, const std::vector<double>& f,
                             const std::string& label);
};

enum class PotentialClass { short_range, dollard, long_range };
const char* to_string(PotentialClass c);

struct EndProfile {
    int id = 1;
    WarpProfile warp;
    RadialFunction v_long;   // goes to q1
    RadialFunction v_short;  // goes to q2
    bool curvature_in_q1 = true;

    double lambda0_end = 0.0;
    PotentialClass class_tag = PotentialClass::short_range;
    double class_exponent = 0.0;

    // tail upper envelope of q1 on a log grid, used for r_lambda
    std::vector<double> env_r, env_sup;

    Jet log_f(double r) const { return warp.log_f(r); }
    double f(double r) const;
    Jet curvature(double r) const;  // (1/8)(g^2 + 2 g') with derivatives
    Jet V(double r) const;
    Jet q1(double r) const;
    Jet q2(double r) const;
    double q(double r) const;
    bool q1_constant() const;
};

struct SquareWell {
    bool enabled = false;
    double V0 = 0.0;
    double a = 0.0;  // V0 on |s| < a
};

struct DecayParams {
    double sigma = 1.0;
    double tau = 1.0;
    double rho = 1.0;
};

struct LineJet {
    double log_f = 0.0;
    double g = 0.0;   // d log F / ds
    double dg = 0.0;  // d^2 log F / ds^2
    double V = 0.0;
    double dV = 0.0;
};

// Two ends joined through the core |s| < w (C^4 glue of log F and V); end 1 occupies s <= -w, end 2 s >= w,
// with r = r0/2 + |s| - w on the ends (|dr| = 1).
struct ManifoldModel {
    std::string name = "custom";
    std::vector<EndProfile> ends;
    double r0 = 2.0;
    double core_half_width = 1.0;
    SquareWell well;
    DecayParams decay;
    double horizon = 4096.0;
    double class_eps = 0.1;

    double lambda0 = 0.0;
    std::array<double, 10> core_logf{};  // degree-9 Hermite glue (C^4) in t = (s + w) / 2w
    std::array<double, 10> core_v{};

    // Builds the core glue, critical energies, envelopes and classes.
    void finalize();

    struct Location {
        int end = -1;  // -1 core, else end index 0/1
        double r = 0.0;
    };
    Location locate(double s) const;
    double s_of(int end, double r) const;
    double s_extent(double rmax) const;  // |s| of r = rmax

    LineJet line(double s) const;
    double W(int m, double s) const;  // effective mode potential on the line
    double W_end(int m, int end, double r) const;
    double dW_end_dr(int m, int end, double r) const;
    std::vector<double> breakpoints() const;
};

// Smooth cutoff: 1 on t <= 1, 0 on t >= 2.
double chi(double t);
double eta_lambda(const ManifoldModel& model, int end, double r, double lambda);
double r_lambda(const ManifoldModel& model, int end, double lambda);

double effective_potential(const ManifoldModel& model, double r, int end);
double effective_potential_line(const ManifoldModel& model, double s);

struct CriticalEnergy {
    double lambda0 = 0.0;
    std::vector<double> per_end;
};
CriticalEnergy critical_energy(const ManifoldModel& model, double tol = 1e-6);

struct PhaseB {
    cplx b;
    double bt = 0.0;  // b-tilde (= b under |dr| = 1), real part for real energy
};
PhaseB phase_b(const ManifoldModel& model, cplx z, double r, int end);

// Non-decaying angular term m^2 / (2 f^2) of ends with constant f (cylinders), else 0.
// Mode m on such an end sees the energy lambda - channel_shift in every WKB phase.
double channel_shift(const ManifoldModel& model, int end, int m);

struct PhaseA {
    cplx plus;
    cplx minus;
};
PhaseA phase_a(const ManifoldModel& model, cplx z, double r, int end);

enum class Branch { plus, minus };
double riccati_residual(const ManifoldModel& model, cplx z, double r, int end, Branch which,
                        bool use_b = false);

std::vector<PotentialClass> classify_potential(const ManifoldModel& model);

struct ClassFit {
    PotentialClass tag = PotentialClass::short_range;
    double exponent = 0.0;  // fitted decay p of |q1 - lambda0| ~ C r^{-p}; inf if identically zero
    double constant = 0.0;
    int samples = 0;
};
std::vector<ClassFit> classify_fit(const ManifoldModel& model);

// Config grammar: [model], [ends.1], [ends.2], [potential].
ManifoldModel model_from_config(const Config& cfg);

// Reference models.
ManifoldModel model_A();                       // two Euclidean ends
ManifoldModel model_B();                       // Euclidean + hyperbolic
ManifoldModel model_C(double p = 0.8);         // A with q1 = r^{-p} on end 2
ManifoldModel model_D(double V0 = 0.5, double a = 1.0);  // square well between flat ends
ManifoldModel model_free();                    // two flat ends, V = 0
ManifoldModel model_preset(const std::string& name);

}  // namespace ends

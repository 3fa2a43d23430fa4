#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "field.hpp"

namespace bsq {

/// Uniform grid t_m = m t_end / steps, m = 0..steps.
struct TimeGrid {
    double t_end = 0.5;
    int steps = 64;

    void validate() const {
        if (!(t_end > 0.0)) throw Error(ErrorCode::domain_error, "TimeGrid: t_end must be positive");
        if (steps < 2) throw Error(ErrorCode::domain_error, "TimeGrid: steps must be >= 2");
    }
    double h() const { return t_end / steps; }
    double node(int m) const { return t_end * m / steps; }
    int num_nodes() const { return steps + 1; }
};

/// Mild-solution trajectory: (v, theta) at every grid node.
struct Trajectory {
    TimeGrid grid;
    std::vector<VectorField> v;
    std::vector<ScalarField> th;

    /// sup over nodes of ||v||_{H1} + ||theta||_{H1}.
    double e_t_norm() const;
};

double trajectory_distance(const Trajectory& a, const Trajectory& b);

enum class T1Mode { nonhomogeneous_uniform, homogeneous };

/// delta/eta/T constants of the local existence and Gevrey-persistence steps.
struct ExistenceConstants {
    double delta0 = 0.0;
    double eta0 = 0.0;
    double T0 = 0.5;
    double delta1 = 0.0;
    double eta1 = 0.0;
    double T1 = 0.5;
    double rho = 0.0; ///< (2r/3) T1
    double calibration_C = 1.0;
    double radius_r = 0.0;
    T1Mode mode = T1Mode::nonhomogeneous_uniform;
};

/// delta0 = C (||v0|| + ||th0|| + ||f||_{H1} + ||g||_{H1}), eta0 = C ||gvec||_{H1/2},
/// T0 = (1/2) min(1, 1/(9 delta0)^4, 1/(3 eta0)^2).
ExistenceConstants compute_T0(const VectorField& v0, const ScalarField& theta0, const VectorField& f,
                              const ScalarField& g, const VectorField& gvec, double C);

/// Adds the Gevrey-step constants. Non-homogeneous (uniform) variant:
///   delta1 = C (e^{r^2}+1) (||g||_{H-1} ||gvec||_{L3/2} + ||f||_{H-1} + ||g||_{H-1}
///            + C_r ||(f,g)||_{G^{-1}_r}),   eta1 = C_r ||gvec||_{G^{1/2}_r}.
/// Homogeneous variant: delta1 = C (e^{r^2}+1)(||v0||_{H1} + ||th0||_{H1}).
/// T1 = (1/2) min(1, 1/(9 delta1)^4, 1/(3 eta1)^2) clamped to T0; rho = (2r/3) T1.
/// Throws ErrorCode::data_not_gevrey if a required Gevrey norm is infinite.
ExistenceConstants compute_T1(const VectorField& v0, const ScalarField& theta0, const VectorField& f,
                              const ScalarField& g, const VectorField& gvec, double r, double C,
                              T1Mode mode);

/// Heat semigroup e^{dt Delta}: multiplier e^{-dt |xi|^2} on every component.
ScalarField heat_propagate(const ScalarField& f, double dt);
VectorField heat_propagate(const VectorField& v, double dt);

/// Quadrature of int_0^{t_m} e^{(t_m - tau) Delta} N(tau) dtau with
/// piecewise-linear N and exact per-mode heat weights (psi1/psi2 with a series
/// fallback for small h |xi|^2).
ScalarField duhamel_integral(const std::vector<ScalarField>& integrand_nodes, const TimeGrid& grid,
                             int upto_node);

/// e0 = heat(v0, th0) + Duhamel of the (time-independent) forces.
Trajectory eval_e0(const VectorField& v0, const ScalarField& theta0, const VectorField* f,
                   const ScalarField* g, const TimeGrid& grid);

/// B(e,e) = Duhamel(-P div(v x v), -div(theta v)).
Trajectory eval_bilinear(const Trajectory& e);

/// L(e) = Duhamel(P(theta gvec), 0).
Trajectory eval_linear(const Trajectory& e, const VectorField& gvec);

struct PicardResult {
    Trajectory traj;
    int iterations = 0;
    std::vector<double> iterate_norms;    ///< E_T norm of every Picard iterate
    std::vector<double> distances;        ///< successive E_T distances
    double delta0 = 0.0;
    double T0 = 0.5;
    bool beyond_T0 = false;               ///< T exceeded the guaranteed horizon
    bool ball_checked = false;
    double final_norm = 0.0;
};

/// Trajectory-level Picard iteration e <- e0 + B(e,e) + L(e). Throws
/// ErrorCode::contraction_failure when an iterate exceeds 10 * (3 delta0) or
/// the converged trajectory leaves the 3 delta0 ball despite T <= T0;
/// NonConvergence when the iteration stalls.
PicardResult picard_mild_solve(const VectorField& v0, const ScalarField& theta0, const VectorField& f,
                               const ScalarField& g, const VectorField& gvec, double T, int steps,
                               double tol = 1e-10, double calibration_C = 1.0, int max_picard = 60);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<std::pair<double, double>> t_ratio; ///< (T, max ratio over trials)
};

/// Max over trials of ||B(e,e)||_{E_T} / ||e||^2_{E_T} per horizon, plus the
/// log-log least-squares fit of ratio vs T.
ScalingFit measure_bilinear_constant(const BoxSpec& box, const std::vector<double>& T_values, int trials,
                                     std::uint64_t seed, int steps = 32);

/// Same for ||L(e)||_{E_T} / (||e||_{E_T} ||gvec||_{H1/2}).
ScalingFit measure_linear_constant(const BoxSpec& box, const VectorField& gvec,
                                   const std::vector<double>& T_values, int trials, std::uint64_t seed,
                                   int steps = 32);

struct HeatLemmaReport {
    double max_ratio_h1 = 0.0; ///< vs int ||phi||_{H1} dtau
    double max_ratio_l2 = 0.0; ///< vs (int ||phi||^2_{L2} dtau)^{1/2}
};

HeatLemmaReport heat_lemma_check(const BoxSpec& box, int trials, std::uint64_t seed);

/// Evolve from the stationary state over [0, T]; max over nodes of the
/// relative H^1 drift from the initial state.
double stationary_drift_check(const VectorField& u, const ScalarField& theta, const VectorField& f,
                              const ScalarField& g, const VectorField& gvec, double T, int steps,
                              double calibration_C = 1.0);

/// Exponential (ETD2) time stepper for the homogeneous system on horizons
/// beyond the mild-solution theory; linear part integrated exactly.
void evolve_homogeneous_etd(VectorField& v, ScalarField& theta, const VectorField& gvec, double t_begin,
                            double t_end, int nsteps,
                            const std::function<void(double, const VectorField&, const ScalarField&)>& observer);

struct PicardTrialData {
    VectorField v0;
    ScalarField th0;
    VectorField f;
    ScalarField g;
    VectorField gvec;
};

struct CalibrationOutcome {
    double C = 1.0;
    int attempts = 1;
};

/// Raise C geometrically until every trial's Picard iterates stay inside the
/// 3 delta0 ball over [0, T0(C)].
CalibrationOutcome calibrate_existence_constant(const std::function<PicardTrialData(int)>& make_trial,
                                                int ntrials, int steps, double tol = 1e-10);

} // namespace bsq

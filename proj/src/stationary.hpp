#pragma once

#include <utility>
#include <vector>

#include "field.hpp"

namespace bsq {

struct StationaryConfig {
    double damping_alpha = 1.0; ///< relaxation factor in (0,1]
    double tol_residual = 1e-12; ///< relative H^1 fixed-point tolerance
    int max_iters = 200;

    void validate() const;
};

/// LHS/RHS-without-constant ratios of the a-priori energy estimates.
struct EnergyReport {
    double ratio_u = 0.0;        ///< ||u||^2_{H1} / (||g||^2_{H-1} ||gvec||^2_{L3/2} + ||f||^2_{H-1})
    double ratio_theta = 0.0;    ///< ||theta||^2_{H1} / ||g||^2_{H-1}   (constant-1 estimate)
    double ratio_pressure_u = 0.0;     ///< ||P_u||_{H1/2} / ||u||^2_{H1}
    double ratio_pressure_theta = 0.0; ///< ||P_theta||_{H1} / (||theta||_{H1} ||gvec||_{H1/2})
    double u_h1 = 0.0, theta_h1 = 0.0;
    double f_hm1 = 0.0, g_hm1 = 0.0, gvec_l32 = 0.0, gvec_h12 = 0.0;
};

struct IterationRecord {
    int iter;
    double du_h1;
    double dtheta_h1;
    double res_momentum;
    double res_heat;
};

struct StationaryResult {
    VectorField u;
    ScalarField theta;
    ScalarField pressure_u;
    ScalarField pressure_theta;
    int iterations = 0;
    double final_update_norm = 0.0;
    double max_divergence_defect = 0.0; ///< worst div sup-norm over all iterates
    EnergyReport energy;
    std::vector<IterationRecord> history;
};

/// One application of the fixed-point map
///   theta' = (-Delta)^{-1} (g - div(theta u))
///   u'     = (-Delta)^{-1} (f + P(theta gvec) - P div(u x u)).
std::pair<VectorField, ScalarField> apply_fixed_point_map(const VectorField& u, const ScalarField& theta,
                                                          const VectorField& f, const ScalarField& g,
                                                          const VectorField& gvec);

/// Damped iteration x_{n+1} = (1-alpha) x_n + alpha Map(x_n) from (0,0).
/// Throws NonConvergence (with the update-norm history) when the update norm
/// grows for 20 consecutive iterations or max_iters is exhausted.
StationaryResult solve_stationary(const VectorField& f, const ScalarField& g, const VectorField& gvec,
                                  const StationaryConfig& config);

/// Pressure split P = P_u + P_theta with
///   P_u = (-Delta)^{-1} div div(u x u),  P_theta = -(-Delta)^{-1} div(theta gvec).
std::pair<ScalarField, ScalarField> compute_pressure(const VectorField& u, const ScalarField& theta,
                                                     const VectorField& gvec);

/// H^{-1} norms of the residuals of both equations assembled with pressure P.
std::pair<double, double> pde_residual(const VectorField& u, const ScalarField& theta, const ScalarField& P,
                                       const VectorField& f, const ScalarField& g, const VectorField& gvec);

EnergyReport energy_report(const StationaryResult& result, const VectorField& f, const ScalarField& g,
                           const VectorField& gvec);

} // namespace bsq

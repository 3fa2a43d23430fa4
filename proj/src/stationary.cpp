#include "stationary.hpp"

#include <cmath>

#include "norms.hpp"
#include "operators.hpp"

namespace bsq {

namespace {

/// P(theta gvec) with the dealiased product.
VectorField buoyancy_term(const ScalarField& theta, const VectorField& gvec) {
    VectorField prod(theta.box);
    for (int d = 0; d < 3; ++d) prod.comp[d] = product_dealiased(theta, gvec.comp[d]);
    return leray_project(prod);
}

} // namespace

void StationaryConfig::validate() const {
    if (!(damping_alpha > 0.0) || damping_alpha > 1.0)
        throw Error(ErrorCode::domain_error, "StationaryConfig: damping_alpha must lie in (0,1]");
    if (!(tol_residual > 0.0))
        throw Error(ErrorCode::domain_error, "StationaryConfig: tol_residual must be positive");
    if (max_iters < 1) throw Error(ErrorCode::domain_error, "StationaryConfig: max_iters must be >= 1");
}

std::pair<VectorField, ScalarField> apply_fixed_point_map(const VectorField& u, const ScalarField& theta,
                                                          const VectorField& f, const ScalarField& g,
                                                          const VectorField& gvec) {
    require_same_box(u.box(), theta.box, "apply_fixed_point_map");
    require_same_box(u.box(), f.box(), "apply_fixed_point_map");
    require_same_box(u.box(), g.box, "apply_fixed_point_map");
    require_same_box(u.box(), gvec.box(), "apply_fixed_point_map");

    // Temperature first; the momentum update sees the refreshed theta.
    ScalarField theta_next = inverse_laplacian(g - nonlinear_div_scalar(theta, u));

    VectorField rhs = buoyancy_term(theta_next, gvec) - leray_project(nonlinear_div_tensor(u));
    rhs += f;
    VectorField u_next = inverse_laplacian(rhs);
    u_next.divergence_free = true;
    return {std::move(u_next), std::move(theta_next)};
}

StationaryResult solve_stationary(const VectorField& f, const ScalarField& g, const VectorField& gvec,
                                  const StationaryConfig& config) {
    config.validate();
    const BoxSpec& box = f.box();

    StationaryResult res;
    res.u = VectorField(box);
    res.u.divergence_free = true;
    res.theta = ScalarField(box);

    const double data_scale = h1_norm(inverse_laplacian(f)) + h1_norm(inverse_laplacian(g));
    std::vector<double> update_history;
    int growth_streak = 0;
    bool converged = false;

    for (int iter = 1; iter <= config.max_iters; ++iter) {
        auto [u_map, theta_map] = apply_fixed_point_map(res.u, res.theta, f, g, gvec);
        VectorField u_next = (1.0 - config.damping_alpha) * res.u + config.damping_alpha * u_map;
        u_next.divergence_free = true;
        ScalarField theta_next = (1.0 - config.damping_alpha) * res.theta + config.damping_alpha * theta_map;

        const double du = h1_norm(u_next - res.u);
        const double dtheta = h1_norm(theta_next - res.theta);
        const double update = du + dtheta;
        update_history.push_back(update);

        res.u = std::move(u_next);
        res.theta = std::move(theta_next);
        res.max_divergence_defect = std::max(res.max_divergence_defect, divergence_linf(res.u));
        res.iterations = iter;
        res.final_update_norm = update;

        auto [pu, pt] = compute_pressure(res.u, res.theta, gvec);
        const auto [rm, rh] = pde_residual(res.u, res.theta, pu + pt, f, g, gvec);
        res.history.push_back({iter, du, dtheta, rm, rh});

        const double state_norm = h1_norm(res.u) + h1_norm(res.theta);
        if (update <= config.tol_residual * std::max(state_norm, 1e-300)) {
            converged = true;
            res.pressure_u = std::move(pu);
            res.pressure_theta = std::move(pt);
            break;
        }

        if (update_history.size() >= 2 && update > update_history[update_history.size() - 2]) {
            if (++growth_streak >= 20)
                throw NonConvergence(
                    "solve_stationary: update norm grew for 20 consecutive iterations "
                    "(data outside the small-data contraction regime)",
                    update_history);
        } else {
            growth_streak = 0;
        }
        // Hard blow-up guard: far outside any small-data ball.
        if (data_scale > 0.0 && h1_norm(res.u) + h1_norm(res.theta) > 1e6 * data_scale)
            throw NonConvergence("solve_stationary: iterate norm blew up", update_history);
    }

    if (!converged)
        throw NonConvergence("solve_stationary: max_iters reached without convergence", update_history);

    res.energy = energy_report(res, f, g, gvec);
    return res;
}

std::pair<ScalarField, ScalarField> compute_pressure(const VectorField& u, const ScalarField& theta,
                                                     const VectorField& gvec) {
    // P_u = (-Delta)^{-1} div div(u x u): div of the tensor divergence.
    ScalarField pu = inverse_laplacian(divergence(nonlinear_div_tensor(u)));
    // P_theta = -(-Delta)^{-1} div(theta gvec).
    VectorField prod(u.box());
    for (int d = 0; d < 3; ++d) prod.comp[d] = product_dealiased(theta, gvec.comp[d]);
    ScalarField pt = -1.0 * inverse_laplacian(divergence(prod));
    return {std::move(pu), std::move(pt)};
}

std::pair<double, double> pde_residual(const VectorField& u, const ScalarField& theta, const ScalarField& P,
                                       const VectorField& f, const ScalarField& g, const VectorField& gvec) {
    VectorField res_m = nonlinear_div_tensor(u);
    for (int d = 0; d < 3; ++d) {
        res_m.comp[d] += laplacian_neg(u.comp[d]); // -Delta u
        res_m.comp[d] += gradient_component(P, d);
        res_m.comp[d] -= product_dealiased(theta, gvec.comp[d]);
        res_m.comp[d] -= f.comp[d];
    }

    ScalarField res_h = laplacian_neg(theta) + nonlinear_div_scalar(theta, u) - g;

    return {sobolev_norm(res_m, -1.0), sobolev_norm(res_h, -1.0)};
}

EnergyReport energy_report(const StationaryResult& result, const VectorField& f, const ScalarField& g,
                           const VectorField& gvec) {
    EnergyReport rep;
    rep.u_h1 = h1_norm(result.u);
    rep.theta_h1 = h1_norm(result.theta);
    rep.f_hm1 = sobolev_norm(f, -1.0);
    rep.g_hm1 = sobolev_norm(g, -1.0);
    rep.gvec_l32 = lp_norm(gvec, 1.5);
    rep.gvec_h12 = sobolev_norm(gvec, 0.5);

    const double denom_u = rep.g_hm1 * rep.g_hm1 * rep.gvec_l32 * rep.gvec_l32 + rep.f_hm1 * rep.f_hm1;
    rep.ratio_u = denom_u > 0.0 ? rep.u_h1 * rep.u_h1 / denom_u : 0.0;
    rep.ratio_theta = rep.g_hm1 > 0.0 ? rep.theta_h1 * rep.theta_h1 / (rep.g_hm1 * rep.g_hm1) : 0.0;

    const double pu_h12 = sobolev_norm(result.pressure_u, 0.5);
    rep.ratio_pressure_u = rep.u_h1 > 0.0 ? pu_h12 / (rep.u_h1 * rep.u_h1) : 0.0;
    const double pt_h1 = h1_norm(result.pressure_theta);
    const double denom_pt = rep.theta_h1 * rep.gvec_h12;
    rep.ratio_pressure_theta = denom_pt > 0.0 ? pt_h1 / denom_pt : 0.0;
    return rep;
}

} // namespace bsq

#include "evolution.hpp"

#include <cmath>
#include <limits>

#include "forcing.hpp"
#include "norms.hpp"
#include "operators.hpp"
#include "transform.hpp"

namespace bsq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double half_min3(double a, double b, double c) { return 0.5 * std::min(a, std::min(b, c)); }

/// Per-mode weights of one Duhamel subinterval of width h:
///   J_{m+1} = E J_m + c0 N_m + c1 N_{m+1},
/// E = e^{-z}, c0 = I0 - I1, c1 = I1, z = h |xi|^2, with
/// I0 = h (1-e^{-z})/z and I1 = h (z - 1 + e^{-z})/z^2 (series for small z).
struct DuhamelWeights {
    std::vector<double> E, c0, c1;

    DuhamelWeights(const BoxSpec& box, double h) {
        const std::size_t n = box.num_modes();
        E.assign(n, 0.0);
        c0.assign(n, 0.0);
        c1.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            const double axi = abs_xi_of(box, i);
            const double z = h * axi * axi;
            const double e = std::exp(-z);
            double i0, i1;
            if (z < 1e-4) {
                i0 = h * (1.0 - z / 2.0 + z * z / 6.0 - z * z * z / 24.0);
                i1 = h * (0.5 - z / 6.0 + z * z / 24.0 - z * z * z / 120.0);
            } else {
                i0 = h * (1.0 - e) / z;
                i1 = h * (z - 1.0 + e) / (z * z);
            }
            E[i] = e;
            c0[i] = i0 - i1;
            c1[i] = i1;
        }
    }
};

void weighted_step(ScalarField& J, const ScalarField& n_lo, const ScalarField& n_hi, const DuhamelWeights& w) {
    const std::size_t n = J.coeffs.size();
    for (std::size_t i = 1; i < n; ++i)
        J.coeffs[i] = w.E[i] * J.coeffs[i] + w.c0[i] * n_lo.coeffs[i] + w.c1[i] * n_hi.coeffs[i];
    J.coeffs[0] = Complex{0.0, 0.0};
}

void weighted_step(VectorField& J, const VectorField& n_lo, const VectorField& n_hi, const DuhamelWeights& w) {
    for (int d = 0; d < 3; ++d) weighted_step(J.comp[d], n_lo.comp[d], n_hi.comp[d], w);
}

void heat_step_inplace(ScalarField& f, const DuhamelWeights& w) {
    const std::size_t n = f.coeffs.size();
    for (std::size_t i = 1; i < n; ++i) f.coeffs[i] *= w.E[i];
    f.coeffs[0] = Complex{0.0, 0.0};
}

void heat_step_inplace(VectorField& v, const DuhamelWeights& w) {
    for (int d = 0; d < 3; ++d) heat_step_inplace(v.comp[d], w);
}

PhysicalField pointwise_product(const PhysicalField& a, const PhysicalField& b) {
    PhysicalField out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

/// Shared-buffer evaluation of the nonlinear/buoyancy integrands at one state:
///   N_mom  = P( f + theta gvec - div(v x v) )
///   N_heat = g - div(theta v)
/// gvec enters through its cached dealiased physical samples; null pointers
/// mean the corresponding datum is zero.
struct IntegrandEvaluator {
    const BoxSpec box;
    const VectorField* f;
    const ScalarField* g;
    bool has_gvec = false;
    std::array<PhysicalField, 3> gvec_phys;

    IntegrandEvaluator(const BoxSpec& b, const VectorField* f_, const ScalarField* g_, const VectorField* gvec_)
        : box(b), f(f_), g(g_) {
        if (gvec_ != nullptr && max_abs_coeff(*gvec_) > 0.0) {
            has_gvec = true;
            VectorField tg = *gvec_;
            dealias_inplace(tg);
            gvec_phys = transform_to_physical_unchecked(tg);
        }
    }

    void eval(const VectorField& v, const ScalarField& th, VectorField& n_mom, ScalarField& n_heat) const {
        VectorField tv = v;
        dealias_inplace(tv);
        ScalarField tth = th;
        dealias_inplace(tth);
        const auto pv = transform_to_physical_unchecked(tv);
        const PhysicalField pth = transform_to_physical_unchecked(tth);

        const double xi_unit = box.xi_unit();
        const std::size_t n = box.num_modes();

        // Momentum: buoyancy minus tensor divergence, then Leray, then + f.
        VectorField mom(box);
        ScalarField T[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j) {
                ScalarField prod = transform_to_spectral(pointwise_product(pv[i], pv[j]), box);
                dealias_inplace(prod);
                T[i][j] = std::move(prod);
            }
        for (int i = 0; i < 3; ++i) {
            ScalarField acc(box);
            for (std::size_t idx = 1; idx < n; ++idx) {
                const auto k = box.freq_of_linear(idx);
                Complex s{0.0, 0.0};
                for (int j = 0; j < 3; ++j) {
                    const ScalarField& Tij = j >= i ? T[i][j] : T[j][i];
                    s += static_cast<double>(k[j]) * Tij.coeffs[idx];
                }
                acc.coeffs[idx] = Complex{0.0, -xi_unit} * s; // minus div(v x v)
            }
            mom.comp[i] = std::move(acc);
        }
        if (has_gvec) {
            for (int d = 0; d < 3; ++d) {
                ScalarField buoy = transform_to_spectral(pointwise_product(pth, gvec_phys[d]), box);
                dealias_inplace(buoy);
                mom.comp[d] += buoy;
            }
        }
        n_mom = leray_project(mom);
        if (f != nullptr) n_mom += *f;
        n_mom.divergence_free = true;

        // Heat: g - div(theta v).
        ScalarField heat(box);
        for (int j = 0; j < 3; ++j) {
            ScalarField q = transform_to_spectral(pointwise_product(pth, pv[j]), box);
            dealias_inplace(q);
            for (std::size_t idx = 1; idx < n; ++idx) {
                const auto k = box.freq_of_linear(idx);
                heat.coeffs[idx] -= Complex{0.0, xi_unit * k[j]} * q.coeffs[idx];
            }
        }
        if (g != nullptr) heat += *g;
        heat.set_zero_mode_zero();
        n_heat = std::move(heat);
    }
};

double node_norm(const VectorField& v, const ScalarField& th) { return h1_norm(v) + h1_norm(th); }

} // namespace

double Trajectory::e_t_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, node_norm(v[i], th[i]));
    return m;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        m = std::max(m, h1_norm(a.v[i] - b.v[i]) + h1_norm(a.th[i] - b.th[i]));
    return m;
}

ExistenceConstants compute_T0(const VectorField& v0, const ScalarField& theta0, const VectorField& f,
                              const ScalarField& g, const VectorField& gvec, double C) {
    if (!(C > 0.0)) throw Error(ErrorCode::domain_error, "compute_T0: calibration constant must be positive");
    ExistenceConstants out;
    out.calibration_C = C;
    out.delta0 = C * (h1_norm(v0) + h1_norm(theta0) + h1_norm(f) + h1_norm(g));
    out.eta0 = C * sobolev_norm(gvec, 0.5);
    const double b_delta = out.delta0 > 0.0 ? 1.0 / std::pow(9.0 * out.delta0, 4.0) : kInf;
    const double b_eta = out.eta0 > 0.0 ? 1.0 / std::pow(3.0 * out.eta0, 2.0) : kInf;
    out.T0 = half_min3(1.0, b_delta, b_eta);
    return out;
}

ExistenceConstants compute_T1(const VectorField& v0, const ScalarField& theta0, const VectorField& f,
                              const ScalarField& g, const VectorField& gvec, double r, double C,
                              T1Mode mode) {
    if (!(r > 0.0)) throw Error(ErrorCode::domain_error, "compute_T1: radius r must be positive");
    ExistenceConstants out = compute_T0(v0, theta0, f, g, gvec, C);
    out.radius_r = r;
    out.mode = mode;

    const double cr = control_gevrey_constant(r);
    const double gvec_g12 = gevrey_norm(gvec, 0.5, r);
    if (std::isinf(gvec_g12))
        throw Error(ErrorCode::data_not_gevrey, "compute_T1: gvec has no finite G^{1/2}_r norm at this radius");
    out.eta1 = cr * gvec_g12;

    const double amp = C * (std::exp(r * r) + 1.0);
    if (mode == T1Mode::homogeneous) {
        out.delta1 = amp * (h1_norm(v0) + h1_norm(theta0));
    } else {
        const double f_g = gevrey_norm(f, -1.0, r);
        const double g_g = gevrey_norm(g, -1.0, r);
        if (std::isinf(f_g) || std::isinf(g_g))
            throw Error(ErrorCode::data_not_gevrey,
                        "compute_T1: (f,g) has no finite G^{-1}_r norm at this radius");
        const double fg_joint = std::sqrt(f_g * f_g + g_g * g_g);
        const double f_hm1 = sobolev_norm(f, -1.0);
        const double g_hm1 = sobolev_norm(g, -1.0);
        const double gvec_l32 = lp_norm(gvec, 1.5);
        out.delta1 = amp * (g_hm1 * gvec_l32 + f_hm1 + g_hm1 + cr * fg_joint);
    }

    const double b_delta = out.delta1 > 0.0 ? 1.0 / std::pow(9.0 * out.delta1, 4.0) : kInf;
    const double b_eta = out.eta1 > 0.0 ? 1.0 / std::pow(3.0 * out.eta1, 2.0) : kInf;
    out.T1 = std::min(half_min3(1.0, b_delta, b_eta), out.T0);
    out.rho = (2.0 * r / 3.0) * out.T1;
    return out;
}

ScalarField heat_propagate(const ScalarField& f, double dt) {
    if (dt < 0.0) throw Error(ErrorCode::domain_error, "heat_propagate: dt must be nonnegative");
    return apply_radial_multiplier(f, [dt](double a) { return std::exp(-dt * a * a); });
}

VectorField heat_propagate(const VectorField& v, double dt) {
    if (dt < 0.0) throw Error(ErrorCode::domain_error, "heat_propagate: dt must be nonnegative");
    return apply_radial_multiplier(v, [dt](double a) { return std::exp(-dt * a * a); });
}

ScalarField duhamel_integral(const std::vector<ScalarField>& integrand_nodes, const TimeGrid& grid,
                             int upto_node) {
    grid.validate();
    if (upto_node < 0 || upto_node >= grid.num_nodes() ||
        integrand_nodes.size() < static_cast<std::size_t>(upto_node) + 1)
        throw Error(ErrorCode::domain_error, "duhamel_integral: node index out of range");
    const BoxSpec& box = integrand_nodes[0].box;
    const DuhamelWeights w(box, grid.h());
    ScalarField J(box);
    for (int m = 0; m < upto_node; ++m) weighted_step(J, integrand_nodes[m], integrand_nodes[m + 1], w);
    return J;
}

Trajectory eval_e0(const VectorField& v0, const ScalarField& theta0, const VectorField* f,
                   const ScalarField* g, const TimeGrid& grid) {
    grid.validate();
    const BoxSpec& box = v0.box();
    const DuhamelWeights w(box, grid.h());

    Trajectory out;
    out.grid = grid;
    out.v.reserve(grid.num_nodes());
    out.th.reserve(grid.num_nodes());

    VectorField v_heat = v0;
    ScalarField th_heat = theta0;
    VectorField Jv(box);
    ScalarField Jt(box);

    out.v.push_back(v_heat);
    out.th.push_back(th_heat);
    for (int m = 1; m < grid.num_nodes(); ++m) {
        heat_step_inplace(v_heat, w);
        heat_step_inplace(th_heat, w);
        VectorField node_v = v_heat;
        ScalarField node_t = th_heat;
        if (f != nullptr) {
            weighted_step(Jv, *f, *f, w);
            node_v += Jv;
        }
        if (g != nullptr) {
            weighted_step(Jt, *g, *g, w);
            node_t += Jt;
        }
        node_v.divergence_free = v0.divergence_free;
        out.v.push_back(std::move(node_v));
        out.th.push_back(std::move(node_t));
    }
    return out;
}

namespace {

/// Duhamel over the whole trajectory with an integrand callback per node.
Trajectory accumulate_duhamel(const TimeGrid& grid, const BoxSpec& box,
                              const std::function<void(int, VectorField&, ScalarField&)>& integrand_at) {
    const DuhamelWeights w(box, grid.h());
    Trajectory out;
    out.grid = grid;
    out.v.reserve(grid.num_nodes());
    out.th.reserve(grid.num_nodes());

    VectorField Jv(box);
    ScalarField Jt(box);
    VectorField n_lo(box), n_hi(box);
    ScalarField nt_lo(box), nt_hi(box);
    integrand_at(0, n_lo, nt_lo);

    out.v.push_back(VectorField(box));
    out.th.push_back(ScalarField(box));
    for (int m = 1; m < grid.num_nodes(); ++m) {
        integrand_at(m, n_hi, nt_hi);
        weighted_step(Jv, n_lo, n_hi, w);
        weighted_step(Jt, nt_lo, nt_hi, w);
        out.v.push_back(Jv);
        out.th.push_back(Jt);
        std::swap(n_lo, n_hi);
        std::swap(nt_lo, nt_hi);
    }
    return out;
}

} // namespace

Trajectory eval_bilinear(const Trajectory& e) {
    const BoxSpec& box = e.v[0].box();
    IntegrandEvaluator ev(box, nullptr, nullptr, nullptr);
    return accumulate_duhamel(e.grid, box, [&](int m, VectorField& nv, ScalarField& nt) {
        ev.eval(e.v[m], e.th[m], nv, nt);
    });
}

Trajectory eval_linear(const Trajectory& e, const VectorField& gvec) {
    const BoxSpec& box = e.v[0].box();
    IntegrandEvaluator ev(box, nullptr, nullptr, &gvec);
    VectorField zero_v(box);
    return accumulate_duhamel(e.grid, box, [&](int m, VectorField& nv, ScalarField& nt) {
        // Only the buoyancy part: evaluate with v = 0 so div terms vanish.
        ev.eval(zero_v, e.th[m], nv, nt);
        nt = ScalarField(box);
    });
}

PicardResult picard_mild_solve(const VectorField& v0, const ScalarField& theta0, const VectorField& f,
                               const ScalarField& g, const VectorField& gvec, double T, int steps,
                               double tol, double calibration_C, int max_picard) {
    const BoxSpec& box = v0.box();
    require_same_box(box, theta0.box, "picard_mild_solve");
    require_same_box(box, f.box(), "picard_mild_solve");
    require_same_box(box, g.box, "picard_mild_solve");
    require_same_box(box, gvec.box(), "picard_mild_solve");
    if (!(T > 0.0)) throw Error(ErrorCode::domain_error, "picard_mild_solve: T must be positive");

    const ExistenceConstants c0 = compute_T0(v0, theta0, f, g, gvec, calibration_C);

    PicardResult res;
    res.delta0 = c0.delta0;
    res.T0 = c0.T0;
    res.beyond_T0 = T > c0.T0 * (1.0 + 1e-12);

    TimeGrid grid{T, steps};
    grid.validate();

    const bool has_f = max_abs_coeff(f) > 0.0;
    const bool has_g = max_abs_coeff(g) > 0.0;
    IntegrandEvaluator ev(box, has_f ? &f : nullptr, has_g ? &g : nullptr, &gvec);

    Trajectory prev = eval_e0(v0, theta0, has_f ? &f : nullptr, has_g ? &g : nullptr, grid);
    res.iterate_norms.push_back(prev.e_t_norm());

    const double ball = 3.0 * c0.delta0;
    const DuhamelWeights w(box, grid.h());

    for (int it = 1; it <= max_picard; ++it) {
        // next = e0 + Duhamel(full integrand of prev); the heat part of e0 is
        // propagated cumulatively alongside the recurrence.
        Trajectory next;
        next.grid = grid;
        next.v.reserve(grid.num_nodes());
        next.th.reserve(grid.num_nodes());

        VectorField v_heat = v0;
        ScalarField th_heat = theta0;
        VectorField Jv(box);
        ScalarField Jt(box);
        VectorField n_lo(box), n_hi(box);
        ScalarField nt_lo(box), nt_hi(box);
        ev.eval(prev.v[0], prev.th[0], n_lo, nt_lo);

        next.v.push_back(v_heat);
        next.th.push_back(th_heat);
        for (int m = 1; m < grid.num_nodes(); ++m) {
            ev.eval(prev.v[m], prev.th[m], n_hi, nt_hi);
            heat_step_inplace(v_heat, w);
            heat_step_inplace(th_heat, w);
            weighted_step(Jv, n_lo, n_hi, w);
            weighted_step(Jt, nt_lo, nt_hi, w);
            VectorField node_v = v_heat + Jv;
            node_v.divergence_free = true;
            next.v.push_back(std::move(node_v));
            next.th.push_back(th_heat + Jt);
            std::swap(n_lo, n_hi);
            std::swap(nt_lo, nt_hi);
        }

        const double norm = next.e_t_norm();
        res.iterate_norms.push_back(norm);
        if (c0.delta0 > 0.0 && norm > 10.0 * ball)
            throw Error(ErrorCode::contraction_failure,
                        "picard_mild_solve: iterate E_T norm exceeded 10 * (3 delta0)");

        const double dist = trajectory_distance(next, prev);
        res.distances.push_back(dist);
        prev = std::move(next);
        res.iterations = it;
        if (dist <= tol * std::max(norm, 1e-300)) {
            res.final_norm = norm;
            if (!res.beyond_T0) {
                res.ball_checked = true;
                if (norm > ball * (1.0 + 1e-9) + 1e-300)
                    throw Error(ErrorCode::contraction_failure,
                                "picard_mild_solve: converged trajectory left the 3 delta0 ball on [0, T0]");
            }
            res.traj = std::move(prev);
            return res;
        }
    }
    throw NonConvergence("picard_mild_solve: Picard iteration did not reach tolerance", res.distances);
}

namespace {

Trajectory constant_trajectory(const VectorField& v, const ScalarField& th, const TimeGrid& grid) {
    Trajectory e;
    e.grid = grid;
    e.v.assign(grid.num_nodes(), v);
    e.th.assign(grid.num_nodes(), th);
    return e;
}

ScalingFit fit_loglog(const std::vector<std::pair<double, double>>& t_ratio) {
    ScalingFit fit;
    fit.t_ratio = t_ratio;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(t_ratio.size());
    for (const auto& [t, r] : t_ratio) {
        const double x = std::log(t), y = std::log(r);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    fit.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

// Broadband random state whose product spectrum straddles the heat-kernel
// crossover T |xi|^2 ~ 1 across the tested horizons.
VectorField scaling_trial_vector(const BoxSpec& box, std::uint64_t seed, double spectral_p) {
    VectorField v(box);
    const int half = box.resolution_N / 2 - 1;
    const double u = box.xi_unit();
    for (int d = 0; d < 3; ++d) {
        ScalarField& c = v.comp[d];
        for (int k0 = -half; k0 <= half; ++k0)
            for (int k1 = -half; k1 <= half; ++k1)
                for (int k2 = -half; k2 <= half; ++k2) {
                    if (k0 == 0 && k1 == 0 && k2 == 0) continue;
                    const double axi =
                        u * std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
                    c.at(k0, k1, k2) = std::pow(axi, -spectral_p) *
                                       phase_of_mode(seed * 131u + d, k0, k1, k2);
                }
    }
    return leray_project(v);
}

} // namespace

ScalingFit measure_bilinear_constant(const BoxSpec& box, const std::vector<double>& T_values, int trials,
                                     std::uint64_t seed, int steps) {
    if (T_values.size() < 3)
        throw Error(ErrorCode::domain_error, "measure_bilinear_constant: need >= 3 horizons");
    std::vector<std::pair<double, double>> t_ratio;
    for (double T : T_values) {
        const TimeGrid grid{T, steps};
        double worst = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            // |xi|^{-2} power law: the product spectrum then crosses T |xi|^2 ~ 1
            // inside the lattice for T in [T0/8, T0], which is what makes the
            // T^{1/4} envelope measurable rather than the unsaturated T^1 regime.
            VectorField v = scaling_trial_vector(box, seed + 1000 * trial + 1, 2.0);
            ScalarField th = v.comp[2]; // same spectral class for the theta channel
            const Trajectory e = constant_trajectory(v, th, grid);
            const double en = e.e_t_norm();
            if (en == 0.0) continue; // ratio undefined, trial skipped
            const Trajectory be = eval_bilinear(e);
            worst = std::max(worst, be.e_t_norm() / (en * en));
        }
        t_ratio.emplace_back(T, worst);
    }
    return fit_loglog(t_ratio);
}

ScalingFit measure_linear_constant(const BoxSpec& box, const VectorField& gvec,
                                   const std::vector<double>& T_values, int trials, std::uint64_t seed,
                                   int steps) {
    if (T_values.size() < 3)
        throw Error(ErrorCode::domain_error, "measure_linear_constant: need >= 3 horizons");
    const double gnorm = sobolev_norm(gvec, 0.5);
    std::vector<std::pair<double, double>> t_ratio;
    for (double T : T_values) {
        const TimeGrid grid{T, steps};
        double worst = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            VectorField v = scaling_trial_vector(box, seed + 2000 * trial + 7, 1.75);
            ScalarField th = v.comp[0];
            const Trajectory e = constant_trajectory(v, th, grid);
            const double en = e.e_t_norm();
            if (en == 0.0 || gnorm == 0.0) continue;
            const Trajectory le = eval_linear(e, gvec);
            worst = std::max(worst, le.e_t_norm() / (en * gnorm));
        }
        t_ratio.emplace_back(T, worst);
    }
    return fit_loglog(t_ratio);
}

HeatLemmaReport heat_lemma_check(const BoxSpec& box, int trials, std::uint64_t seed) {
    HeatLemmaReport rep;
    const TimeGrid grid{1.0, 32};
    const DuhamelWeights w(box, grid.h());
    for (int trial = 0; trial < trials; ++trial) {
        const ScalarField A = make_gevrey_scalar(
            ForceSpec{0.5 + 0.1 * (trial % 5), 1.0, 1.0, seed + 11 * trial, SpectrumShape::exp_decay, 1.0}, box);
        const ScalarField B = make_gevrey_scalar(
            ForceSpec{0.3 + 0.05 * (trial % 7), 1.0, 0.7, seed + 11 * trial + 5, SpectrumShape::exp_decay, 1.0},
            box);
        const double omega = 0.5 + 0.4 * (trial % 4);

        ScalarField J(box);
        double int_h1 = 0.0, int_l2sq = 0.0;
        auto phi_at = [&](int m) {
            const double t = grid.node(m);
            return std::cos(omega * t) * A + std::sin(omega * t) * B;
        };
        ScalarField lo = phi_at(0);
        double h1_lo = h1_norm(lo), l2_lo = sobolev_norm(lo, 0.0);
        for (int m = 1; m < grid.num_nodes(); ++m) {
            ScalarField hi = phi_at(m);
            const double h1_hi = h1_norm(hi), l2_hi = sobolev_norm(hi, 0.0);
            weighted_step(J, lo, hi, w);
            int_h1 += 0.5 * grid.h() * (h1_lo + h1_hi);
            int_l2sq += 0.5 * grid.h() * (l2_lo * l2_lo + l2_hi * l2_hi);
            lo = std::move(hi);
            h1_lo = h1_hi;
            l2_lo = l2_hi;
        }
        const double lhs = h1_norm(J);
        if (int_h1 > 0.0) rep.max_ratio_h1 = std::max(rep.max_ratio_h1, lhs / int_h1);
        if (int_l2sq > 0.0) rep.max_ratio_l2 = std::max(rep.max_ratio_l2, lhs / std::sqrt(int_l2sq));
    }
    return rep;
}

double stationary_drift_check(const VectorField& u, const ScalarField& theta, const VectorField& f,
                              const ScalarField& g, const VectorField& gvec, double T, int steps,
                              double calibration_C) {
    const double base = h1_norm(u) + h1_norm(theta);
    const PicardResult run = picard_mild_solve(u, theta, f, g, gvec, T, steps, 1e-12, calibration_C);
    if (base == 0.0) {
        double m = 0.0;
        for (int n = 0; n < run.traj.grid.num_nodes(); ++n)
            m = std::max(m, node_norm(run.traj.v[n], run.traj.th[n]));
        return m;
    }
    double drift = 0.0;
    for (int n = 0; n < run.traj.grid.num_nodes(); ++n)
        drift = std::max(drift, (h1_norm(run.traj.v[n] - u) + h1_norm(run.traj.th[n] - theta)) / base);
    return drift;
}

void evolve_homogeneous_etd(VectorField& v, ScalarField& theta, const VectorField& gvec, double t_begin,
                            double t_end, int nsteps,
                            const std::function<void(double, const VectorField&, const ScalarField&)>& observer) {
    if (!(t_end > t_begin) || nsteps < 1)
        throw Error(ErrorCode::domain_error, "evolve_homogeneous_etd: bad time span");
    const BoxSpec& box = v.box();
    const double h = (t_end - t_begin) / nsteps;
    const DuhamelWeights w(box, h);
    IntegrandEvaluator ev(box, nullptr, nullptr, &gvec);

    VectorField n0(box), n1(box), vp(box);
    ScalarField m0(box), m1(box), tp(box);
    for (int s = 0; s < nsteps; ++s) {
        ev.eval(v, theta, n0, m0);
        // Predictor: exponential Euler with the full-interval left weight.
        vp = v;
        tp = theta;
        heat_step_inplace(vp, w);
        heat_step_inplace(tp, w);
        {
            const std::size_t n = box.num_modes();
            for (std::size_t i = 1; i < n; ++i) {
                const double i0 = w.c0[i] + w.c1[i];
                for (int d = 0; d < 3; ++d) vp.comp[d].coeffs[i] += i0 * n0.comp[d].coeffs[i];
                tp.coeffs[i] += i0 * m0.coeffs[i];
            }
        }
        ev.eval(vp, tp, n1, m1);
        // Corrector: trapezoidal (psi2) weights on the two integrand samples.
        heat_step_inplace(v, w);
        heat_step_inplace(theta, w);
        {
            const std::size_t n = box.num_modes();
            for (std::size_t i = 1; i < n; ++i) {
                for (int d = 0; d < 3; ++d)
                    v.comp[d].coeffs[i] += w.c0[i] * n0.comp[d].coeffs[i] + w.c1[i] * n1.comp[d].coeffs[i];
                theta.coeffs[i] += w.c0[i] * m0.coeffs[i] + w.c1[i] * m1.coeffs[i];
            }
        }
        v.divergence_free = true;
        if (observer) observer(t_begin + (s + 1) * h, v, theta);
    }
}

CalibrationOutcome calibrate_existence_constant(const std::function<PicardTrialData(int)>& make_trial,
                                                int ntrials, int steps, double tol) {
    CalibrationOutcome out;
    for (int attempt = 1; attempt <= 20; ++attempt) {
        out.attempts = attempt;
        bool ok = true;
        for (int i = 0; i < ntrials && ok; ++i) {
            const PicardTrialData trial = make_trial(i);
            const ExistenceConstants c =
                compute_T0(trial.v0, trial.th0, trial.f, trial.g, trial.gvec, out.C);
            try {
                const PicardResult run = picard_mild_solve(trial.v0, trial.th0, trial.f, trial.g,
                                                           trial.gvec, c.T0, steps, tol, out.C);
                const double ball = 3.0 * run.delta0;
                for (double norm : run.iterate_norms)
                    if (norm > ball * (1.0 + 1e-9) + 1e-300) ok = false;
            } catch (const Error&) {
                ok = false;
            }
        }
        if (ok) return out;
        out.C *= 1.3;
    }
    throw Error(ErrorCode::contraction_failure,
                "calibrate_existence_constant: no constant up to 1.3^20 satisfied the ball invariant");
}

} // namespace bsq

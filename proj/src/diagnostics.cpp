#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "norms.hpp"
#include "operators.hpp"
#include "transform.hpp"

namespace bsq {

namespace {

constexpr double kNoiseFloor = 1e-14;

/// Shell maxima of |c| with shell index round(|xi| / (2 pi / L)).
std::vector<ShellDatum> shell_maxima(const BoxSpec& box, const std::function<double(std::size_t)>& amp) {
    const double unit = box.xi_unit();
    std::map<int, ShellDatum> shells;
    const std::size_t n = box.num_modes();
    for (std::size_t i = 1; i < n; ++i) {
        const double a = amp(i);
        if (a == 0.0) continue;
        const double axi = abs_xi_of(box, i);
        const int shell = static_cast<int>(std::lround(axi / unit));
        if (shell < 1) continue;
        auto it = shells.find(shell);
        if (it == shells.end()) {
            shells.emplace(shell, ShellDatum{shell * unit, axi, a});
        } else if (a > it->second.max_abs) {
            it->second.max_abs = a;
            it->second.xi_argmax = axi;
        }
    }
    std::vector<ShellDatum> out;
    out.reserve(shells.size());
    for (auto& [idx, datum] : shells) out.push_back(datum);
    return out;
}

RadiusEstimate radius_estimate_impl(const BoxSpec& box, const std::function<double(std::size_t)>& amp) {
    RadiusEstimate est;
    est.shells = shell_maxima(box, amp);
    if (est.shells.empty())
        throw Error(ErrorCode::insufficient_decay_range, "radius_estimate: field has no populated shells");

    double peak = 0.0;
    for (const auto& s : est.shells) peak = std::max(peak, s.max_abs);
    std::vector<const ShellDatum*> usable;
    for (const auto& s : est.shells)
        if (s.max_abs > kNoiseFloor * peak) usable.push_back(&s);
    if (usable.size() < 4)
        throw Error(ErrorCode::insufficient_decay_range,
                    "radius_estimate: fewer than 4 shells above the noise floor");

    // Least squares of y = a + b x + g w with x = |xi| at the shell max and
    // w = log|xi|; the log regressor absorbs |xi|^{-beta} prefactors so the
    // exponential slope is recovered without bias.
    double S = 0, Sx = 0, Sw = 0, Sxx = 0, Sww = 0, Sxw = 0, Sy = 0, Sxy = 0, Swy = 0;
    for (const ShellDatum* s : usable) {
        const double x = s->xi_argmax;
        const double w = std::log(s->xi_argmax);
        const double y = std::log(s->max_abs);
        S += 1;
        Sx += x;
        Sw += w;
        Sxx += x * x;
        Sww += w * w;
        Sxw += x * w;
        Sy += y;
        Sxy += x * y;
        Swy += w * y;
    }
    // Solve the 3x3 normal equations by Cramer's rule.
    const double A[3][3] = {{S, Sx, Sw}, {Sx, Sxx, Sxw}, {Sw, Sxw, Sww}};
    const double rhs[3] = {Sy, Sxy, Swy};
    auto det3 = [](const double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
               M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double det = det3(A);
    double coeff[3] = {0.0, 0.0, 0.0};
    if (std::abs(det) > 1e-300) {
        for (int c = 0; c < 3; ++c) {
            double M[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) M[i][j] = j == c ? rhs[i] : A[i][j];
            coeff[c] = det3(M) / det;
        }
    } else {
        // Degenerate geometry (collinear regressors): fall back to the plain
        // two-parameter fit in x.
        const double denom = S * Sxx - Sx * Sx;
        coeff[1] = denom != 0.0 ? (S * Sxy - Sx * Sy) / denom : 0.0;
        coeff[0] = (Sy - coeff[1] * Sx) / S;
    }

    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = Sy / S;
    for (const ShellDatum* s : usable) {
        const double y = std::log(s->max_abs);
        const double fit = coeff[0] + coeff[1] * s->xi_argmax + coeff[2] * std::log(s->xi_argmax);
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - ybar) * (y - ybar);
    }
    est.radius = -coeff[1];
    est.r_squared = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot : 1.0;
    return est;
}

} // namespace

RadiusEstimate radius_estimate(const ScalarField& f) {
    return radius_estimate_impl(f.box, [&f](std::size_t i) { return std::abs(f.coeffs[i]); });
}

RadiusEstimate radius_estimate(const VectorField& v) {
    return radius_estimate_impl(v.box(), [&v](std::size_t i) {
        const double a0 = std::norm(v.comp[0].coeffs[i]);
        const double a1 = std::norm(v.comp[1].coeffs[i]);
        const double a2 = std::norm(v.comp[2].coeffs[i]);
        return std::sqrt(a0 + a1 + a2);
    });
}

int annulus_k_max(const BoxSpec& box) {
    return static_cast<int>(std::floor(std::log2(box.period_L / (4.0 * M_PI))));
}

namespace {

double annulus_sup_impl(const BoxSpec& box, int k, const std::function<double(std::size_t)>& amp) {
    const int kmax = annulus_k_max(box);
    if (k < 0 || k > kmax) {
        std::ostringstream msg;
        msg << "annulus_sup: C_" << k << " is not guaranteed nonempty at this resolution; needs period_L > "
            << 2.0 * M_PI * std::pow(2.0, k + 1) << " (k_max = " << kmax << ")";
        throw Error(ErrorCode::empty_annulus, msg.str());
    }
    const double lo = std::pow(2.0, -(k + 1)), hi = std::pow(2.0, -k);
    double sup = 0.0;
    bool any = false;
    const std::size_t n = box.num_modes();
    for (std::size_t i = 1; i < n; ++i) {
        const double axi = abs_xi_of(box, i);
        if (axi < lo || axi > hi) continue;
        any = true;
        sup = std::max(sup, amp(i));
    }
    if (!any) {
        std::ostringstream msg;
        msg << "annulus_sup: C_" << k << " contains no lattice point at this resolution";
        throw Error(ErrorCode::empty_annulus, msg.str());
    }
    return sup;
}

} // namespace

double annulus_sup(const ScalarField& f, int k) {
    return annulus_sup_impl(f.box, k, [&f](std::size_t i) { return std::abs(f.coeffs[i]); });
}

double annulus_sup(const VectorField& v, int k) {
    return annulus_sup_impl(v.box(), k, [&v](std::size_t i) {
        const double a0 = std::norm(v.comp[0].coeffs[i]);
        const double a1 = std::norm(v.comp[1].coeffs[i]);
        const double a2 = std::norm(v.comp[2].coeffs[i]);
        return std::sqrt(a0 + a1 + a2);
    });
}

LiouvilleIndicator liouville_indicator(const VectorField& u, const ScalarField& theta) {
    require_same_box(u.box(), theta.box, "liouville_indicator");
    LiouvilleIndicator out;
    const int kmax = annulus_k_max(u.box());
    if (kmax < 0)
        throw Error(ErrorCode::empty_annulus,
                    "liouville_indicator: box has no nonempty dyadic annuli (period_L <= 4 pi)");
    for (int k = 0; k <= kmax; ++k) {
        AnnulusRow row;
        row.k = k;
        row.sup_u = annulus_sup(u, k);
        row.sup_theta = annulus_sup(theta, k);
        const double sum = row.sup_u + row.sup_theta;
        row.weighted = std::pow(2.0, -k) * sum;
        row.i1_summand = std::pow(2.0, -2 * k + 1) * sum;
        out.indicator = std::max(out.indicator, row.weighted);
        out.table.push_back(row);
    }
    return out;
}

std::vector<double> default_besov_grid(const BoxSpec& box) {
    const double L2 = box.period_L * box.period_L;
    const double lo = 1e-6 * L2, hi = 4.0 * L2;
    const int n = 64;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return grid;
}

BesovResult besov_norm(const ScalarField& f, const std::vector<double>& t_grid) {
    BesovResult out;
    for (double t : t_grid) {
        const double val = std::sqrt(t) * lp_norm(heat_propagate(f, t), std::numeric_limits<double>::infinity());
        if (val > out.value) {
            out.value = val;
            out.argmax_t = t;
        }
    }
    return out;
}

BesovResult besov_norm(const ScalarField& f) { return besov_norm(f, default_besov_grid(f.box)); }

double improved_sobolev_ratio(const ScalarField& f) {
    const double l4 = lp_norm(f, 4.0);
    const double besov = besov_norm(f).value;
    const double h1 = h1_norm(f);
    if (besov == 0.0 || h1 == 0.0)
        throw Error(ErrorCode::undefined_ratio, "improved_sobolev_ratio: undefined for the zero field");
    return l4 / (std::sqrt(besov) * std::sqrt(h1));
}

std::pair<double, double> fourier_l1_and_linf(const ScalarField& f) {
    double l1 = 0.0;
    for (const auto& c : f.coeffs) l1 += std::abs(c);
    return {l1, lp_norm(f, std::numeric_limits<double>::infinity())};
}

std::pair<double, double> fourier_l1_and_linf(const VectorField& v) {
    double l1 = 0.0, linf = 0.0;
    for (int d = 0; d < 3; ++d) {
        const auto [a, b] = fourier_l1_and_linf(v.comp[d]);
        l1 = std::max(l1, a);
        linf = std::max(linf, b);
    }
    return {l1, linf};
}

double wsp_norm(const ScalarField& f, double s, double p) {
    if (p < 1.0) throw Error(ErrorCode::domain_error, "wsp_norm: p must be >= 1");
    return lp_norm(apply_radial_multiplier(f, [s](double a) { return std::pow(a, s); }), p);
}

GevreyReport build_gevrey_report(const VectorField& u, const ScalarField& theta,
                                 const ExistenceConstants& constants) {
    GevreyReport rep;
    rep.guaranteed_rho = constants.rho;

    if (max_abs_coeff(u) > 0.0) {
        const RadiusEstimate ru = radius_estimate(u);
        rep.measured_radius_u = ru.radius;
        rep.r_squared_u = ru.r_squared;
        rep.shell_data_u = ru.shells;
        double bu = 0.0;
        for (int d = 0; d < 3; ++d) bu = std::max(bu, besov_norm(u.comp[d]).value);
        rep.besov_u_max = bu;
    }
    if (max_abs_coeff(theta) > 0.0) {
        const RadiusEstimate rt = radius_estimate(theta);
        rep.measured_radius_theta = rt.radius;
        rep.r_squared_theta = rt.r_squared;
        rep.shell_data_theta = rt.shells;
        rep.besov_theta = besov_norm(theta).value;
        rep.improved_sobolev_theta = improved_sobolev_ratio(theta);
    }
    if (annulus_k_max(u.box()) >= 0) rep.liouville = liouville_indicator(u, theta);

    const auto [l1_u, linf_u] = fourier_l1_and_linf(u);
    const auto [l1_t, linf_t] = fourier_l1_and_linf(theta);
    rep.fourier_l1 = l1_u + l1_t;
    rep.sup_norm = std::max(linf_u, linf_t);
    return rep;
}

} // namespace bsq

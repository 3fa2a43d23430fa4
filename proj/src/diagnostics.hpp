#pragma once

#include <utility>
#include <vector>

#include "evolution.hpp"
#include "field.hpp"

namespace bsq {

struct ShellDatum {
    double xi_center;  ///< shell center j * (2 pi / L)
    double xi_argmax;  ///< |xi| of the maximizing lattice point
    double max_abs;    ///< max |c| over the shell
};

struct RadiusEstimate {
    double radius = 0.0;    ///< minus the fitted exponential slope
    double r_squared = 1.0; ///< goodness of the shell-max fit
    std::vector<ShellDatum> shells;
};

/// Decay-radius regression on shell maxima: fit log(max|c|) against
/// { 1, |xi|, log|xi| } over shells between the first and the 1e-14 relative
/// noise floor (the log term absorbs polynomial prefactors). Throws
/// ErrorCode::insufficient_decay_range with fewer than 4 usable shells.
RadiusEstimate radius_estimate(const ScalarField& f);
RadiusEstimate radius_estimate(const VectorField& v); ///< on the pointwise modulus

/// Largest k whose dyadic annulus C_k = [2^{-(k+1)}, 2^{-k}] is guaranteed to
/// meet the lattice: floor(log2(L / (4 pi))).
int annulus_k_max(const BoxSpec& box);

/// max |c(xi)| over lattice points with 2^{-(k+1)} <= |xi| <= 2^{-k}.
/// Throws ErrorCode::empty_annulus (naming the required L) when k exceeds
/// annulus_k_max or the annulus contains no lattice point.
double annulus_sup(const ScalarField& f, int k);
double annulus_sup(const VectorField& v, int k); ///< Euclidean modulus

struct AnnulusRow {
    int k;
    double sup_u;
    double sup_theta;
    double weighted;     ///< 2^{-k} (sup_u + sup_theta)
    double i1_summand;   ///< 2^{-2k+1} (sup_u + sup_theta)
};

struct LiouvilleIndicator {
    double indicator = 0.0; ///< max_k weighted
    std::vector<AnnulusRow> table;
};

LiouvilleIndicator liouville_indicator(const VectorField& u, const ScalarField& theta);

struct BesovResult {
    double value = 0.0;
    double argmax_t = 0.0;
};

/// sup over a log-spaced t-grid of t^{1/2} ||e^{t Delta} phi||_{L^infty};
/// default grid: 64 points spanning [1e-6 L^2, 4 L^2].
BesovResult besov_norm(const ScalarField& f);
BesovResult besov_norm(const ScalarField& f, const std::vector<double>& t_grid);
std::vector<double> default_besov_grid(const BoxSpec& box);

/// ||phi||_{L4} / (||phi||_B^{1/2} ||phi||_{H1}^{1/2}); throws
/// ErrorCode::undefined_ratio on the zero field.
double improved_sobolev_ratio(const ScalarField& f);

/// (lattice l1 norm of coefficients, grid sup norm); the first bounds the
/// second exactly on the lattice.
std::pair<double, double> fourier_l1_and_linf(const ScalarField& f);
std::pair<double, double> fourier_l1_and_linf(const VectorField& v);

/// || (-Delta)^{s/2} phi ||_{L^p}.
double wsp_norm(const ScalarField& f, double s, double p);

/// Everything the harness serializes about the Gevrey analysis of a state.
struct GevreyReport {
    double measured_radius_u = 0.0;
    double measured_radius_theta = 0.0;
    double r_squared_u = 1.0;
    double r_squared_theta = 1.0;
    double guaranteed_rho = 0.0;
    std::vector<ShellDatum> shell_data_u;
    std::vector<ShellDatum> shell_data_theta;
    LiouvilleIndicator liouville;
    double besov_theta = 0.0;
    double besov_u_max = 0.0; ///< max over components
    double improved_sobolev_theta = 0.0;
    double fourier_l1 = 0.0;  ///< combined (u, theta) coefficient mass
    double sup_norm = 0.0;    ///< max of the grid sup norms
};

GevreyReport build_gevrey_report(const VectorField& u, const ScalarField& theta,
                                 const ExistenceConstants& constants);

} // namespace bsq

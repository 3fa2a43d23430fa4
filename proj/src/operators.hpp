#pragma once

#include <functional>

#include "field.hpp"
#include "transform.hpp"

namespace bsq {

/// Fourier-multiplier symbol xi -> m(xi). Must satisfy m(-xi) = conj(m(xi))
/// to preserve reality; radial real symbols always do.
using MultiplierSymbol = std::function<Complex(const std::array<double, 3>& xi, double abs_xi)>;

/// c_out(xi) = m(xi) c(xi) on nonzero modes; the zero mode stays untouched.
/// Throws ErrorCode::multiplier_domain if m is non-finite on a lattice point.
ScalarField apply_multiplier(const ScalarField& f, const MultiplierSymbol& m);

/// Radial real symbol fast path (|xi|^s, heat kernel, Gevrey weights, ...).
ScalarField apply_radial_multiplier(const ScalarField& f, const std::function<double(double)>& m);
VectorField apply_radial_multiplier(const VectorField& v, const std::function<double(double)>& m);

/// (-Delta)^{-1}: c(xi)/|xi|^2, zero mode pinned to 0.
ScalarField inverse_laplacian(const ScalarField& f);
VectorField inverse_laplacian(const VectorField& v);

/// -Delta: |xi|^2 c(xi).
ScalarField laplacian_neg(const ScalarField& f);

/// Component d of the gradient, i xi_d c(xi).
ScalarField gradient_component(const ScalarField& f, int d);

/// i xi . c(xi).
ScalarField divergence(const VectorField& v);

/// Leray projection c - xi (xi.c)/|xi|^2; output tagged divergence_free.
VectorField leray_project(const VectorField& v);

/// Zero all modes with |k_i| > box.dealias_kmax() on some axis.
void dealias_inplace(ScalarField& f);
void dealias_inplace(VectorField& v);
bool mode_retained(const BoxSpec& box, const std::array<int, 3>& k);

/// Dealiased pseudospectral product of two scalars: both inputs truncated to
/// the retained band, multiplied on the grid, transformed back, truncated
/// again.
ScalarField product_dealiased(const ScalarField& a, const ScalarField& b);

/// Spectral coefficients of div(u (x) u), computed pseudospectrally with the
/// 2/3 rule applied before and after the products.
VectorField nonlinear_div_tensor(const VectorField& u);

/// Spectral coefficients of div(theta u), same dealiasing scheme.
ScalarField nonlinear_div_scalar(const ScalarField& theta, const VectorField& u);

/// Exact lattice convolution of the dealiased inputs restricted to the
/// retained band: the independent O(N^6) oracle for the pseudospectral
/// product. Refuses N > 12.
ScalarField convolution_oracle(const ScalarField& a, const ScalarField& b);

} // namespace bsq

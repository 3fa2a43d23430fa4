#pragma once

#include "field.hpp"
#include "transform.hpp"

namespace bsq {

/// Homogeneous Sobolev norm (L^3 sum_{xi!=0} |xi|^{2s} |c|^2)^{1/2}.
double sobolev_norm(const ScalarField& f, double s);
double sobolev_norm(const VectorField& v, double s);

/// Gevrey norm (L^3 sum_{xi!=0} |xi|^{2s} e^{2 r |xi|} |c|^2)^{1/2}, computed
/// by log-sum-exp so large r |xi| does not overflow the accumulation. Returns
/// +infinity when the value genuinely exceeds double range at this resolution.
/// r == 0 falls back to sobolev_norm exactly.
double gevrey_norm(const ScalarField& f, double s, double r);
double gevrey_norm(const VectorField& v, double s, double r);

/// Physical-space L^p norm with (L/N)^3 quadrature weight; p = infinity is the
/// grid max. Vector fields use the pointwise Euclidean modulus.
double lp_norm(const ScalarField& f, double p);
double lp_norm(const VectorField& v, double p);

/// Real L^2 pairing L^3 Re sum c_a conj(c_b).
double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_inner(const VectorField& a, const VectorField& b);

inline double h1_norm(const ScalarField& f) { return sobolev_norm(f, 1.0); }
inline double h1_norm(const VectorField& v) { return sobolev_norm(v, 1.0); }

} // namespace bsq

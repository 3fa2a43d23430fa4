#pragma once

#include <cstdint>
#include <string>

#include "field.hpp"

namespace bsq {

enum class SpectrumShape { exp_decay, single_mode, band_limited };

SpectrumShape spectrum_shape_from_string(const std::string& s);
std::string to_string(SpectrumShape s);

/// Recipe for synthetic data with known Gevrey radius and Sobolev norm.
struct ForceSpec {
    double radius_r = 1.0;          ///< Gevrey radius of the envelope
    double sobolev_exponent_s = -1; ///< norm index calibrated to `amplitude`
    double amplitude = 0.0;         ///< target H^s norm (0 -> zero field)
    std::uint64_t seed = 0;         ///< keys the counter-based phase stream
    SpectrumShape spectrum_shape = SpectrumShape::exp_decay;
    double envelope_beta = 2.0;     ///< |xi|^{-beta} prefactor of exp-decay

    void validate() const;
};

/// Scalar field with coefficients A phase(seed,k) e^{-r|xi|} |xi|^{-beta}
/// (exp-decay shape), Hermitian-symmetric, mean-free, rescaled so
/// sobolev_norm(., s) equals `amplitude` exactly.
ScalarField make_gevrey_scalar(const ForceSpec& spec, const BoxSpec& box);

/// Per-component construction; when divergence_free, Leray-projected first and
/// calibrated after the projection.
VectorField make_gevrey_vector(const ForceSpec& spec, const BoxSpec& box, bool divergence_free);

/// C_r = (3/(2r))^2 converting ||(f,g)||_{G^{-1}_r} into the evolution-force
/// bound sup_t ||e^{(2r/3) sqrt(t) sqrt(-Delta)} (f,g)||_{H^1}.
double control_gevrey_constant(double r);

/// Unit-modulus deterministic phase for mode k, keyed by (seed, k).
Complex phase_of_mode(std::uint64_t seed, int k0, int k1, int k2);

} // namespace bsq

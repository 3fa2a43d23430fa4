#include "forcing.hpp"

#include <cmath>

#include "norms.hpp"
#include "operators.hpp"

namespace bsq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_mode(std::uint64_t seed, int k0, int k1, int k2) {
    std::uint64_t h = splitmix64(seed ^ 0x5851f42d4c957f2dULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k0)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k1)));
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(k2)));
    return h;
}

// Canonical representative of the conjugate pair {k, -k}: first nonzero
// component positive.
bool is_canonical(int k0, int k1, int k2) {
    if (k0 != 0) return k0 > 0;
    if (k1 != 0) return k1 > 0;
    return k2 > 0;
}

// Lattice point closest to |xi| = 1 (canonical half, lexicographic tie-break).
std::array<int, 3> single_mode_site(const BoxSpec& box) {
    const int half = box.resolution_N / 2 - 1;
    const double u = box.xi_unit();
    std::array<int, 3> best{0, 0, 0};
    double best_err = std::numeric_limits<double>::infinity();
    for (int k0 = -half; k0 <= half; ++k0)
        for (int k1 = -half; k1 <= half; ++k1)
            for (int k2 = -half; k2 <= half; ++k2) {
                if (!is_canonical(k0, k1, k2)) continue;
                const double axi = u * std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
                const double err = std::abs(axi - 1.0);
                if (err < best_err) {
                    best_err = err;
                    best = {k0, k1, k2};
                }
            }
    return best;
}

} // namespace

SpectrumShape spectrum_shape_from_string(const std::string& s) {
    if (s == "exp-decay") return SpectrumShape::exp_decay;
    if (s == "single-mode") return SpectrumShape::single_mode;
    if (s == "band-limited") return SpectrumShape::band_limited;
    throw Error(ErrorCode::config_error, "unknown spectrum_shape '" + s + "'");
}

std::string to_string(SpectrumShape s) {
    switch (s) {
        case SpectrumShape::exp_decay: return "exp-decay";
        case SpectrumShape::single_mode: return "single-mode";
        case SpectrumShape::band_limited: return "band-limited";
    }
    return "exp-decay";
}

void ForceSpec::validate() const {
    if (!(radius_r > 0.0)) throw Error(ErrorCode::domain_error, "ForceSpec: radius_r must be positive");
    if (amplitude < 0.0) throw Error(ErrorCode::domain_error, "ForceSpec: amplitude must be nonnegative");
}

Complex phase_of_mode(std::uint64_t seed, int k0, int k1, int k2) {
    const bool canon = is_canonical(k0, k1, k2);
    const std::uint64_t h =
        canon ? hash_mode(seed, k0, k1, k2) : hash_mode(seed, -k0, -k1, -k2);
    const double angle = 2.0 * M_PI * (static_cast<double>(h >> 11) * 0x1.0p-53);
    const Complex p{std::cos(angle), std::sin(angle)};
    return canon ? p : std::conj(p);
}

ScalarField make_gevrey_scalar(const ForceSpec& spec, const BoxSpec& box) {
    spec.validate();
    box.validate();
    ScalarField out(box);
    if (spec.amplitude == 0.0) return out;

    // Populate the symmetric sub-lattice |k_i| <= N/2 - 1 so every mode has
    // its conjugate partner on the lattice.
    const int half = box.resolution_N / 2 - 1;
    const double u = box.xi_unit();

    switch (spec.spectrum_shape) {
        case SpectrumShape::single_mode: {
            const auto k = single_mode_site(box);
            const Complex p = phase_of_mode(spec.seed, k[0], k[1], k[2]);
            out.at(k[0], k[1], k[2]) = p;
            out.at(-k[0], -k[1], -k[2]) = std::conj(p);
            break;
        }
        case SpectrumShape::exp_decay: {
            for (int k0 = -half; k0 <= half; ++k0)
                for (int k1 = -half; k1 <= half; ++k1)
                    for (int k2 = -half; k2 <= half; ++k2) {
                        if (k0 == 0 && k1 == 0 && k2 == 0) continue;
                        const double axi = u * std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
                        const double env = std::exp(-spec.radius_r * axi) * std::pow(axi, -spec.envelope_beta);
                        out.at(k0, k1, k2) = env * phase_of_mode(spec.seed, k0, k1, k2);
                    }
            break;
        }
        case SpectrumShape::band_limited: {
            const double band = box.dealias_kmax() * u;
            for (int k0 = -half; k0 <= half; ++k0)
                for (int k1 = -half; k1 <= half; ++k1)
                    for (int k2 = -half; k2 <= half; ++k2) {
                        if (k0 == 0 && k1 == 0 && k2 == 0) continue;
                        const double axi = u * std::sqrt(double(k0) * k0 + double(k1) * k1 + double(k2) * k2);
                        if (axi > band) continue;
                        out.at(k0, k1, k2) = phase_of_mode(spec.seed, k0, k1, k2);
                    }
            break;
        }
    }

    const double norm = sobolev_norm(out, spec.sobolev_exponent_s);
    if (norm > 0.0) out *= spec.amplitude / norm;
    return out;
}

VectorField make_gevrey_vector(const ForceSpec& spec, const BoxSpec& box, bool divergence_free) {
    VectorField out(box);
    if (spec.amplitude == 0.0) {
        out.divergence_free = divergence_free;
        return out;
    }
    for (int d = 0; d < 3; ++d) {
        ForceSpec cs = spec;
        cs.seed = spec.seed * 3u + static_cast<std::uint64_t>(d) + 0x9e37u;
        cs.amplitude = 1.0; // calibrated jointly below
        out.comp[d] = make_gevrey_scalar(cs, box);
    }
    if (divergence_free) out = leray_project(out);
    const double norm = sobolev_norm(out, spec.sobolev_exponent_s);
    if (norm > 0.0) out *= spec.amplitude / norm;
    return out;
}

double control_gevrey_constant(double r) {
    if (!(r > 0.0)) throw Error(ErrorCode::domain_error, "control_gevrey_constant: r must be positive");
    const double x = 3.0 / (2.0 * r);
    return x * x;
}

} // namespace bsq

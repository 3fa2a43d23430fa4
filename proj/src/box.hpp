#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace bsq {

/// Periodic box [0,L)^3 discretized with N modes per axis.
///
/// Conventions (fixed project-wide, tag "c-exp-parseval-L3"):
///   phi(x) = sum_xi c(xi) e^{i xi.x},  xi = (2 pi / L) k,  k_i in [-N/2, N/2),
///   ||phi||_{L2}^2 = L^3 sum_xi |c(xi)|^2.
/// Coefficients are stored in FFTW index order: linear index
/// (i0*N + i1)*N + i2 with integer frequency k = i for i < N/2 and i - N
/// otherwise.
struct BoxSpec {
    double period_L = 2.0 * M_PI;
    int resolution_N = 32;
    double dealias_fraction = 2.0 / 3.0;

    void validate() const {
        if (!(period_L > 0.0))
            throw Error(ErrorCode::domain_error, "BoxSpec: period_L must be positive");
        if (resolution_N < 8 || resolution_N % 2 != 0)
            throw Error(ErrorCode::domain_error, "BoxSpec: resolution_N must be even and >= 8");
        if (!(dealias_fraction > 0.0) || dealias_fraction > 1.0)
            throw Error(ErrorCode::domain_error, "BoxSpec: dealias_fraction must lie in (0,1]");
    }

    std::size_t num_modes() const { return static_cast<std::size_t>(resolution_N) * resolution_N * resolution_N; }

    /// Lattice spacing in frequency, 2 pi / L.
    double xi_unit() const { return 2.0 * M_PI / period_L; }

    /// Integer frequency of storage index i along one axis.
    int freq(int i) const { return i < resolution_N / 2 ? i : i - resolution_N; }

    /// Storage index of integer frequency k (k in [-N/2, N/2)).
    int index_of_freq(int k) const { return k >= 0 ? k : k + resolution_N; }

    std::array<int, 3> freq_of_linear(std::size_t idx) const {
        const int N = resolution_N;
        const int i2 = static_cast<int>(idx % N);
        const int i1 = static_cast<int>((idx / N) % N);
        const int i0 = static_cast<int>(idx / (static_cast<std::size_t>(N) * N));
        return {freq(i0), freq(i1), freq(i2)};
    }

    std::size_t linear_of_freq(int k0, int k1, int k2) const {
        const std::size_t N = static_cast<std::size_t>(resolution_N);
        return (static_cast<std::size_t>(index_of_freq(k0)) * N + index_of_freq(k1)) * N + index_of_freq(k2);
    }

    /// Largest retained integer frequency of the dealias rule. Retained modes
    /// satisfy |k_i| < dealias_fraction*(N/2) strictly, which for quadratic
    /// products keeps the retained band alias-free (3K < N at fraction 2/3).
    int dealias_kmax() const {
        const double cutoff = dealias_fraction * (resolution_N / 2.0);
        int k = static_cast<int>(std::floor(cutoff));
        if (static_cast<double>(k) >= cutoff) k -= 1;
        return k < 1 ? 1 : k;
    }

    bool operator==(const BoxSpec& o) const {
        return period_L == o.period_L && resolution_N == o.resolution_N && dealias_fraction == o.dealias_fraction;
    }
    bool operator!=(const BoxSpec& o) const { return !(*this == o); }
};

struct LatticePoint {
    std::array<int, 3> k;
    std::array<double, 3> xi;
    double abs_xi;
};

/// Full wavenumber lattice in storage order (N^3 entries, zero mode included).
std::vector<LatticePoint> wavenumber_lattice(const BoxSpec& box);

/// |xi| for the linear storage index, computed from exact integer k scaled by
/// 2 pi / L (reproducible shell membership).
inline double abs_xi_of(const BoxSpec& box, std::size_t idx) {
    const auto k = box.freq_of_linear(idx);
    const double u = box.xi_unit();
    const double x = u * k[0], y = u * k[1], z = u * k[2];
    return std::sqrt(x * x + y * y + z * z);
}

inline void require_same_box(const BoxSpec& a, const BoxSpec& b, const char* what) {
    if (a != b) throw Error(ErrorCode::shape_mismatch, std::string(what) + ": fields live on different boxes");
}

} // namespace bsq

#include "operators.hpp"

#include <cmath>

namespace bsq {

namespace {

bool finite(const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

} // namespace

ScalarField apply_multiplier(const ScalarField& f, const MultiplierSymbol& m) {
    ScalarField out(f.box);
    const std::size_t n = f.coeffs.size();
    const double u = f.box.xi_unit();
    for (std::size_t i = 1; i < n; ++i) {
        const auto k = f.box.freq_of_linear(i);
        const std::array<double, 3> xi{u * k[0], u * k[1], u * k[2]};
        const double axi = std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
        const Complex mv = m(xi, axi);
        if (!finite(mv))
            throw Error(ErrorCode::multiplier_domain, "apply_multiplier: symbol non-finite on a lattice point");
        out.coeffs[i] = mv * f.coeffs[i];
    }
    out.coeffs[0] = f.coeffs[0];
    return out;
}

ScalarField apply_radial_multiplier(const ScalarField& f, const std::function<double(double)>& m) {
    ScalarField out(f.box);
    const std::size_t n = f.coeffs.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double mv = m(abs_xi_of(f.box, i));
        if (!std::isfinite(mv))
            throw Error(ErrorCode::multiplier_domain, "apply_radial_multiplier: symbol non-finite on a lattice point");
        out.coeffs[i] = mv * f.coeffs[i];
    }
    out.coeffs[0] = f.coeffs[0];
    return out;
}

VectorField apply_radial_multiplier(const VectorField& v, const std::function<double(double)>& m) {
    VectorField out;
    for (int d = 0; d < 3; ++d) out.comp[d] = apply_radial_multiplier(v.comp[d], m);
    out.divergence_free = v.divergence_free;
    return out;
}

ScalarField inverse_laplacian(const ScalarField& f) {
    ScalarField out(f.box);
    const std::size_t n = f.coeffs.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double a = abs_xi_of(f.box, i);
        out.coeffs[i] = f.coeffs[i] / (a * a);
    }
    return out;
}

VectorField inverse_laplacian(const VectorField& v) {
    VectorField out;
    for (int d = 0; d < 3; ++d) out.comp[d] = inverse_laplacian(v.comp[d]);
    out.divergence_free = v.divergence_free;
    return out;
}

ScalarField laplacian_neg(const ScalarField& f) {
    ScalarField out(f.box);
    const std::size_t n = f.coeffs.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double a = abs_xi_of(f.box, i);
        out.coeffs[i] = (a * a) * f.coeffs[i];
    }
    return out;
}

ScalarField gradient_component(const ScalarField& f, int d) {
    ScalarField out(f.box);
    const std::size_t n = f.coeffs.size();
    const double u = f.box.xi_unit();
    for (std::size_t i = 1; i < n; ++i) {
        const auto k = f.box.freq_of_linear(i);
        out.coeffs[i] = Complex{0.0, u * k[d]} * f.coeffs[i];
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    const BoxSpec& box = v.box();
    ScalarField out(box);
    const std::size_t n = box.num_modes();
    const double u = box.xi_unit();
    for (std::size_t i = 1; i < n; ++i) {
        const auto k = box.freq_of_linear(i);
        const Complex dot = static_cast<double>(k[0]) * v.comp[0].coeffs[i] +
                            static_cast<double>(k[1]) * v.comp[1].coeffs[i] +
                            static_cast<double>(k[2]) * v.comp[2].coeffs[i];
        out.coeffs[i] = Complex{0.0, u} * dot;
    }
    return out;
}

VectorField leray_project(const VectorField& v) {
    const BoxSpec& box = v.box();
    VectorField out(box);
    const std::size_t n = box.num_modes();
    for (std::size_t i = 1; i < n; ++i) {
        const auto k = box.freq_of_linear(i);
        const double k2 = static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
                          static_cast<double>(k[2]) * k[2];
        const Complex dot = (static_cast<double>(k[0]) * v.comp[0].coeffs[i] +
                             static_cast<double>(k[1]) * v.comp[1].coeffs[i] +
                             static_cast<double>(k[2]) * v.comp[2].coeffs[i]) /
                            k2;
        for (int d = 0; d < 3; ++d) out.comp[d].coeffs[i] = v.comp[d].coeffs[i] - static_cast<double>(k[d]) * dot;
    }
    out.divergence_free = true;
    return out;
}

bool mode_retained(const BoxSpec& box, const std::array<int, 3>& k) {
    const int K = box.dealias_kmax();
    return std::abs(k[0]) <= K && std::abs(k[1]) <= K && std::abs(k[2]) <= K;
}

void dealias_inplace(ScalarField& f) {
    const int N = f.box.resolution_N;
    const int K = f.box.dealias_kmax();
    for (int i0 = 0; i0 < N; ++i0) {
        const bool cut0 = std::abs(f.box.freq(i0)) > K;
        for (int i1 = 0; i1 < N; ++i1) {
            const bool cut01 = cut0 || std::abs(f.box.freq(i1)) > K;
            for (int i2 = 0; i2 < N; ++i2) {
                if (cut01 || std::abs(f.box.freq(i2)) > K)
                    f.coeffs[(static_cast<std::size_t>(i0) * N + i1) * N + i2] = Complex{0.0, 0.0};
            }
        }
    }
}

void dealias_inplace(VectorField& v) {
    for (int d = 0; d < 3; ++d) dealias_inplace(v.comp[d]);
}

namespace {

ScalarField forward_dealiased(const PhysicalField& samples, const BoxSpec& box) {
    ScalarField out = transform_to_spectral(samples, box);
    dealias_inplace(out);
    return out;
}

PhysicalField pointwise_product(const PhysicalField& a, const PhysicalField& b) {
    PhysicalField out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

} // namespace

ScalarField product_dealiased(const ScalarField& a, const ScalarField& b) {
    require_same_box(a.box, b.box, "product_dealiased");
    ScalarField ta = a, tb = b;
    dealias_inplace(ta);
    dealias_inplace(tb);
    const PhysicalField pa = transform_to_physical_unchecked(ta);
    const PhysicalField pb = transform_to_physical_unchecked(tb);
    return forward_dealiased(pointwise_product(pa, pb), a.box);
}

VectorField nonlinear_div_tensor(const VectorField& u) {
    const BoxSpec& box = u.box();
    VectorField tu = u;
    dealias_inplace(tu);
    const auto phys = transform_to_physical_unchecked(tu);

    // T_ij = u_i u_j, six distinct entries.
    ScalarField T[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            T[i][j] = forward_dealiased(pointwise_product(phys[i], phys[j]), box);
            if (j != i) T[j][i] = T[i][j];
        }

    VectorField out(box);
    const std::size_t n = box.num_modes();
    const double xi_unit = box.xi_unit();
    for (int i = 0; i < 3; ++i) {
        for (std::size_t idx = 1; idx < n; ++idx) {
            const auto k = box.freq_of_linear(idx);
            Complex acc{0.0, 0.0};
            for (int j = 0; j < 3; ++j) acc += static_cast<double>(k[j]) * T[i][j].coeffs[idx];
            out.comp[i].coeffs[idx] = Complex{0.0, xi_unit} * acc;
        }
    }
    return out;
}

ScalarField nonlinear_div_scalar(const ScalarField& theta, const VectorField& u) {
    require_same_box(theta.box, u.box(), "nonlinear_div_scalar");
    const BoxSpec& box = theta.box;
    ScalarField tt = theta;
    dealias_inplace(tt);
    VectorField tu = u;
    dealias_inplace(tu);

    const PhysicalField pt = transform_to_physical_unchecked(tt);
    const auto pu = transform_to_physical_unchecked(tu);

    ScalarField q[3];
    for (int j = 0; j < 3; ++j) q[j] = forward_dealiased(pointwise_product(pt, pu[j]), box);

    ScalarField out(box);
    const std::size_t n = box.num_modes();
    const double xi_unit = box.xi_unit();
    for (std::size_t idx = 1; idx < n; ++idx) {
        const auto k = box.freq_of_linear(idx);
        Complex acc{0.0, 0.0};
        for (int j = 0; j < 3; ++j) acc += static_cast<double>(k[j]) * q[j].coeffs[idx];
        out.coeffs[idx] = Complex{0.0, xi_unit} * acc;
    }
    return out;
}

ScalarField convolution_oracle(const ScalarField& a, const ScalarField& b) {
    require_same_box(a.box, b.box, "convolution_oracle");
    const BoxSpec& box = a.box;
    if (box.resolution_N > 12)
        throw Error(ErrorCode::resolution_too_large,
                    "convolution_oracle: O(N^6) oracle refuses resolution_N > 12");

    ScalarField ta = a, tb = b;
    dealias_inplace(ta);
    dealias_inplace(tb);
    const int K = box.dealias_kmax();

    ScalarField out(box);
    // True (non-periodic) lattice convolution over the retained band; with
    // 3K < N this matches the circular pseudospectral product exactly there.
    for (int k0 = -K; k0 <= K; ++k0)
        for (int k1 = -K; k1 <= K; ++k1)
            for (int k2 = -K; k2 <= K; ++k2) {
                Complex acc{0.0, 0.0};
                for (int m0 = -K; m0 <= K; ++m0) {
                    const int d0 = k0 - m0;
                    if (std::abs(d0) > K) continue;
                    for (int m1 = -K; m1 <= K; ++m1) {
                        const int d1 = k1 - m1;
                        if (std::abs(d1) > K) continue;
                        for (int m2 = -K; m2 <= K; ++m2) {
                            const int d2 = k2 - m2;
                            if (std::abs(d2) > K) continue;
                            acc += ta.at(d0, d1, d2) * tb.at(m0, m1, m2);
                        }
                    }
                }
                out.at(k0, k1, k2) = acc;
            }
    return out;
}

} // namespace bsq

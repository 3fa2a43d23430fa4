#include "field.hpp"

#include <algorithm>
#include <cmath>

namespace bsq {

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_box(box, o.box, "ScalarField::operator+=");
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_box(box, o.box, "ScalarField::operator-=");
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (auto& c : coeffs) c *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int d = 0; d < 3; ++d) comp[d] += o.comp[d];
    divergence_free = divergence_free && o.divergence_free;
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    for (int d = 0; d < 3; ++d) comp[d] -= o.comp[d];
    divergence_free = divergence_free && o.divergence_free;
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (int d = 0; d < 3; ++d) comp[d] *= s;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

double max_abs_coeff(const ScalarField& f) {
    double m = 0.0;
    for (const auto& c : f.coeffs) m = std::max(m, std::abs(c));
    return m;
}

double max_abs_coeff(const VectorField& f) {
    double m = 0.0;
    for (int d = 0; d < 3; ++d) m = std::max(m, max_abs_coeff(f.comp[d]));
    return m;
}

double hermitian_defect(const ScalarField& f) {
    const int N = f.box.resolution_N;
    double worst = 0.0;
    for (int i0 = 0; i0 < N; ++i0) {
        const int j0 = (N - i0) % N;
        for (int i1 = 0; i1 < N; ++i1) {
            const int j1 = (N - i1) % N;
            for (int i2 = 0; i2 < N; ++i2) {
                const int j2 = (N - i2) % N;
                const Complex a = f.coeffs[(static_cast<std::size_t>(i0) * N + i1) * N + i2];
                const Complex b = f.coeffs[(static_cast<std::size_t>(j0) * N + j1) * N + j2];
                worst = std::max(worst, std::abs(b - std::conj(a)));
            }
        }
    }
    return worst;
}

void symmetrize_hermitian(ScalarField& f) {
    const int N = f.box.resolution_N;
    for (int i0 = 0; i0 < N; ++i0) {
        const int j0 = (N - i0) % N;
        for (int i1 = 0; i1 < N; ++i1) {
            const int j1 = (N - i1) % N;
            for (int i2 = 0; i2 < N; ++i2) {
                const int j2 = (N - i2) % N;
                const std::size_t ia = (static_cast<std::size_t>(i0) * N + i1) * N + i2;
                const std::size_t ib = (static_cast<std::size_t>(j0) * N + j1) * N + j2;
                if (ia == ib) {
                    f.coeffs[ia] = Complex{f.coeffs[ia].real(), 0.0};
                } else if (ia < ib) {
                    const Complex avg = 0.5 * (f.coeffs[ia] + std::conj(f.coeffs[ib]));
                    f.coeffs[ia] = avg;
                    f.coeffs[ib] = std::conj(avg);
                }
            }
        }
    }
}

double divergence_linf(const VectorField& v) {
    const BoxSpec& box = v.box();
    const std::size_t n = box.num_modes();
    const double u = box.xi_unit();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = box.freq_of_linear(i);
        const Complex d = u * (static_cast<double>(k[0]) * v.comp[0].coeffs[i] +
                               static_cast<double>(k[1]) * v.comp[1].coeffs[i] +
                               static_cast<double>(k[2]) * v.comp[2].coeffs[i]);
        worst = std::max(worst, std::abs(d));
    }
    return worst;
}

std::vector<LatticePoint> wavenumber_lattice(const BoxSpec& box) {
    box.validate();
    std::vector<LatticePoint> pts;
    pts.reserve(box.num_modes());
    const double u = box.xi_unit();
    const int N = box.resolution_N;
    for (int i0 = 0; i0 < N; ++i0)
        for (int i1 = 0; i1 < N; ++i1)
            for (int i2 = 0; i2 < N; ++i2) {
                LatticePoint p;
                p.k = {box.freq(i0), box.freq(i1), box.freq(i2)};
                p.xi = {u * p.k[0], u * p.k[1], u * p.k[2]};
                p.abs_xi = std::sqrt(p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1] + p.xi[2] * p.xi[2]);
                pts.push_back(p);
            }
    return pts;
}

} // namespace bsq

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "box.hpp"

namespace bsq {

using Complex = std::complex<double>;

/// Spectral representation of a real scalar on the box lattice.
/// Invariants for PDE fields: Hermitian symmetry c(-xi) = conj(c(xi)) and
/// mean-free zero mode c(0) = 0.
struct ScalarField {
    BoxSpec box;
    std::vector<Complex> coeffs;

    ScalarField() = default;
    explicit ScalarField(const BoxSpec& b) : box(b), coeffs(b.num_modes(), Complex{0.0, 0.0}) {}

    Complex& at(int k0, int k1, int k2) { return coeffs[box.linear_of_freq(k0, k1, k2)]; }
    const Complex& at(int k0, int k1, int k2) const { return coeffs[box.linear_of_freq(k0, k1, k2)]; }

    void set_zero_mode_zero() { coeffs[0] = Complex{0.0, 0.0}; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Three scalar components forming a velocity/force field.
struct VectorField {
    std::array<ScalarField, 3> comp;
    bool divergence_free = false;

    VectorField() = default;
    explicit VectorField(const BoxSpec& b) : comp{ScalarField(b), ScalarField(b), ScalarField(b)} {}

    const BoxSpec& box() const { return comp[0].box; }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

double max_abs_coeff(const ScalarField& f);
double max_abs_coeff(const VectorField& f);

/// Largest Hermitian-symmetry defect max |c(-k) - conj(c(k))| over the lattice.
double hermitian_defect(const ScalarField& f);

/// Enforce c(-k) = conj(c(k)) by averaging conjugate pairs; self-paired modes
/// (k == -k mod N) are made real.
void symmetrize_hermitian(ScalarField& f);

/// max_xi |xi . c(xi)| over the lattice -- the divergence defect in sup norm.
double divergence_linf(const VectorField& v);

} // namespace bsq

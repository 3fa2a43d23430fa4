#include "norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bsq {

namespace {

double box_volume(const BoxSpec& box) { return box.period_L * box.period_L * box.period_L; }

double sobolev_sq(const ScalarField& f, double s) {
    double acc = 0.0;
    const std::size_t n = f.coeffs.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double a2 = std::norm(f.coeffs[i]);
        if (a2 == 0.0) continue;
        acc += std::pow(abs_xi_of(f.box, i), 2.0 * s) * a2;
    }
    return box_volume(f.box) * acc;
}

// log of L^3 sum |xi|^{2s} e^{2 r |xi|} |c|^2, or -inf for the zero field.
// Works on log|c| so coefficients near the double range cannot overflow the
// per-term weight.
double gevrey_log_sq(const ScalarField& f, double s, double r) {
    const std::size_t n = f.coeffs.size();
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> logs;
    logs.reserve(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double a = std::abs(f.coeffs[i]);
        if (a == 0.0) continue;
        const double axi = abs_xi_of(f.box, i);
        const double lg = 2.0 * s * std::log(axi) + 2.0 * r * axi + 2.0 * std::log(a);
        logs.push_back(lg);
        m = std::max(m, lg);
    }
    if (logs.empty()) return -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (double lg : logs) sum += std::exp(lg - m);
    return m + std::log(sum) + 3.0 * std::log(f.box.period_L);
}

} // namespace

double sobolev_norm(const ScalarField& f, double s) { return std::sqrt(sobolev_sq(f, s)); }

double sobolev_norm(const VectorField& v, double s) {
    double acc = 0.0;
    for (int d = 0; d < 3; ++d) acc += sobolev_sq(v.comp[d], s);
    return std::sqrt(acc);
}

double gevrey_norm(const ScalarField& f, double s, double r) {
    if (r == 0.0) return sobolev_norm(f, s);
    if (r < 0.0) throw Error(ErrorCode::domain_error, "gevrey_norm: radius must be nonnegative");
    const double lg = gevrey_log_sq(f, s, r);
    if (lg == -std::numeric_limits<double>::infinity()) return 0.0;
    const double half = 0.5 * lg;
    if (half > std::log(std::numeric_limits<double>::max()))
        return std::numeric_limits<double>::infinity();
    return std::exp(half);
}

double gevrey_norm(const VectorField& v, double s, double r) {
    if (r == 0.0) return sobolev_norm(v, s);
    if (r < 0.0) throw Error(ErrorCode::domain_error, "gevrey_norm: radius must be nonnegative");
    double m = -std::numeric_limits<double>::infinity();
    std::array<double, 3> lg{};
    for (int d = 0; d < 3; ++d) {
        lg[d] = gevrey_log_sq(v.comp[d], s, r);
        m = std::max(m, lg[d]);
    }
    if (m == -std::numeric_limits<double>::infinity()) return 0.0;
    double sum = 0.0;
    for (int d = 0; d < 3; ++d)
        if (lg[d] != -std::numeric_limits<double>::infinity()) sum += std::exp(lg[d] - m);
    const double half = 0.5 * (m + std::log(sum));
    if (half > std::log(std::numeric_limits<double>::max()))
        return std::numeric_limits<double>::infinity();
    return std::exp(half);
}

double lp_norm(const ScalarField& f, double p) {
    if (p < 1.0) throw Error(ErrorCode::domain_error, "lp_norm: p must be >= 1");
    const PhysicalField phys = transform_to_physical_unchecked(f);
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : phys) m = std::max(m, std::abs(x));
        return m;
    }
    const double w = std::pow(f.box.period_L / f.box.resolution_N, 3.0);
    double acc = 0.0;
    for (double x : phys) acc += std::pow(std::abs(x), p);
    return std::pow(w * acc, 1.0 / p);
}

double lp_norm(const VectorField& v, double p) {
    if (p < 1.0) throw Error(ErrorCode::domain_error, "lp_norm: p must be >= 1");
    const auto phys = transform_to_physical_unchecked(v);
    const std::size_t n = phys[0].size();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double mod2 = phys[0][i] * phys[0][i] + phys[1][i] * phys[1][i] + phys[2][i] * phys[2][i];
            m = std::max(m, mod2);
        }
        return std::sqrt(m);
    }
    const BoxSpec& box = v.box();
    const double w = std::pow(box.period_L / box.resolution_N, 3.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mod2 = phys[0][i] * phys[0][i] + phys[1][i] * phys[1][i] + phys[2][i] * phys[2][i];
        acc += std::pow(mod2, 0.5 * p);
    }
    return std::pow(w * acc, 1.0 / p);
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
    require_same_box(a.box, b.box, "l2_inner");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        acc += a.coeffs[i].real() * b.coeffs[i].real() + a.coeffs[i].imag() * b.coeffs[i].imag();
    return box_volume(a.box) * acc;
}

double l2_inner(const VectorField& a, const VectorField& b) {
    double acc = 0.0;
    for (int d = 0; d < 3; ++d) acc += l2_inner(a.comp[d], b.comp[d]);
    return acc;
}

} // namespace bsq

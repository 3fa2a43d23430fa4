#include "transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace bsq {

namespace {

// One c2c plan pair per resolution. Plans are created with FFTW_ESTIMATE so
// the algorithm choice (and hence rounding) is reproducible, and with
// FFTW_UNALIGNED so they can execute on any caller buffer.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void forward(int N, Complex* data) { execute(N, data, /*forward=*/true); }
    void backward(int N, Complex* data) { execute(N, data, /*forward=*/false); }

  private:
    struct Plans {
        fftw_plan fwd = nullptr;
        fftw_plan bwd = nullptr;
    };

    void execute(int N, Complex* data, bool fwd) {
        Plans* p;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = plans_.find(N);
            if (it == plans_.end()) {
                std::vector<Complex> scratch(static_cast<std::size_t>(N) * N * N);
                auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
                Plans np;
                np.fwd = fftw_plan_dft_3d(N, N, N, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
                np.bwd = fftw_plan_dft_3d(N, N, N, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
                it = plans_.emplace(N, np).first;
            }
            p = &it->second;
        }
        auto* buf = reinterpret_cast<fftw_complex*>(data);
        fftw_execute_dft(fwd ? p->fwd : p->bwd, buf, buf);
    }

    std::mutex mu_;
    std::map<int, Plans> plans_;
};

} // namespace

PhysicalField transform_to_physical(const ScalarField& f) {
    const double scale = max_abs_coeff(f);
    if (scale > 0.0 && hermitian_defect(f) > 1e-10 * scale)
        throw Error(ErrorCode::symmetry_violation,
                    "transform_to_physical: input is not Hermitian-symmetric (field would not be real)");
    return transform_to_physical_unchecked(f);
}

PhysicalField transform_to_physical_unchecked(const ScalarField& f) {
    const int N = f.box.resolution_N;
    std::vector<Complex> work(f.coeffs);
    PlanCache::instance().backward(N, work.data());
    PhysicalField out(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = work[i].real();
    return out;
}

ScalarField transform_to_spectral(const PhysicalField& samples, const BoxSpec& box) {
    box.validate();
    if (samples.size() != box.num_modes())
        throw Error(ErrorCode::shape_mismatch, "transform_to_spectral: sample count does not match N^3");
    ScalarField out(box);
    for (std::size_t i = 0; i < samples.size(); ++i) out.coeffs[i] = Complex{samples[i], 0.0};
    PlanCache::instance().forward(box.resolution_N, out.coeffs.data());
    const double norm = 1.0 / static_cast<double>(box.num_modes());
    for (auto& c : out.coeffs) c *= norm;
    return out;
}

std::array<PhysicalField, 3> transform_to_physical_unchecked(const VectorField& v) {
    return {transform_to_physical_unchecked(v.comp[0]), transform_to_physical_unchecked(v.comp[1]),
            transform_to_physical_unchecked(v.comp[2])};
}

} // namespace bsq

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <mutex>
#include <span>
#include <vector>

#include "pathlab/core/error.hpp"

namespace pathlab {

namespace detail {
// The FFTW planner is not re-entrant; execution on private buffers is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Owning 1D complex FFT of fixed length (unnormalized, FFTW sign conventions).
/// Plans use FFTW_ESTIMATE so results do not depend on timing measurements.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        require(n > 0, "fft length must be positive");
        buf_ = fftw_alloc_complex(n);
        require(buf_ != nullptr, "fftw allocation failed");
        std::lock_guard lock(detail::fftw_planner_mutex());
        fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    std::size_t size() const { return n_; }

    /// In-place forward transform: X_k = sum_j x_j exp(-2 pi i jk/n).
    void forward(std::span<std::complex<double>> data) { run(fwd_, data); }
    /// In-place backward transform without the 1/n factor.
    void backward(std::span<std::complex<double>> data) { run(bwd_, data); }

private:
    void run(fftw_plan plan, std::span<std::complex<double>> data) {
        require(data.size() == n_, "fft buffer length mismatch");
        std::memcpy(buf_, data.data(), n_ * sizeof(fftw_complex));
        fftw_execute(plan);
        std::memcpy(static_cast<void*>(data.data()), buf_, n_ * sizeof(fftw_complex));
    }

    std::size_t n_;
    fftw_complex* buf_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

/// Full linear convolution d[m] = sum_j a[j] b[m-j], length |a|+|b|-1,
/// computed by zero-padded FFT.
inline std::vector<std::complex<double>> linear_convolution(std::span<const std::complex<double>> a,
                                                            std::span<const std::complex<double>> b) {
    require(!a.empty() && !b.empty(), "empty convolution operand");
    const std::size_t out_len = a.size() + b.size() - 1;
    std::size_t n = 1;
    while (n < out_len) n <<= 1;
    std::vector<std::complex<double>> fa(n), fb(n);
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    FftPlan plan(n);
    plan.forward(fa);
    plan.forward(fb);
    for (std::size_t k = 0; k < n; ++k) fa[k] *= fb[k];
    plan.backward(fa);
    const double scale = 1.0 / static_cast<double>(n);
    fa.resize(out_len);
    for (auto& v : fa) v *= scale;
    return fa;
}

} // namespace pathlab

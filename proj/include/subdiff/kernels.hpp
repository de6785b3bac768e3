#pragma once

// Data-parallel inner loops used by the solvers. Every kernel has a scalar
// reference implementation; an AVX2/FMA variant is compiled on x86-64 and
// picked at runtime when the CPU supports it. Variants agree up to
// floating-point reassociation (see tests/test_kernels.cpp).

#include <cstddef>
#include <span>
#include <string_view>

namespace subdiff::kernels {

struct KernelSet {
    std::string_view name;

    /// sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);

    /// y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);

    /// x += omega * inv_diag * (rhs - bx)
    void (*jacobi_update)(double omega, const double* inv_diag, const double* rhs,
                          const double* bx, double* x, std::size_t n);

    /// Block convolution with a lagged weight sequence:
    ///   out[i][d] += sum_k w[lag0 + i + (nhist - 1 - k)] * hist[k][d]
    /// for i < nout, k < nhist, d < dim. All weight indices touched must be
    /// valid for `w`.
    void (*conv_block)(const double* const* hist, std::size_t nhist, const double* w,
                       std::size_t lag0, double* const* out, std::size_t nout,
                       std::size_t dim);
};

const KernelSet& scalar_kernels() noexcept;

/// AVX2/FMA variant, or nullptr when not compiled in or unsupported by the CPU.
const KernelSet* avx2_kernels() noexcept;

/// Kernel set used by the library. Chosen once: AVX2 when available, unless
/// the environment variable SUBDIFF_SIMD=scalar forces the reference path.
const KernelSet& active() noexcept;

inline double dot(std::span<const double> x, std::span<const double> y) {
    return active().dot(x.data(), y.data(), x.size());
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace subdiff::kernels

#include "kernels_impl.hpp"

namespace subdiff::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void jacobi_update_scalar(double omega, const double* inv_diag, const double* rhs,
                          const double* bx, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] += omega * inv_diag[i] * (rhs[i] - bx[i]);
}

void conv_block_scalar(const double* const* hist, std::size_t nhist, const double* w,
                       std::size_t lag0, double* const* out, std::size_t nout,
                       std::size_t dim) {
    for (std::size_t i = 0; i < nout; ++i) {
        double* o = out[i];
        for (std::size_t k = 0; k < nhist; ++k) {
            const double c = w[lag0 + i + (nhist - 1 - k)];
            const double* h = hist[k];
            for (std::size_t d = 0; d < dim; ++d) o[d] += c * h[d];
        }
    }
}

}  // namespace

const KernelSet& scalar_kernels() noexcept {
    static const KernelSet set{"scalar", dot_scalar, axpy_scalar, jacobi_update_scalar,
                               conv_block_scalar};
    return set;
}

}  // namespace subdiff::kernels

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "subdiff/kernels.hpp"

using namespace subdiff;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("active kernel set honours the environment override") {
    const char* env = std::getenv("SUBDIFF_SIMD");
    if (env && std::string(env) == "scalar") CHECK(kernels::active().name == "scalar");
    if (!kernels::avx2_kernels()) CHECK(kernels::active().name == "scalar");
}

TEST_CASE("scalar kernels on small inputs") {
    const auto& k = kernels::scalar_kernels();
    const double x[] = {1.0, 2.0, 3.0};
    const double y[] = {4.0, -5.0, 6.0};
    CHECK(k.dot(x, y, 3) == 12.0);

    double z[] = {1.0, 1.0, 1.0};
    k.axpy(2.0, x, z, 3);
    CHECK(z[0] == 3.0);
    CHECK(z[2] == 7.0);

    // x + w D^{-1} (rhs - Bx) with D^{-1} = 1/2, w = 1/2
    double u[] = {1.0, 0.0};
    const double inv[] = {0.5, 0.5};
    const double rhs[] = {3.0, 2.0};
    const double bx[] = {1.0, 0.0};
    k.jacobi_update(0.5, inv, rhs, bx, u, 2);
    CHECK(u[0] == 1.5);
    CHECK(u[1] == 0.5);
}

TEST_CASE("conv_block matches its definition") {
    const auto& k = kernels::scalar_kernels();
    const std::vector<double> w{1.0, 10.0, 100.0, 1000.0, 10000.0};
    const std::vector<double> h0{1.0, 2.0}, h1{3.0, 4.0};
    const double* hist[] = {h0.data(), h1.data()};
    std::vector<double> o0(2, 0.0), o1(2, 0.0);
    double* out[] = {o0.data(), o1.data()};
    // out[i] += w[1 + i + 1] h0 + w[1 + i] h1
    k.conv_block(hist, 2, w.data(), 1, out, 2, 2);
    CHECK(o0[0] == 100.0 * 1.0 + 10.0 * 3.0);
    CHECK(o0[1] == 100.0 * 2.0 + 10.0 * 4.0);
    CHECK(o1[0] == 1000.0 * 1.0 + 100.0 * 3.0);
    CHECK(o1[1] == 1000.0 * 2.0 + 100.0 * 4.0);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const kernels::KernelSet* simd = kernels::avx2_kernels();
    if (!simd) {
        MESSAGE("AVX2 kernels not available; skipping");
        return;
    }
    const auto& ref = kernels::scalar_kernels();
    std::mt19937_64 rng(7);

    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 63u, 1000u, 1001u}) {
        CAPTURE(n);
        const auto x = random_vector(n, rng);
        const auto y = random_vector(n, rng);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y[i]);
        CHECK(std::abs(simd->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-15 * (scale + 1.0));

        auto a = y, b = y;
        simd->axpy(0.37, x.data(), a.data(), n);
        ref.axpy(0.37, x.data(), b.data(), n);
        CHECK(max_abs_diff(a, b) <= 1e-15);

        const auto inv = random_vector(n, rng);
        const auto rhs = random_vector(n, rng);
        const auto bx = random_vector(n, rng);
        a = x;
        b = x;
        simd->jacobi_update(2.0 / 3.0, inv.data(), rhs.data(), bx.data(), a.data(), n);
        ref.jacobi_update(2.0 / 3.0, inv.data(), rhs.data(), bx.data(), b.data(), n);
        CHECK(max_abs_diff(a, b) <= 1e-15);
    }

    for (std::size_t nhist : {1u, 2u, 5u, 16u, 33u})
        for (std::size_t nout : {1u, 3u, 4u, 5u, 16u})
            for (std::size_t dim : {1u, 7u, 8u, 13u, 49u}) {
                CAPTURE(nhist);
                CAPTURE(nout);
                CAPTURE(dim);
                const std::size_t lag0 = 3;
                const auto w = random_vector(lag0 + nout + nhist, rng);
                std::vector<std::vector<double>> hist(nhist);
                std::vector<const double*> hp;
                for (auto& h : hist) {
                    h = random_vector(dim, rng);
                    hp.push_back(h.data());
                }
                std::vector<std::vector<double>> oa(nout), ob(nout);
                std::vector<double*> pa, pb;
                for (std::size_t i = 0; i < nout; ++i) {
                    oa[i] = random_vector(dim, rng);
                    ob[i] = oa[i];
                    pa.push_back(oa[i].data());
                    pb.push_back(ob[i].data());
                }
                simd->conv_block(hp.data(), nhist, w.data(), lag0, pa.data(), nout, dim);
                ref.conv_block(hp.data(), nhist, w.data(), lag0, pb.data(), nout, dim);
                for (std::size_t i = 0; i < nout; ++i)
                    CHECK(max_abs_diff(oa[i], ob[i]) <= 1e-14 * static_cast<double>(nhist + 1));
            }
}

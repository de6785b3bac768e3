#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "subdiff/errors.hpp"
#include "subdiff/fem.hpp"
#include "subdiff/sparse.hpp"

using namespace subdiff;

namespace {

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(const CsrMatrix& a, std::vector<double> b) {
    const std::size_t n = a.rows();
    std::vector<double> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = a.at(i, j);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m[i * n + k]) > std::abs(m[p * n + k])) p = i;
        for (std::size_t j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i * n + k] / m[k * n + k];
            for (std::size_t j = k; j < n; ++j) m[i * n + j] -= f * m[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m[i * n + j] * x[j];
        x[i] = s / m[i * n + i];
    }
    return x;
}

CsrMatrix small() {
    // [[4, 1, 0], [1, 3, 0], [0, 0, 2]]
    return CsrMatrix(3, 3, {0, 2, 4, 5}, {0, 1, 0, 1, 2}, {4.0, 1.0, 1.0, 3.0, 2.0});
}

}  // namespace

TEST_CASE("CSR basics") {
    const CsrMatrix a = small();
    CHECK(a.nnz() == 5);
    CHECK(a.at(0, 1) == 1.0);
    CHECK(a.at(0, 2) == 0.0);
    CHECK(a.bandwidth() == 1);
    const auto y = a.apply(std::vector<double>{1.0, 2.0, 3.0});
    CHECK(y == std::vector<double>{6.0, 7.0, 6.0});
    CHECK(a.diagonal() == std::vector<double>{4.0, 3.0, 2.0});

    CsrMatrix b = a;
    b.ref(2, 2) = 5.0;
    CHECK(b.at(2, 2) == 5.0);
    CHECK_THROWS_AS(b.ref(0, 2), ShapeError);
    CHECK(a.same_pattern(b));

    const CsrMatrix c = a.add_scaled(2.0, b);
    CHECK(c.at(0, 0) == 12.0);
    CHECK(c.at(2, 2) == 12.0);

    const CsrMatrix p(3, 2, {0, 1, 2, 3}, {0, 1, 1}, {1.0, 1.0, 0.5});
    const CsrMatrix ptap = p.transpose().multiply(a).multiply(p);
    CHECK(ptap.rows() == 2);
    CHECK(ptap.at(0, 0) == 4.0);
    CHECK(ptap.at(0, 1) == 1.0);
    CHECK(ptap.at(1, 1) == doctest::Approx(3.0 + 0.25 * 2.0));

    CHECK_THROWS_AS(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), ShapeError);
    CHECK_THROWS_AS(a.apply(std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("coordinate export") {
    std::ostringstream os;
    write_coordinate(os, small());
    CHECK(os.str() == "3 3 5\n0 0 4\n0 1 1\n1 0 1\n1 1 3\n2 2 2\n");
}

TEST_CASE("sparse Cholesky against dense elimination") {
    const FemSystem sys = assemble(build_mesh(8), 5.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double ta : {1e-3, 0.1, 10.0}) {
        const CsrMatrix b = sys.mass.add_scaled(ta, sys.stiffness);
        std::vector<double> rhs(b.rows());
        for (auto& r : rhs) r = u(rng);
        const auto x = SparseCholesky(b).solve(rhs);
        const auto ref = dense_solve(b, rhs);
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            err = std::max(err, std::abs(x[i] - ref[i]));
            scale = std::max(scale, std::abs(ref[i]));
        }
        CHECK(err <= 1e-11 * scale);

        const auto y = direct_solve(b, rhs);
        const auto r = b.apply(y);
        double res = 0.0, rn = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            res += (r[i] - rhs[i]) * (r[i] - rhs[i]);
            rn += rhs[i] * rhs[i];
        }
        CHECK(std::sqrt(res) <= 1e-12 * std::sqrt(rn));
    }
}

TEST_CASE("Cholesky rejects indefinite matrices") {
    const CsrMatrix a(2, 2, {0, 2, 4}, {0, 1, 0, 1}, {1.0, 2.0, 2.0, 1.0});
    CHECK_THROWS_AS(SparseCholesky{a}, NumericError);
}

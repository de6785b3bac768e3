#include "subdiff/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"

namespace subdiff {
namespace {

struct QuadPoint {
    std::array<double, 3> bary;
    double weight;  // fraction of the triangle area
};

// Seven-point rule, exact for total degree five.
constexpr double kA1 = 0.059715871789769820;
constexpr double kB1 = 0.470142064105115090;
constexpr double kA2 = 0.797426985353087322;
constexpr double kB2 = 0.101286507323456339;
constexpr double kW0 = 0.225;
constexpr double kW1 = 0.132394152788506181;
constexpr double kW2 = 0.125939180544827153;

constexpr std::array<QuadPoint, 7> kRule{{
    {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, kW0},
    {{kA1, kB1, kB1}, kW1},
    {{kB1, kA1, kB1}, kW1},
    {{kB1, kB1, kA1}, kW1},
    {{kA2, kB2, kB2}, kW2},
    {{kB2, kA2, kB2}, kW2},
    {{kB2, kB2, kA2}, kW2},
}};

struct ElementGeometry {
    std::array<double, 3> x;
    std::array<double, 3> y;
    double area;
    std::array<std::array<double, 2>, 3> grad;  // gradients of the barycentric functions
};

ElementGeometry geometry(const Mesh2D& mesh, const Mesh2D::Triangle& t) {
    ElementGeometry g{};
    for (int a = 0; a < 3; ++a) {
        g.x[a] = mesh.coord(t.gi[a]);
        g.y[a] = mesh.coord(t.gj[a]);
    }
    const double det = (g.x[1] - g.x[0]) * (g.y[2] - g.y[0]) - (g.x[2] - g.x[0]) * (g.y[1] - g.y[0]);
    g.area = 0.5 * det;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3;
        const int c = (a + 2) % 3;
        g.grad[a] = {(g.y[b] - g.y[c]) / det, (g.x[c] - g.x[b]) / det};
    }
    return g;
}

// Interior sparsity pattern: the node itself plus its six neighbours along
// the mesh edges (horizontal, vertical, and the (1,1) diagonal).
CsrMatrix interior_pattern(const Mesh2D& mesh) {
    const std::size_t K = mesh.K();
    const std::size_t n = mesh.num_interior();
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    ptr.reserve(n + 1);
    idx.reserve(7 * n);
    constexpr std::array<std::array<int, 2>, 7> offsets{
        {{-1, -1}, {0, -1}, {-1, 0}, {0, 0}, {1, 0}, {0, 1}, {1, 1}}};
    for (std::size_t j = 1; j < K; ++j)
        for (std::size_t i = 1; i < K; ++i) {
            for (const auto& o : offsets) {
                const auto ni = static_cast<std::ptrdiff_t>(i) + o[0];
                const auto nj = static_cast<std::ptrdiff_t>(j) + o[1];
                if (ni <= 0 || nj <= 0) continue;
                const auto ui = static_cast<std::size_t>(ni);
                const auto uj = static_cast<std::size_t>(nj);
                if (mesh.is_interior(ui, uj)) idx.push_back(mesh.index(ui, uj));
            }
            ptr.push_back(idx.size());
        }
    std::vector<double> val(idx.size(), 0.0);
    return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::move(val));
}

template <class Integrand>
std::vector<double> integrate_against_basis(const Mesh2D& mesh, Integrand&& local) {
    std::vector<double> f(mesh.num_interior(), 0.0);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto tri = mesh.triangle(t);
        const auto g = geometry(mesh, tri);
        const std::array<double, 3> contrib = local(g);
        for (int a = 0; a < 3; ++a)
            if (mesh.is_interior(tri.gi[a], tri.gj[a])) f[mesh.index(tri.gi[a], tri.gj[a])] += contrib[a];
    }
    return f;
}

}  // namespace

Mesh2D::Mesh2D(std::size_t K) : k_(K) {
    if (K < 2 || K % 2 != 0) {
        std::ostringstream msg;
        msg << "mesh needs an even number of subdivisions K >= 2, got " << K;
        throw ConfigError(msg.str());
    }
}

double Mesh2D::coord(std::size_t i) const noexcept {
    return -1.0 + static_cast<double>(i) * 2.0 / static_cast<double>(k_);
}

Mesh2D::Triangle Mesh2D::triangle(std::size_t t) const noexcept {
    const std::size_t s = t / 2;
    const std::size_t i = s % k_;
    const std::size_t j = s / k_;
    if (t % 2 == 0) return {{i, i + 1, i + 1}, {j, j, j + 1}};
    return {{i, i + 1, i}, {j, j + 1, j + 1}};
}

Mesh2D build_mesh(std::size_t K) { return Mesh2D(K); }

FemSystem assemble(const Mesh2D& mesh, double diffusivity) {
    if (!(diffusivity > 0.0) || !std::isfinite(diffusivity))
        throw DomainError("diffusivity must be positive and finite");
    CsrMatrix mass = interior_pattern(mesh);
    CsrMatrix stiff = interior_pattern(mesh);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
        const auto tri = mesh.triangle(t);
        const auto g = geometry(mesh, tri);
        for (int a = 0; a < 3; ++a) {
            if (!mesh.is_interior(tri.gi[a], tri.gj[a])) continue;
            const std::size_t row = mesh.index(tri.gi[a], tri.gj[a]);
            for (int b = 0; b < 3; ++b) {
                if (!mesh.is_interior(tri.gi[b], tri.gj[b])) continue;
                const std::size_t col = mesh.index(tri.gi[b], tri.gj[b]);
                const double k_ab =
                    diffusivity * g.area * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]);
                const double m_ab = g.area / 12.0 * (a == b ? 2.0 : 1.0);
                stiff.ref(row, col) += k_ab;
                mass.ref(row, col) += m_ab;
            }
        }
    }
    return FemSystem{mesh, diffusivity, std::move(mass), std::move(stiff)};
}

std::vector<double> load_vector(const Mesh2D& mesh, const ScalarField& g) {
    return integrate_against_basis(mesh, [&](const ElementGeometry& e) {
        std::array<double, 3> c{0.0, 0.0, 0.0};
        for (const auto& q : kRule) {
            const double x = q.bary[0] * e.x[0] + q.bary[1] * e.x[1] + q.bary[2] * e.x[2];
            const double y = q.bary[0] * e.y[0] + q.bary[1] * e.y[1] + q.bary[2] * e.y[2];
            const double v = g(x, y);
            if (!std::isfinite(v)) throw DataError("load_vector: non-finite integrand sample");
            for (int a = 0; a < 3; ++a) c[a] += q.weight * v * q.bary[a];
        }
        for (double& v : c) v *= e.area;
        return c;
    });
}

std::vector<double> stiffness_load(const Mesh2D& mesh, double diffusivity, const VectorField& grad_v) {
    return integrate_against_basis(mesh, [&](const ElementGeometry& e) {
        std::array<double, 2> mean{0.0, 0.0};
        for (const auto& q : kRule) {
            const double x = q.bary[0] * e.x[0] + q.bary[1] * e.x[1] + q.bary[2] * e.x[2];
            const double y = q.bary[0] * e.y[0] + q.bary[1] * e.y[1] + q.bary[2] * e.y[2];
            const auto gv = grad_v(x, y);
            if (!std::isfinite(gv[0]) || !std::isfinite(gv[1]))
                throw DataError("stiffness_load: non-finite gradient sample");
            mean[0] += q.weight * gv[0];
            mean[1] += q.weight * gv[1];
        }
        std::array<double, 3> c{};
        for (int a = 0; a < 3; ++a)
            c[a] = diffusivity * e.area * (mean[0] * e.grad[a][0] + mean[1] * e.grad[a][1]);
        return c;
    });
}

std::vector<double> interpolate(const Mesh2D& mesh, const ScalarField& g) {
    std::vector<double> v(mesh.num_interior());
    for (std::size_t j = 1; j < mesh.K(); ++j)
        for (std::size_t i = 1; i < mesh.K(); ++i) v[mesh.index(i, j)] = g(mesh.coord(i), mesh.coord(j));
    return v;
}

std::vector<double> l2_project(const FemSystem& sys, const ScalarField& g) {
    return direct_solve(sys.mass, load_vector(sys.mesh, g));
}

std::vector<double> ritz_project(const FemSystem& sys, const VectorField& grad_v) {
    return direct_solve(sys.stiffness, stiffness_load(sys.mesh, sys.diffusivity, grad_v));
}

std::vector<double> ritz_project_from_operator(const FemSystem& sys, const ScalarField& av) {
    return direct_solve(sys.stiffness, load_vector(sys.mesh, av));
}

double energy(const CsrMatrix& a, std::span<const double> x) {
    const std::vector<double> ax = a.apply(x);
    return kernels::dot(x, ax);
}

double l2_norm(const FemSystem& sys, std::span<const double> x) {
    if (x.size() != sys.size()) throw ShapeError("l2_norm: dimension mismatch");
    return std::sqrt(std::max(0.0, energy(sys.mass, x)));
}

double weighted_norm(const FemSystem& sys, double tau, double alpha, std::span<const double> x) {
    if (x.size() != sys.size()) throw ShapeError("weighted_norm: dimension mismatch");
    const double m = energy(sys.mass, x);
    const double s = energy(sys.stiffness, x);
    return std::sqrt(std::max(0.0, m + std::pow(tau, alpha) * s));
}

}  // namespace subdiff

#pragma once

// Piecewise linear finite elements on a uniform triangulation of (-1, 1)^2.
// Only interior nodes carry unknowns; the zero Dirichlet values are
// eliminated at assembly.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "subdiff/sparse.hpp"

namespace subdiff {

using ScalarField = std::function<double(double x, double y)>;
using VectorField = std::function<std::array<double, 2>(double x, double y)>;

/// K x K squares of side h = 2/K, each split along its bottom-left to
/// top-right diagonal. Grid node (i, j), 0 <= i, j <= K, sits at
/// (-1 + i h, -1 + j h); interior nodes 1 <= i, j <= K-1 are numbered
/// lexicographically with i fastest.
class Mesh2D {
public:
    struct Triangle {
        std::array<std::size_t, 3> gi;  // grid i of the vertices
        std::array<std::size_t, 3> gj;  // grid j of the vertices
    };

    explicit Mesh2D(std::size_t K);

    std::size_t K() const noexcept { return k_; }
    double h() const noexcept { return 2.0 / static_cast<double>(k_); }
    std::size_t num_interior() const noexcept { return (k_ - 1) * (k_ - 1); }
    std::size_t num_triangles() const noexcept { return 2 * k_ * k_; }

    double coord(std::size_t i) const noexcept;
    bool is_interior(std::size_t i, std::size_t j) const noexcept {
        return i > 0 && j > 0 && i < k_ && j < k_;
    }
    /// Linear index of an interior node.
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return (j - 1) * (k_ - 1) + (i - 1); }

    /// Triangle t, 0 <= t < num_triangles(); counterclockwise vertices.
    Triangle triangle(std::size_t t) const noexcept;

private:
    std::size_t k_;
};

Mesh2D build_mesh(std::size_t K);

/// Mass and diffusivity-scaled stiffness matrices over interior nodes.
struct FemSystem {
    Mesh2D mesh;
    double diffusivity;
    CsrMatrix mass;
    CsrMatrix stiffness;

    std::size_t size() const noexcept { return mesh.num_interior(); }
};

FemSystem assemble(const Mesh2D& mesh, double diffusivity);

/// F_i = integral of g * phi_i, by a seven-point rule exact for polynomials
/// of degree five on every triangle. Throws DataError on non-finite samples.
std::vector<double> load_vector(const Mesh2D& mesh, const ScalarField& g);

/// G_i = integral of c grad v . grad phi_i, same quadrature.
std::vector<double> stiffness_load(const Mesh2D& mesh, double diffusivity, const VectorField& grad_v);

/// Nodal interpolant of g at interior nodes.
std::vector<double> interpolate(const Mesh2D& mesh, const ScalarField& g);

/// P_h g: solves M x = F(g).
std::vector<double> l2_project(const FemSystem& sys, const ScalarField& g);

/// R_h v from grad v: solves S x = (c grad v, grad phi).
std::vector<double> ritz_project(const FemSystem& sys, const VectorField& grad_v);

/// R_h v from A v = -c Laplace(v) (v in the operator domain): solves S x = F(Av).
std::vector<double> ritz_project_from_operator(const FemSystem& sys, const ScalarField& av);

/// ||x|| = sqrt(x^T M x).
double l2_norm(const FemSystem& sys, std::span<const double> x);

/// |x| = sqrt(x^T (M + tau^alpha S) x).
double weighted_norm(const FemSystem& sys, double tau, double alpha, std::span<const double> x);

/// x^T A x for a symmetric matrix A.
double energy(const CsrMatrix& a, std::span<const double> x);

}  // namespace subdiff

#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace subdiff {

/// Compressed sparse row matrix with sorted column indices.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
              std::vector<std::size_t> col_idx, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Entry (i, j), zero if not stored.
    double at(std::size_t i, std::size_t j) const;
    /// Mutable reference to a stored entry; throws ShapeError if (i, j) is not in the pattern.
    double& ref(std::size_t i, std::size_t j);

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> diagonal() const;

    /// Largest |i - j| over stored entries.
    std::size_t bandwidth() const noexcept;

    bool same_pattern(const CsrMatrix& other) const noexcept;

    /// this + s * other; both matrices must share the sparsity pattern.
    CsrMatrix add_scaled(double s, const CsrMatrix& other) const;

    CsrMatrix transpose() const;
    /// Sparse product this * other.
    CsrMatrix multiply(const CsrMatrix& other) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// Coordinate text export: header "rows cols nnz", then one "i j value" line per entry.
void write_coordinate(std::ostream& os, const CsrMatrix& a);

/// Sparse Cholesky factorization L L^T = P A P^T of a symmetric
/// positive-definite matrix (Eigen SimplicialLLT, AMD ordering). Immutable
/// once built; copies share the factor.
class SparseCholesky {
public:
    /// Throws ShapeError for a non-square matrix, NumericError if A is not
    /// positive definite.
    explicit SparseCholesky(const CsrMatrix& a);

    std::size_t size() const noexcept { return n_; }
    void solve(std::span<const double> rhs, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    struct Factor;
    std::size_t n_ = 0;
    std::shared_ptr<const Factor> factor_;
};

/// Direct solve of an SPD system: sparse Cholesky plus one step of iterative
/// refinement if needed. Guarantees ||rhs - Bx||_2 <= 1e-12 ||rhs||_2, else
/// throws NumericError.
class DirectSolver {
public:
    explicit DirectSolver(const CsrMatrix& b);

    std::size_t size() const noexcept { return factor_.size(); }
    void solve(std::span<const double> rhs, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    CsrMatrix matrix_;
    SparseCholesky factor_;
};

std::vector<double> direct_solve(const CsrMatrix& b, std::span<const double> rhs);

}  // namespace subdiff

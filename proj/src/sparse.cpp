#include "subdiff/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include <Eigen/SparseCholesky>

#include "subdiff/errors.hpp"
#include "subdiff/kernels.hpp"

namespace subdiff {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size())
        throw ShapeError("inconsistent CSR arrays");
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            if (col_idx_[p] >= cols_) throw ShapeError("CSR column index out of range");
            if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
                throw ShapeError("CSR columns must be strictly increasing within a row");
        }
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i));
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i + 1));
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double& CsrMatrix::ref(std::size_t i, std::size_t j) {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i));
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_.at(i + 1));
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) throw ShapeError("entry not in sparsity pattern");
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void CsrMatrix::apply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != cols_ || y.size() != rows_) throw ShapeError("CSR apply: dimension mismatch");
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::apply(std::span<const double> x) const {
    std::vector<double> y(rows_);
    apply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
    return d;
}

std::size_t CsrMatrix::bandwidth() const noexcept {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const std::size_t j = col_idx_[p];
            bw = std::max(bw, i > j ? i - j : j - i);
        }
    return bw;
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ &&
           col_idx_ == other.col_idx_;
}

CsrMatrix CsrMatrix::add_scaled(double s, const CsrMatrix& other) const {
    if (!same_pattern(other)) throw ShapeError("add_scaled: sparsity patterns differ");
    std::vector<double> v(values_.size());
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = values_[p] + s * other.values_[p];
    return CsrMatrix(rows_, cols_, row_ptr_, col_idx_, std::move(v));
}

CsrMatrix CsrMatrix::transpose() const {
    std::vector<std::size_t> counts(cols_ + 1, 0);
    for (std::size_t c : col_idx_) ++counts[c + 1];
    for (std::size_t j = 0; j < cols_; ++j) counts[j + 1] += counts[j];
    std::vector<std::size_t> ptr = counts;
    std::vector<std::size_t> idx(nnz());
    std::vector<double> val(nnz());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const std::size_t q = counts[col_idx_[p]]++;
            idx[q] = i;
            val[q] = values_[p];
        }
    return CsrMatrix(cols_, rows_, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix CsrMatrix::multiply(const CsrMatrix& other) const {
    if (cols_ != other.rows_) throw ShapeError("multiply: inner dimensions differ");
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> idx;
    std::vector<double> val;
    std::vector<double> work(other.cols_, 0.0);
    std::vector<char> used(other.cols_, 0);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < rows_; ++i) {
        cols.clear();
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            const std::size_t k = col_idx_[p];
            for (std::size_t q = other.row_ptr_[k]; q < other.row_ptr_[k + 1]; ++q) {
                const std::size_t j = other.col_idx_[q];
                if (!used[j]) {
                    used[j] = 1;
                    cols.push_back(j);
                }
                work[j] += values_[p] * other.values_[q];
            }
        }
        std::sort(cols.begin(), cols.end());
        for (std::size_t j : cols) {
            idx.push_back(j);
            val.push_back(work[j]);
            work[j] = 0.0;
            used[j] = 0;
        }
        ptr.push_back(idx.size());
    }
    return CsrMatrix(rows_, other.cols_, std::move(ptr), std::move(idx), std::move(val));
}

void write_coordinate(std::ostream& os, const CsrMatrix& a) {
    os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    const auto ptr = a.row_ptr();
    const auto idx = a.col_idx();
    const auto val = a.values();
    os << std::setprecision(17);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t p = ptr[i]; p < ptr[i + 1]; ++p) os << i << ' ' << idx[p] << ' ' << val[p] << '\n';
}

struct SparseCholesky::Factor {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SparseCholesky::SparseCholesky(const CsrMatrix& a) : n_(a.rows()) {
    if (a.rows() != a.cols()) throw ShapeError("Cholesky needs a square matrix");
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(a.nnz());
    const auto ptr = a.row_ptr();
    const auto idx = a.col_idx();
    const auto val = a.values();
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t p = ptr[i]; p < ptr[i + 1]; ++p)
            if (idx[p] <= i)
                entries.emplace_back(static_cast<int>(i), static_cast<int>(idx[p]), val[p]);
    Eigen::SparseMatrix<double> lower(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    lower.setFromTriplets(entries.begin(), entries.end());

    auto f = std::make_shared<Factor>();
    f->llt.compute(lower);
    if (f->llt.info() != Eigen::Success) throw NumericError("Cholesky breakdown: matrix not positive definite");
    factor_ = std::move(f);
}

void SparseCholesky::solve(std::span<const double> rhs, std::span<double> x) const {
    if (rhs.size() != n_ || x.size() != n_) throw ShapeError("Cholesky solve: dimension mismatch");
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n_)) = factor_->llt.solve(b);
}

std::vector<double> SparseCholesky::solve(std::span<const double> rhs) const {
    std::vector<double> x(n_);
    solve(rhs, x);
    return x;
}

DirectSolver::DirectSolver(const CsrMatrix& b) : matrix_(b), factor_(b) {}

void DirectSolver::solve(std::span<const double> rhs, std::span<double> x) const {
    factor_.solve(rhs, x);
    const double rhs_norm = std::sqrt(kernels::dot(rhs, rhs));
    if (rhs_norm == 0.0) return;
    std::vector<double> r = matrix_.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    double res = std::sqrt(kernels::dot(r, r));
    if (res <= 1e-13 * rhs_norm) return;
    const std::vector<double> dx = factor_.solve(r);
    kernels::axpy(1.0, dx, x);
    matrix_.apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    res = std::sqrt(kernels::dot(r, r));
    if (!(res <= 1e-12 * rhs_norm)) throw NumericError("direct solve: residual above 1e-12");
}

std::vector<double> DirectSolver::solve(std::span<const double> rhs) const {
    std::vector<double> x(size());
    solve(rhs, x);
    return x;
}

std::vector<double> direct_solve(const CsrMatrix& b, std::span<const double> rhs) {
    return DirectSolver(b).solve(rhs);
}

}  // namespace subdiff

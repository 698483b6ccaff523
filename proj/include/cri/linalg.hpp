#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace cri {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Sorted set of column indices. Strictly increasing by construction.
class IndexSet {
public:
    IndexSet() = default;
    // Throws InvalidInput unless `indices` is strictly increasing.
    explicit IndexSet(std::vector<std::size_t> indices);
    IndexSet(std::initializer_list<std::size_t> indices);

    // Sorts and drops duplicates.
    static IndexSet from_unsorted(std::vector<std::size_t> indices);
    static IndexSet range(std::size_t count);

    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    std::size_t operator[](std::size_t i) const { return indices_[i]; }
    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

    bool contains(std::size_t index) const noexcept;
    bool is_subset_of(const IndexSet& other) const noexcept;

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::vector<std::size_t> indices_;
};

// n x p real matrix whose columns are unit vectors (within 1e-9).
//
// Immutable after construction. A zero-column matrix is representable (it is
// what an empty submatrix produces) but every spectral operation rejects it.
class ColumnMatrix {
public:
    static constexpr double kUnitTolerance = 1e-9;

    ColumnMatrix() = default;
    // Throws InvalidInput if n == 0 or any column norm is off by more than kUnitTolerance.
    explicit ColumnMatrix(Matrix entries);

    // Explicit renormalization of every column; throws InvalidInput on a zero column.
    static ColumnMatrix normalized(Matrix entries);

    Eigen::Index rows() const noexcept { return entries_.rows(); }
    Eigen::Index cols() const noexcept { return entries_.cols(); }
    bool empty() const noexcept { return entries_.cols() == 0; }
    const Matrix& matrix() const noexcept { return entries_; }
    auto column(Eigen::Index j) const { return entries_.col(j); }

private:
    Matrix entries_;
};

// Columns of X selected by I, order preserved.
ColumnMatrix submatrix(const ColumnMatrix& x, const IndexSet& selection);

// Smallest singular value. Zero when there are more columns than rows.
double sigma_min(const ColumnMatrix& x);
double sigma_min(const Matrix& a);

// Largest singular value.
double operator_norm(const Matrix& a);
inline double operator_norm(const ColumnMatrix& x) { return operator_norm(x.matrix()); }

// Max |<X_j, X_k>| over distinct columns. Requires at least two columns.
double coherence(const ColumnMatrix& x);

// ||X^t X - I||.
double gram_deviation(const ColumnMatrix& x);

// max_{j in I} |<X_j, v>| for a unit vector v.
double inf_norm_against(const ColumnMatrix& x, const IndexSet& selection, const Vector& v);

// |<X_j, v>| for every column.
Vector abs_inner_products(const ColumnMatrix& x, const Vector& v);

// Throws InvalidInput unless |v| is within kUnitTolerance of 1 and v has `dim` entries.
void require_unit_vector(const Vector& v, Eigen::Index dim);

}  // namespace cri

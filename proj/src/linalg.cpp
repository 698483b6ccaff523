#include "cri/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cri/error.hpp"

namespace cri {

IndexSet::IndexSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    for (std::size_t i = 1; i < indices_.size(); ++i) {
        if (indices_[i] <= indices_[i - 1]) {
            throw InvalidInput("IndexSet: indices must be strictly increasing");
        }
    }
}

IndexSet::IndexSet(std::initializer_list<std::size_t> indices)
    : IndexSet(std::vector<std::size_t>(indices)) {}

IndexSet IndexSet::from_unsorted(std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return IndexSet(std::move(indices));
}

IndexSet IndexSet::range(std::size_t count) {
    std::vector<std::size_t> all(count);
    for (std::size_t i = 0; i < count; ++i) all[i] = i;
    return IndexSet(std::move(all));
}

bool IndexSet::contains(std::size_t index) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool IndexSet::is_subset_of(const IndexSet& other) const noexcept {
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
}

ColumnMatrix::ColumnMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1) throw InvalidInput("ColumnMatrix: need at least one row");
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
        const double norm = entries_.col(j).norm();
        if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
            throw InvalidInput("ColumnMatrix: column " + std::to_string(j) + " has norm " +
                               std::to_string(norm) + ", expected 1");
        }
    }
}

ColumnMatrix ColumnMatrix::normalized(Matrix entries) {
    for (Eigen::Index j = 0; j < entries.cols(); ++j) {
        const double norm = entries.col(j).norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw InvalidInput("ColumnMatrix: cannot normalize column " + std::to_string(j));
        }
        entries.col(j) /= norm;
    }
    return ColumnMatrix(std::move(entries));
}

ColumnMatrix submatrix(const ColumnMatrix& x, const IndexSet& selection) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(selection.size()));
    Eigen::Index k = 0;
    for (std::size_t j : selection) {
        if (j >= static_cast<std::size_t>(x.cols())) {
            throw InvalidIndex("submatrix: index " + std::to_string(j) + " out of range for " +
                               std::to_string(x.cols()) + " columns");
        }
        out.col(k++) = x.column(static_cast<Eigen::Index>(j));
    }
    return ColumnMatrix(std::move(out));
}

double sigma_min(const Matrix& a) {
    if (a.size() == 0) throw InvalidInput("sigma_min: empty matrix");
    if (a.cols() > a.rows()) return 0.0;
    // One-sided Jacobi keeps small singular values accurate in the relative sense.
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().minCoeff();
}

double sigma_min(const ColumnMatrix& x) { return sigma_min(x.matrix()); }

double operator_norm(const Matrix& a) {
    if (a.size() == 0) throw InvalidInput("operator_norm: empty matrix");
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

double coherence(const ColumnMatrix& x) {
    if (x.cols() < 2) throw InvalidInput("coherence: need at least two columns");
    const Matrix gram = x.matrix().transpose() * x.matrix();
    double best = 0.0;
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) best = std::max(best, std::abs(gram(i, j)));
    }
    return std::min(best, 1.0);
}

double gram_deviation(const ColumnMatrix& x) {
    if (x.empty()) throw InvalidInput("gram_deviation: empty matrix");
    Matrix h = x.matrix().transpose() * x.matrix();
    h.diagonal().array() -= 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

void require_unit_vector(const Vector& v, Eigen::Index dim) {
    if (v.size() != dim) {
        throw InvalidInput("vector has dimension " + std::to_string(v.size()) + ", expected " +
                           std::to_string(dim));
    }
    if (!(std::abs(v.norm() - 1.0) <= ColumnMatrix::kUnitTolerance)) {
        throw InvalidInput("vector is not unit norm");
    }
}

Vector abs_inner_products(const ColumnMatrix& x, const Vector& v) {
    require_unit_vector(v, x.rows());
    return (x.matrix().transpose() * v).cwiseAbs();
}

double inf_norm_against(const ColumnMatrix& x, const IndexSet& selection, const Vector& v) {
    if (selection.empty()) throw InvalidInput("inf_norm_against: empty index set");
    require_unit_vector(v, x.rows());
    double best = 0.0;
    for (std::size_t j : selection) {
        if (j >= static_cast<std::size_t>(x.cols())) {
            throw InvalidIndex("inf_norm_against: index " + std::to_string(j) + " out of range");
        }
        best = std::max(best, std::abs(x.column(static_cast<Eigen::Index>(j)).dot(v)));
    }
    return best;
}

}  // namespace cri

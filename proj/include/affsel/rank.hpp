#pragma once

#include <cstddef>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"

namespace affsel {

// Tolerance for deciding which singular values count as nonzero.
//   relative: threshold = max(rows, cols) * epsilon * sigma_max
//   absolute: threshold = epsilon
struct RankTolerance {
    enum class Policy { relative, absolute };
    Policy policy = Policy::relative;
    double epsilon = std::numeric_limits<double>::epsilon();

    double threshold(double sigma_max, Eigen::Index rows, Eigen::Index cols) const {
        if (policy == Policy::relative)
            return static_cast<double>(std::max(rows, cols)) * epsilon * sigma_max;
        return epsilon;
    }
};

inline void validate_tolerance(const RankTolerance& tol) {
    if (!(tol.epsilon > 0.0) || !std::isfinite(tol.epsilon))
        throw validation_error("tolerance epsilon must be a positive finite real");
}

// Count of singular values above the tolerance threshold. 64-bit floats
// throughout; the empty and all-zero matrices have rank 0.
inline std::size_t numerical_rank(const Eigen::MatrixXd& M, const RankTolerance& tol = {}) {
    validate_tolerance(tol);
    if (M.rows() == 0 || M.cols() == 0) return 0;
    if (!M.allFinite())
        throw validation_error("numerical_rank: matrix has non-finite entries");

    Eigen::VectorXd sv;
    if (std::min(M.rows(), M.cols()) <= 16) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
        sv = svd.singularValues();
    } else {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M);
        sv = svd.singularValues();
    }
    const double smax = sv.size() ? sv(0) : 0.0;
    if (smax == 0.0) return 0;
    const double thr = tol.threshold(smax, M.rows(), M.cols());
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > thr) ++rank;
    return rank;
}

// Columns are the differences v_i - v_last for a cloud stored row-per-point.
inline Eigen::MatrixXd difference_matrix(const Eigen::MatrixXd& points) {
    const Eigen::Index d = points.rows();
    Eigen::MatrixXd D(points.cols(), d > 0 ? d - 1 : 0);
    for (Eigen::Index i = 0; i + 1 < d; ++i)
        D.col(i) = (points.row(i) - points.row(d - 1)).transpose();
    return D;
}

// Differences v_i - x for every point; rank of this equals the affine
// dimension of points + {x} (x acting as the base point).
inline Eigen::MatrixXd differences_from(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& x) {
    Eigen::MatrixXd D(points.cols(), points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        D.col(i) = (points.row(i) - x).transpose();
    return D;
}

// Dimension of the affine hull: rank of the point differences against the
// last point. A single point (or none) spans dimension 0.
inline std::size_t affine_dimension(const Eigen::MatrixXd& points, const RankTolerance& tol = {}) {
    if (points.rows() <= 1) return 0;
    return numerical_rank(difference_matrix(points), tol);
}

// Number of coordinates that are nonzero in at least one point.
inline std::size_t ambient_dimension(const Eigen::MatrixXd& points) {
    std::size_t n = 0;
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
        for (Eigen::Index r = 0; r < points.rows(); ++r)
            if (points(r, c) != 0.0) { ++n; break; }
    }
    return n;
}

// Membership via rank non-increase: x lies in the hull iff appending it does
// not raise the affine dimension, judged with the same tolerance. A point
// bit-identical to a generating point is a member by set semantics and skips
// the rank test.
inline bool in_affine_hull(const Eigen::RowVectorXd& x, const Eigen::MatrixXd& points,
                           const RankTolerance& tol = {}) {
    if (points.rows() == 0)
        throw validation_error("in_affine_hull: empty point set");
    if (x.cols() != points.cols())
        throw validation_error("in_affine_hull: dimension mismatch");
    for (Eigen::Index r = 0; r < points.rows(); ++r)
        if (points.row(r) == x) return true;
    const std::size_t base = affine_dimension(points, tol);
    return numerical_rank(differences_from(points, x), tol) == base;
}

} // namespace affsel

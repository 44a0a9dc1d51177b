#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "enumerate.hpp"
#include "rank.hpp"

namespace affsel {

// Which pair of hulls the joint-membership ratio (f6) tests each sample
// against. `class_vs_class` asks for membership in both class hulls;
// `table1_literal` pairs the positive hull with the full-cloud hull (the
// latter membership is trivially true for every sample, so the ratio reduces
// to the positive-hull occupancy of the whole cloud).
enum class F6Mode { class_vs_class, table1_literal };

// Dense views of one dataset under one class partition. Rows keep the
// dataset's original order within each matrix.
struct PointClouds {
    Eigen::MatrixXd positive;
    Eigen::MatrixXd negative;
    Eigen::MatrixXd full;
};

inline Eigen::MatrixXd to_dense(const SparseDataset& ds) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ds.n_rows()),
                                              static_cast<Eigen::Index>(ds.n_columns));
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        for (const auto& [col, val] : ds.rows[i])
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = val;
    return M;
}

inline PointClouds build_clouds(const SparseDataset& ds, const ClassPartition& part) {
    const auto [pos_idx, neg_idx] = split_by_partition(ds, part);
    const Eigen::MatrixXd full = to_dense(ds);
    PointClouds c;
    c.positive.resize(static_cast<Eigen::Index>(pos_idx.size()), full.cols());
    for (std::size_t i = 0; i < pos_idx.size(); ++i)
        c.positive.row(static_cast<Eigen::Index>(i)) = full.row(static_cast<Eigen::Index>(pos_idx[i]));
    c.negative.resize(static_cast<Eigen::Index>(neg_idx.size()), full.cols());
    for (std::size_t i = 0; i < neg_idx.size(); ++i)
        c.negative.row(static_cast<Eigen::Index>(i)) = full.row(static_cast<Eigen::Index>(neg_idx[i]));
    c.full = full;
    return c;
}

inline PointClouds build_clouds(const SparseDataset& ds, const ClassPartition& part,
                                const FeatureSubset& subset) {
    return build_clouds(project(ds, subset), part);
}

// The six ratios for one (partition, feature subset) pair, plus their
// standardized counterparts once standardize_profiles has run over a family
// of profiles.
struct GeometryProfile {
    std::array<double, 6> f{};
    std::array<double, 6> z{};
    F6Mode f6_mode = F6Mode::class_vs_class;
    bool standardized = false;
};

namespace detail {

inline std::vector<std::size_t> subset_columns(const FeatureTypeLayout& layout, const FeatureSubset& subset) {
    std::vector<std::size_t> cols;
    for (const auto& block : layout.blocks) {
        if (!subset.contains(block.name)) continue;
        for (std::size_t c = block.start; c < block.end; ++c) cols.push_back(c);
    }
    return cols;
}

inline Eigen::MatrixXd pick(const Eigen::MatrixXd& M, const std::vector<std::size_t>& row_idx,
                            const std::vector<std::size_t>& col_idx) {
    Eigen::MatrixXd R(static_cast<Eigen::Index>(row_idx.size()), static_cast<Eigen::Index>(col_idx.size()));
    for (std::size_t i = 0; i < row_idx.size(); ++i)
        for (std::size_t j = 0; j < col_idx.size(); ++j)
            R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                M(static_cast<Eigen::Index>(row_idx[i]), static_cast<Eigen::Index>(col_idx[j]));
    return R;
}

// Membership tests against one cloud with the base affine dimension computed
// once; bit-identical rows are members without a rank test.
class HullTester {
public:
    HullTester(const Eigen::MatrixXd& points, const RankTolerance& tol)
        : points_(points), tol_(tol), base_(affine_dimension(points, tol)) {}

    bool contains(const Eigen::RowVectorXd& x) const {
        for (Eigen::Index r = 0; r < points_.rows(); ++r)
            if (points_.row(r) == x) return true;
        return numerical_rank(differences_from(points_, x), tol_) == base_;
    }

    std::size_t base_dimension() const { return base_; }

private:
    const Eigen::MatrixXd& points_;
    RankTolerance tol_;
    std::size_t base_;
};

inline double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace detail

// f1 = affdim(pos)/ambdim(pos)      f2 = affdim(neg)/ambdim(neg)
// f3 = affdim(pos)/ambdim(full)     f4 = affdim(neg)/ambdim(full)
// f5 = affdim(full)/ambdim(full)
// f6 = fraction of all samples lying in both tested hulls (see F6Mode).
// Ratios with a zero denominator are 0.
inline GeometryProfile compute_profile(const PointClouds& clouds, const RankTolerance& tol = {},
                                       F6Mode mode = F6Mode::class_vs_class) {
    if (clouds.positive.rows() == 0 || clouds.negative.rows() == 0)
        throw validation_error("compute_profile: both classes need at least one sample");
    if (clouds.positive.cols() != clouds.full.cols() || clouds.negative.cols() != clouds.full.cols())
        throw validation_error("compute_profile: cloud column counts disagree");

    detail::HullTester pos(clouds.positive, tol);
    detail::HullTester neg(clouds.negative, tol);
    detail::HullTester ful(clouds.full, tol);

    const std::size_t amb_p = ambient_dimension(clouds.positive);
    const std::size_t amb_n = ambient_dimension(clouds.negative);
    const std::size_t amb_f = ambient_dimension(clouds.full);

    GeometryProfile p;
    p.f6_mode = mode;
    p.f[0] = detail::ratio(pos.base_dimension(), amb_p);
    p.f[1] = detail::ratio(neg.base_dimension(), amb_n);
    p.f[2] = detail::ratio(pos.base_dimension(), amb_f);
    p.f[3] = detail::ratio(neg.base_dimension(), amb_f);
    p.f[4] = detail::ratio(ful.base_dimension(), amb_f);

    const detail::HullTester& second = (mode == F6Mode::class_vs_class) ? neg : ful;
    std::size_t joint = 0;
    for (Eigen::Index r = 0; r < clouds.full.rows(); ++r) {
        const Eigen::RowVectorXd x = clouds.full.row(r);
        if (pos.contains(x) && second.contains(x)) ++joint;
    }
    p.f[5] = detail::ratio(joint, static_cast<std::size_t>(clouds.full.rows()));
    return p;
}

// Population z-scores of each ratio across the given profiles (the family a
// classifier compares, e.g. all subsets under one partition). A coordinate
// with zero spread standardizes to 0 everywhere.
inline void standardize_profiles(std::vector<GeometryProfile>& profiles) {
    if (profiles.empty()) return;
    const double n = static_cast<double>(profiles.size());
    for (std::size_t j = 0; j < 6; ++j) {
        double mean = 0.0;
        for (const auto& p : profiles) mean += p.f[j];
        mean /= n;
        double var = 0.0;
        for (const auto& p : profiles) {
            const double d = p.f[j] - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / n);
        for (auto& p : profiles)
            p.z[j] = sd > 0.0 ? (p.f[j] - mean) / sd : 0.0;
    }
    for (auto& p : profiles) p.standardized = true;
}

} // namespace affsel

#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <istream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"
#include "enumerate.hpp"
#include "geometry.hpp"
#include "rank.hpp"

namespace affsel {

// Intercept + six slopes for each of the two frozen regression models.
struct ModelCoefficients {
    std::array<double, 7> logistic{};
    std::array<double, 7> linear{};
};

inline ModelCoefficients default_coefficients() {
    ModelCoefficients c;
    c.logistic = {-0.64063267, 0.15706603, 0.1327297, -0.03350878, -0.15182902, 0.19548473, -0.68787718};
    c.linear = {-1.039011e-12, 0.0, 0.0, 0.09114375, -0.01223389, -0.0200644, 0.0};
    return c;
}

inline void validate_coefficients(const ModelCoefficients& c) {
    for (double v : c.logistic)
        if (!std::isfinite(v)) throw validation_error("logistic coefficients must be finite");
    for (double v : c.linear)
        if (!std::isfinite(v)) throw validation_error("linear coefficients must be finite");
}

// Both model outputs plus the conjunctive gate:
// optimal iff lin_pred > 0 (strict) and log_pred >= 0.5 (non-strict).
struct Verdict {
    double lin_pred = 0.0;
    double log_pred = 0.0;
    bool optimal = false;
};

inline Verdict predict(const GeometryProfile& profile, const ModelCoefficients& coeffs) {
    if (!profile.standardized)
        throw validation_error("predict: profile has no z-scores (standardize first)");
    Verdict v;
    double lin = coeffs.linear[0];
    double logit = coeffs.logistic[0];
    for (std::size_t i = 0; i < 6; ++i) {
        lin += coeffs.linear[i + 1] * profile.z[i];
        logit += coeffs.logistic[i + 1] * profile.z[i];
    }
    v.lin_pred = lin;
    v.log_pred = 1.0 / (1.0 + std::exp(-logit));
    v.optimal = (v.lin_pred > 0.0) && (v.log_pred >= 0.5);
    return v;
}

struct SubsetResult {
    FeatureSubset subset;
    GeometryProfile profile;
    Verdict verdict;
    double seconds = 0.0;
};

struct PartitionResult {
    ClassPartition partition;
    std::vector<SubsetResult> subsets;  // enumeration order
    double seconds = 0.0;
};

struct SelectionReport {
    FeatureTypeLayout layout;
    std::vector<PartitionResult> partitions;  // canonical-name order
};

struct SelectOptions {
    RankTolerance tolerance;
    F6Mode f6_mode = F6Mode::class_vs_class;
    ModelCoefficients coefficients = default_coefficients();
    unsigned threads = 0;  // 0 = hardware concurrency
};

// Every partition times every subset: compute the six ratios, standardize
// across the partition's subsets, gate each through both models. Partitions
// are independent and may run on worker threads; the report order is fixed by
// enumeration regardless.
inline SelectionReport select(const SparseDataset& ds, const SelectOptions& options = {}) {
    validate(ds);
    validate_tolerance(options.tolerance);
    validate_coefficients(options.coefficients);

    const auto partitions = enumerate_partitions(ds.label_set());
    const auto subsets = enumerate_subsets(ds.layout);
    const Eigen::MatrixXd dense = to_dense(ds);

    std::vector<std::vector<std::size_t>> subset_cols;
    subset_cols.reserve(subsets.size());
    for (const auto& s : subsets) subset_cols.push_back(detail::subset_columns(ds.layout, s));

    std::vector<std::size_t> all_rows(ds.n_rows());
    for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

    SelectionReport report;
    report.layout = ds.layout;
    report.partitions.resize(partitions.size());

    const auto run_partition = [&](std::size_t pi) {
        using clock = std::chrono::steady_clock;
        const auto part_start = clock::now();
        const auto& part = partitions[pi];
        const auto [pos_idx, neg_idx] = split_by_partition(ds, part);

        PartitionResult pr;
        pr.partition = part;
        pr.subsets.resize(subsets.size());
        std::vector<GeometryProfile> profiles(subsets.size());
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            const auto sub_start = clock::now();
            PointClouds clouds;
            clouds.positive = detail::pick(dense, pos_idx, subset_cols[si]);
            clouds.negative = detail::pick(dense, neg_idx, subset_cols[si]);
            clouds.full = detail::pick(dense, all_rows, subset_cols[si]);
            profiles[si] = compute_profile(clouds, options.tolerance, options.f6_mode);
            pr.subsets[si].seconds = std::chrono::duration<double>(clock::now() - sub_start).count();
        }
        standardize_profiles(profiles);
        for (std::size_t si = 0; si < subsets.size(); ++si) {
            pr.subsets[si].subset = subsets[si];
            pr.subsets[si].profile = profiles[si];
            pr.subsets[si].verdict = predict(profiles[si], options.coefficients);
        }
        pr.seconds = std::chrono::duration<double>(clock::now() - part_start).count();
        report.partitions[pi] = std::move(pr);
    };

    unsigned n_threads = options.threads ? options.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, partitions.size()));

    if (n_threads <= 1) {
        for (std::size_t pi = 0; pi < partitions.size(); ++pi) run_partition(pi);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(partitions.size());
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t pi = next.fetch_add(1);
                    if (pi >= partitions.size()) return;
                    try {
                        run_partition(pi);
                    } catch (...) {
                        errors[pi] = std::current_exception();
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return report;
}

// One labeled observation for refitting: standardized profile, the wrapper's
// optimal/suboptimal call, and its standardized accuracy.
struct RefitRecord {
    GeometryProfile profile;
    bool optimal = false;
    double z_accuracy = 0.0;
};

struct RefitResult {
    ModelCoefficients coefficients;
    std::size_t logistic_iterations = 0;
    bool design_rank_deficient = false;
};

// Full six-predictor refit: logistic part by iteratively reweighted least
// squares on the optimal labels, linear part by ordinary least squares on
// the standardized accuracies. Rank-deficient designs are solved minimum-norm
// and flagged. No subset-of-predictors search happens here; zero out
// coefficients manually if sparsity is wanted.
inline RefitResult refit(const std::vector<RefitRecord>& training) {
    if (training.size() < 10)
        throw validation_error("refit: need at least 10 training records");
    bool any_pos = false, any_neg = false;
    for (const auto& r : training) {
        if (!r.profile.standardized)
            throw validation_error("refit: profiles must carry z-scores");
        (r.optimal ? any_pos : any_neg) = true;
    }
    if (!any_pos || !any_neg)
        throw validation_error("refit: both labels must be present");

    const Eigen::Index m = static_cast<Eigen::Index>(training.size());
    Eigen::MatrixXd X(m, 7);
    Eigen::VectorXd y(m), acc(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < 6; ++j) X(i, static_cast<Eigen::Index>(j + 1)) = training[static_cast<std::size_t>(i)].profile.z[j];
        y(i) = training[static_cast<std::size_t>(i)].optimal ? 1.0 : 0.0;
        acc(i) = training[static_cast<std::size_t>(i)].z_accuracy;
    }

    RefitResult out;
    {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
        out.design_rank_deficient = cod.rank() < 7;
        Eigen::VectorXd lin = cod.solve(acc);
        for (std::size_t j = 0; j < 7; ++j) out.coefficients.linear[j] = lin(static_cast<Eigen::Index>(j));
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(7);
    constexpr std::size_t max_iter = 100;
    bool converged = false;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd p(m), w(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            p(i) = 1.0 / (1.0 + std::exp(-eta(i)));
            w(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
        }
        const Eigen::VectorXd sw = w.array().sqrt();
        const Eigen::MatrixXd A = sw.asDiagonal() * X;
        const Eigen::VectorXd b = (y - p).array() / sw.array();
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
        const Eigen::VectorXd step = cod.solve(b);
        beta += step;
        out.logistic_iterations = it;
        if (step.lpNorm<Eigen::Infinity>() < 1e-10) {
            converged = true;
            break;
        }
    }
    if (!converged)
        throw validation_error("refit: logistic fit did not converge within 100 iterations");
    if (!beta.allFinite())
        throw validation_error("refit: logistic fit diverged");
    for (std::size_t j = 0; j < 7; ++j) out.coefficients.logistic[j] = beta(static_cast<Eigen::Index>(j));
    return out;
}

// Coefficients file: one `logistic` line and one `linear` line, each with
// seven tab-separated decimals after the name.
inline ModelCoefficients parse_coefficients(std::istream& in, const std::string& origin = "coefficients") {
    ModelCoefficients c;
    bool seen_logistic = false, seen_linear = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank_or_comment(line)) continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 8)
            throw validation_error(detail::loc(origin, lineno) + "expected a model name and 7 values");
        std::array<double, 7>* dest = nullptr;
        if (fields[0] == "logistic") {
            if (seen_logistic) throw validation_error(detail::loc(origin, lineno) + "duplicate logistic line");
            seen_logistic = true;
            dest = &c.logistic;
        } else if (fields[0] == "linear") {
            if (seen_linear) throw validation_error(detail::loc(origin, lineno) + "duplicate linear line");
            seen_linear = true;
            dest = &c.linear;
        } else {
            throw validation_error(detail::loc(origin, lineno) + "unknown model name '" + fields[0] + "'");
        }
        for (std::size_t i = 0; i < 7; ++i)
            (*dest)[i] = detail::parse_signed(fields[i + 1], origin, lineno);
    }
    if (!seen_logistic || !seen_linear)
        throw validation_error(origin + ": both a logistic and a linear line are required");
    return c;
}

inline ModelCoefficients parse_coefficients_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open coefficients file: " + path);
    return parse_coefficients(in, path);
}

} // namespace affsel

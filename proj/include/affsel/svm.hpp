#pragma once

#include <cstdint>
#include <cstddef>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rng.hpp"

namespace affsel {

struct SvmHyperparams {
    double C = 1.0;
    double tolerance = 1e-4;
    std::size_t max_epochs = 1000;
    std::uint64_t seed = 0;
};

struct LinearModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    SvmHyperparams hyper;
    bool trained = false;

    double decision(const Eigen::RowVectorXd& x) const { return x.dot(weights) + bias; }
    int predict(const Eigen::RowVectorXd& x) const { return decision(x) >= 0.0 ? +1 : -1; }
};

struct SvmTrainResult {
    LinearModel model;
    double dual_objective = 0.0;
    std::size_t epochs = 0;
    bool converged = false;
    std::vector<double> dual_history;  // objective after each epoch
};

// Soft-margin linear SVM, L1 hinge loss, fit in the dual by coordinate
// descent. The bias is handled as an extra always-1 feature folded into the
// weight vector, so the dual has simple box constraints only. Deterministic
// for a fixed seed; one epoch sweeps all samples in a freshly shuffled order.
inline SvmTrainResult train_svm(const Eigen::MatrixXd& rows, const std::vector<int>& targets,
                                const SvmHyperparams& hyper = {}) {
    const std::size_t n = static_cast<std::size_t>(rows.rows());
    if (targets.size() != n)
        throw validation_error("train_svm: target count does not match row count");
    if (n < 2)
        throw validation_error("train_svm: need at least 2 samples");
    if (!(hyper.C > 0.0))
        throw validation_error("train_svm: C must be positive");
    if (!rows.allFinite())
        throw validation_error("train_svm: non-finite features");
    bool has_pos = false, has_neg = false;
    for (int t : targets) {
        if (t == +1) has_pos = true;
        else if (t == -1) has_neg = true;
        else throw validation_error("train_svm: targets must be +1 or -1");
    }
    if (!has_pos || !has_neg)
        throw validation_error("train_svm: both classes must be present");

    const Eigen::Index d = rows.cols();
    // augmented weight vector: [w ; b]
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qd(n);  // squared norm of each augmented sample
    for (std::size_t i = 0; i < n; ++i)
        qd[i] = rows.row(static_cast<Eigen::Index>(i)).squaredNorm() + 1.0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(hyper.seed);

    SvmTrainResult res;
    res.dual_history.reserve(hyper.max_epochs);

    const auto dual_objective = [&] {
        double sum_alpha = 0.0;
        for (double a : alpha) sum_alpha += a;
        return sum_alpha - 0.5 * w.squaredNorm();
    };

    for (std::size_t epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
        detail::fisher_yates(order, rng);
        double pg_max = -std::numeric_limits<double>::infinity();
        double pg_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = order[k];
            const double y = static_cast<double>(targets[i]);
            const auto xi = rows.row(static_cast<Eigen::Index>(i));
            const double margin = xi.dot(w.head(d)) + w(d);
            const double g = y * margin - 1.0;

            double pg;  // projected gradient
            if (alpha[i] == 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] == hyper.C)
                pg = std::max(g, 0.0);
            else
                pg = g;
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);

            if (pg != 0.0) {
                const double old = alpha[i];
                alpha[i] = std::min(std::max(old - g / qd[i], 0.0), hyper.C);
                const double delta = (alpha[i] - old) * y;
                if (delta != 0.0) {
                    w.head(d) += delta * xi.transpose();
                    w(d) += delta;
                }
            }
        }
        res.epochs = epoch;
        res.dual_history.push_back(dual_objective());
        if (pg_max - pg_min <= hyper.tolerance) {
            res.converged = true;
            break;
        }
    }

    res.dual_objective = res.dual_history.empty() ? 0.0 : res.dual_history.back();
    res.model.weights = w.head(d);
    res.model.bias = w(d);
    res.model.hyper = hyper;
    res.model.trained = true;
    return res;
}

inline double training_accuracy(const LinearModel& model, const Eigen::MatrixXd& rows,
                                const std::vector<int>& targets) {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < targets.size(); ++i)
        if (model.predict(rows.row(static_cast<Eigen::Index>(i))) == targets[i]) ++hit;
    return targets.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(targets.size());
}

} // namespace affsel

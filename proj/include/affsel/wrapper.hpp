#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "enumerate.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "selector.hpp"
#include "svm.hpp"

namespace affsel {

// Wrapper verdict for one feature subset: its held-out accuracy, the z-score
// of that accuracy across the partition's subsets, and the optimal call
// (z strictly above 0, i.e. above the subset mean).
struct SubsetLabel {
    FeatureSubset subset;
    double test_accuracy = 0.0;
    double z_accuracy = 0.0;
    bool optimal = false;
};

struct LabeledPartition {
    std::string partition_name;  // canonical partition name
    std::vector<SubsetLabel> labels;
};

struct WrapperOptions {
    SvmHyperparams svm;
    std::uint64_t split_seed = 0;
};

// Ground-truth oracle: train one SVM per subset on a stratified 70/30 split
// and standardize the held-out accuracies. The split permutes the negative
// side first, then the positive side, with a single engine seeded by
// split_seed; per side the train count is round(0.7*n) clamped to [1, n-1].
inline std::vector<SubsetLabel> wrapper_label(const SparseDataset& ds, const ClassPartition& part,
                                              const WrapperOptions& options = {}) {
    validate(ds);
    validate_partition(part);
    auto [pos_idx, neg_idx] = split_by_partition(ds, part);
    if (pos_idx.size() < 4 || neg_idx.size() < 4)
        throw validation_error("wrapper_label: each class needs at least 4 rows to split");

    std::mt19937_64 rng(options.split_seed);
    detail::fisher_yates(neg_idx, rng);
    detail::fisher_yates(pos_idx, rng);

    const auto train_count = [](std::size_t n) {
        const auto r = static_cast<std::size_t>(std::lround(0.7 * static_cast<double>(n)));
        return std::clamp<std::size_t>(r, 1, n - 1);
    };
    const std::size_t n_train_neg = train_count(neg_idx.size());
    const std::size_t n_train_pos = train_count(pos_idx.size());

    std::vector<std::size_t> train_rows, test_rows;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < neg_idx.size(); ++i) {
        (i < n_train_neg ? train_rows : test_rows).push_back(neg_idx[i]);
        (i < n_train_neg ? train_y : test_y).push_back(-1);
    }
    for (std::size_t i = 0; i < pos_idx.size(); ++i) {
        (i < n_train_pos ? train_rows : test_rows).push_back(pos_idx[i]);
        (i < n_train_pos ? train_y : test_y).push_back(+1);
    }

    const Eigen::MatrixXd dense = to_dense(ds);
    const auto subsets = enumerate_subsets(ds.layout);

    std::vector<SubsetLabel> out(subsets.size());
    for (std::size_t si = 0; si < subsets.size(); ++si) {
        const auto cols = detail::subset_columns(ds.layout, subsets[si]);
        const Eigen::MatrixXd train_m = detail::pick(dense, train_rows, cols);
        const Eigen::MatrixXd test_m = detail::pick(dense, test_rows, cols);
        const auto trained = train_svm(train_m, train_y, options.svm);
        std::size_t hit = 0;
        for (std::size_t i = 0; i < test_y.size(); ++i)
            if (trained.model.predict(test_m.row(static_cast<Eigen::Index>(i))) == test_y[i]) ++hit;
        out[si].subset = subsets[si];
        out[si].test_accuracy = static_cast<double>(hit) / static_cast<double>(test_y.size());
    }

    double mean = 0.0;
    for (const auto& l : out) mean += l.test_accuracy;
    mean /= static_cast<double>(out.size());
    double var = 0.0;
    for (const auto& l : out) {
        const double d = l.test_accuracy - mean;
        var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(out.size()));
    for (auto& l : out) {
        l.z_accuracy = sd > 0.0 ? (l.test_accuracy - mean) / sd : 0.0;
        l.optimal = l.z_accuracy > 0.0;
    }
    return out;
}

// Labels file: one line per (partition, subset),
// `<partition>\t<subset>\t<test_accuracy>\t<z>\t<optimal|suboptimal>`.
inline void serialize_labels(const std::vector<LabeledPartition>& groups, std::ostream& out) {
    for (const auto& g : groups)
        for (const auto& l : g.labels)
            out << g.partition_name << '\t' << l.subset.display() << '\t'
                << detail::format_g10(l.test_accuracy) << '\t' << detail::format_g10(l.z_accuracy)
                << '\t' << (l.optimal ? "optimal" : "suboptimal") << '\n';
}

inline std::vector<LabeledPartition> parse_labels(std::istream& in, const std::string& origin = "labels") {
    std::vector<LabeledPartition> groups;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank_or_comment(line)) continue;
        const auto fields = detail::split_tabs(line);
        if (fields.size() != 5)
            throw validation_error(detail::loc(origin, lineno) + "expected 5 tab-separated fields");
        SubsetLabel l;
        l.subset = FeatureSubset::from_display(fields[1], origin, lineno);
        l.test_accuracy = detail::parse_signed(fields[2], origin, lineno);
        l.z_accuracy = detail::parse_signed(fields[3], origin, lineno);
        if (fields[4] == "optimal") l.optimal = true;
        else if (fields[4] == "suboptimal") l.optimal = false;
        else throw validation_error(detail::loc(origin, lineno) + "label must be optimal or suboptimal");

        if (groups.empty() || groups.back().partition_name != fields[0]) {
            for (const auto& g : groups)
                if (g.partition_name == fields[0])
                    throw validation_error(detail::loc(origin, lineno) + "partition '" + fields[0] +
                                           "' appears in two separate runs of lines");
            groups.push_back({fields[0], {}});
        }
        groups.back().labels.push_back(std::move(l));
    }
    return groups;
}

struct PartitionQuality {
    std::string partition_name;
    ConfusionCounts counts;
    ClassifierMetrics quality;
};

struct QualityReport {
    std::vector<PartitionQuality> per_partition;
    ConfusionCounts overall_counts;
    ClassifierMetrics overall;
};

// Score the selector's verdicts against wrapper labels, treating the labels
// as ground truth. The two sides must cover exactly the same
// (partition, subset) keys.
inline QualityReport selection_quality(const SelectionReport& predicted,
                                       const std::vector<LabeledPartition>& truth) {
    if (predicted.partitions.size() != truth.size())
        throw validation_error("selection_quality: partition sets differ");
    QualityReport report;
    for (const auto& pr : predicted.partitions) {
        const std::string name = pr.partition.canonical_name();
        const LabeledPartition* group = nullptr;
        for (const auto& g : truth)
            if (g.partition_name == name) { group = &g; break; }
        if (!group)
            throw validation_error("selection_quality: no labels for partition '" + name + "'");
        if (group->labels.size() != pr.subsets.size())
            throw validation_error("selection_quality: subset sets differ for partition '" + name + "'");

        PartitionQuality pq;
        pq.partition_name = name;
        for (const auto& sr : pr.subsets) {
            const SubsetLabel* match = nullptr;
            for (const auto& l : group->labels)
                if (l.subset == sr.subset) { match = &l; break; }
            if (!match)
                throw validation_error("selection_quality: no label for subset '" + sr.subset.display() +
                                       "' in partition '" + name + "'");
            if (sr.verdict.optimal && match->optimal) ++pq.counts.tp;
            else if (sr.verdict.optimal && !match->optimal) ++pq.counts.fp;
            else if (!sr.verdict.optimal && match->optimal) ++pq.counts.fn;
            else ++pq.counts.tn;
        }
        pq.quality = metrics(pq.counts);
        report.overall_counts.tp += pq.counts.tp;
        report.overall_counts.fp += pq.counts.fp;
        report.overall_counts.tn += pq.counts.tn;
        report.overall_counts.fn += pq.counts.fn;
        report.per_partition.push_back(std::move(pq));
    }
    report.overall = metrics(report.overall_counts);
    return report;
}

} // namespace affsel

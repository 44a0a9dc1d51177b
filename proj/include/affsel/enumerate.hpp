#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"

namespace affsel {

// One binary relabeling of the classes. Canonical form: the side holding the
// lexicographically smallest label is the negative side, so each unordered
// split appears exactly once.
struct ClassPartition {
    std::vector<std::string> positive; // sorted
    std::vector<std::string> negative; // sorted

    std::string canonical_name() const {
        std::string out = "pos=";
        for (std::size_t i = 0; i < positive.size(); ++i) {
            if (i) out += ',';
            out += positive[i];
        }
        return out;
    }

    bool is_positive(const std::string& label) const {
        return std::binary_search(positive.begin(), positive.end(), label);
    }
    bool is_negative(const std::string& label) const {
        return std::binary_search(negative.begin(), negative.end(), label);
    }
};

inline void validate_partition(const ClassPartition& p) {
    if (p.positive.empty() || p.negative.empty())
        throw validation_error("partition: both sides must be nonempty");
    if (!std::is_sorted(p.positive.begin(), p.positive.end()) ||
        !std::is_sorted(p.negative.begin(), p.negative.end()))
        throw validation_error("partition: sides must be sorted");
    std::vector<std::string> all;
    std::merge(p.positive.begin(), p.positive.end(), p.negative.begin(), p.negative.end(),
               std::back_inserter(all));
    for (std::size_t i = 1; i < all.size(); ++i)
        if (all[i - 1] == all[i])
            throw validation_error("partition: label '" + all[i] + "' on both sides");
    if (!p.negative.empty() && !p.positive.empty() && p.positive.front() < p.negative.front())
        throw validation_error("partition: smallest label must be on the negative side");
}

// All 2^(l-1)-1 canonical binary partitions, sorted by canonical_name.
inline std::vector<ClassPartition> enumerate_partitions(std::vector<std::string> labels) {
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    const std::size_t l = labels.size();
    if (l < 2)
        throw validation_error("enumerate_partitions: need at least 2 distinct labels");
    if (l > 24)
        throw validation_error("enumerate_partitions: refusing to enumerate 2^" +
                               std::to_string(l - 1) + " partitions");

    std::vector<ClassPartition> out;
    const std::size_t free = l - 1; // labels[0] is pinned to the negative side
    for (std::size_t mask = 1; mask < (std::size_t{1} << free); ++mask) {
        ClassPartition p;
        p.negative.push_back(labels[0]);
        for (std::size_t i = 0; i < free; ++i)
            ((mask >> i) & 1 ? p.positive : p.negative).push_back(labels[i + 1]);
        out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end(), [](const ClassPartition& a, const ClassPartition& b) {
        return a.canonical_name() < b.canonical_name();
    });
    return out;
}

// All 2^k-1 nonempty feature-type subsets in ascending bitmask order over the
// layout's block order (bit i = block i).
inline std::vector<FeatureSubset> enumerate_subsets(const FeatureTypeLayout& layout) {
    validate_layout(layout);
    const std::size_t k = layout.blocks.size();
    if (k > 24)
        throw validation_error("enumerate_subsets: refusing to enumerate 2^" +
                               std::to_string(k) + " subsets");
    std::vector<FeatureSubset> out;
    out.reserve((std::size_t{1} << k) - 1);
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
        FeatureSubset s;
        for (std::size_t i = 0; i < k; ++i)
            if ((mask >> i) & 1) s.types.push_back(layout.blocks[i].name);
        out.push_back(std::move(s));
    }
    return out;
}

// Row indices of each side, preserving the dataset's row order.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_by_partition(const SparseDataset& ds, const ClassPartition& part) {
    validate_partition(part);
    std::vector<std::size_t> pos, neg;
    for (std::size_t r = 0; r < ds.labels.size(); ++r) {
        if (part.is_positive(ds.labels[r])) pos.push_back(r);
        else if (part.is_negative(ds.labels[r])) neg.push_back(r);
        else
            throw validation_error("split_by_partition: label '" + ds.labels[r] +
                                   "' not covered by partition");
    }
    if (pos.empty() || neg.empty())
        throw validation_error("split_by_partition: a partition side matches no rows");
    return {std::move(pos), std::move(neg)};
}

} // namespace affsel

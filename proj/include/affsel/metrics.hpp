#pragma once

#include <cstdint>

#include "errors.hpp"

namespace affsel {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

struct ClassifierMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// accuracy = (tp+tn)/total; precision = tp/(tp+fp); recall = tp/(tp+fn);
// f1 = harmonic mean of precision and recall. Empty denominators follow the
// usual conventions: precision/recall are 0 when undefined, f1 is 0 when both
// are 0; an entirely empty count set is an error.
inline ClassifierMetrics metrics(const ConfusionCounts& c) {
    const std::uint64_t total = c.total();
    if (total == 0)
        throw validation_error("metrics: no evaluated examples");
    ClassifierMetrics m;
    m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
    m.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    m.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

} // namespace affsel

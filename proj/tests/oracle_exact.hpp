// Exact integer-arithmetic oracle used to cross-check the floating-point
// geometry. Works on small integer matrices; rank comes from fraction-free
// (Bareiss) elimination over arbitrary-precision integers, so there is no
// rounding anywhere.
#pragma once

#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Int = boost::multiprecision::cpp_int;
using Matrix = std::vector<std::vector<long long>>;

// Bareiss elimination with row pivoting and column skipping; every division
// is exact by construction.
inline std::size_t exact_rank(const Matrix& m) {
    if (m.empty() || m[0].empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::vector<std::vector<Int>> a(rows, std::vector<Int>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) a[i][j] = m[i][j];

    Int prev = 1;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t pivot = rank;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[rank], a[pivot]);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            for (std::size_t j = col + 1; j < cols; ++j) {
                Int num = a[i][j] * a[rank][col] - a[i][col] * a[rank][j];
                assert(num % prev == 0);
                a[i][j] = num / prev;
            }
            a[i][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

// Columns are differences against the last point, matching the library's
// affine-dimension construction.
inline std::size_t exact_affine_dimension(const Matrix& points) {
    const std::size_t d = points.size();
    if (d <= 1) return 0;
    const std::size_t n = points[0].size();
    Matrix diff(n, std::vector<long long>(d - 1));
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = 0; j < n; ++j) diff[j][i] = points[i][j] - points[d - 1][j];
    return exact_rank(diff);
}

inline std::size_t exact_ambient_dimension(const Matrix& points) {
    if (points.empty()) return 0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < points[0].size(); ++c)
        for (const auto& row : points)
            if (row[c] != 0) { ++n; break; }
    return n;
}

inline bool exact_in_affine_hull(const std::vector<long long>& x, const Matrix& points) {
    for (const auto& row : points)
        if (row == x) return true;
    const std::size_t n = x.size();
    Matrix diff(n, std::vector<long long>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) diff[j][i] = points[i][j] - x[j];
    return exact_rank(diff) == exact_affine_dimension(points);
}

// The six ratios as exact (numerator, denominator) pairs; denominator 0
// encodes the ratio-is-zero convention.
struct ExactProfile {
    std::pair<std::size_t, std::size_t> f[6];
};

inline ExactProfile exact_profile(const Matrix& pos, const Matrix& neg, bool class_vs_class) {
    Matrix full = pos;
    full.insert(full.end(), neg.begin(), neg.end());

    const std::size_t ap = exact_affine_dimension(pos);
    const std::size_t an = exact_affine_dimension(neg);
    const std::size_t af = exact_affine_dimension(full);
    const std::size_t bp = exact_ambient_dimension(pos);
    const std::size_t bn = exact_ambient_dimension(neg);
    const std::size_t bf = exact_ambient_dimension(full);

    ExactProfile p;
    p.f[0] = {ap, bp};
    p.f[1] = {an, bn};
    p.f[2] = {ap, bf};
    p.f[3] = {an, bf};
    p.f[4] = {af, bf};
    std::size_t joint = 0;
    for (const auto& x : full) {
        const bool first = exact_in_affine_hull(x, pos);
        const bool second = class_vs_class ? exact_in_affine_hull(x, neg) : exact_in_affine_hull(x, full);
        joint += first && second;
    }
    p.f[5] = {joint, full.size()};
    return p;
}

} // namespace oracle

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace affsel {

// One sparse sample: (column, value) pairs sorted by column index.
// Values are nonnegative reals; explicit zeros may be stored but do not
// count as nonzero for the per-block invariant.
using SparseRow = std::vector<std::pair<std::size_t, double>>;

struct FeatureTypeBlock {
    std::string name;
    std::size_t start = 0;
    std::size_t end = 0; // exclusive
    std::size_t width() const { return end - start; }
};

// Contiguous, non-overlapping, ordered blocks jointly covering [0, n_columns).
struct FeatureTypeLayout {
    std::vector<FeatureTypeBlock> blocks;

    std::size_t n_columns() const { return blocks.empty() ? 0 : blocks.back().end; }

    const FeatureTypeBlock* find(std::string_view name) const {
        for (const auto& b : blocks)
            if (b.name == name) return &b;
        return nullptr;
    }
    bool has(std::string_view name) const { return find(name) != nullptr; }
};

inline void validate_layout(const FeatureTypeLayout& layout) {
    if (layout.blocks.empty())
        throw validation_error("layout: no feature-type blocks");
    std::set<std::string> names;
    std::size_t expect = 0;
    for (const auto& b : layout.blocks) {
        if (b.name.empty())
            throw validation_error("layout: empty block name");
        if (!names.insert(b.name).second)
            throw validation_error("layout: duplicate block name '" + b.name + "'");
        if (b.end <= b.start)
            throw validation_error("layout: block '" + b.name + "' has non-positive width");
        if (b.start != expect)
            throw validation_error("layout: block '" + b.name + "' does not start at column " +
                                   std::to_string(expect) + " (gap or overlap)");
        expect = b.end;
    }
}

struct SparseDataset {
    std::vector<SparseRow> rows;
    std::vector<std::string> labels; // one per row, opaque byte strings
    FeatureTypeLayout layout;
    std::size_t n_columns = 0;

    std::size_t n_rows() const { return rows.size(); }

    std::vector<std::string> label_set() const {
        std::vector<std::string> out(labels);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// Full consistency check; parsers and generators run this before returning.
inline void validate(const SparseDataset& ds) {
    validate_layout(ds.layout);
    if (ds.layout.n_columns() != ds.n_columns)
        throw validation_error("dataset: layout covers " + std::to_string(ds.layout.n_columns()) +
                               " columns but dataset declares " + std::to_string(ds.n_columns));
    if (ds.rows.size() < 2)
        throw validation_error("dataset: needs at least 2 rows, got " + std::to_string(ds.rows.size()));
    if (ds.labels.size() != ds.rows.size())
        throw validation_error("dataset: row/label count mismatch");
    if (ds.label_set().size() < 2)
        throw validation_error("dataset: needs at least 2 distinct labels");

    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        const auto& row = ds.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i].first >= ds.n_columns)
                throw validation_error("dataset row " + std::to_string(r + 1) + ": column " +
                                       std::to_string(row[i].first) + " out of range");
            if (i > 0 && row[i - 1].first >= row[i].first)
                throw validation_error("dataset row " + std::to_string(r + 1) +
                                       ": entries not strictly sorted by column");
            if (!std::isfinite(row[i].second) || row[i].second < 0.0)
                throw validation_error("dataset row " + std::to_string(r + 1) +
                                       ": value must be a finite nonnegative real");
        }
        for (const auto& b : ds.layout.blocks) {
            bool nonzero = false;
            for (const auto& [c, v] : row)
                if (c >= b.start && c < b.end && v != 0.0) { nonzero = true; break; }
            if (!nonzero)
                throw validation_error("dataset row " + std::to_string(r + 1) +
                                       ": no nonzero entry in feature-type block '" + b.name + "'");
        }
    }
}

// Nonempty set of feature-type names, kept in layout order.
struct FeatureSubset {
    std::vector<std::string> types;

    std::string display() const {
        std::string out;
        for (std::size_t i = 0; i < types.size(); ++i) {
            if (i) out += ',';
            out += types[i];
        }
        return out;
    }
    bool contains(std::string_view name) const {
        return std::find(types.begin(), types.end(), name) != types.end();
    }
    bool operator==(const FeatureSubset&) const = default;

    // Inverse of display(); used when reading subsets back from report files.
    static FeatureSubset from_display(std::string_view s, std::string_view file, std::size_t line) {
        FeatureSubset sub;
        std::size_t pos = 0;
        for (;;) {
            auto comma = s.find(',', pos);
            auto piece = comma == std::string_view::npos ? s.substr(pos) : s.substr(pos, comma - pos);
            if (piece.empty())
                throw validation_error(std::string(file) + ":" + std::to_string(line) +
                                       ": empty feature-type name in subset '" + std::string(s) + "'");
            sub.types.emplace_back(piece);
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        return sub;
    }
};

namespace detail {

inline std::string loc(std::string_view file, std::size_t line) {
    return std::string(file) + ":" + std::to_string(line) + ": ";
}

inline bool blank_or_comment(std::string_view s) {
    if (!s.empty() && s[0] == '#') return true;
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

inline std::size_t parse_size(std::string_view tok, std::string_view file, std::size_t line,
                              std::string_view what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
        throw validation_error(loc(file, line) + "bad " + std::string(what) + " '" + std::string(tok) + "'");
    return v;
}

inline double parse_value(std::string_view tok, std::string_view file, std::size_t line) {
    // strtod needs a terminated buffer
    std::string s(tok);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw validation_error(loc(file, line) + "bad value '" + s + "'");
    if (!std::isfinite(v))
        throw validation_error(loc(file, line) + "value must be finite");
    if (v < 0.0)
        throw validation_error(loc(file, line) + "value must be nonnegative");
    return v;
}

// Any-sign variant used where negatives are legal (z-scores, coefficients).
inline double parse_signed(std::string_view tok, std::string_view file, std::size_t line) {
    std::string s(tok);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty())
        throw validation_error(loc(file, line) + "bad value '" + s + "'");
    if (!std::isfinite(v))
        throw validation_error(loc(file, line) + "value must be finite");
    return v;
}

inline std::vector<std::string> split_tabs(std::string_view s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        auto tab = s.find('\t', pos);
        if (tab == std::string_view::npos) {
            out.emplace_back(s.substr(pos));
            return out;
        }
        out.emplace_back(s.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v); // shortest round-trip form
    return std::string(buf, res.ptr);
}

// Report formatting: 10 significant digits, locale-independent.
inline std::string format_g10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

// Boundaries file: one block per line, "<type_name>\t<start>\t<end_exclusive>",
// sorted by start column; '#' comments and blank lines ignored.
inline FeatureTypeLayout parse_boundaries(std::istream& in, std::string_view filename = "boundaries") {
    FeatureTypeLayout layout;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank_or_comment(line)) continue;
        std::string_view sv(line);
        auto t1 = sv.find('\t');
        auto t2 = t1 == std::string_view::npos ? t1 : sv.find('\t', t1 + 1);
        if (t1 == std::string_view::npos || t2 == std::string_view::npos)
            throw validation_error(detail::loc(filename, lineno) +
                                   "expected <name>\\t<start>\\t<end>");
        FeatureTypeBlock b;
        b.name = std::string(sv.substr(0, t1));
        b.start = detail::parse_size(sv.substr(t1 + 1, t2 - t1 - 1), filename, lineno, "start column");
        b.end = detail::parse_size(sv.substr(t2 + 1), filename, lineno, "end column");
        if (!layout.blocks.empty() && b.start < layout.blocks.back().start)
            throw validation_error(detail::loc(filename, lineno) + "blocks not sorted by start column");
        layout.blocks.push_back(std::move(b));
    }
    try {
        validate_layout(layout);
    } catch (const validation_error& e) {
        throw validation_error(std::string(filename) + ": " + e.what());
    }
    return layout;
}

// Vectors file: "<label>\t<col>:<value>[ <col>:<value>]*" per sample, 0-based
// columns; '#' comments and blank lines ignored. A duplicate column index
// within one row is an error.
inline SparseDataset parse_vectors(std::istream& in, const FeatureTypeLayout& layout,
                                   std::string_view filename = "vectors") {
    validate_layout(layout);
    SparseDataset ds;
    ds.layout = layout;
    ds.n_columns = layout.n_columns();

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::blank_or_comment(line)) continue;
        std::string_view sv(line);
        auto tab = sv.find('\t');
        if (tab == std::string_view::npos)
            throw validation_error(detail::loc(filename, lineno) + "expected <label>\\t<entries>");
        std::string label(sv.substr(0, tab));
        if (label.empty())
            throw validation_error(detail::loc(filename, lineno) + "empty label");

        SparseRow row;
        std::string_view rest = sv.substr(tab + 1);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            auto sp = rest.find(' ', pos);
            std::string_view tok = rest.substr(pos, sp == std::string_view::npos ? sp : sp - pos);
            pos = sp == std::string_view::npos ? rest.size() : sp + 1;
            if (tok.empty()) continue;
            auto colon = tok.find(':');
            if (colon == std::string_view::npos)
                throw validation_error(detail::loc(filename, lineno) + "entry '" + std::string(tok) +
                                       "' is not <col>:<value>");
            std::size_t col = detail::parse_size(tok.substr(0, colon), filename, lineno, "column index");
            double val = detail::parse_value(tok.substr(colon + 1), filename, lineno);
            if (col >= ds.n_columns)
                throw validation_error(detail::loc(filename, lineno) + "column " + std::to_string(col) +
                                       " out of range (layout has " + std::to_string(ds.n_columns) + ")");
            row.emplace_back(col, val);
        }
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < row.size(); ++i)
            if (row[i - 1].first == row[i].first)
                throw validation_error(detail::loc(filename, lineno) + "duplicate column index " +
                                       std::to_string(row[i].first));
        ds.rows.push_back(std::move(row));
        ds.labels.push_back(std::move(label));
    }
    try {
        validate(ds);
    } catch (const validation_error& e) {
        throw validation_error(std::string(filename) + ": " + e.what());
    }
    return ds;
}

inline SparseDataset parse_dataset(const std::string& vectors_path, const std::string& boundaries_path) {
    std::ifstream bf(boundaries_path);
    if (!bf) throw validation_error("cannot open boundaries file '" + boundaries_path + "'");
    FeatureTypeLayout layout = parse_boundaries(bf, boundaries_path);
    std::ifstream vf(vectors_path);
    if (!vf) throw validation_error("cannot open vectors file '" + vectors_path + "'");
    return parse_vectors(vf, layout, vectors_path);
}

inline void serialize_boundaries(const FeatureTypeLayout& layout, std::ostream& out) {
    for (const auto& b : layout.blocks)
        out << b.name << '\t' << b.start << '\t' << b.end << '\n';
}

inline void serialize_vectors(const SparseDataset& ds, std::ostream& out) {
    for (std::size_t r = 0; r < ds.rows.size(); ++r) {
        out << ds.labels[r] << '\t';
        const auto& row = ds.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ' ';
            out << row[i].first << ':' << detail::format_double(row[i].second);
        }
        out << '\n';
    }
}

// Keeps the columns of the selected blocks (in layout order), re-indexed
// densely. Row order and labels are unchanged.
inline SparseDataset project(const SparseDataset& ds, const FeatureSubset& subset) {
    if (subset.types.empty())
        throw validation_error("project: empty feature subset");
    std::set<std::string> wanted;
    for (const auto& t : subset.types) {
        if (!ds.layout.has(t))
            throw validation_error("project: unknown feature type '" + t + "'");
        if (!wanted.insert(t).second)
            throw validation_error("project: duplicate feature type '" + t + "'");
    }

    SparseDataset out;
    out.labels = ds.labels;
    std::vector<std::ptrdiff_t> shift(ds.n_columns, -1); // old col -> new col
    std::size_t next = 0;
    for (const auto& b : ds.layout.blocks) {
        if (!wanted.count(b.name)) continue;
        FeatureTypeBlock nb{b.name, next, next + b.width()};
        for (std::size_t c = b.start; c < b.end; ++c)
            shift[c] = static_cast<std::ptrdiff_t>(next + (c - b.start));
        next = nb.end;
        out.layout.blocks.push_back(std::move(nb));
    }
    out.n_columns = next;
    out.rows.reserve(ds.rows.size());
    for (const auto& row : ds.rows) {
        SparseRow nr;
        for (const auto& [c, v] : row)
            if (shift[c] >= 0) nr.emplace_back(static_cast<std::size_t>(shift[c]), v);
        out.rows.push_back(std::move(nr));
    }
    return out;
}

} // namespace affsel

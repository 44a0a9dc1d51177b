#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "rng.hpp"

namespace affsel {

// How one block's bits are produced, per class:
//   lattice        r disjoint flip supports over a random base point; affine
//                  dimension of the class cloud is exactly r (first r+1 rows
//                  realize the base and each single flip). Column 0 of the
//                  block is a constant guard 1 so every row stays valid.
//   shared_lattice one lattice template reused by all classes (overlapping
//                  class hulls by construction).
//   dense          iid bits at `density`; when the block is tall enough an
//                  affinely spanning prefix is forced so the cloud saturates
//                  the block (affine dimension = width). Prefixes of multiple
//                  dense blocks are staggered onto different rows.
//   fixed_sum      every row of class c is a random s_c-subset of the block's
//                  columns; class clouds live on parallel sum slices.
//   class_split    leading class-indicator columns plus a shared lattice on
//                  the rest; hulls are disjoint but share flip structure.
enum class BlockStructure { lattice, shared_lattice, dense, fixed_sum, class_split };

struct SynthBlock {
    std::string name;
    std::size_t width = 0;
    BlockStructure structure = BlockStructure::dense;
    std::vector<std::size_t> rank;         // lattice-family target; size 1 broadcasts to all classes
    std::vector<std::size_t> sum_targets;  // fixed_sum; size 1 broadcasts
};

struct SynthSpec {
    std::vector<std::string> class_labels;
    std::vector<std::size_t> rows_per_class;  // size 1 broadcasts
    std::vector<SynthBlock> blocks;
    double noise_rate = 0.0;  // per-bit flip probability after structure
    double density = 0.5;     // fill probability for dense blocks
    std::uint64_t seed = 0;
};

namespace detail {

using BitRow = std::vector<std::uint8_t>;

inline std::size_t broadcast_param(const std::vector<std::size_t>& v, std::size_t c,
                                   std::size_t n_classes, const std::string& what,
                                   const std::string& block) {
    if (v.size() == 1) return v[0];
    if (v.size() == n_classes) return v[c];
    throw validation_error("block '" + block + "': " + what + " needs 1 or one-per-class values");
}

// Disjoint flip supports over the given columns: the first r shuffled columns
// seed one support each, every further column joins one of them or stays out.
inline std::vector<std::vector<std::size_t>> draw_supports(std::vector<std::size_t> cols,
                                                           std::size_t r, std::mt19937_64& rng) {
    fisher_yates(cols, rng);
    std::vector<std::vector<std::size_t>> supports(r);
    for (std::size_t i = 0; i < r; ++i) supports[i].push_back(cols[i]);
    for (std::size_t i = r; i < cols.size(); ++i) {
        const std::size_t s = static_cast<std::size_t>(bounded(rng, r + 1));
        if (s < r) supports[s].push_back(cols[i]);
    }
    return supports;
}

struct LatticeTemplate {
    BitRow base;  // width of the block
    std::vector<std::vector<std::size_t>> supports;
};

inline LatticeTemplate draw_lattice(std::size_t width, std::size_t guard_cols, std::size_t r,
                                    std::mt19937_64& rng) {
    LatticeTemplate t;
    t.base.assign(width, 0);
    std::vector<std::size_t> free_cols;
    for (std::size_t c = guard_cols; c < width; ++c) {
        free_cols.push_back(c);
        t.base[c] = canonical(rng) < 0.5 ? 1 : 0;
    }
    t.supports = draw_supports(std::move(free_cols), r, rng);
    return t;
}

// Rows for one class from one template: base, each single flip, then random
// flip combinations. Guard columns are left to the caller.
inline void fill_lattice_rows(std::vector<BitRow>& rows, const LatticeTemplate& t,
                              std::mt19937_64& rng) {
    const std::size_t r = t.supports.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i] = t.base;
        if (i == 0) continue;
        if (i <= r) {
            for (std::size_t c : t.supports[i - 1]) rows[i][c] ^= 1;
        } else {
            for (const auto& sup : t.supports)
                if (canonical(rng) < 0.5)
                    for (std::size_t c : sup) rows[i][c] ^= 1;
        }
    }
}

} // namespace detail

// Seeded binary dataset with one row block per class (class-major order) and
// the per-block structures described above, then optional bit-flip noise and
// a repair pass that keeps every (row, block) pair nonzero.
inline SparseDataset generate_synthetic(const SynthSpec& spec) {
    const std::size_t l = spec.class_labels.size();
    if (l < 2) throw validation_error("generator: need at least 2 classes");
    {
        std::set<std::string> seen;
        for (const auto& lab : spec.class_labels)
            if (lab.empty() || !seen.insert(lab).second)
                throw validation_error("generator: class labels must be unique and nonempty");
    }
    if (spec.rows_per_class.empty())
        throw validation_error("generator: rows per class missing");
    std::vector<std::size_t> rows_c(l);
    for (std::size_t c = 0; c < l; ++c) {
        rows_c[c] = detail::broadcast_param(spec.rows_per_class, c, l, "rows", "<spec>");
        if (rows_c[c] == 0) throw validation_error("generator: every class needs at least 1 row");
    }
    if (spec.blocks.empty()) throw validation_error("generator: no blocks");
    if (!(spec.noise_rate >= 0.0 && spec.noise_rate < 1.0))
        throw validation_error("generator: noise rate must be in [0, 1)");
    if (!(spec.density > 0.0 && spec.density < 1.0))
        throw validation_error("generator: density must be in (0, 1)");

    FeatureTypeLayout layout;
    std::size_t col = 0;
    for (const auto& b : spec.blocks) {
        if (b.width == 0) throw validation_error("block '" + b.name + "': zero width");
        layout.blocks.push_back({b.name, col, col + b.width});
        col += b.width;
    }
    validate_layout(layout);

    // Feasibility of explicit rank targets before any drawing.
    for (const auto& b : spec.blocks) {
        const bool lattice_family = b.structure == BlockStructure::lattice ||
                                    b.structure == BlockStructure::shared_lattice ||
                                    b.structure == BlockStructure::class_split;
        if (lattice_family && b.rank.empty())
            throw validation_error("block '" + b.name + "': rank target required");
        const std::size_t guard = b.structure == BlockStructure::class_split ? l : 1;
        if (b.structure == BlockStructure::class_split && b.width < l + 1)
            throw validation_error("block '" + b.name + "': width must exceed the class count");
        if (lattice_family) {
            std::size_t shared_rank = detail::broadcast_param(b.rank, 0, l, "rank", b.name);
            for (std::size_t c = 0; c < l; ++c) {
                const std::size_t r = detail::broadcast_param(b.rank, c, l, "rank", b.name);
                if (b.structure != BlockStructure::lattice && r != shared_rank)
                    throw validation_error("block '" + b.name + "': shared structure needs one rank");
                const std::size_t cap = std::min(rows_c[c] - 1, b.width - guard);
                if (r > cap)
                    throw validation_error("block '" + b.name + "': rank target " + std::to_string(r) +
                                           " infeasible (max " + std::to_string(cap) + ")");
            }
        }
        if (b.structure == BlockStructure::fixed_sum) {
            if (b.sum_targets.empty())
                throw validation_error("block '" + b.name + "': sum targets required");
            for (std::size_t c = 0; c < l; ++c) {
                const std::size_t s = detail::broadcast_param(b.sum_targets, c, l, "sum", b.name);
                if (s == 0 || s > b.width)
                    throw validation_error("block '" + b.name + "': sum target " + std::to_string(s) +
                                           " outside [1, width]");
            }
        }
    }

    std::mt19937_64 rng(spec.seed);
    const std::size_t total_rows = std::accumulate(rows_c.begin(), rows_c.end(), std::size_t{0});
    std::vector<detail::BitRow> bits(total_rows, detail::BitRow(col, 0));
    std::vector<std::size_t> class_offset(l, 0);
    for (std::size_t c = 1; c < l; ++c) class_offset[c] = class_offset[c - 1] + rows_c[c - 1];

    std::vector<std::size_t> dense_offset(l, 0);  // staggers spanning prefixes across dense blocks

    for (std::size_t bi = 0; bi < spec.blocks.size(); ++bi) {
        const auto& b = spec.blocks[bi];
        const std::size_t start = layout.blocks[bi].start;
        const std::size_t w = b.width;

        detail::LatticeTemplate shared;
        if (b.structure == BlockStructure::shared_lattice)
            shared = detail::draw_lattice(w, 1, detail::broadcast_param(b.rank, 0, l, "rank", b.name), rng);
        else if (b.structure == BlockStructure::class_split)
            shared = detail::draw_lattice(w, l, detail::broadcast_param(b.rank, 0, l, "rank", b.name), rng);

        for (std::size_t c = 0; c < l; ++c) {
            std::vector<detail::BitRow> block_rows(rows_c[c]);
            switch (b.structure) {
            case BlockStructure::lattice: {
                const std::size_t r = detail::broadcast_param(b.rank, c, l, "rank", b.name);
                const auto t = detail::draw_lattice(w, 1, r, rng);
                detail::fill_lattice_rows(block_rows, t, rng);
                for (auto& row : block_rows) row[0] = 1;
                break;
            }
            case BlockStructure::shared_lattice:
                detail::fill_lattice_rows(block_rows, shared, rng);
                for (auto& row : block_rows) row[0] = 1;
                break;
            case BlockStructure::class_split:
                detail::fill_lattice_rows(block_rows, shared, rng);
                for (auto& row : block_rows) {
                    for (std::size_t j = 0; j < l; ++j) row[j] = 0;
                    row[c] = 1;
                }
                break;
            case BlockStructure::dense: {
                for (auto& row : block_rows) {
                    row.assign(w, 0);
                    for (std::size_t j = 0; j < w; ++j)
                        row[j] = detail::canonical(rng) < spec.density ? 1 : 0;
                }
                const std::size_t off = dense_offset[c];
                if (off + w + 1 <= rows_c[c]) {
                    block_rows[off].assign(w, 1);
                    for (std::size_t j = 0; j < w; ++j) {
                        block_rows[off + 1 + j].assign(w, 1);
                        block_rows[off + 1 + j][j] = 0;
                    }
                }
                for (auto& row : block_rows) {
                    bool any = false;
                    for (auto v : row) any |= v != 0;
                    if (!any) row[detail::bounded(rng, w)] = 1;
                }
                break;
            }
            case BlockStructure::fixed_sum: {
                const std::size_t s = detail::broadcast_param(b.sum_targets, c, l, "sum", b.name);
                std::vector<std::size_t> cols(w);
                for (auto& row : block_rows) {
                    row.assign(w, 0);
                    std::iota(cols.begin(), cols.end(), std::size_t{0});
                    for (std::size_t i = 0; i < s; ++i) {
                        const std::size_t j = i + static_cast<std::size_t>(detail::bounded(rng, w - i));
                        std::swap(cols[i], cols[j]);
                        row[cols[i]] = 1;
                    }
                }
                break;
            }
            }
            for (std::size_t r = 0; r < rows_c[c]; ++r)
                for (std::size_t j = 0; j < w; ++j)
                    bits[class_offset[c] + r][start + j] = block_rows[r][j];
        }
        if (b.structure == BlockStructure::dense)
            for (std::size_t c = 0; c < l; ++c) dense_offset[c] += w + 1;
    }

    if (spec.noise_rate > 0.0)
        for (auto& row : bits)
            for (auto& v : row)
                if (detail::canonical(rng) < spec.noise_rate) v ^= 1;

    for (auto& row : bits) {
        for (const auto& blk : layout.blocks) {
            bool any = false;
            for (std::size_t j = blk.start; j < blk.end; ++j) any |= row[j] != 0;
            if (!any) row[blk.start + detail::bounded(rng, blk.width())] = 1;
        }
    }

    SparseDataset ds;
    ds.layout = layout;
    ds.n_columns = col;
    ds.rows.reserve(total_rows);
    for (std::size_t c = 0; c < l; ++c)
        for (std::size_t r = 0; r < rows_c[c]; ++r)
            ds.labels.push_back(spec.class_labels[c]);
    for (const auto& row : bits) {
        SparseRow sr;
        for (std::size_t j = 0; j < row.size(); ++j)
            if (row[j]) sr.emplace_back(j, 1.0);
        ds.rows.push_back(std::move(sr));
    }
    validate(ds);
    return ds;
}

// Appends round(fraction * n_columns) random {0,1} columns (at least one) as
// a new feature-type block named "random"; rows that would end up all-zero in
// the new block get one seeded bit. Existing columns are untouched.
inline SparseDataset augment_random_columns(const SparseDataset& ds, double fraction, double density,
                                            std::uint64_t seed) {
    validate(ds);
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw validation_error("augment: fraction must be in (0, 1]");
    if (!(density > 0.0 && density < 1.0))
        throw validation_error("augment: density must be in (0, 1)");
    if (ds.layout.has("random"))
        throw validation_error("augment: dataset already has a 'random' block");

    const std::size_t n_new = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(fraction * static_cast<double>(ds.n_columns))));

    std::mt19937_64 rng(seed);
    SparseDataset out = ds;
    out.n_columns = ds.n_columns + n_new;
    out.layout.blocks.push_back({"random", ds.n_columns, out.n_columns});
    for (auto& row : out.rows) {
        const std::size_t before = row.size();
        for (std::size_t j = 0; j < n_new; ++j)
            if (detail::canonical(rng) < density) row.emplace_back(ds.n_columns + j, 1.0);
        if (row.size() == before)
            row.emplace_back(ds.n_columns + detail::bounded(rng, n_new), 1.0);
    }
    validate(out);
    return out;
}

} // namespace affsel

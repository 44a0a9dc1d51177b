#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "affsel/geometry.hpp"
#include "affsel/synth.hpp"

using namespace affsel;

namespace {

Eigen::MatrixXd class_rows(const SparseDataset& ds, const std::string& label) {
    const auto M = to_dense(ds);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] == label) idx.push_back(i);
    Eigen::MatrixXd R(static_cast<Eigen::Index>(idx.size()), M.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        R.row(static_cast<Eigen::Index>(i)) = M.row(static_cast<Eigen::Index>(idx[i]));
    return R;
}

std::string serialized(const SparseDataset& ds) {
    std::ostringstream b, v;
    serialize_boundaries(ds.layout, b);
    serialize_vectors(ds, v);
    return b.str() + "\n" + v.str();
}

} // namespace

TEST_CASE("lattice blocks hit their per-class affine-dimension targets") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        SynthSpec spec;
        spec.class_labels = {"c0", "c1"};
        spec.rows_per_class = {10};
        spec.blocks = {{"t", 8, BlockStructure::lattice, {3, 2}, {}}};
        spec.seed = seed;
        const auto ds = generate_synthetic(spec);
        CHECK(affine_dimension(class_rows(ds, "c0"), {}) == 3);
        CHECK(affine_dimension(class_rows(ds, "c1"), {}) == 2);
    }
}

TEST_CASE("shared lattice makes the class hulls coincide") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1", "c2"};
    spec.rows_per_class = {8};
    spec.blocks = {{"t", 7, BlockStructure::shared_lattice, {3}, {}}};
    spec.seed = 11;
    const auto ds = generate_synthetic(spec);
    for (const auto& part : enumerate_partitions(ds.label_set())) {
        const auto p = compute_profile(build_clouds(ds, part));
        CHECK(p.f[5] == 1.0);
    }
}

TEST_CASE("fixed_sum rows carry the requested sums and slice the hulls apart") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1"};
    spec.rows_per_class = {9};
    spec.blocks = {{"t", 10, BlockStructure::fixed_sum, {}, {4, 7}}};
    spec.seed = 21;
    const auto ds = generate_synthetic(spec);

    const auto M = to_dense(ds);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        const double want = ds.labels[i] == "c0" ? 4.0 : 7.0;
        CHECK(M.row(static_cast<Eigen::Index>(i)).sum() == want);
    }
    CHECK(affine_dimension(class_rows(ds, "c0"), {}) <= 9);
    CHECK(affine_dimension(class_rows(ds, "c1"), {}) <= 9);

    // different sum slices are parallel and disjoint, so no sample lies in
    // both class hulls
    const auto part = enumerate_partitions(ds.label_set())[0];
    CHECK(compute_profile(build_clouds(ds, part)).f[5] == 0.0);
}

TEST_CASE("tall dense blocks saturate the block dimension") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1"};
    spec.rows_per_class = {8};
    spec.blocks = {{"t", 5, BlockStructure::dense, {}, {}}};
    spec.seed = 31;
    const auto ds = generate_synthetic(spec);
    CHECK(affine_dimension(class_rows(ds, "c0"), {}) == 5);
    CHECK(affine_dimension(class_rows(ds, "c1"), {}) == 5);

    // two dense blocks stagger their spanning prefixes onto different rows,
    // so both still saturate when the class is tall enough
    spec.blocks = {{"a", 4, BlockStructure::dense, {}, {}},
                   {"b", 3, BlockStructure::dense, {}, {}}};
    spec.rows_per_class = {12};
    const auto ds2 = generate_synthetic(spec);
    for (const auto* lab : {"c0", "c1"}) {
        CHECK(affine_dimension(class_rows(project(ds2, {{"a"}}), lab), {}) == 4);
        CHECK(affine_dimension(class_rows(project(ds2, {{"b"}}), lab), {}) == 3);
    }
}

TEST_CASE("class_split keeps the flip structure but separates the hulls") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1"};
    spec.rows_per_class = {10};
    spec.blocks = {{"t", 8, BlockStructure::class_split, {3}, {}}};
    spec.seed = 41;
    const auto ds = generate_synthetic(spec);

    const auto M = to_dense(ds);
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        CHECK(M(static_cast<Eigen::Index>(i), 0) == (ds.labels[i] == "c0" ? 1.0 : 0.0));
        CHECK(M(static_cast<Eigen::Index>(i), 1) == (ds.labels[i] == "c1" ? 1.0 : 0.0));
    }
    CHECK(affine_dimension(class_rows(ds, "c0"), {}) == 3);
    CHECK(affine_dimension(class_rows(ds, "c1"), {}) == 3);
    const auto part = enumerate_partitions(ds.label_set())[0];
    CHECK(compute_profile(build_clouds(ds, part)).f[5] == 0.0);
}

TEST_CASE("generator rejects bad specs") {
    SynthSpec base;
    base.class_labels = {"c0", "c1"};
    base.rows_per_class = {6};

    auto spec = base;
    spec.blocks = {{"t", 4, BlockStructure::lattice, {4}, {}}};  // cap is width-1 = 3
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = base;
    spec.rows_per_class = {3};
    spec.blocks = {{"t", 9, BlockStructure::lattice, {3}, {}}};  // cap is rows-1 = 2
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = base;
    spec.blocks = {{"t", 6, BlockStructure::lattice, {}, {}}};  // rank target missing
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = base;
    spec.blocks = {{"t", 6, BlockStructure::shared_lattice, {2, 3}, {}}};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = base;
    spec.blocks = {{"t", 2, BlockStructure::class_split, {1}, {}}};  // width must exceed l
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = base;
    spec.blocks = {{"t", 5, BlockStructure::fixed_sum, {}, {0}}};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
    spec.blocks = {{"t", 5, BlockStructure::fixed_sum, {}, {6}}};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
    spec.blocks = {{"t", 5, BlockStructure::fixed_sum, {}, {}}};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);

    spec = base;
    spec.blocks = {{"t", 5, BlockStructure::dense, {}, {}}};
    spec.noise_rate = 1.0;
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
    spec.noise_rate = 0.0;
    spec.density = 0.0;
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
    spec.density = 0.5;
    spec.class_labels = {"c0"};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
    spec.class_labels = {"c0", "c0"};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
    spec.class_labels = {"c0", "c1"};
    spec.rows_per_class = {3, 4, 5};
    CHECK_THROWS_AS(generate_synthetic(spec), validation_error);
}

TEST_CASE("per-class row counts broadcast or apply one by one") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1"};
    spec.rows_per_class = {5, 9};
    spec.blocks = {{"t", 4, BlockStructure::dense, {}, {}}};
    spec.seed = 3;
    const auto ds = generate_synthetic(spec);
    CHECK(ds.n_rows() == 14);
    CHECK(std::count(ds.labels.begin(), ds.labels.end(), "c0") == 5);
    CHECK(std::count(ds.labels.begin(), ds.labels.end(), "c1") == 9);
    // class-major row order
    CHECK(ds.labels.front() == "c0");
    CHECK(ds.labels.back() == "c1");
}

TEST_CASE("same seed reproduces the dataset byte for byte") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1"};
    spec.rows_per_class = {7};
    spec.blocks = {{"a", 6, BlockStructure::dense, {}, {}},
                   {"b", 5, BlockStructure::lattice, {2}, {}}};
    spec.noise_rate = 0.1;
    spec.seed = 123;
    const auto one = serialized(generate_synthetic(spec));
    const auto two = serialized(generate_synthetic(spec));
    CHECK(one == two);
    spec.seed = 124;
    CHECK(serialized(generate_synthetic(spec)) != one);
}

TEST_CASE("noisy output still satisfies every dataset invariant") {
    SynthSpec spec;
    spec.class_labels = {"c0", "c1", "c2"};
    spec.rows_per_class = {6};
    spec.blocks = {{"a", 3, BlockStructure::dense, {}, {}},
                   {"b", 4, BlockStructure::fixed_sum, {}, {2}}};
    spec.noise_rate = 0.4;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        spec.seed = seed;
        const auto ds = generate_synthetic(spec);
        CHECK_NOTHROW(validate(ds));
        CHECK(ds.n_columns == 7);
        CHECK(ds.n_rows() == 18);
    }
}

TEST_CASE("augmenting appends a quarter of the columns as a random block") {
    SparseDataset ds;
    ds.layout.blocks = {{"wide", 0, 645}};
    ds.n_columns = 645;
    ds.labels = {"a", "b"};
    ds.rows = {{{0, 1.0}, {644, 1.0}}, {{12, 0.5}}};
    validate(ds);

    const auto out = augment_random_columns(ds, 0.25, 0.5, 9);
    CHECK(out.n_columns == 806);  // 645 + round(0.25 * 645)
    REQUIRE(out.layout.blocks.size() == 2);
    CHECK(out.layout.blocks.back().name == "random");
    CHECK(out.layout.blocks.back().start == 645);
    CHECK(out.layout.blocks.back().end == 806);
    CHECK(out.labels == ds.labels);
    REQUIRE(out.n_rows() == ds.n_rows());

    // the original columns are untouched, bit for bit
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        SparseRow kept;
        for (const auto& [c, v] : out.rows[r])
            if (c < 645) kept.emplace_back(c, v);
        CHECK(kept == ds.rows[r]);
    }

    // every row got at least one nonzero in the new block (repair rule)
    for (const auto& row : out.rows) {
        bool any = false;
        for (const auto& [c, v] : row) any |= c >= 645 && v != 0.0;
        CHECK(any);
    }

    const auto again = augment_random_columns(ds, 0.25, 0.5, 9);
    CHECK(serialized(again) == serialized(out));
}

TEST_CASE("augment edge cases") {
    SparseDataset ds;
    ds.layout.blocks = {{"t", 0, 3}};
    ds.n_columns = 3;
    ds.labels = {"a", "b"};
    ds.rows = {{{0, 1.0}}, {{2, 1.0}}};

    const auto out = augment_random_columns(ds, 1e-6, 0.5, 1);
    CHECK(out.n_columns == 4);  // at least one column is always added

    CHECK_THROWS_AS(augment_random_columns(ds, 0.0, 0.5, 1), validation_error);
    CHECK_THROWS_AS(augment_random_columns(ds, 1.5, 0.5, 1), validation_error);
    CHECK_THROWS_AS(augment_random_columns(ds, 0.5, 0.0, 1), validation_error);
    CHECK_THROWS_AS(augment_random_columns(ds, 0.5, 1.0, 1), validation_error);
    CHECK_THROWS_AS(augment_random_columns(out, 0.5, 0.5, 1), validation_error);
}

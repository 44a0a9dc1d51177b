// Command-line front end: selection runs, wrapper labeling, selector-vs-label
// evaluation, and synthetic dataset generation. All outputs are seeded and
// deterministic except timing.tsv, which records wall-clock diagnostics.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affsel/affsel.hpp"

namespace fs = std::filesystem;
using namespace affsel;

namespace {

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char ch : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(ch)) ||
                        ch == '.' || ch == '_' || ch == ',' || ch == '=' || ch == '+' || ch == '-';
        out += ok ? ch : '_';
    }
    return out;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: keep \n on every platform
    if (!out) throw validation_error("cannot write " + path.string());
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s, const std::string& what) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto slash = s.find('/', pos);
        const std::string tok = s.substr(pos, slash == std::string::npos ? std::string::npos : slash - pos);
        try {
            std::size_t idx = 0;
            const auto v = std::stoull(tok, &idx);
            if (idx != tok.size() || tok.empty()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw validation_error("bad " + what + " value '" + tok + "'");
        }
        if (slash == std::string::npos) break;
        pos = slash + 1;
    }
    return out;
}

// Block grammar: width[:mode[:params]] with modes dense (default), ind,
// shared, split (rank param) and sum (per-class sums, '/'-separated).
SynthBlock parse_block_spec(const std::string& s, std::size_t index) {
    SynthBlock b;
    b.name = "t" + std::to_string(index);
    const auto c1 = s.find(':');
    const auto c2 = c1 == std::string::npos ? c1 : s.find(':', c1 + 1);
    const std::string width_s = s.substr(0, c1);
    const std::string mode = c1 == std::string::npos ? "dense"
                             : s.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1);
    const std::string params = c2 == std::string::npos ? "" : s.substr(c2 + 1);

    const auto widths = parse_size_list(width_s, "block width");
    if (widths.size() != 1) throw validation_error("block '" + s + "': single width expected");
    b.width = widths[0];

    if (mode == "dense") {
        b.structure = BlockStructure::dense;
        if (!params.empty()) throw validation_error("block '" + s + "': dense takes no parameters");
    } else if (mode == "ind" || mode == "shared" || mode == "split") {
        b.structure = mode == "ind"      ? BlockStructure::lattice
                      : mode == "shared" ? BlockStructure::shared_lattice
                                         : BlockStructure::class_split;
        if (params.empty()) throw validation_error("block '" + s + "': rank parameter required");
        b.rank = parse_size_list(params, "rank");
    } else if (mode == "sum") {
        b.structure = BlockStructure::fixed_sum;
        if (params.empty()) throw validation_error("block '" + s + "': sum parameter required");
        b.sum_targets = parse_size_list(params, "sum");
    } else {
        throw validation_error("block '" + s + "': unknown mode '" + mode + "'");
    }
    return b;
}

struct Config {
    std::string vectors, boundaries, out_dir, labels_path, coefficients_path;
    double epsilon = std::numeric_limits<double>::epsilon();
    std::string tolerance_policy = "relative";
    std::string f6_mode = "class";
    std::uint64_t seed = 0, split_seed = 0;
    double svm_c = 1.0;
    unsigned threads = 0;
    // synth
    std::size_t classes = 2;
    std::string rows_spec = "20";
    std::vector<std::string> block_specs;
    double noise = 0.0, density = 0.5, fraction = 0.25;
    bool augment = false;
    std::string out_vectors, out_boundaries;
};

RankTolerance make_tolerance(const Config& cfg) {
    RankTolerance tol;
    tol.policy = cfg.tolerance_policy == "absolute" ? RankTolerance::Policy::absolute
                                                    : RankTolerance::Policy::relative;
    tol.epsilon = cfg.epsilon;
    return tol;
}

int cmd_select(const Config& cfg) {
    SelectOptions opt;
    opt.tolerance = make_tolerance(cfg);
    opt.f6_mode = cfg.f6_mode == "table1" ? F6Mode::table1_literal : F6Mode::class_vs_class;
    opt.threads = cfg.threads;
    if (!cfg.coefficients_path.empty())
        opt.coefficients = parse_coefficients_file(cfg.coefficients_path);

    const auto ds = parse_dataset(cfg.vectors, cfg.boundaries);
    const auto report = select(ds, opt);

    fs::create_directories(cfg.out_dir);
    const char* header =
        "partition\tsubset\tf1\tf2\tf3\tf4\tf5\tf6\tz1\tz2\tz3\tz4\tz5\tz6\tlin_pred\tlog_pred\tverdict";

    for (const auto& pr : report.partitions) {
        const std::string name = pr.partition.canonical_name();
        const std::string safe = sanitize_filename(name);
        auto cls = open_out(fs::path(cfg.out_dir) / ("classifier_" + safe + ".tsv"));
        cls << header << '\n';
        for (const auto& sr : pr.subsets) {
            cls << name << '\t' << sr.subset.display();
            for (double v : sr.profile.f) cls << '\t' << detail::format_g10(v);
            for (double v : sr.profile.z) cls << '\t' << detail::format_g10(v);
            cls << '\t' << detail::format_g10(sr.verdict.lin_pred)
                << '\t' << detail::format_g10(sr.verdict.log_pred)
                << '\t' << (sr.verdict.optimal ? "optimal" : "suboptimal") << '\n';
        }
        auto sel = open_out(fs::path(cfg.out_dir) / ("selected_" + safe + ".txt"));
        std::size_t n_sel = 0;
        for (const auto& sr : pr.subsets)
            if (sr.verdict.optimal) {
                sel << sr.subset.display() << '\n';
                ++n_sel;
            }
        std::cout << name << ": " << n_sel << "/" << pr.subsets.size() << " subsets selected\n";
    }

    {
        auto timing = open_out(fs::path(cfg.out_dir) / "timing.tsv");
        timing << "partition\tsubset\tseconds\n";
        for (const auto& pr : report.partitions) {
            for (const auto& sr : pr.subsets)
                timing << pr.partition.canonical_name() << '\t' << sr.subset.display() << '\t'
                       << detail::format_g10(sr.seconds) << '\n';
            timing << pr.partition.canonical_name() << "\tALL\t" << detail::format_g10(pr.seconds) << '\n';
        }
    }

    // manifest last, once everything else is on disk
    auto manifest = open_out(fs::path(cfg.out_dir) / "manifest.tsv");
    manifest << "# f6-mode " << cfg.f6_mode << '\n'
             << "# tolerance-policy " << cfg.tolerance_policy << '\n'
             << "# epsilon " << detail::format_g10(cfg.epsilon) << '\n'
             << "partition\tn_subsets\tn_selected\n";
    std::size_t total_subsets = 0, total_selected = 0;
    for (const auto& pr : report.partitions) {
        std::size_t n_sel = 0;
        for (const auto& sr : pr.subsets) n_sel += sr.verdict.optimal;
        manifest << pr.partition.canonical_name() << '\t' << pr.subsets.size() << '\t' << n_sel << '\n';
        total_subsets += pr.subsets.size();
        total_selected += n_sel;
    }
    manifest << "TOTAL\t" << total_subsets << '\t' << total_selected << '\n';
    return 0;
}

int cmd_label(const Config& cfg) {
    const auto ds = parse_dataset(cfg.vectors, cfg.boundaries);
    WrapperOptions opt;
    opt.svm.C = cfg.svm_c;
    opt.svm.seed = cfg.seed;
    opt.split_seed = cfg.split_seed;

    std::vector<LabeledPartition> groups;
    for (const auto& part : enumerate_partitions(ds.label_set())) {
        LabeledPartition g;
        g.partition_name = part.canonical_name();
        g.labels = wrapper_label(ds, part, opt);
        for (const auto& l : g.labels)
            std::cout << g.partition_name << '\t' << l.subset.display() << '\t'
                      << detail::format_g10(l.test_accuracy) << '\n';
        groups.push_back(std::move(g));
    }

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "labels.tsv");
    serialize_labels(groups, out);
    return 0;
}

int cmd_evaluate(const Config& cfg) {
    std::vector<fs::path> files;
    if (!fs::is_directory(cfg.out_dir))
        throw validation_error("not a directory: " + cfg.out_dir);
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
        const std::string fn = entry.path().filename().string();
        if (fn.rfind("classifier_", 0) == 0 && fn.size() > 4 && fn.substr(fn.size() - 4) == ".tsv")
            files.push_back(entry.path());
    }
    if (files.empty())
        throw validation_error("no classifier_*.tsv files in " + cfg.out_dir);
    std::sort(files.begin(), files.end());

    // partition name -> (subset, verdict) rows, in file order
    std::map<std::string, std::vector<std::pair<FeatureSubset, bool>>> groups;
    for (const auto& path : files) {
        std::ifstream in(path);
        if (!in) throw validation_error("cannot open " + path.string());
        std::string line;
        std::size_t lineno = 0;
        bool saw_header = false;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (detail::blank_or_comment(line)) continue;
            if (!saw_header) {
                saw_header = true;  // column header
                continue;
            }
            const auto f = detail::split_tabs(line);
            if (f.size() != 17)
                throw validation_error(detail::loc(path.string(), lineno) + "expected 17 columns");
            bool optimal;
            if (f[16] == "optimal") optimal = true;
            else if (f[16] == "suboptimal") optimal = false;
            else throw validation_error(detail::loc(path.string(), lineno) + "bad verdict '" + f[16] + "'");
            groups[f[0]].emplace_back(FeatureSubset::from_display(f[1], path.string(), lineno), optimal);
        }
    }

    SelectionReport predicted;
    for (const auto& [name, rows] : groups) {
        if (name.rfind("pos=", 0) != 0)
            throw validation_error("malformed partition name '" + name + "'");
        PartitionResult pr;
        pr.partition.positive = FeatureSubset::from_display(name.substr(4), "partition", 0).types;
        for (const auto& [subset, optimal] : rows) {
            SubsetResult sr;
            sr.subset = subset;
            sr.verdict.optimal = optimal;
            pr.subsets.push_back(std::move(sr));
        }
        predicted.partitions.push_back(std::move(pr));
    }

    std::ifstream lab(cfg.labels_path);
    if (!lab) throw validation_error("cannot open labels file: " + cfg.labels_path);
    const auto truth = parse_labels(lab, cfg.labels_path);

    const auto quality = selection_quality(predicted, truth);

    const auto row = [](std::ostream& os, const std::string& name, const ConfusionCounts& c,
                        const ClassifierMetrics& m) {
        os << name << '\t' << c.tp << '\t' << c.fp << '\t' << c.tn << '\t' << c.fn << '\t'
           << detail::format_g10(m.accuracy) << '\t' << detail::format_g10(m.precision) << '\t'
           << detail::format_g10(m.recall) << '\n';
    };
    auto out = open_out(fs::path(cfg.out_dir) / "evaluation.tsv");
    for (std::ostream* os : {static_cast<std::ostream*>(&out), static_cast<std::ostream*>(&std::cout)}) {
        *os << "partition\ttp\tfp\ttn\tfn\taccuracy\tprecision\trecall\n";
        for (const auto& pq : quality.per_partition) row(*os, pq.partition_name, pq.counts, pq.quality);
        row(*os, "OVERALL", quality.overall_counts, quality.overall);
    }
    return 0;
}

int cmd_synth(const Config& cfg) {
    SparseDataset ds;
    if (cfg.augment) {
        if (cfg.vectors.empty() || cfg.boundaries.empty())
            throw validation_error("--augment needs --vectors and --boundaries input files");
        ds = augment_random_columns(parse_dataset(cfg.vectors, cfg.boundaries), cfg.fraction,
                                    cfg.density, cfg.seed);
    } else {
        SynthSpec spec;
        for (std::size_t c = 0; c < cfg.classes; ++c) spec.class_labels.push_back("c" + std::to_string(c));
        spec.rows_per_class = parse_size_list(cfg.rows_spec, "rows");
        for (std::size_t i = 0; i < cfg.block_specs.size(); ++i)
            spec.blocks.push_back(parse_block_spec(cfg.block_specs[i], i));
        spec.noise_rate = cfg.noise;
        spec.density = cfg.density;
        spec.seed = cfg.seed;
        ds = generate_synthetic(spec);
    }

    for (const auto& p : {cfg.out_vectors, cfg.out_boundaries}) {
        const auto parent = fs::path(p).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
    }
    {
        auto out = open_out(cfg.out_boundaries);
        serialize_boundaries(ds.layout, out);
    }
    {
        auto out = open_out(cfg.out_vectors);
        serialize_vectors(ds, out);
    }
    std::cout << ds.n_rows() << " rows, " << ds.n_columns << " columns, "
              << ds.layout.blocks.size() << " feature types\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine-geometry feature selection for linear-kernel SVMs"};
    app.require_subcommand(1);
    Config cfg;

    const auto add_input = [&](CLI::App* c, bool required) {
        auto* v = c->add_option("--vectors", cfg.vectors, "Samples file (label TAB col:value ...)");
        auto* b = c->add_option("--boundaries", cfg.boundaries, "Feature-type layout file");
        if (required) {
            v->required()->check(CLI::ExistingFile);
            b->required()->check(CLI::ExistingFile);
        }
    };

    auto* sel = app.add_subcommand("select", "Score and gate every (partition, subset) pair");
    add_input(sel, true);
    sel->add_option("--out-dir", cfg.out_dir, "Output directory")->required();
    sel->add_option("--tolerance", cfg.epsilon, "Rank tolerance epsilon");
    sel->add_option("--tolerance-policy", cfg.tolerance_policy, "relative|absolute")
        ->check(CLI::IsMember({"relative", "absolute"}));
    sel->add_option("--f6-mode", cfg.f6_mode, "class|table1 joint-membership pairing")
        ->check(CLI::IsMember({"class", "table1"}));
    sel->add_option("--coefficients", cfg.coefficients_path, "Model coefficients override file")
        ->check(CLI::ExistingFile);
    sel->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");

    auto* lab = app.add_subcommand("label", "Wrapper oracle: SVM accuracy label for every pair");
    add_input(lab, true);
    lab->add_option("--out-dir", cfg.out_dir, "Output directory (labels.tsv)")->required();
    lab->add_option("--svm-c", cfg.svm_c, "SVM penalty C");
    lab->add_option("--seed", cfg.seed, "SVM shuffling seed");
    lab->add_option("--split-seed", cfg.split_seed, "Train/test split seed");

    auto* eval = app.add_subcommand("evaluate", "Compare selection outputs against wrapper labels");
    eval->add_option("--out-dir", cfg.out_dir, "Directory holding classifier_*.tsv")->required();
    eval->add_option("--labels", cfg.labels_path, "Labels file")->required()->check(CLI::ExistingFile);

    auto* syn = app.add_subcommand("synth", "Generate or augment a synthetic dataset");
    add_input(syn, false);
    syn->add_option("--classes", cfg.classes, "Number of classes (labels c0, c1, ...)");
    syn->add_option("--rows", cfg.rows_spec, "Rows per class, single or /-separated");
    syn->add_option("--block", cfg.block_specs,
                    "Feature-type block: width[:mode[:params]] "
                    "(dense | ind:rank | shared:rank | split:rank | sum:s0/s1/...)");
    syn->add_option("--noise", cfg.noise, "Bit-flip rate");
    syn->add_option("--density", cfg.density, "Fill probability (dense blocks / augment columns)");
    syn->add_option("--seed", cfg.seed, "Generator seed");
    syn->add_flag("--augment", cfg.augment, "Append a random block to an existing dataset");
    syn->add_option("--fraction", cfg.fraction, "Augment: new columns as a fraction of existing");
    syn->add_option("--out-vectors", cfg.out_vectors, "Output samples file")->required();
    syn->add_option("--out-boundaries", cfg.out_boundaries, "Output layout file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sel->parsed()) return cmd_select(cfg);
        if (lab->parsed()) return cmd_label(cfg);
        if (eval->parsed()) return cmd_evaluate(cfg);
        if (syn->parsed()) return cmd_synth(cfg);
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}

#include "fuzzyseek/cli.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <vector>

#include <CLI11.hpp>

#include "fuzzyseek/engine.hpp"
#include "fuzzyseek/error.hpp"
#include "fuzzyseek/fixtures.hpp"
#include "fuzzyseek/report.hpp"

namespace fuzzyseek {
namespace {

namespace fs = std::filesystem;

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".ppm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::Io, dir.string() + " is not a directory");
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

BeamWidth parse_beam(const std::string& text) {
    if (text == "all" || text == "unbounded") return BeamWidth::unbounded();
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used == text.size() && v >= 1) return BeamWidth(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
    }
    throw Error(ErrorCode::InvalidArgument, "beam must be a positive integer or 'all', got '" + text + "'");
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return kExitUsage;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DuplicateId: return kExitInvariant;
    default: return kExitIo;
    }
}

struct BuildOptions {
    std::string images;
    std::string out;
    std::uint32_t sig_len = kDefaultSignatureLength;
    double alpha = 1.0;
    std::uint32_t min_fill = 2;
    std::uint32_t max_fill = 8;
    std::string colorspace = "hsv";
    double threshold = 0.0;
    std::string palette;
    bool normalize = false;
};

struct QueryOptions {
    std::string index;
    std::string image;
    std::size_t k = 10;
    std::string beam = "1";
    std::string html;
    bool compare_linear = false;
};

struct BenchOptions {
    std::string index;
    std::string queries;
    std::size_t k = 10;
    std::string beam = "1";
    std::string out;
};

struct FixtureCliOptions {
    std::string out;
    std::size_t count = 100;
    std::uint64_t seed = 1;
    std::size_t width = 32;
    std::size_t height = 8;
};

int cmd_build(const BuildOptions& o, std::ostream& out, std::ostream& err) {
    BuildParams params;
    if (!o.palette.empty()) params.palette = Palette::load(o.palette);
    params.color_space = parse_color_space(o.colorspace);
    params.dominance_threshold = o.threshold;
    params.sig_len = o.sig_len;
    params.tree.min_fill = o.min_fill;
    params.tree.max_fill = o.max_fill;
    params.tree.fhd.alpha = o.alpha;
    params.tree.fhd.normalize = o.normalize;
    params.validate();

    const auto images = list_images(o.images);
    const RetrievalIndex index = RetrievalIndex::build(images, params);
    for (const auto& s : index.skipped()) err << "skipped " << s.path << ": " << s.reason << "\n";
    index.save(o.out);

    out << "indexed " << index.records().size() << " images (" << index.skipped().size() << " skipped)\n"
        << "tree height " << index.tree().height() << ", " << index.tree().node_count() << " nodes\n"
        << "build FHD evaluations " << index.stats().fhd_evaluations << ", " << index.stats().wall_ms << " ms\n"
        << "wrote " << o.out << " and " << manifest_path_for(o.out).string() << "\n";
    return kExitOk;
}

void print_ranking(const QueryResult& r, std::ostream& out) {
    out << "rank\tid\tk_star\tsigma_count\tpath\n";
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        const auto& e = r.ranked[i];
        out << i + 1 << '\t' << e.image_id << '\t' << e.distance.k_star << '\t' << e.distance.sigma_count << '\t'
            << e.path << '\n';
    }
}

int cmd_query(const QueryOptions& o, std::ostream& out) {
    const BeamWidth beam = parse_beam(o.beam);
    const RetrievalIndex index = RetrievalIndex::load(o.index);
    const FuzzySignature query = index.sign(o.image);
    const QueryResult result = index.query_topk(query, o.k, beam);

    print_ranking(result, out);
    out << "candidates " << result.candidates_examined << ", FHD evaluations " << result.fhd_evaluations
        << " (beam " << beam_label(beam) << ")\n";
    if (o.compare_linear) {
        const QueryResult linear = index.linear_scan_topk(query, o.k);
        out << "linear scan FHD evaluations " << linear.fhd_evaluations << ", recall " << recall(result, linear)
            << ", ranking " << (result.ranked == linear.ranked ? "identical" : "differs") << "\n";
    }
    if (!o.html.empty()) {
        emit_html_report(result, o.image, o.html);
        out << "wrote " << o.html << "\n";
    }
    return kExitOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
    const BeamWidth beam = parse_beam(o.beam);
    const RetrievalIndex index = RetrievalIndex::load(o.index);
    const auto queries = list_images(o.queries);
    if (queries.empty()) throw Error(ErrorCode::InvalidArgument, "no query images in " + o.queries);
    const BenchReport report = run_bench(index, queries, o.k, beam);
    write_bench_report(report, o.out);
    out << report.rows.size() << " queries over " << report.corpus_size << " images, beam " << report.beam << "\n"
        << "median tree FHD evaluations " << report.median_tree_fhd_evals() << " vs linear "
        << report.corpus_size << ", mean recall@" << report.k << " " << report.mean_recall() << "\n"
        << "wrote " << o.out << "\n";
    return kExitOk;
}

int cmd_audit(const std::string& path, std::ostream& out) {
    const RetrievalIndex index = RetrievalIndex::load(path);
    const AuditReport report = index.tree().audit();
    out << "entries " << report.leaf_entries << ", nodes " << report.node_count << ", height " << report.height;
    if (report.height_bound) out << " (bound " << *report.height_bound << ")";
    out << "\n";
    for (const auto& v : report.violations) {
        out << "violation " << to_string(v.kind) << " at node " << v.node << ": " << v.detail << "\n";
    }
    out << report.violations.size() << " violations\n";
    return report.healthy() ? kExitOk : kExitInvariant;
}

int cmd_fixtures(const FixtureCliOptions& o, std::ostream& out) {
    FixtureOptions options;
    options.count = o.count;
    options.seed = o.seed;
    options.width = o.width;
    options.height = o.height;
    const auto paths = write_fixtures(o.out, options, Palette::standard());
    out << "wrote " << paths.size() << " fixtures to " << o.out << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fuzzy color signature image retrieval over an S-tree index", "fuzzyseek"};
    app.require_subcommand(1);

    BuildOptions build;
    CLI::App* index_cmd = app.add_subcommand("index", "Index management");
    index_cmd->require_subcommand(1);
    CLI::App* build_cmd = index_cmd->add_subcommand("build", "Index every image under a directory");
    build_cmd->add_option("--images", build.images, "Directory of images")->required();
    build_cmd->add_option("--out", build.out, "Index file to write")->required();
    build_cmd->add_option("--sig-len", build.sig_len, "Sub-signature length per color")->check(CLI::PositiveNumber);
    build_cmd->add_option("--alpha", build.alpha, "FHD membership spread")->check(CLI::PositiveNumber);
    build_cmd->add_option("--min-fill", build.min_fill, "Minimum entries per node");
    build_cmd->add_option("--max-fill", build.max_fill, "Maximum entries per node");
    build_cmd->add_option("--colorspace", build.colorspace, "Quantization metric")
        ->check(CLI::IsMember({"hsv", "rgb"}));
    build_cmd->add_option("--threshold", build.threshold, "Dominant color fraction")->check(CLI::Range(0.0, 1.0));
    build_cmd->add_option("--palette", build.palette, "Palette JSON file");
    build_cmd->add_flag("--normalize-fhd", build.normalize, "Scale weight differences to [0,1]");

    QueryOptions query;
    CLI::App* query_cmd = app.add_subcommand("query", "Top-K similar images for one query image");
    query_cmd->add_option("--index", query.index, "Index file")->required();
    query_cmd->add_option("--image", query.image, "Query image")->required();
    query_cmd->add_option("--k", query.k, "Results to return")->check(CLI::PositiveNumber);
    query_cmd->add_option("--beam", query.beam, "Children followed per node, or 'all'");
    query_cmd->add_option("--html", query.html, "Write an HTML gallery");
    query_cmd->add_flag("--compare-linear", query.compare_linear, "Also run the linear scan and compare");

    BenchOptions bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Tree versus linear scan over a query set");
    bench_cmd->add_option("--index", bench.index, "Index file")->required();
    bench_cmd->add_option("--queries", bench.queries, "Directory of query images")->required();
    bench_cmd->add_option("--k", bench.k, "Results per query")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--beam", bench.beam, "Children followed per node, or 'all'");
    bench_cmd->add_option("--out", bench.out, "JSON report")->required();

    std::string audit_path;
    CLI::App* audit_cmd = app.add_subcommand("audit", "Check the structural invariants of an index");
    audit_cmd->add_option("--index", audit_path, "Index file")->required();

    FixtureCliOptions fixtures;
    CLI::App* fixtures_cmd = app.add_subcommand("gen-fixtures", "Write a seeded synthetic PPM corpus");
    fixtures_cmd->add_option("--out", fixtures.out, "Output directory")->required();
    fixtures_cmd->add_option("--count", fixtures.count, "Number of images")->required();
    fixtures_cmd->add_option("--seed", fixtures.seed, "Generator seed");
    fixtures_cmd->add_option("--width", fixtures.width, "Image width")->check(CLI::Range(2, 4096));
    fixtures_cmd->add_option("--height", fixtures.height, "Image height")->check(CLI::Range(1, 4096));

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (build_cmd->parsed()) return cmd_build(build, out, err);
        if (query_cmd->parsed()) return cmd_query(query, out);
        if (bench_cmd->parsed()) return cmd_bench(bench, out);
        if (audit_cmd->parsed()) return cmd_audit(audit_path, out);
        if (fixtures_cmd->parsed()) return cmd_fixtures(fixtures, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    err << app.help();
    return kExitUsage;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace fuzzyseek

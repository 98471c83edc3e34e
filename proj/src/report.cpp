#include "fuzzyseek/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "fuzzyseek/error.hpp"

namespace fuzzyseek {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&#39;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string page_relative(const std::filesystem::path& target, const std::filesystem::path& out_path) {
    std::filesystem::path base = std::filesystem::absolute(out_path).parent_path();
    return std::filesystem::absolute(target).lexically_normal().lexically_proximate(base).generic_string();
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

BenchRow bench_one(const RetrievalIndex& index, const FuzzySignature& query, std::size_t k, BeamWidth beam) {
    BenchRow row;
    auto start = Clock::now();
    const QueryResult tree = index.query_topk(query, k, beam);
    row.tree_ms = ms_since(start);

    start = Clock::now();
    const QueryResult linear = index.linear_scan_topk(query, k);
    row.linear_ms = ms_since(start);

    row.tree_fhd_evals = tree.fhd_evaluations;
    row.tree_candidates = tree.candidates_examined;
    row.linear_fhd_evals = linear.fhd_evaluations;
    row.recall_vs_oracle = recall(tree, linear);
    row.identical_ranking = tree.ranked == linear.ranked;
    return row;
}

BenchReport report_header(const RetrievalIndex& index, std::size_t k, BeamWidth beam) {
    BenchReport report;
    report.corpus_size = index.records().size();
    report.k = k;
    report.beam = beam_label(beam);
    report.build_fhd_evals = index.stats().fhd_evaluations;
    report.build_ms = index.stats().wall_ms;
    report.tree_height = index.tree().height();
    return report;
}

}  // namespace

std::string beam_label(BeamWidth beam) {
    return beam.is_unbounded() ? "all" : std::to_string(beam.value());
}

double BenchReport::median_tree_fhd_evals() const {
    if (rows.empty()) return 0.0;
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(static_cast<double>(r.tree_fhd_evals));
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

double BenchReport::mean_recall() const {
    if (rows.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : rows) sum += r.recall_vs_oracle;
    return sum / static_cast<double>(rows.size());
}

BenchReport run_bench(const RetrievalIndex& index, std::span<const FuzzySignature> queries, std::size_t k,
                      BeamWidth beam) {
    BenchReport report = report_header(index, k, beam);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        BenchRow row = bench_one(index, queries[i], k, beam);
        row.query_id = i;
        report.rows.push_back(std::move(row));
    }
    return report;
}

BenchReport run_bench(const RetrievalIndex& index, std::span<const std::filesystem::path> queries, std::size_t k,
                      BeamWidth beam) {
    BenchReport report = report_header(index, k, beam);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        BenchRow row = bench_one(index, index.sign(queries[i]), k, beam);
        row.query_id = i;
        row.query_path = queries[i].string();
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string bench_to_json(const BenchReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({
            {"query_id", r.query_id},
            {"query_path", r.query_path},
            {"tree_fhd_evals", r.tree_fhd_evals},
            {"tree_candidates", r.tree_candidates},
            {"tree_ms", r.tree_ms},
            {"linear_fhd_evals", r.linear_fhd_evals},
            {"linear_ms", r.linear_ms},
            {"recall_vs_oracle", r.recall_vs_oracle},
            {"identical_ranking", r.identical_ranking},
        });
    }
    json doc = {
        {"corpus_size", report.corpus_size},
        {"k", report.k},
        {"beam", report.beam},
        {"tree_height", report.tree_height},
        {"build_fhd_evals", report.build_fhd_evals},
        {"build_ms", report.build_ms},
        {"median_tree_fhd_evals", report.median_tree_fhd_evals()},
        {"mean_recall", report.mean_recall()},
        {"nondeterministic_fields", {"build_ms", "rows[].tree_ms", "rows[].linear_ms"}},
        {"rows", rows},
    };
    return doc.dump(2) + "\n";
}

void write_bench_report(const BenchReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << bench_to_json(report);
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string render_html_report(const QueryResult& result, const std::filesystem::path& query_image,
                               const std::filesystem::path& out_path) {
    if (result.ranked.empty()) throw Error(ErrorCode::InvalidArgument, "no results to report");

    std::string html;
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>Similar images</title>\n<style>\n";
    html += "body{font-family:sans-serif;margin:2em;background:#fafafa}\n";
    html += ".grid{display:flex;flex-wrap:wrap;gap:1em}\n";
    html += "figure{margin:0;padding:.5em;background:#fff;border:1px solid #ddd;width:220px}\n";
    html += "figure img{width:100%;image-rendering:pixelated}\n";
    html += "figcaption{font-size:.8em;word-break:break-all}\n";
    html += "</style>\n</head>\n<body>\n";

    const std::string query_src = page_relative(query_image, out_path);
    html += "<h1>Query</h1>\n<figure class=\"query\"><img src=\"" + html_escape(query_src) +
            "\" alt=\"query\"><figcaption>" + html_escape(query_src) + "</figcaption></figure>\n";
    html += "<h2>Top " + std::to_string(result.ranked.size()) + " of " + std::to_string(result.candidates_examined) +
            " candidates (" + std::to_string(result.fhd_evaluations) + " FHD evaluations)</h2>\n";
    html += "<div class=\"grid\">\n";
    for (std::size_t i = 0; i < result.ranked.size(); ++i) {
        const RankedImage& r = result.ranked[i];
        const std::string src = html_escape(page_relative(r.path, out_path));
        html += "<figure class=\"result\" data-rank=\"" + std::to_string(i + 1) + "\" data-id=\"" +
                std::to_string(r.image_id) + "\"><img src=\"" + src + "\" alt=\"result " + std::to_string(i + 1) +
                "\"><figcaption>#" + std::to_string(i + 1) + " &middot; id " + std::to_string(r.image_id) +
                "<br>k* = " + std::to_string(r.distance.k_star) + ", sigma = " + fixed6(r.distance.sigma_count) +
                "<br>" + src + "</figcaption></figure>\n";
    }
    html += "</div>\n</body>\n</html>\n";
    return html;
}

void emit_html_report(const QueryResult& result, const std::filesystem::path& query_image,
                      const std::filesystem::path& out_path) {
    const std::string html = render_html_report(result, query_image, out_path);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + out_path.string());
    out.write(html.data(), static_cast<std::streamsize>(html.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + out_path.string());
}

}  // namespace fuzzyseek

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fuzzyseek/engine.hpp"

namespace fuzzyseek {

struct BenchRow {
    std::size_t query_id = 0;
    std::string query_path;
    std::uint64_t tree_fhd_evals = 0;
    std::size_t tree_candidates = 0;
    double tree_ms = 0.0;
    std::uint64_t linear_fhd_evals = 0;
    double linear_ms = 0.0;
    double recall_vs_oracle = 0.0;
    bool identical_ranking = false;
};

/// Tree-versus-linear comparison counts over a query set; the build counts
/// come from the index. Timings are wall clock and vary run to run.
struct BenchReport {
    std::size_t corpus_size = 0;
    std::size_t k = 0;
    std::string beam;
    std::uint64_t build_fhd_evals = 0;
    double build_ms = 0.0;
    std::size_t tree_height = 0;
    std::vector<BenchRow> rows;

    double median_tree_fhd_evals() const;
    double mean_recall() const;
};

BenchReport run_bench(const RetrievalIndex& index, std::span<const std::filesystem::path> queries, std::size_t k,
                      BeamWidth beam = BeamWidth(1));

/// Same, for pre-signed queries; query_path is left empty.
BenchReport run_bench(const RetrievalIndex& index, std::span<const FuzzySignature> queries, std::size_t k,
                      BeamWidth beam = BeamWidth(1));

/// Pretty-printed JSON object.
std::string bench_to_json(const BenchReport& report);
void write_bench_report(const BenchReport& report, const std::filesystem::path& path);

std::string beam_label(BeamWidth beam);

/// Self-contained HTML page: the query image followed by one cell per ranked
/// result in rank order. Image links are relative to the page. No output
/// is written for an empty result (InvalidArgument).
std::string render_html_report(const QueryResult& result, const std::filesystem::path& query_image,
                               const std::filesystem::path& out_path);
void emit_html_report(const QueryResult& result, const std::filesystem::path& query_image,
                      const std::filesystem::path& out_path);

}  // namespace fuzzyseek

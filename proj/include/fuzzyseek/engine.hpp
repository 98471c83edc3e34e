#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fuzzyseek/color.hpp"
#include "fuzzyseek/fhd.hpp"
#include "fuzzyseek/image_io.hpp"
#include "fuzzyseek/signature.hpp"
#include "fuzzyseek/stree.hpp"

namespace fuzzyseek {

/// Everything that determines how an image becomes a signature and how the
/// tree is shaped. Queries must be signed with the parameters of the index.
struct BuildParams {
    Palette palette = Palette::standard();
    ColorSpace color_space = ColorSpace::Hsv;
    double dominance_threshold = 0.0;
    std::uint32_t sig_len = kDefaultSignatureLength;
    STreeParams tree;

    SignatureShape shape() const { return {static_cast<std::uint32_t>(palette.size()), sig_len}; }
    void validate() const;
};

FuzzySignature sign_image(const Image& image, const BuildParams& params);

struct ImageRecord {
    ImageRecord(ImageId id, std::string path, FuzzySignature signature);

    ImageId id;
    std::string path;
    FuzzySignature signature;
    WeightVector weights;  // weight_vector(signature)
};

struct RankedImage {
    ImageId image_id;
    std::string path;
    FhdDistribution distance;

    friend bool operator==(const RankedImage&, const RankedImage&) = default;
};

struct QueryResult {
    std::vector<RankedImage> ranked;  // ascending by (fhd_compare, image_id)
    std::size_t candidates_examined = 0;
    std::uint64_t fhd_evaluations = 0;

    friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

/// A single ranking candidate: its id, path and cached weights.
struct Candidate {
    ImageId image_id;
    const std::string* path;
    const WeightVector* weights;
};

/// Scores every candidate against the query, sorts by FHD with ascending
/// image id breaking ties, and keeps the best k.
std::vector<RankedImage> rank_candidates(const WeightVector& query, std::span<const Candidate> candidates,
                                         std::size_t k, const FhdParams& params);

/// Exhaustive FHD ranking over the manifest; the reference the tree is
/// checked against.
QueryResult linear_scan_topk(std::span<const ImageRecord> manifest, const FuzzySignature& query, std::size_t k,
                             const FhdParams& params);

/// Fraction of `truth`'s ids that also appear in `found`.
double recall(const QueryResult& found, const QueryResult& truth);

struct SkippedImage {
    std::string path;
    std::string reason;
};

struct BuildStats {
    std::uint64_t fhd_evaluations = 0;
    double wall_ms = 0.0;
};

/// S-tree plus the manifest of signed images it was built from.
class RetrievalIndex {
public:
    /// Decodes, signs and inserts each image in order. Undecodable images are
    /// recorded in skipped() and left out; throws EmptyIndex if none remain.
    static RetrievalIndex build(std::span<const std::filesystem::path> images, const BuildParams& params);

    /// Same as build() but from already-signed records.
    static RetrievalIndex from_records(std::vector<ImageRecord> records, const BuildParams& params);

    /// Writes the index file and, next to it, "<name>.manifest.jsonl".
    void save(const std::filesystem::path& index_path) const;
    static RetrievalIndex load(const std::filesystem::path& index_path);

    FuzzySignature sign(const std::filesystem::path& image) const;

    QueryResult query_topk(const FuzzySignature& query, std::size_t k, BeamWidth beam) const;
    QueryResult query_topk(const std::filesystem::path& image, std::size_t k, BeamWidth beam) const;
    QueryResult linear_scan_topk(const FuzzySignature& query, std::size_t k) const;
    QueryResult linear_scan_topk(const std::filesystem::path& image, std::size_t k) const;

    const STree& tree() const noexcept { return tree_; }
    const std::vector<ImageRecord>& records() const noexcept { return records_; }
    const BuildParams& params() const noexcept { return params_; }
    const BuildStats& stats() const noexcept { return stats_; }
    const std::vector<SkippedImage>& skipped() const noexcept { return skipped_; }
    const ImageRecord* find(ImageId id) const;

private:
    RetrievalIndex(BuildParams params, STree tree) : params_(std::move(params)), tree_(std::move(tree)) {}

    BuildParams params_;
    STree tree_;
    std::vector<ImageRecord> records_;
    BuildStats stats_;
    std::vector<SkippedImage> skipped_;
};

std::filesystem::path manifest_path_for(const std::filesystem::path& index_path);

/// One JSON object per line: {"id", "path", "signature": [...]}.
std::string encode_manifest(std::span<const ImageRecord> records);
std::vector<ImageRecord> decode_manifest(std::string_view text, SignatureShape shape);

}  // namespace fuzzyseek

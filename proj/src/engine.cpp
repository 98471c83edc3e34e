#include "fuzzyseek/engine.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "fuzzyseek/error.hpp"
#include "fuzzyseek/index_io.hpp"

namespace fuzzyseek {
namespace {

using json = nlohmann::json;

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void require_k(std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
}

}  // namespace

void BuildParams::validate() const {
    if (sig_len == 0) throw Error(ErrorCode::InvalidArgument, "signature length must be positive");
    if (!(dominance_threshold >= 0.0 && dominance_threshold <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "dominance threshold must lie in [0,1]");
    }
    tree.validate();
}

FuzzySignature sign_image(const Image& image, const BuildParams& params) {
    const ColorHistogram h = compute_histogram(image, params.palette, params.color_space, params.dominance_threshold);
    return signature_from_histogram(h, params.sig_len);
}

ImageRecord::ImageRecord(ImageId id_, std::string path_, FuzzySignature signature_)
    : id(id_), path(std::move(path_)), signature(std::move(signature_)), weights(weight_vector(signature)) {}

std::vector<RankedImage> rank_candidates(const WeightVector& query, std::span<const Candidate> candidates,
                                         std::size_t k, const FhdParams& params) {
    std::vector<RankedImage> ranked;
    ranked.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        ranked.push_back({c.image_id, *c.path, fhd(query, *c.weights, params)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedImage& a, const RankedImage& b) {
        const auto order = fhd_compare(a.distance, b.distance);
        if (order != 0) return order < 0;
        return a.image_id < b.image_id;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

QueryResult linear_scan_topk(std::span<const ImageRecord> manifest, const FuzzySignature& query, std::size_t k,
                             const FhdParams& params) {
    require_k(k);
    if (manifest.empty()) throw Error(ErrorCode::EmptyIndex, "manifest is empty");
    const FhdEvalScope evals;
    std::vector<Candidate> candidates;
    candidates.reserve(manifest.size());
    for (const auto& r : manifest) {
        if (r.signature.shape() != query.shape()) {
            throw Error(ErrorCode::DimensionMismatch, "query shape does not match the manifest");
        }
        candidates.push_back({r.id, &r.path, &r.weights});
    }
    QueryResult result;
    result.ranked = rank_candidates(weight_vector(query), candidates, k, params);
    result.candidates_examined = candidates.size();
    result.fhd_evaluations = evals.count();
    return result;
}

double recall(const QueryResult& found, const QueryResult& truth) {
    if (truth.ranked.empty()) return 1.0;
    std::unordered_set<ImageId> ids;
    for (const auto& r : found.ranked) ids.insert(r.image_id);
    std::size_t hits = 0;
    for (const auto& r : truth.ranked) hits += ids.contains(r.image_id) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(truth.ranked.size());
}

RetrievalIndex RetrievalIndex::from_records(std::vector<ImageRecord> records, const BuildParams& params) {
    params.validate();
    const auto start = std::chrono::steady_clock::now();
    const FhdEvalScope evals;
    RetrievalIndex index(params, STree(params.shape(), params.tree));
    for (const auto& r : records) index.tree_.insert(r.signature, r.id, r.path);
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    index.records_ = std::move(records);
    index.stats_.fhd_evaluations = evals.count();
    index.stats_.wall_ms = elapsed_ms(start);
    return index;
}

RetrievalIndex RetrievalIndex::build(std::span<const std::filesystem::path> images, const BuildParams& params) {
    params.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<ImageRecord> records;
    std::vector<SkippedImage> skipped;
    for (const auto& path : images) {
        const std::string name = std::filesystem::absolute(path).lexically_normal().string();
        try {
            records.emplace_back(records.size(), name, sign_image(decode_image(path), params));
        } catch (const Error& e) {
            skipped.push_back({name, e.what()});
        }
    }
    if (records.empty()) throw Error(ErrorCode::EmptyIndex, "no usable images to index");

    RetrievalIndex index = from_records(std::move(records), params);
    index.skipped_ = std::move(skipped);
    index.stats_.wall_ms = elapsed_ms(start);
    return index;
}

const ImageRecord* RetrievalIndex::find(ImageId id) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), id,
                               [](const ImageRecord& r, ImageId v) { return r.id < v; });
    return it != records_.end() && it->id == id ? &*it : nullptr;
}

FuzzySignature RetrievalIndex::sign(const std::filesystem::path& image) const {
    return sign_image(decode_image(image), params_);
}

QueryResult RetrievalIndex::query_topk(const FuzzySignature& query, std::size_t k, BeamWidth beam) const {
    require_k(k);
    if (tree_.empty()) throw Error(ErrorCode::EmptyIndex, "index is empty");
    const FhdEvalScope evals;
    const SearchResult found = tree_.search(query, beam);
    std::vector<Candidate> candidates;
    candidates.reserve(found.candidates.size());
    for (const STreeEntry* e : found.candidates) {
        candidates.push_back({e->leaf().image_id, &e->leaf().path, &e->weights});
    }
    QueryResult result;
    result.ranked = rank_candidates(weight_vector(query), candidates, k, params_.tree.fhd);
    result.candidates_examined = candidates.size();
    result.fhd_evaluations = evals.count();
    return result;
}

QueryResult RetrievalIndex::query_topk(const std::filesystem::path& image, std::size_t k, BeamWidth beam) const {
    return query_topk(sign(image), k, beam);
}

QueryResult RetrievalIndex::linear_scan_topk(const FuzzySignature& query, std::size_t k) const {
    return fuzzyseek::linear_scan_topk(records_, query, k, params_.tree.fhd);
}

QueryResult RetrievalIndex::linear_scan_topk(const std::filesystem::path& image, std::size_t k) const {
    return linear_scan_topk(sign(image), k);
}

std::filesystem::path manifest_path_for(const std::filesystem::path& index_path) {
    std::filesystem::path p = index_path;
    p += ".manifest.jsonl";
    return p;
}

std::string encode_manifest(std::span<const ImageRecord> records) {
    std::string out;
    for (const auto& r : records) {
        json line = {{"id", r.id}, {"path", r.path}, {"signature", r.signature.values()}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::vector<ImageRecord> decode_manifest(std::string_view text, SignatureShape shape) {
    std::vector<ImageRecord> records;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            std::vector<double> values = j.at("signature").get<std::vector<double>>();
            records.emplace_back(j.at("id").get<ImageId>(), j.at("path").get<std::string>(),
                                 FuzzySignature(shape, std::move(values)));
        } catch (const std::exception& e) {
            throw Error(ErrorCode::CorruptIndex, "manifest line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

void RetrievalIndex::save(const std::filesystem::path& index_path) const {
    const std::filesystem::path manifest = manifest_path_for(index_path);
    json skipped = json::array();
    for (const auto& s : skipped_) skipped.push_back({{"path", s.path}, {"reason", s.reason}});
    const json meta = {
        {"manifest", manifest.filename().string()},
        {"color_space", std::string(to_string(params_.color_space))},
        {"dominance_threshold", params_.dominance_threshold},
        {"palette", json::parse(params_.palette.to_json())},
        {"build", {{"fhd_evaluations", stats_.fhd_evaluations}, {"wall_ms", stats_.wall_ms}, {"skipped", skipped}}},
    };
    write_text(manifest, encode_manifest(records_));
    save_index(tree_, index_path, meta.dump());
}

RetrievalIndex RetrievalIndex::load(const std::filesystem::path& index_path) {
    IndexFile file = load_index(index_path);

    BuildParams params;
    json meta;
    try {
        meta = json::parse(file.metadata);
        params.palette = Palette::from_json(meta.at("palette").dump());
        params.color_space = parse_color_space(meta.at("color_space").get<std::string>());
        params.dominance_threshold = meta.at("dominance_threshold").get<double>();
    } catch (const std::exception& e) {
        throw Error(ErrorCode::CorruptIndex, std::string("index metadata: ") + e.what());
    }
    params.sig_len = file.tree.shape().block_len;
    params.tree = file.tree.params();
    if (params.shape() != file.tree.shape()) {
        throw Error(ErrorCode::CorruptIndex, "palette size disagrees with the signature shape");
    }

    RetrievalIndex index(params, std::move(file.tree));
    const std::filesystem::path manifest =
        index_path.parent_path() / meta.value("manifest", manifest_path_for(index_path).filename().string());
    index.records_ = decode_manifest(read_text(manifest), params.shape());
    std::sort(index.records_.begin(), index.records_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });

    if (index.records_.size() != index.tree_.size()) {
        throw Error(ErrorCode::CorruptIndex, "manifest and index disagree on the image count");
    }
    for (const STreeEntry* e : index.tree_.leaf_entries()) {
        const ImageRecord* r = index.find(e->leaf().image_id);
        if (!r || !(r->signature == e->signature)) {
            throw Error(ErrorCode::CorruptIndex, "manifest does not match leaf " + std::to_string(e->leaf().image_id));
        }
    }

    if (const auto build = meta.find("build"); build != meta.end()) {
        index.stats_.fhd_evaluations = build->value("fhd_evaluations", std::uint64_t{0});
        index.stats_.wall_ms = build->value("wall_ms", 0.0);
        for (const auto& s : build->value("skipped", json::array())) {
            index.skipped_.push_back({s.value("path", ""), s.value("reason", "")});
        }
    }
    return index;
}

}  // namespace fuzzyseek

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "fuzzyseek/fhd.hpp"
#include "fuzzyseek/signature.hpp"

namespace fuzzyseek {

using NodeId = std::uint32_t;
using ImageId = std::uint64_t;

/// Node occupancy bounds and the metric used to steer inserts and searches.
struct STreeParams {
    std::uint32_t min_fill = 2;
    std::uint32_t max_fill = 8;
    FhdParams fhd;

    /// Requires 1 <= min_fill <= max_fill / 2.
    void validate() const;
    friend bool operator==(const STreeParams&, const STreeParams&) = default;
};

/// Number of child branches followed per internal node during search.
class BeamWidth {
public:
    constexpr explicit BeamWidth(std::size_t width) : width_(width == 0 ? 1 : width) {}
    static constexpr BeamWidth unbounded() { return BeamWidth(std::numeric_limits<std::size_t>::max()); }

    constexpr bool is_unbounded() const { return width_ == std::numeric_limits<std::size_t>::max(); }
    constexpr std::size_t value() const { return width_; }

private:
    std::size_t width_;
};

struct LeafRef {
    ImageId image_id = 0;
    std::string path;

    friend bool operator==(const LeafRef&, const LeafRef&) = default;
};

/// Internal entries point at a child node; leaf entries name an image.
struct STreeEntry {
    FuzzySignature signature;
    WeightVector weights;  // weight_vector(signature), cached
    std::variant<NodeId, LeafRef> target;

    bool is_leaf_entry() const { return std::holds_alternative<LeafRef>(target); }
    NodeId child() const { return std::get<NodeId>(target); }
    const LeafRef& leaf() const { return std::get<LeafRef>(target); }
};

struct STreeNode {
    bool is_leaf = true;
    std::optional<NodeId> parent;
    std::vector<STreeEntry> entries;
};

enum class ViolationKind {
    FillBounds,
    UnequalLeafDepth,
    ParentSignature,
    StaleWeights,
    EntryKind,
    ParentLink,
    Unreachable,
    DuplicateId,
    LostId,
    ShapeMismatch,
    HeightBound,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    NodeId node;
    std::string detail;
};

struct AuditReport {
    std::vector<Violation> violations;
    std::size_t height = 0;  // node levels; a lone leaf root has height 1
    std::optional<std::size_t> height_bound;
    std::size_t leaf_entries = 0;
    std::size_t node_count = 0;

    bool healthy() const { return violations.empty(); }
};

/// Smallest h >= 1 with base^h >= n; empty when base < 2.
std::optional<std::size_t> ceil_log(std::size_t base, std::size_t n);

struct InsertStats {
    std::uint64_t descent_evals = 0;
    std::uint64_t split_evals = 0;
    std::uint32_t splits = 0;
};

struct SearchResult {
    /// Leaf entries reached, in traversal order. Points into the tree.
    std::vector<const STreeEntry*> candidates;
    std::uint64_t fhd_evaluations = 0;
    std::size_t nodes_visited = 0;
};

/// Balanced multiway tree over fuzzy signatures. Every internal entry holds
/// the disjunction of the signatures in its child, so a parent entry always
/// contains every leaf signature below it.
///
/// Single writer: insert() needs exclusive access, concurrent search() and
/// audit() calls are fine.
class STree {
public:
    STree(SignatureShape shape, STreeParams params);

    /// Descends by minimum FHD, appends to the leaf, refreshes ancestor
    /// signatures and splits on overflow. Throws DuplicateId or
    /// DimensionMismatch.
    InsertStats insert(FuzzySignature signature, ImageId image_id, std::string path = {});

    /// Stack-driven descent. At an internal node the entries whose signature
    /// contains the query are ranked by FHD and the best `beam` children are
    /// pushed; if none contains the query, all entries are ranked instead.
    /// An unbounded beam visits every leaf without evaluating FHD.
    SearchResult search(const FuzzySignature& query, BeamWidth beam) const;

    AuditReport audit() const;

    /// Recomputes the parent entry of `node` as the disjunction of its
    /// entries and continues up to the root.
    void union_signature(NodeId node);

    SignatureShape shape() const noexcept { return shape_; }
    const STreeParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    bool has_id(ImageId id) const { return ids_.contains(id); }
    std::size_t height() const;

    std::optional<NodeId> root() const noexcept { return root_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    const STreeNode& node(NodeId id) const { return nodes_.at(id); }

    /// Leaf entries in depth-first order.
    std::vector<const STreeEntry*> leaf_entries() const;

    /// Node ids in pre-order from the root.
    std::vector<NodeId> preorder() const;

    /// Replaces one entry's signature (and its cached weights) without any
    /// maintenance. For fault-injection in tooling and tests.
    void overwrite_entry_signature(NodeId node, std::size_t entry, FuzzySignature signature);

    /// Assembles a tree from deserialized nodes. Only reference integrity is
    /// checked here (CorruptIndex); run audit() for the full invariants.
    static STree from_nodes(SignatureShape shape, STreeParams params, std::vector<STreeNode> nodes,
                            std::optional<NodeId> root);

private:
    NodeId new_node(bool is_leaf, std::optional<NodeId> parent);
    std::size_t entry_index_in_parent(NodeId node) const;
    FuzzySignature node_union(NodeId node) const;
    void split_node(NodeId node, InsertStats& stats);
    STreeEntry make_entry(FuzzySignature signature, std::variant<NodeId, LeafRef> target) const;

    SignatureShape shape_;
    STreeParams params_;
    std::vector<STreeNode> nodes_;
    std::optional<NodeId> root_;
    std::unordered_set<ImageId> ids_;
};

}  // namespace fuzzyseek

#include "fuzzyseek/stree.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "fuzzyseek/error.hpp"

namespace fuzzyseek {

void STreeParams::validate() const {
    if (min_fill < 1 || std::uint64_t(min_fill) * 2 > max_fill) {
        throw Error(ErrorCode::InvalidArgument, "node bounds require 1 <= min_fill <= max_fill / 2 (got " +
                                                    std::to_string(min_fill) + ", " +
                                                    std::to_string(max_fill) + ")");
    }
    fhd.validate();
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::FillBounds: return "fill-bounds";
    case ViolationKind::UnequalLeafDepth: return "unequal-leaf-depth";
    case ViolationKind::ParentSignature: return "parent-signature";
    case ViolationKind::StaleWeights: return "stale-weights";
    case ViolationKind::EntryKind: return "entry-kind";
    case ViolationKind::ParentLink: return "parent-link";
    case ViolationKind::Unreachable: return "unreachable";
    case ViolationKind::DuplicateId: return "duplicate-id";
    case ViolationKind::LostId: return "lost-id";
    case ViolationKind::ShapeMismatch: return "shape-mismatch";
    case ViolationKind::HeightBound: return "height-bound";
    }
    return "unknown";
}

std::optional<std::size_t> ceil_log(std::size_t base, std::size_t n) {
    if (base < 2) return std::nullopt;
    std::size_t h = 0;
    std::size_t power = 1;
    while (power < n) {
        power = power > std::numeric_limits<std::size_t>::max() / base ? std::numeric_limits<std::size_t>::max()
                                                                      : power * base;
        ++h;
    }
    return std::max<std::size_t>(h, 1);
}

STree::STree(SignatureShape shape, STreeParams params) : shape_(shape), params_(params) {
    params_.validate();
    if (shape_.blocks == 0 || shape_.block_len == 0) {
        throw Error(ErrorCode::InvalidArgument, "signature shape must be non-empty");
    }
}

NodeId STree::new_node(bool is_leaf, std::optional<NodeId> parent) {
    nodes_.push_back(STreeNode{is_leaf, parent, {}});
    return static_cast<NodeId>(nodes_.size() - 1);
}

STreeEntry STree::make_entry(FuzzySignature signature, std::variant<NodeId, LeafRef> target) const {
    WeightVector weights = weight_vector(signature);
    return STreeEntry{std::move(signature), std::move(weights), std::move(target)};
}

std::size_t STree::height() const {
    if (!root_) return 0;
    std::size_t h = 1;
    NodeId v = *root_;
    while (!nodes_[v].is_leaf && !nodes_[v].entries.empty()) {
        v = nodes_[v].entries.front().child();
        ++h;
    }
    return h;
}

std::size_t STree::entry_index_in_parent(NodeId node) const {
    const STreeNode& parent = nodes_[*nodes_[node].parent];
    for (std::size_t i = 0; i < parent.entries.size(); ++i) {
        if (parent.entries[i].child() == node) return i;
    }
    throw Error(ErrorCode::InvalidArgument, "node is not referenced by its parent");
}

FuzzySignature STree::node_union(NodeId node) const {
    FuzzySignature acc(shape_);
    for (const auto& e : nodes_[node].entries) disjoin_into(acc, e.signature);
    return acc;
}

InsertStats STree::insert(FuzzySignature signature, ImageId image_id, std::string path) {
    if (signature.shape() != shape_) {
        throw Error(ErrorCode::DimensionMismatch, "signature shape does not match the tree");
    }
    if (ids_.contains(image_id)) {
        throw Error(ErrorCode::DuplicateId, "image id " + std::to_string(image_id) + " already indexed");
    }

    InsertStats stats;
    if (!root_) root_ = new_node(true, std::nullopt);

    STreeEntry entry = make_entry(std::move(signature), LeafRef{image_id, std::move(path)});
    NodeId v = *root_;
    while (!nodes_[v].is_leaf) {
        const auto& entries = nodes_[v].entries;
        std::size_t best = 0;
        FhdDistribution best_d = fhd(entries[0].weights, entry.weights, params_.fhd);
        for (std::size_t i = 1; i < entries.size(); ++i) {
            FhdDistribution d = fhd(entries[i].weights, entry.weights, params_.fhd);
            if (fhd_compare(d, best_d) < 0) {
                best = i;
                best_d = std::move(d);
            }
        }
        stats.descent_evals += entries.size();
        v = entries[best].child();
    }

    nodes_[v].entries.push_back(std::move(entry));
    ids_.insert(image_id);
    union_signature(v);
    if (nodes_[v].entries.size() > params_.max_fill) split_node(v, stats);
    return stats;
}

void STree::union_signature(NodeId node) {
    NodeId v = node;
    while (nodes_[v].parent) {
        const NodeId parent = *nodes_[v].parent;
        const std::size_t slot = entry_index_in_parent(v);
        FuzzySignature s = node_union(v);
        STreeEntry& pe = nodes_[parent].entries[slot];
        if (pe.signature == s) break;  // ancestors are already up to date
        pe.weights = weight_vector(s);
        pe.signature = std::move(s);
        v = parent;
    }
}

void STree::split_node(NodeId node, InsertStats& stats) {
    ++stats.splits;
    std::vector<STreeEntry> entries = std::move(nodes_[node].entries);
    nodes_[node].entries.clear();
    const std::size_t count = entries.size();

    // Pairwise FHD matrix; reused for the partition step.
    std::vector<std::vector<FhdDistribution>> dist(count, std::vector<FhdDistribution>(count));
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            dist[i][j] = fhd(entries[i].weights, entries[j].weights, params_.fhd);
            dist[j][i] = dist[i][j];
            ++stats.split_evals;
        }
    }

    // Seeds: the farthest pair, first pair in index order on ties.
    std::size_t seed_a = 0;
    std::size_t seed_b = 1;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
            if (fhd_compare(dist[i][j], dist[seed_a][seed_b]) > 0) {
                seed_a = i;
                seed_b = j;
            }
        }
    }

    std::vector<std::size_t> side_a{seed_a};
    std::vector<std::size_t> side_b{seed_b};
    std::size_t remaining = count - 2;
    for (std::size_t i = 0; i < count; ++i) {
        if (i == seed_a || i == seed_b) continue;
        if (side_a.size() + remaining <= params_.min_fill) {
            side_a.push_back(i);
        } else if (side_b.size() + remaining <= params_.min_fill) {
            side_b.push_back(i);
        } else if (fhd_compare(dist[i][seed_a], dist[i][seed_b]) < 0) {
            side_a.push_back(i);
        } else {
            side_b.push_back(i);
        }
        --remaining;
    }
    std::sort(side_a.begin(), side_a.end());
    std::sort(side_b.begin(), side_b.end());

    const bool leaf = nodes_[node].is_leaf;
    const std::optional<NodeId> parent = nodes_[node].parent;
    const NodeId sibling = new_node(leaf, parent);

    for (std::size_t i : side_a) nodes_[node].entries.push_back(std::move(entries[i]));
    for (std::size_t i : side_b) nodes_[sibling].entries.push_back(std::move(entries[i]));
    if (!leaf) {
        for (const auto& e : nodes_[sibling].entries) nodes_[e.child()].parent = sibling;
    }

    STreeEntry entry_a = make_entry(node_union(node), node);
    STreeEntry entry_b = make_entry(node_union(sibling), sibling);

    if (!parent) {
        const NodeId new_root = new_node(false, std::nullopt);
        nodes_[new_root].entries.push_back(std::move(entry_a));
        nodes_[new_root].entries.push_back(std::move(entry_b));
        nodes_[node].parent = new_root;
        nodes_[sibling].parent = new_root;
        root_ = new_root;
        return;
    }

    const std::size_t slot = entry_index_in_parent(node);
    auto& parent_entries = nodes_[*parent].entries;
    parent_entries[slot] = std::move(entry_a);
    parent_entries.insert(parent_entries.begin() + std::ptrdiff_t(slot) + 1, std::move(entry_b));
    union_signature(*parent);
    if (nodes_[*parent].entries.size() > params_.max_fill) split_node(*parent, stats);
}

SearchResult STree::search(const FuzzySignature& query, BeamWidth beam) const {
    SearchResult result;
    if (!root_) return result;
    if (query.shape() != shape_) {
        throw Error(ErrorCode::DimensionMismatch, "query shape does not match the tree");
    }
    const WeightVector query_weights = weight_vector(query);

    std::vector<NodeId> stack{*root_};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        ++result.nodes_visited;
        const auto& entries = nodes_[v].entries;

        if (nodes_[v].is_leaf) {
            for (const auto& e : entries) result.candidates.push_back(&e);
            continue;
        }
        if (beam.is_unbounded()) {
            for (auto it = entries.rbegin(); it != entries.rend(); ++it) stack.push_back(it->child());
            continue;
        }

        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (contains(entries[i].signature, query)) pool.push_back(i);
        }
        if (pool.empty()) {
            pool.resize(entries.size());
            std::iota(pool.begin(), pool.end(), std::size_t{0});
        }

        std::vector<std::pair<FhdDistribution, std::size_t>> ranked;
        ranked.reserve(pool.size());
        for (std::size_t i : pool) ranked.emplace_back(fhd(entries[i].weights, query_weights, params_.fhd), i);
        result.fhd_evaluations += pool.size();
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return fhd_compare(a.first, b.first) < 0; });

        const std::size_t take = std::min(beam.value(), ranked.size());
        // Best child on top of the stack.
        for (std::size_t r = take; r-- > 0;) stack.push_back(entries[ranked[r].second].child());
    }
    return result;
}

std::vector<NodeId> STree::preorder() const {
    std::vector<NodeId> order;
    if (!root_) return order;
    std::vector<NodeId> stack{*root_};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        if (nodes_[v].is_leaf) continue;
        const auto& entries = nodes_[v].entries;
        for (auto it = entries.rbegin(); it != entries.rend(); ++it) stack.push_back(it->child());
    }
    return order;
}

std::vector<const STreeEntry*> STree::leaf_entries() const {
    std::vector<const STreeEntry*> out;
    for (NodeId v : preorder()) {
        if (!nodes_[v].is_leaf) continue;
        for (const auto& e : nodes_[v].entries) out.push_back(&e);
    }
    return out;
}

AuditReport STree::audit() const {
    AuditReport report;
    report.node_count = nodes_.size();
    auto flag = [&](ViolationKind kind, NodeId node, std::string detail) {
        report.violations.push_back({kind, node, std::move(detail)});
    };

    if (!root_) {
        if (!nodes_.empty()) flag(ViolationKind::Unreachable, 0, "nodes present without a root");
        if (!ids_.empty()) flag(ViolationKind::LostId, 0, "ids registered in an empty tree");
        return report;
    }

    std::vector<std::size_t> depth(nodes_.size(), 0);
    std::vector<bool> seen(nodes_.size(), false);
    std::optional<std::size_t> leaf_depth;
    std::unordered_set<ImageId> leaf_ids;

    std::deque<NodeId> queue{*root_};
    seen[*root_] = true;
    depth[*root_] = 1;
    if (nodes_[*root_].parent) flag(ViolationKind::ParentLink, *root_, "root has a parent");

    while (!queue.empty()) {
        const NodeId v = queue.front();
        queue.pop_front();
        const STreeNode& n = nodes_[v];
        const std::size_t fill = n.entries.size();
        const bool is_root = v == *root_;

        std::size_t lo = params_.min_fill;
        if (is_root) lo = n.is_leaf ? 1 : 2;
        if (fill < lo || fill > params_.max_fill) {
            flag(ViolationKind::FillBounds, v,
                 std::to_string(fill) + " entries outside [" + std::to_string(lo) + ", " +
                     std::to_string(params_.max_fill) + "]");
        }

        if (n.is_leaf) {
            if (!leaf_depth) leaf_depth = depth[v];
            if (*leaf_depth != depth[v]) {
                flag(ViolationKind::UnequalLeafDepth, v,
                     "leaf at depth " + std::to_string(depth[v]) + ", expected " + std::to_string(*leaf_depth));
            }
        }

        for (std::size_t i = 0; i < fill; ++i) {
            const STreeEntry& e = n.entries[i];
            if (e.signature.shape() != shape_) {
                flag(ViolationKind::ShapeMismatch, v, "entry " + std::to_string(i) + " has a foreign shape");
                continue;
            }
            if (!(e.weights == weight_vector(e.signature))) {
                flag(ViolationKind::StaleWeights, v, "entry " + std::to_string(i) + " weight cache is stale");
            }
            if (e.is_leaf_entry() != n.is_leaf) {
                flag(ViolationKind::EntryKind, v, "entry " + std::to_string(i) + " kind disagrees with node");
                continue;
            }
            if (n.is_leaf) {
                ++report.leaf_entries;
                if (!leaf_ids.insert(e.leaf().image_id).second) {
                    flag(ViolationKind::DuplicateId, v, "image id " + std::to_string(e.leaf().image_id));
                }
                continue;
            }
            const NodeId c = e.child();
            if (c >= nodes_.size()) {
                flag(ViolationKind::ParentLink, v, "entry " + std::to_string(i) + " points past the node table");
                continue;
            }
            if (seen[c]) {
                flag(ViolationKind::ParentLink, v, "node " + std::to_string(c) + " referenced twice");
                continue;
            }
            seen[c] = true;
            depth[c] = depth[v] + 1;
            if (nodes_[c].parent != v) {
                flag(ViolationKind::ParentLink, c, "parent pointer does not match referencing node");
            }
            if (!(e.signature == node_union(c))) {
                flag(ViolationKind::ParentSignature, v,
                     "entry " + std::to_string(i) + " is not the disjunction of node " + std::to_string(c));
            }
            queue.push_back(c);
        }
        report.height = std::max(report.height, depth[v]);
    }

    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (!seen[v]) flag(ViolationKind::Unreachable, v, "node not reachable from the root");
    }
    for (ImageId id : ids_) {
        if (!leaf_ids.contains(id)) flag(ViolationKind::LostId, 0, "image id " + std::to_string(id) + " missing");
    }
    for (ImageId id : leaf_ids) {
        if (!ids_.contains(id)) flag(ViolationKind::LostId, 0, "image id " + std::to_string(id) + " unregistered");
    }

    report.height_bound = ceil_log(params_.min_fill, report.leaf_entries);
    if (report.height_bound && report.height > *report.height_bound) {
        flag(ViolationKind::HeightBound, *root_,
             "height " + std::to_string(report.height) + " exceeds " + std::to_string(*report.height_bound));
    }
    return report;
}

void STree::overwrite_entry_signature(NodeId node, std::size_t entry, FuzzySignature signature) {
    STreeEntry& e = nodes_.at(node).entries.at(entry);
    e.weights = weight_vector(signature);
    e.signature = std::move(signature);
}

STree STree::from_nodes(SignatureShape shape, STreeParams params, std::vector<STreeNode> nodes,
                        std::optional<NodeId> root) {
    STree tree(shape, params);
    if (root && *root >= nodes.size()) throw Error(ErrorCode::CorruptIndex, "root outside the node table");
    if (!root && !nodes.empty()) throw Error(ErrorCode::CorruptIndex, "nodes present without a root");
    for (auto& n : nodes) n.parent.reset();
    for (NodeId v = 0; v < nodes.size(); ++v) {
        if (!nodes[v].is_leaf && nodes[v].entries.empty()) {
            throw Error(ErrorCode::CorruptIndex, "internal node without entries");
        }
        for (auto& e : nodes[v].entries) {
            if (e.is_leaf_entry() != nodes[v].is_leaf) {
                throw Error(ErrorCode::CorruptIndex, "entry kind disagrees with its node");
            }
            if (e.signature.shape() != shape) throw Error(ErrorCode::CorruptIndex, "entry has a foreign shape");
            if (e.is_leaf_entry()) {
                if (!tree.ids_.insert(e.leaf().image_id).second) {
                    throw Error(ErrorCode::CorruptIndex, "duplicate image id in index");
                }
            } else {
                const NodeId c = e.child();
                if (c >= nodes.size() || c == v || (root && c == *root)) {
                    throw Error(ErrorCode::CorruptIndex, "child reference out of range");
                }
                if (nodes[c].parent) throw Error(ErrorCode::CorruptIndex, "node referenced twice");
                nodes[c].parent = v;
            }
            e.weights = weight_vector(e.signature);
        }
    }
    tree.nodes_ = std::move(nodes);
    tree.root_ = root;
    return tree;
}

}  // namespace fuzzyseek

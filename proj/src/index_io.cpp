#include "fuzzyseek/index_io.hpp"

#include <fstream>
#include <iterator>
#include <unordered_map>

#include <zlib.h>

#include "bytes.hpp"
#include "fuzzyseek/error.hpp"

namespace fuzzyseek {
namespace {

constexpr char kMagic[4] = {'F', 'S', 'T', 'R'};
constexpr std::size_t kHeaderSize = 4 + 4 * 5 + 8 + 8 + 4;
constexpr std::uint8_t kFlagNormalized = 0x1;

std::uint32_t crc32_of(std::span<const unsigned char> data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed large payloads in pieces.
    while (!data.empty()) {
        const std::size_t n = std::min<std::size_t>(data.size(), 1u << 30);
        crc = crc32(crc, data.data(), static_cast<uInt>(n));
        data = data.subspan(n);
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string serialize_index(const STree& tree, std::string_view metadata) {
    const std::vector<NodeId> order = tree.preorder();
    std::unordered_map<NodeId, std::uint64_t> ordinal;
    for (std::size_t i = 0; i < order.size(); ++i) ordinal[order[i]] = i;

    std::string payload;
    bytes::put_uint<std::uint8_t>(payload, tree.params().fhd.normalize ? kFlagNormalized : 0);
    bytes::put_string(payload, metadata);
    for (NodeId v : order) {
        const STreeNode& node = tree.node(v);
        bytes::put_uint<std::uint8_t>(payload, node.is_leaf ? 1 : 0);
        bytes::put_uint<std::uint32_t>(payload, static_cast<std::uint32_t>(node.entries.size()));
        for (const auto& e : node.entries) {
            append_signature(payload, e.signature);
            if (node.is_leaf) {
                bytes::put_uint<std::uint64_t>(payload, e.leaf().image_id);
                bytes::put_string(payload, e.leaf().path);
            } else {
                bytes::put_uint<std::uint64_t>(payload, ordinal.at(e.child()));
            }
        }
    }

    std::string out(kMagic, sizeof kMagic);
    bytes::put_uint<std::uint32_t>(out, kIndexFormatVersion);
    bytes::put_uint<std::uint32_t>(out, tree.shape().blocks);
    bytes::put_uint<std::uint32_t>(out, tree.shape().block_len);
    bytes::put_uint<std::uint32_t>(out, tree.params().min_fill);
    bytes::put_uint<std::uint32_t>(out, tree.params().max_fill);
    bytes::put_f64(out, tree.params().fhd.alpha);
    bytes::put_uint<std::uint64_t>(out, order.size());
    bytes::put_uint<std::uint32_t>(out, crc32_of(bytes::as_bytes(payload)));
    out += payload;
    return out;
}

IndexFile deserialize_index(std::span<const unsigned char> in) {
    if (in.size() < kHeaderSize) throw Error(ErrorCode::CorruptIndex, "file shorter than the index header");
    if (!std::equal(std::begin(kMagic), std::end(kMagic), in.begin())) {
        throw Error(ErrorCode::CorruptIndex, "bad magic");
    }
    std::size_t pos = 4;
    const auto version = bytes::get_uint<std::uint32_t>(in, pos);
    if (version != kIndexFormatVersion) {
        throw Error(ErrorCode::FormatVersionMismatch, "index format version " + std::to_string(version) +
                                                          ", expected " + std::to_string(kIndexFormatVersion));
    }
    SignatureShape shape;
    shape.blocks = bytes::get_uint<std::uint32_t>(in, pos);
    shape.block_len = bytes::get_uint<std::uint32_t>(in, pos);
    STreeParams params;
    params.min_fill = bytes::get_uint<std::uint32_t>(in, pos);
    params.max_fill = bytes::get_uint<std::uint32_t>(in, pos);
    params.fhd.alpha = bytes::get_f64(in, pos);
    const auto node_count = bytes::get_uint<std::uint64_t>(in, pos);
    const auto checksum = bytes::get_uint<std::uint32_t>(in, pos);

    const auto payload = in.subspan(pos);
    if (crc32_of(payload) != checksum) throw Error(ErrorCode::CorruptIndex, "checksum mismatch");

    pos = 0;
    const auto flags = bytes::get_uint<std::uint8_t>(payload, pos);
    params.fhd.normalize = (flags & kFlagNormalized) != 0;
    std::string metadata = bytes::get_string(payload, pos);

    // Each node needs at least 5 bytes, which bounds a hostile count.
    if (node_count > payload.size() / 5 + 1) throw Error(ErrorCode::CorruptIndex, "node count too large");
    std::vector<STreeNode> nodes(node_count);
    for (auto& node : nodes) {
        node.is_leaf = bytes::get_uint<std::uint8_t>(payload, pos) != 0;
        const auto entries = bytes::get_uint<std::uint32_t>(payload, pos);
        for (std::uint32_t i = 0; i < entries; ++i) {
            STreeEntry e;
            e.signature = read_signature(payload, pos);
            if (node.is_leaf) {
                LeafRef leaf;
                leaf.image_id = bytes::get_uint<std::uint64_t>(payload, pos);
                leaf.path = bytes::get_string(payload, pos);
                e.target = std::move(leaf);
            } else {
                const auto child = bytes::get_uint<std::uint64_t>(payload, pos);
                if (child >= node_count) throw Error(ErrorCode::CorruptIndex, "child ordinal out of range");
                e.target = static_cast<NodeId>(child);
            }
            node.entries.push_back(std::move(e));
        }
    }
    if (pos != payload.size()) throw Error(ErrorCode::CorruptIndex, "trailing bytes after the last node");

    try {
        params.validate();
        std::optional<NodeId> root;
        if (!nodes.empty()) root = 0;
        return IndexFile{STree::from_nodes(shape, params, std::move(nodes), root), std::move(metadata)};
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptIndex) throw;
        throw Error(ErrorCode::CorruptIndex, e.message());
    }
}

void save_index(const STree& tree, const std::filesystem::path& path, std::string_view metadata) {
    const std::string data = serialize_index(tree, metadata);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write index " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

IndexFile load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open index " + path.string());
    const std::vector<unsigned char> data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return deserialize_index(data);
}

}  // namespace fuzzyseek

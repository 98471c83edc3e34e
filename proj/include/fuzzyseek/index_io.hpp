#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include "fuzzyseek/stree.hpp"

namespace fuzzyseek {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Layout (little-endian):
///   "FSTR", version u32, blocks u32, block_len u32, min_fill u32,
///   max_fill u32, alpha f64, node count u64, CRC32 of the payload u32;
/// payload:
///   extension block: flags u8 (bit 0 = normalized FHD), u32-prefixed
///   UTF-8 metadata chosen by the caller;
///   nodes in pre-order: is_leaf u8, entry count u32, entries. A leaf entry
///   is a signature, image id u64 and u32-prefixed path; an internal entry a
///   signature and the child's pre-order ordinal u64.
struct IndexFile {
    STree tree;
    std::string metadata;
};

std::string serialize_index(const STree& tree, std::string_view metadata = {});
/// Throws FormatVersionMismatch or CorruptIndex.
IndexFile deserialize_index(std::span<const unsigned char> bytes);

void save_index(const STree& tree, const std::filesystem::path& path, std::string_view metadata = {});
IndexFile load_index(const std::filesystem::path& path);

}  // namespace fuzzyseek

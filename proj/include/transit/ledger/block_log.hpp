#pragma once

#include "transit/ledger/channel.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace transit {

/// Block log format: one canonical JSON object per line (sorted keys, no
/// insignificant whitespace, digests as lowercase hex).
void write_block_log(std::ostream& out, std::span<const Block> blocks);
void write_block_log(const std::filesystem::path& path, std::span<const Block> blocks);
void append_block(const std::filesystem::path& path, const Block& block);

/// Throws malformed-log on unparsable or non-canonical lines.
std::vector<Block> read_block_log(std::istream& in);
std::vector<Block> read_block_log(const std::filesystem::path& path);

/// Reads and replays a log, returning the final state digest.
/// Throws broken-hash-chain or malformed-log.
Digest verify_block_log(const std::filesystem::path& path);

/// Appends each delivered event of `channel` as one JSON line to `path`.
void stream_events_to(Channel& channel, std::filesystem::path path);

}  // namespace transit

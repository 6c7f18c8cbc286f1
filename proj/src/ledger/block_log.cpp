#include "transit/ledger/block_log.hpp"

#include "transit/common/error.hpp"

#include <fstream>
#include <istream>
#include <memory>
#include <ostream>

namespace transit {

void write_block_log(std::ostream& out, std::span<const Block> blocks) {
    for (const auto& b : blocks) out << canonical_line(b) << '\n';
}

void write_block_log(const std::filesystem::path& path, std::span<const Block> blocks) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
    write_block_log(out, blocks);
    if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

void append_block(const std::filesystem::path& path, const Block& block) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw Error(Errc::io_error, "cannot append to " + path.string());
    out << canonical_line(block) << '\n';
    if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

std::vector<Block> read_block_log(std::istream& in) {
    std::vector<Block> blocks;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto where = "line " + std::to_string(lineno);
        Block b;
        try {
            b = block_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::malformed_log, where + ": " + e.what());
        } catch (const Error& e) {
            throw Error(Errc::malformed_log, where + ": " + e.what());
        }
        if (canonical_line(b) != line) throw Error(Errc::malformed_log, where + ": not in canonical form");
        blocks.push_back(std::move(b));
    }
    if (!in.eof()) throw Error(Errc::io_error, "read failed");
    return blocks;
}

std::vector<Block> read_block_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
    return read_block_log(in);
}

Digest verify_block_log(const std::filesystem::path& path) {
    auto blocks = read_block_log(path);
    return replay(blocks).hash();
}

void stream_events_to(Channel& channel, std::filesystem::path path) {
    auto out = std::make_shared<std::ofstream>(path, std::ios::binary | std::ios::app);
    if (!*out) throw Error(Errc::io_error, "cannot open " + path.string());
    channel.subscribe([out](const Event& e) {
        *out << to_json(e).dump() << '\n';
        out->flush();
    });
}

}  // namespace transit

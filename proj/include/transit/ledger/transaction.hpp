#pragma once

#include "transit/common/clock.hpp"
#include "transit/common/digest.hpp"
#include "transit/ledger/world_state.hpp"

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace transit {

using TxId = std::string;

struct Invocation {
    std::string contract;
    std::string op;
    nlohmann::json args = nlohmann::json::object();

    friend bool operator==(const Invocation&, const Invocation&) = default;
};

struct Event {
    std::string name;
    std::string channel;
    nlohmann::json payload = nlohmann::json::object();
    TxId emitting_tx;

    friend bool operator==(const Event&, const Event&) = default;
};

/// A read of `key` observed at `version`; nullopt means the key was absent.
struct ReadEntry {
    std::string key;
    std::optional<Version> version;

    friend bool operator==(const ReadEntry&, const ReadEntry&) = default;
};

/// A blind write; nullopt value deletes the key.
struct WriteEntry {
    std::string key;
    std::optional<std::string> value;

    friend bool operator==(const WriteEntry&, const WriteEntry&) = default;
};

/// Commutative increment of an integer-valued key, validated at commit
/// against the then-current value instead of a read version. Absent keys
/// count as zero.
struct DeltaEntry {
    std::string key;
    std::int64_t amount = 0;
    std::optional<std::int64_t> min;
    std::optional<std::int64_t> max;

    friend bool operator==(const DeltaEntry&, const DeltaEntry&) = default;
};

/// Keys are distinct within each list and the lists are key-sorted.
struct ReadWriteSet {
    std::vector<ReadEntry> reads;
    std::vector<WriteEntry> writes;
    std::vector<DeltaEntry> deltas;
    std::vector<Event> events;  // channel/emitting_tx filled in at submit

    bool empty() const { return reads.empty() && writes.empty() && deltas.empty() && events.empty(); }

    friend bool operator==(const ReadWriteSet&, const ReadWriteSet&) = default;
};

enum class Validity { valid, mvcc_conflict, endorsement_error };

std::string_view to_string(Validity v) noexcept;
Validity parse_validity(std::string_view s);

struct TransactionRecord {
    TxId tx_id;
    std::string channel;
    std::string submitter;
    Invocation invocation;
    ReadWriteSet rwset;
    nlohmann::json result;          // contract return value (null on error)
    std::string error;              // endorsement failure code, empty otherwise
    Millis submit_time = 0;
    Millis commit_time = 0;
    std::optional<Validity> validity;  // assigned once, at commit

    friend bool operator==(const TransactionRecord&, const TransactionRecord&) = default;
};

struct ChannelConfig {
    std::string name;
    std::string organisation;
    std::vector<std::string> companies;

    friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

struct Block {
    std::uint64_t height = 0;
    std::string channel;
    std::vector<TransactionRecord> transactions;
    Digest prev_hash;
    Digest state_hash;  // world state digest after applying this block
    std::optional<ChannelConfig> config;  // genesis only
    Digest hash;

    /// Digest over (height, channel, prev_hash, canonical transactions,
    /// state_hash, config).
    Digest compute_hash() const;

    friend bool operator==(const Block&, const Block&) = default;
};

nlohmann::json to_json(const Invocation& inv);
Invocation invocation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReadWriteSet& rw);
ReadWriteSet rwset_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TransactionRecord& tx);
TransactionRecord transaction_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChannelConfig& c);
ChannelConfig channel_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Block& b);
Block block_from_json(const nlohmann::json& j);

/// One compact JSON object, keys in sorted (canonical) order.
std::string canonical_line(const Block& b);

}  // namespace transit

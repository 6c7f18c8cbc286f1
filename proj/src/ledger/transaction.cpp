#include "transit/ledger/transaction.hpp"

#include "transit/common/error.hpp"

namespace transit {

using nlohmann::json;

std::string_view to_string(Validity v) noexcept {
    switch (v) {
    case Validity::valid: return "valid";
    case Validity::mvcc_conflict: return "mvcc-conflict";
    case Validity::endorsement_error: return "endorsement-error";
    }
    return "?";
}

Validity parse_validity(std::string_view s) {
    if (s == "valid") return Validity::valid;
    if (s == "mvcc-conflict") return Validity::mvcc_conflict;
    if (s == "endorsement-error") return Validity::endorsement_error;
    throw Error(Errc::malformed_log, "unknown validity '" + std::string(s) + "'");
}

json to_json(const Invocation& inv) {
    return json{{"contract", inv.contract}, {"op", inv.op}, {"args", inv.args}};
}

Invocation invocation_from_json(const json& j) {
    return Invocation{j.at("contract").get<std::string>(), j.at("op").get<std::string>(),
                      j.at("args")};
}

json to_json(const Event& e) {
    return json{{"name", e.name}, {"channel", e.channel}, {"payload", e.payload},
                {"tx", e.emitting_tx}};
}

Event event_from_json(const json& j) {
    return Event{j.at("name").get<std::string>(), j.at("channel").get<std::string>(),
                 j.at("payload"), j.at("tx").get<std::string>()};
}

namespace {

json version_json(const std::optional<Version>& v) {
    if (!v) return nullptr;
    return json::array({v->block, v->tx});
}

std::optional<Version> version_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return Version{j.at(0).get<std::uint64_t>(), j.at(1).get<std::uint32_t>()};
}

json opt_int(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::int64_t> opt_int_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::int64_t>();
}

}  // namespace

json to_json(const ReadWriteSet& rw) {
    json reads = json::array(), writes = json::array(), deltas = json::array(),
         events = json::array();
    for (const auto& r : rw.reads) reads.push_back({{"key", r.key}, {"version", version_json(r.version)}});
    for (const auto& w : rw.writes)
        writes.push_back({{"key", w.key}, {"value", w.value ? json(*w.value) : json(nullptr)}});
    for (const auto& d : rw.deltas)
        deltas.push_back({{"key", d.key}, {"amount", d.amount}, {"min", opt_int(d.min)},
                          {"max", opt_int(d.max)}});
    for (const auto& e : rw.events) events.push_back(to_json(e));
    return json{{"reads", reads}, {"writes", writes}, {"deltas", deltas}, {"events", events}};
}

ReadWriteSet rwset_from_json(const json& j) {
    ReadWriteSet rw;
    for (const auto& r : j.at("reads"))
        rw.reads.push_back({r.at("key").get<std::string>(), version_from(r.at("version"))});
    for (const auto& w : j.at("writes")) {
        WriteEntry e{w.at("key").get<std::string>(), std::nullopt};
        if (!w.at("value").is_null()) e.value = w["value"].get<std::string>();
        rw.writes.push_back(std::move(e));
    }
    for (const auto& d : j.at("deltas"))
        rw.deltas.push_back({d.at("key").get<std::string>(), d.at("amount").get<std::int64_t>(),
                             opt_int_from(d.at("min")), opt_int_from(d.at("max"))});
    for (const auto& e : j.at("events")) rw.events.push_back(event_from_json(e));
    return rw;
}

json to_json(const TransactionRecord& tx) {
    return json{{"tx_id", tx.tx_id},
                {"channel", tx.channel},
                {"submitter", tx.submitter},
                {"invocation", to_json(tx.invocation)},
                {"rwset", to_json(tx.rwset)},
                {"result", tx.result},
                {"error", tx.error},
                {"submit_time", tx.submit_time},
                {"commit_time", tx.commit_time},
                {"validity", tx.validity ? json(to_string(*tx.validity)) : json(nullptr)}};
}

TransactionRecord transaction_from_json(const json& j) {
    TransactionRecord tx;
    tx.tx_id = j.at("tx_id").get<std::string>();
    tx.channel = j.at("channel").get<std::string>();
    tx.submitter = j.at("submitter").get<std::string>();
    tx.invocation = invocation_from_json(j.at("invocation"));
    tx.rwset = rwset_from_json(j.at("rwset"));
    tx.result = j.at("result");
    tx.error = j.at("error").get<std::string>();
    tx.submit_time = j.at("submit_time").get<Millis>();
    tx.commit_time = j.at("commit_time").get<Millis>();
    if (!j.at("validity").is_null()) tx.validity = parse_validity(j["validity"].get<std::string>());
    return tx;
}

json to_json(const ChannelConfig& c) {
    return json{{"name", c.name}, {"organisation", c.organisation}, {"companies", c.companies}};
}

ChannelConfig channel_config_from_json(const json& j) {
    return ChannelConfig{j.at("name").get<std::string>(), j.at("organisation").get<std::string>(),
                         j.at("companies").get<std::vector<std::string>>()};
}

Digest Block::compute_hash() const {
    json txs = json::array();
    for (const auto& tx : transactions) txs.push_back(to_json(tx));
    Sha256 h;
    h.update("transit/block/v1");
    h.update_u64(height);
    h.update_field(channel);
    h.update_field(std::string_view(reinterpret_cast<const char*>(prev_hash.bytes().data()), 32));
    h.update_field(txs.dump());
    h.update_field(std::string_view(reinterpret_cast<const char*>(state_hash.bytes().data()), 32));
    h.update_field(config ? to_json(*config).dump() : std::string());
    return h.finish();
}

json to_json(const Block& b) {
    json txs = json::array();
    for (const auto& tx : b.transactions) txs.push_back(to_json(tx));
    json j{{"height", b.height},
           {"channel", b.channel},
           {"prev_hash", b.prev_hash.hex()},
           {"state_hash", b.state_hash.hex()},
           {"transactions", txs},
           {"hash", b.hash.hex()}};
    j["config"] = b.config ? to_json(*b.config) : json(nullptr);
    return j;
}

Block block_from_json(const json& j) {
    Block b;
    b.height = j.at("height").get<std::uint64_t>();
    b.channel = j.at("channel").get<std::string>();
    b.prev_hash = Digest::from_hex(j.at("prev_hash").get<std::string>());
    b.state_hash = Digest::from_hex(j.at("state_hash").get<std::string>());
    for (const auto& tx : j.at("transactions")) b.transactions.push_back(transaction_from_json(tx));
    if (!j.at("config").is_null()) b.config = channel_config_from_json(j["config"]);
    b.hash = Digest::from_hex(j.at("hash").get<std::string>());
    return b;
}

std::string canonical_line(const Block& b) { return to_json(b).dump(); }

}  // namespace transit

#pragma once

#include "transit/common/clock.hpp"
#include "transit/ledger/principal.hpp"
#include "transit/ledger/transaction.hpp"
#include "transit/ledger/world_state.hpp"

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

namespace transit {

class TxContext;

/// Chaincode. Implementations are stateless: all state lives in the world
/// state and is reached through the TxContext, so invoke() is a pure
/// function from (snapshot, invocation) to a read-write set plus result.
class Contract {
public:
    virtual ~Contract() = default;
    virtual std::string_view name() const = 0;
    /// Throws ContractError on business-rule failures.
    virtual nlohmann::json invoke(TxContext& ctx, std::string_view op,
                                  const nlohmann::json& args) const = 0;
};

using ContractSet = std::map<std::string, std::shared_ptr<const Contract>, std::less<>>;

/// Execution context for one transaction: records reads against a world
/// state snapshot and buffers writes, counter deltas and events. Keys passed
/// in are local to the executing contract and get its namespace prefix.
class TxContext {
public:
    TxContext(const WorldState& snapshot, const Directory& directory, const ChannelConfig& channel,
              const ContractSet& contracts, Principal submitter, Millis now);

    std::optional<std::string> get(std::string_view key);
    void put(std::string_view key, std::string value);
    void erase(std::string_view key);

    /// Integer value of a counter key (absent = 0) including this
    /// transaction's own deltas. If the transaction never adds to the key the
    /// observation becomes an ordinary versioned read.
    std::int64_t counter(std::string_view key);
    /// Adds `amount`; at commit the resulting value must lie in [min, max].
    void add(std::string_view key, std::int64_t amount, std::optional<std::int64_t> min = {},
             std::optional<std::int64_t> max = {});

    void emit(std::string name, nlohmann::json payload);

    /// Cross-contract call inside the same transaction. If the callee throws,
    /// its buffered writes, deltas and events are discarded; reads remain.
    nlohmann::json call(std::string_view contract, std::string_view op, const nlohmann::json& args);

    const Principal& submitter() const noexcept { return submitter_; }
    Millis now() const noexcept { return now_; }
    const ChannelConfig& channel() const noexcept { return channel_; }
    const Directory& directory() const noexcept { return directory_; }
    std::string_view contract() const noexcept { return current_; }
    /// Name of the contract that issued call(), empty at top level.
    std::string_view caller_contract() const noexcept { return caller_; }

    ReadWriteSet finish() &&;

private:
    friend class Channel;

    std::string full_key(std::string_view key) const;
    void observe(const std::string& full);

    const WorldState& snapshot_;
    const Directory& directory_;
    const ChannelConfig& channel_;
    const ContractSet& contracts_;
    Principal submitter_;
    Millis now_;
    std::string current_;
    std::string caller_;

    std::map<std::string, std::optional<Version>> reads_;
    std::map<std::string, std::optional<std::string>> writes_;
    std::map<std::string, DeltaEntry> deltas_;
    std::map<std::string, std::int64_t> counters_seen_;  // key -> snapshot value
    std::vector<Event> events_;
};

}  // namespace transit

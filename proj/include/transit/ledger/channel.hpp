#pragma once

#include "transit/common/clock.hpp"
#include "transit/ledger/contract.hpp"
#include "transit/ledger/principal.hpp"
#include "transit/ledger/transaction.hpp"
#include "transit/ledger/world_state.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

namespace transit {

struct LedgerOptions {
    std::size_t block_size = 50;
};

/// One hash-chained ledger running execute -> order -> validate -> commit.
///
/// submit() endorses the invocation against the committed state under a
/// shared lock, so endorsements may run concurrently. commit_block() takes
/// pending transactions in FIFO order and validates each one against the
/// cumulative state: every read must still be at its observed version and
/// every counter delta must land inside its bounds.
class Channel {
public:
    using Listener = std::function<void(const Event&)>;

    Channel(ChannelConfig config, const Directory& directory, ContractSet contracts,
            LedgerOptions options = {});

    /// Rebuilds a channel from an exported block log (verified first).
    static std::unique_ptr<Channel> restore(std::span<const Block> blocks,
                                            const Directory& directory, ContractSet contracts,
                                            LedgerOptions options);

    Channel(const Channel&) = delete;
    Channel& operator=(const Channel&) = delete;

    const ChannelConfig& config() const noexcept { return config_; }
    const std::string& name() const noexcept { return config_.name; }
    const LedgerOptions& options() const noexcept { return options_; }
    bool has_contract(std::string_view name) const { return contracts_.count(name) != 0; }

    /// Members are the organisation, its transport companies, principals
    /// that belong to the organisation, and network admins.
    bool is_member(const Principal& p) const;

    /// Throws unknown-contract / non-member-submitter / unknown-principal.
    /// Contract failures do not throw: they are recorded and the transaction
    /// commits as endorsement-error.
    TxId submit(std::string_view submitter, Invocation invocation, Millis now);

    /// Orders up to min(block_size, max_txs) pending transactions into a new
    /// block. Returns nullopt (and appends nothing) when nothing is pending.
    std::optional<Block> commit_block(Millis now,
                                      std::size_t max_txs = std::numeric_limits<std::size_t>::max());

    /// Read-only execution against committed state (nothing is submitted).
    nlohmann::json evaluate(std::string_view submitter, const Invocation& invocation,
                            Millis now) const;

    /// Committed value of a full ("contract/key") key; throws unknown-key.
    std::string query(std::string_view key) const;
    std::optional<std::string> try_query(std::string_view key) const;

    Digest state_hash() const;
    WorldState snapshot() const;
    std::vector<Block> blocks() const;
    Block block(std::uint64_t height) const;
    std::uint64_t height() const;
    std::size_t pending_count() const;
    Millis oldest_pending_submit() const;  // requires pending_count() > 0

    std::optional<TransactionRecord> transaction(const TxId& id) const;
    /// Events of valid transactions, in commit order.
    std::vector<Event> events() const;

    void subscribe(Listener listener);

private:
    struct Restore {};
    Channel(Restore, ChannelConfig config, const Directory& directory, ContractSet contracts,
            LedgerOptions options);

    void append_committed(Block block);

    const ChannelConfig config_;
    const Directory& directory_;
    const ContractSet contracts_;
    const LedgerOptions options_;

    mutable std::mutex commit_mu_;  // serializes ordering + validation
    mutable std::shared_mutex state_mu_;
    WorldState state_;
    std::vector<Block> blocks_;
    std::unordered_map<TxId, std::pair<std::size_t, std::size_t>> tx_index_;
    std::vector<Event> events_;

    mutable std::mutex pending_mu_;
    std::deque<TransactionRecord> pending_;
    std::uint64_t next_seq_ = 1;

    std::mutex listeners_mu_;
    std::vector<Listener> listeners_;
};

/// Validates one transaction against `state` and applies it when valid.
Validity validate_and_apply(WorldState& state, const TransactionRecord& tx, Version at,
                            const ContractSet* contracts = nullptr);

/// Verifies the hash chain of `blocks` (genesis first) and re-applies every
/// transaction. Throws broken-hash-chain on any link, digest or state-digest
/// mismatch.
WorldState replay(std::span<const Block> blocks);

Block make_genesis(const ChannelConfig& config);

}  // namespace transit

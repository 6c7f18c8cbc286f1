#include "transit/ledger/channel.hpp"

#include "transit/common/error.hpp"

#include <charconv>
#include <stdexcept>

namespace transit {

namespace {

std::int64_t counter_value(const WorldState& state, const std::string& key) {
    const auto* v = state.find(key);
    if (!v) return 0;
    std::int64_t out = 0;
    auto [p, ec] = std::from_chars(v->value.data(), v->value.data() + v->value.size(), out);
    if (ec != std::errc() || p != v->value.data() + v->value.size())
        throw std::logic_error("counter key " + key + " holds a non-integer value");
    return out;
}

bool in_namespace(const std::string& key, const ContractSet& contracts) {
    auto slash = key.find('/');
    return slash != std::string::npos && contracts.count(std::string_view(key).substr(0, slash));
}

}  // namespace

Validity validate_and_apply(WorldState& state, const TransactionRecord& tx, Version at,
                            const ContractSet* contracts) {
    if (!tx.error.empty()) return Validity::endorsement_error;
    const auto& rw = tx.rwset;

    if (contracts) {
        // Channel isolation: every touched key lives in a contract deployed here.
        for (const auto& r : rw.reads)
            if (!in_namespace(r.key, *contracts)) return Validity::endorsement_error;
        for (const auto& w : rw.writes)
            if (!in_namespace(w.key, *contracts)) return Validity::endorsement_error;
        for (const auto& d : rw.deltas)
            if (!in_namespace(d.key, *contracts)) return Validity::endorsement_error;
    }

    for (const auto& r : rw.reads)
        if (state.version_of(r.key) != r.version) return Validity::mvcc_conflict;

    std::vector<std::int64_t> next;
    next.reserve(rw.deltas.size());
    for (const auto& d : rw.deltas) {
        const auto v = counter_value(state, d.key) + d.amount;
        if ((d.min && v < *d.min) || (d.max && v > *d.max)) return Validity::mvcc_conflict;
        next.push_back(v);
    }

    for (const auto& w : rw.writes) {
        if (w.value)
            state.put(w.key, *w.value, at);
        else
            state.erase(w.key);
    }
    for (std::size_t i = 0; i < rw.deltas.size(); ++i)
        state.put(rw.deltas[i].key, std::to_string(next[i]), at);
    return Validity::valid;
}

Block make_genesis(const ChannelConfig& config) {
    Block g;
    g.height = 0;
    g.channel = config.name;
    g.config = config;
    g.state_hash = WorldState().hash();
    g.hash = g.compute_hash();
    return g;
}

WorldState replay(std::span<const Block> blocks) {
    if (blocks.empty()) throw Error(Errc::broken_hash_chain, "empty block log");
    WorldState state;
    const Block* prev = nullptr;
    for (const auto& b : blocks) {
        const auto where = "block " + std::to_string(b.height);
        if (b.compute_hash() != b.hash) throw Error(Errc::broken_hash_chain, where + ": digest mismatch");
        if (!prev) {
            if (b.height != 0 || !b.prev_hash.is_zero() || !b.config || !b.transactions.empty())
                throw Error(Errc::broken_hash_chain, where + ": bad genesis");
        } else {
            if (b.height != prev->height + 1 || b.prev_hash != prev->hash || b.config ||
                b.channel != prev->channel)
                throw Error(Errc::broken_hash_chain, where + ": broken link");
        }
        for (std::size_t i = 0; i < b.transactions.size(); ++i) {
            const auto& tx = b.transactions[i];
            if (!tx.validity || tx.channel != b.channel || tx.commit_time < tx.submit_time)
                throw Error(Errc::broken_hash_chain, where + ": bad transaction record " + tx.tx_id);
            auto v = validate_and_apply(state, tx, Version{b.height, static_cast<std::uint32_t>(i)});
            if (v != *tx.validity)
                throw Error(Errc::broken_hash_chain,
                            where + ": validity of " + tx.tx_id + " does not replay");
        }
        if (state.hash() != b.state_hash)
            throw Error(Errc::broken_hash_chain, where + ": state digest mismatch");
        prev = &b;
    }
    return state;
}

Channel::Channel(ChannelConfig config, const Directory& directory, ContractSet contracts,
                 LedgerOptions options)
    : config_(std::move(config)), directory_(directory), contracts_(std::move(contracts)),
      options_(options) {
    if (options_.block_size == 0) throw Error(Errc::invalid_argument, "block size must be positive");
    append_committed(make_genesis(config_));
}

Channel::Channel(Restore, ChannelConfig config, const Directory& directory, ContractSet contracts,
                 LedgerOptions options)
    : config_(std::move(config)), directory_(directory), contracts_(std::move(contracts)),
      options_(options) {}

std::unique_ptr<Channel> Channel::restore(std::span<const Block> blocks, const Directory& directory,
                                          ContractSet contracts, LedgerOptions options) {
    auto state = replay(blocks);
    auto ch = std::unique_ptr<Channel>(
        new Channel(Restore{}, *blocks.front().config, directory, std::move(contracts), options));
    for (const auto& b : blocks) {
        ch->next_seq_ += b.transactions.size();
        ch->append_committed(b);
    }
    ch->state_ = std::move(state);
    return ch;
}

void Channel::append_committed(Block block) {
    const auto bi = blocks_.size();
    for (std::size_t i = 0; i < block.transactions.size(); ++i) {
        const auto& tx = block.transactions[i];
        tx_index_.emplace(tx.tx_id, std::make_pair(bi, i));
        if (tx.validity == Validity::valid)
            for (const auto& e : tx.rwset.events) events_.push_back(e);
    }
    blocks_.push_back(std::move(block));
}

bool Channel::is_member(const Principal& p) const {
    if (p.kind == PrincipalKind::network_admin) return true;
    if (p.belongs_to(config_.organisation)) return true;
    for (const auto& c : config_.companies)
        if (p.id == c) return true;
    return false;
}

TxId Channel::submit(std::string_view submitter, Invocation invocation, Millis now) {
    auto contract = contracts_.find(invocation.contract);
    if (contract == contracts_.end()) throw Error(Errc::unknown_contract, invocation.contract);
    auto principal = directory_.get(submitter);
    if (!is_member(principal)) throw Error(Errc::non_member_submitter, principal.id);

    TransactionRecord tx;
    tx.channel = config_.name;
    tx.submitter = principal.id;
    tx.submit_time = now;
    {
        std::shared_lock lk(state_mu_);
        TxContext ctx(state_, directory_, config_, contracts_, std::move(principal), now);
        ctx.current_ = contract->first;
        try {
            tx.result = contract->second->invoke(ctx, invocation.op, invocation.args);
            tx.rwset = std::move(ctx).finish();
        } catch (const ContractError& e) {
            tx.error = e.what();
            tx.result = nullptr;
        }
    }
    tx.invocation = std::move(invocation);

    std::lock_guard lk(pending_mu_);
    tx.tx_id = config_.name + ":" + std::to_string(next_seq_++);
    for (auto& e : tx.rwset.events) e.emitting_tx = tx.tx_id;
    auto id = tx.tx_id;
    pending_.push_back(std::move(tx));
    return id;
}

std::optional<Block> Channel::commit_block(Millis now, std::size_t max_txs) {
    std::lock_guard commit_lk(commit_mu_);
    std::vector<TransactionRecord> batch;
    {
        std::lock_guard lk(pending_mu_);
        const auto n = std::min({options_.block_size, max_txs, pending_.size()});
        for (std::size_t i = 0; i < n; ++i)
            if (pending_[i].submit_time > now)
                throw std::invalid_argument("commit time precedes submit time of " +
                                            pending_[i].tx_id);
        batch.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            batch.push_back(std::move(pending_.front()));
            pending_.pop_front();
        }
    }
    if (batch.empty()) return std::nullopt;

    Block block;
    std::vector<Event> delivered;
    {
        std::unique_lock lk(state_mu_);
        const auto& prev = blocks_.back();
        block.height = prev.height + 1;
        block.channel = config_.name;
        block.prev_hash = prev.hash;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            auto& tx = batch[i];
            tx.commit_time = now;
            tx.validity = validate_and_apply(state_, tx, Version{block.height, static_cast<std::uint32_t>(i)},
                                             &contracts_);
            if (*tx.validity == Validity::valid)
                delivered.insert(delivered.end(), tx.rwset.events.begin(), tx.rwset.events.end());
        }
        block.transactions = std::move(batch);
        block.state_hash = state_.hash();
        block.hash = block.compute_hash();
        append_committed(block);
    }

    std::vector<Listener> listeners;
    {
        std::lock_guard lk(listeners_mu_);
        listeners = listeners_;
    }
    for (const auto& e : delivered)
        for (const auto& l : listeners) l(e);
    return block;
}

nlohmann::json Channel::evaluate(std::string_view submitter, const Invocation& invocation,
                                 Millis now) const {
    auto contract = contracts_.find(invocation.contract);
    if (contract == contracts_.end()) throw Error(Errc::unknown_contract, invocation.contract);
    auto principal = directory_.get(submitter);
    if (!is_member(principal)) throw Error(Errc::non_member_submitter, principal.id);
    std::shared_lock lk(state_mu_);
    TxContext ctx(state_, directory_, config_, contracts_, std::move(principal), now);
    ctx.current_ = contract->first;
    return contract->second->invoke(ctx, invocation.op, invocation.args);
}

std::string Channel::query(std::string_view key) const {
    auto v = try_query(key);
    if (!v) throw Error(Errc::unknown_key, std::string(key));
    return *v;
}

std::optional<std::string> Channel::try_query(std::string_view key) const {
    std::shared_lock lk(state_mu_);
    if (auto* v = state_.find(key)) return v->value;
    return std::nullopt;
}

Digest Channel::state_hash() const {
    std::shared_lock lk(state_mu_);
    return state_.hash();
}

WorldState Channel::snapshot() const {
    std::shared_lock lk(state_mu_);
    return state_;
}

std::vector<Block> Channel::blocks() const {
    std::shared_lock lk(state_mu_);
    return blocks_;
}

Block Channel::block(std::uint64_t height) const {
    std::shared_lock lk(state_mu_);
    if (height >= blocks_.size()) throw Error(Errc::invalid_argument, "no block at that height");
    return blocks_[height];
}

std::uint64_t Channel::height() const {
    std::shared_lock lk(state_mu_);
    return blocks_.back().height;
}

std::size_t Channel::pending_count() const {
    std::lock_guard lk(pending_mu_);
    return pending_.size();
}

Millis Channel::oldest_pending_submit() const {
    std::lock_guard lk(pending_mu_);
    if (pending_.empty()) throw std::logic_error("no pending transactions");
    return pending_.front().submit_time;
}

std::optional<TransactionRecord> Channel::transaction(const TxId& id) const {
    std::shared_lock lk(state_mu_);
    auto it = tx_index_.find(id);
    if (it == tx_index_.end()) return std::nullopt;
    return blocks_[it->second.first].transactions[it->second.second];
}

std::vector<Event> Channel::events() const {
    std::shared_lock lk(state_mu_);
    return events_;
}

void Channel::subscribe(Listener listener) {
    std::lock_guard lk(listeners_mu_);
    listeners_.push_back(std::move(listener));
}

}  // namespace transit

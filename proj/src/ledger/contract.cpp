#include "transit/ledger/contract.hpp"

#include "transit/common/error.hpp"

#include <charconv>
#include <stdexcept>

namespace transit {

namespace {

std::int64_t parse_counter(const std::string& key, const std::string& s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::logic_error("counter key " + key + " holds a non-integer value");
    return v;
}

}  // namespace

TxContext::TxContext(const WorldState& snapshot, const Directory& directory,
                     const ChannelConfig& channel, const ContractSet& contracts, Principal submitter,
                     Millis now)
    : snapshot_(snapshot), directory_(directory), channel_(channel), contracts_(contracts),
      submitter_(std::move(submitter)), now_(now) {}

std::string TxContext::full_key(std::string_view key) const {
    std::string k;
    k.reserve(current_.size() + 1 + key.size());
    k.append(current_).push_back('/');
    k.append(key);
    return k;
}

void TxContext::observe(const std::string& full) {
    if (!reads_.count(full)) reads_.emplace(full, snapshot_.version_of(full));
}

std::optional<std::string> TxContext::get(std::string_view key) {
    auto full = full_key(key);
    if (deltas_.count(full) || counters_seen_.count(full))
        throw std::logic_error("key " + full + " is used as a counter");
    if (auto it = writes_.find(full); it != writes_.end()) return it->second;
    observe(full);
    if (auto* v = snapshot_.find(full)) return v->value;
    return std::nullopt;
}

void TxContext::put(std::string_view key, std::string value) {
    auto full = full_key(key);
    if (deltas_.count(full) || counters_seen_.count(full))
        throw std::logic_error("key " + full + " is used as a counter");
    writes_[std::move(full)] = std::move(value);
}

void TxContext::erase(std::string_view key) {
    auto full = full_key(key);
    if (deltas_.count(full) || counters_seen_.count(full))
        throw std::logic_error("key " + full + " is used as a counter");
    writes_[std::move(full)] = std::nullopt;
}

std::int64_t TxContext::counter(std::string_view key) {
    auto full = full_key(key);
    if (writes_.count(full) || (reads_.count(full) && !counters_seen_.count(full)))
        throw std::logic_error("key " + full + " is used as a plain value");
    auto seen = counters_seen_.find(full);
    if (seen == counters_seen_.end()) {
        const auto* v = snapshot_.find(full);
        seen = counters_seen_.emplace(full, v ? parse_counter(full, v->value) : 0).first;
    }
    std::int64_t value = seen->second;
    if (auto d = deltas_.find(full); d != deltas_.end()) value += d->second.amount;
    return value;
}

void TxContext::add(std::string_view key, std::int64_t amount, std::optional<std::int64_t> min,
                    std::optional<std::int64_t> max) {
    auto full = full_key(key);
    if (writes_.count(full)) throw std::logic_error("key " + full + " is used as a plain value");
    auto [it, fresh] = deltas_.try_emplace(full, DeltaEntry{full, amount, min, max});
    if (fresh) return;
    auto& d = it->second;
    d.amount += amount;
    if (min) d.min = d.min ? std::max(*d.min, *min) : *min;
    if (max) d.max = d.max ? std::min(*d.max, *max) : *max;
}

void TxContext::emit(std::string name, nlohmann::json payload) {
    events_.push_back(Event{std::move(name), channel_.name, std::move(payload), {}});
}

nlohmann::json TxContext::call(std::string_view contract, std::string_view op,
                               const nlohmann::json& args) {
    auto it = contracts_.find(contract);
    if (it == contracts_.end())
        throw ContractError("unknown-contract", std::string(contract));

    auto saved_writes = writes_;
    auto saved_deltas = deltas_;
    auto saved_events_size = events_.size();
    auto saved_current = current_;
    auto saved_caller = caller_;
    caller_ = current_;
    current_ = it->first;
    try {
        auto out = it->second->invoke(*this, op, args);
        current_ = std::move(saved_current);
        caller_ = std::move(saved_caller);
        return out;
    } catch (...) {
        writes_ = std::move(saved_writes);
        deltas_ = std::move(saved_deltas);
        events_.resize(saved_events_size);
        current_ = std::move(saved_current);
        caller_ = std::move(saved_caller);
        throw;
    }
}

ReadWriteSet TxContext::finish() && {
    ReadWriteSet rw;
    for (const auto& [key, _] : counters_seen_)
        if (!deltas_.count(key)) observe(key);
    rw.reads.reserve(reads_.size());
    for (auto& [k, v] : reads_) rw.reads.push_back({k, v});
    for (auto& [k, v] : writes_) rw.writes.push_back({k, std::move(v)});
    for (auto& [_, d] : deltas_) rw.deltas.push_back(std::move(d));
    rw.events = std::move(events_);
    return rw;
}

}  // namespace transit

#include "transit/ledger/world_state.hpp"

namespace transit {

const VersionedValue* WorldState::find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<Version> WorldState::version_of(std::string_view key) const {
    if (auto* v = find(key)) return v->version;
    return std::nullopt;
}

void WorldState::put(std::string key, std::string value, Version v) {
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        accumulate(entry_digest(it->first, it->second), false);
        it->second = VersionedValue{std::move(value), v};
        accumulate(entry_digest(it->first, it->second), true);
        return;
    }
    auto [ins, _] = entries_.emplace(std::move(key), VersionedValue{std::move(value), v});
    accumulate(entry_digest(ins->first, ins->second), true);
}

void WorldState::erase(std::string_view key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    accumulate(entry_digest(it->first, it->second), false);
    entries_.erase(it);
}

Digest WorldState::entry_digest(std::string_view key, const VersionedValue& v) {
    return Sha256()
        .update_field(key)
        .update_field(v.value)
        .update_u64(v.version.block)
        .update_u64(v.version.tx)
        .finish();
}

void WorldState::accumulate(const Digest& d, bool add) {
    // Little-endian 64-bit limbs, arithmetic mod 2^256.
    Acc x{};
    const auto& b = d.bytes();
    for (int limb = 0; limb < 4; ++limb)
        for (int i = 0; i < 8; ++i)
            x[limb] |= static_cast<std::uint64_t>(b[limb * 8 + i]) << (8 * i);

    if (add) {
        unsigned __int128 carry = 0;
        for (int i = 0; i < 4; ++i) {
            unsigned __int128 s = static_cast<unsigned __int128>(acc_[i]) + x[i] + carry;
            acc_[i] = static_cast<std::uint64_t>(s);
            carry = s >> 64;
        }
    } else {
        std::uint64_t borrow = 0;
        for (int i = 0; i < 4; ++i) {
            std::uint64_t a = acc_[i];
            std::uint64_t sub = x[i] + borrow;
            std::uint64_t next = (x[i] == UINT64_MAX && borrow) || a < sub ? 1 : 0;
            acc_[i] = a - sub;
            borrow = next;
        }
    }
}

Digest WorldState::hash() const {
    Sha256 h;
    h.update("transit/state/v1");
    h.update_u64(entries_.size());
    for (auto limb : acc_) h.update_u64(limb);
    return h.finish();
}

Digest sorted_state_digest(const WorldState::Map& entries) {
    Sha256 h;
    h.update("transit/state-sorted/v1");
    for (const auto& [k, v] : entries) {
        h.update_field(k).update_field(v.value).update_u64(v.version.block).update_u64(v.version.tx);
    }
    return h.finish();
}

}  // namespace transit

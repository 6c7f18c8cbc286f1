#pragma once

#include "transit/common/digest.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace transit {

/// Position of the transaction that last wrote a key.
struct Version {
    std::uint64_t block = 0;
    std::uint32_t tx = 0;

    friend auto operator<=>(const Version&, const Version&) = default;
};

struct VersionedValue {
    std::string value;
    Version version;

    friend bool operator==(const VersionedValue&, const VersionedValue&) = default;
};

/// Versioned key-value state. Keys are namespaced as "contract/key".
///
/// The digest is a multiset hash: the 256-bit modular sum of per-entry
/// SHA-256 digests, finalized with the entry count. It is independent of
/// iteration order, updates in O(1) per write, and removing an entry exactly
/// cancels its insertion.
class WorldState {
public:
    using Map = std::map<std::string, VersionedValue, std::less<>>;

    const VersionedValue* find(std::string_view key) const;
    std::optional<Version> version_of(std::string_view key) const;

    void put(std::string key, std::string value, Version v);
    void erase(std::string_view key);

    const Map& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    Digest hash() const;

    friend bool operator==(const WorldState& a, const WorldState& b) {
        return a.entries_ == b.entries_;
    }

private:
    using Acc = std::array<std::uint64_t, 4>;

    static Digest entry_digest(std::string_view key, const VersionedValue& v);
    void accumulate(const Digest& d, bool add);

    Map entries_;
    Acc acc_{};
};

/// Reference digest: SHA-256 over the key-sorted entry list. Slower than
/// WorldState::hash() and used where an independent check is wanted.
Digest sorted_state_digest(const WorldState::Map& entries);

}  // namespace transit

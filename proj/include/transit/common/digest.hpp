#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace transit {

/// 32-byte SHA-256 digest.
class Digest {
public:
    using Bytes = std::array<std::uint8_t, 32>;

    Digest() { bytes_.fill(0); }
    explicit Digest(const Bytes& b) : bytes_(b) {}

    static Digest of(std::string_view data);
    static Digest from_hex(std::string_view hex);  // throws Error(malformed_log)

    const Bytes& bytes() const noexcept { return bytes_; }
    std::string hex() const;
    bool is_zero() const noexcept;

    friend bool operator==(const Digest&, const Digest&) = default;

private:
    Bytes bytes_;
};

/// Incremental SHA-256 for hashing structured content without building one
/// large buffer.
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    Sha256& update(std::string_view data);
    Sha256& update_u64(std::uint64_t v);
    /// Length-prefixed so that ("ab","c") and ("a","bc") differ.
    Sha256& update_field(std::string_view data);
    Digest finish();

private:
    struct Impl;
    Impl* impl_;
};

}  // namespace transit

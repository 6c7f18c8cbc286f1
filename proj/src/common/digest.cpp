#include "transit/common/digest.hpp"

#include "transit/common/error.hpp"

#include <openssl/evp.h>

namespace transit {

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(new Impl) {
    impl_->ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
}

Sha256::~Sha256() {
    EVP_MD_CTX_free(impl_->ctx);
    delete impl_;
}

Sha256& Sha256::update(std::string_view data) {
    EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
    return *this;
}

Sha256& Sha256::update_u64(std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 7; i >= 0; --i) {
        buf[i] = static_cast<unsigned char>(v & 0xff);
        v >>= 8;
    }
    EVP_DigestUpdate(impl_->ctx, buf, sizeof buf);
    return *this;
}

Sha256& Sha256::update_field(std::string_view data) {
    update_u64(data.size());
    return update(data);
}

Digest Sha256::finish() {
    Digest::Bytes out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx, out.data(), &len);
    return Digest(out);
}

Digest Digest::of(std::string_view data) {
    return Sha256().update(data).finish();
}

std::string Digest::hex() const {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (auto b : bytes_) {
        s.push_back(kHex[b >> 4]);
        s.push_back(kHex[b & 0xf]);
    }
    return s;
}

bool Digest::is_zero() const noexcept {
    for (auto b : bytes_)
        if (b != 0) return false;
    return true;
}

Digest Digest::from_hex(std::string_view hex) {
    if (hex.size() != 64) throw Error(Errc::malformed_log, "digest must be 64 hex chars");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;  // uppercase is not canonical
    };
    Bytes b{};
    for (std::size_t i = 0; i < 32; ++i) {
        int hi = nibble(hex[2 * i]);
        int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error(Errc::malformed_log, "digest is not lowercase hex");
        b[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return Digest(b);
}

}  // namespace transit

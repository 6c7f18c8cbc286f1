#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transit {

/// Error categories raised by the simulator. Names follow the kebab-case
/// labels printed by the CLI and recorded in transaction results.
enum class Errc {
    duplicate_channel_name,
    wrong_principal_kind,
    unknown_principal,
    duplicate_principal,
    unknown_channel,
    unknown_contract,
    non_member_submitter,
    unknown_key,
    broken_hash_chain,
    malformed_log,
    invalid_argument,
    validation_error,
    io_error,
    state_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                            : std::string(to_string(code)) + ": " + detail),
          code_(code) {}
    explicit Error(Errc code) : Error(code, {}) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised from inside contract code. The ledger turns it into an
/// endorsement-error transaction instead of propagating it to the caller.
class ContractError : public std::runtime_error {
public:
    explicit ContractError(std::string code, std::string detail = {})
        : std::runtime_error(detail.empty() ? code : code + ": " + detail),
          code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace transit

#include "transit/common/error.hpp"

namespace transit {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::duplicate_channel_name: return "duplicate-channel-name";
    case Errc::wrong_principal_kind: return "wrong-principal-kind";
    case Errc::unknown_principal: return "unknown-principal";
    case Errc::duplicate_principal: return "duplicate-principal";
    case Errc::unknown_channel: return "unknown-channel";
    case Errc::unknown_contract: return "unknown-contract";
    case Errc::non_member_submitter: return "non-member-submitter";
    case Errc::unknown_key: return "unknown-key";
    case Errc::broken_hash_chain: return "broken-hash-chain";
    case Errc::malformed_log: return "malformed-log";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::validation_error: return "scenario-validation-error";
    case Errc::io_error: return "io-error";
    case Errc::state_error: return "state-error";
    }
    return "unknown-error";
}

}  // namespace transit

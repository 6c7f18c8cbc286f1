#pragma once

#include "transit/ledger/contract.hpp"
#include "transit/ledger/world_state.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

namespace transit::token {

/// Negotiated terms of a credit purchase.
struct Proposal {
    PrincipalId company;
    PrincipalId organisation;
    std::int64_t credit_amount = 0;
    std::int64_t total_price = 0;
    std::map<std::string, std::int64_t> price_list;  // transport type -> credits per trip unit

    /// credit_amount > 0, total_price > 0, non-empty price list.
    bool well_formed() const;

    friend bool operator==(const Proposal&, const Proposal&) = default;
};

enum class Phase { initialized, tokens_deposited, payment_deposited, released, rolled_back };

std::string_view to_string(Phase p) noexcept;
Phase parse_phase(std::string_view s);
inline bool is_terminal(Phase p) { return p == Phase::released || p == Phase::rolled_back; }

/// Escrow record stored at token/escrow/<company>. Deposits are zeroed once
/// they leave escrow (paid out on release, refunded on rollback).
struct EscrowRecord {
    Proposal proposal;
    Phase phase = Phase::initialized;
    std::int64_t escrowed_tokens = 0;
    std::int64_t escrowed_payment = 0;
    bool tokens_in = false;
    bool payment_in = false;
    std::int64_t generation = 1;  // bumps on every re-initialisation
};

struct HoldRecord {
    std::string hold_id;
    std::string trip_id;
    PrincipalId employee;
    PrincipalId company;
    std::int64_t max_amount = 0;
};

struct Balance {
    std::int64_t pool_available = 0;
    std::int64_t held = 0;
    std::int64_t spent = 0;

    friend bool operator==(const Balance&, const Balance&) = default;
};

nlohmann::json to_json(const Proposal& p);
Proposal proposal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EscrowRecord& e);
EscrowRecord escrow_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HoldRecord& h);
HoldRecord hold_from_json(const nlohmann::json& j);

std::string hold_id_for(std::string_view trip_id);

/// Full ("token/...") state keys, for queries and invariant checks.
namespace keys {
std::string escrow(std::string_view company);
std::string account(std::string_view owner);
std::string pool(std::string_view company);
std::string held(std::string_view company);
std::string spent(std::string_view company);
std::string credited(std::string_view company);
std::string hold(std::string_view hold_id);
inline constexpr std::string_view supply = "token/supply";
}  // namespace keys

/// Credit and currency totals read straight from a world state.
struct Ledgerbook {
    std::map<PrincipalId, std::int64_t> accounts;
    std::int64_t supply = 0;
    std::int64_t escrowed_payment = 0;
    std::map<PrincipalId, std::int64_t> credited;
    std::map<PrincipalId, Balance> balances;
    std::map<PrincipalId, std::int64_t> hold_sum;  // Σ hold records per company

    std::int64_t total_currency() const;
    /// credited = pool + held + spent for every company, held = Σ holds,
    /// pool >= 0, and Σ accounts + escrowed payment = supply.
    bool conserved() const;
};

Ledgerbook read_ledgerbook(const WorldState& state);

/// The token smart contract.
///
/// Operations (args are JSON objects):
///   mint            {owner, amount}                     network admin only
///   init            {proposal}                          proposal.company
///   deposit_tokens  {company, amount}                   proposal.company
///   deposit_payment {company, amount}                   proposal.organisation
///   try_release     {company}
///   hold            {company, trip_id, employee, max}   access contract only
///   settle          {hold_id, actual}                   access contract only
///   price_of        {company, transport}
///   available       {company}
///   balance_of      {company[, viewer]}
///   escrow          {company}
///   account         {owner}
///
/// Events: token-released, escrow-rolled-back, hold-created, trip-settled.
class TokenContract final : public Contract {
public:
    std::string_view name() const override { return "token"; }
    nlohmann::json invoke(TxContext& ctx, std::string_view op,
                          const nlohmann::json& args) const override;
};

std::shared_ptr<const Contract> make_token_contract();

}  // namespace transit::token

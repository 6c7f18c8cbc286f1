#pragma once

#include "transit/ledger/channel.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace transit {

struct NetworkOptions {
    LedgerOptions ledger;
    std::string admin_id = "admin";
};

/// The transport chain: a base ledger that records principal and channel
/// registrations, plus one private channel ledger per organisation.
class Network {
public:
    explicit Network(NetworkOptions options = {});

    /// Rebuilds a network from its base block log and channel block logs.
    /// `contracts` are installed on every channel.
    static std::unique_ptr<Network> restore(std::span<const Block> base_log,
                                            const std::map<std::string, std::vector<Block>>& channel_logs,
                                            ContractSet contracts, NetworkOptions options = {});

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    /// Contracts deployed on channels created afterwards.
    void install(std::shared_ptr<const Contract> contract);
    const ContractSet& installed() const noexcept { return contracts_; }

    const Directory& directory() const noexcept { return directory_; }
    const std::string& admin_id() const noexcept { return options_.admin_id; }
    const NetworkOptions& options() const noexcept { return options_; }

    void register_principal(Principal p, Millis now);

    /// Errors: duplicate-channel-name, wrong-principal-kind, unknown-principal.
    Channel& create_channel(const std::string& name, const PrincipalId& organisation,
                            const std::vector<PrincipalId>& companies, Millis now);

    bool has_channel(std::string_view name) const;
    Channel& channel(std::string_view name);  // throws unknown-channel
    const Channel& channel(std::string_view name) const;
    std::vector<std::string> channel_names() const;

    Channel& base() noexcept { return *base_; }
    const Channel& base() const noexcept { return *base_; }

    /// Digest over the base and every channel state digest, in name order.
    Digest combined_state_hash() const;

private:
    void commit_base(Millis now);

    NetworkOptions options_;
    Directory directory_;
    ContractSet contracts_;
    std::unique_ptr<Channel> base_;
    mutable std::mutex mu_;
    std::map<std::string, std::unique_ptr<Channel>, std::less<>> channels_;
};

/// The base ledger's system contract.
std::shared_ptr<const Contract> make_network_contract();

}  // namespace transit

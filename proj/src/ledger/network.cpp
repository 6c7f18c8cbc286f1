#include "transit/ledger/network.hpp"

#include "transit/common/error.hpp"

namespace transit {

namespace {

constexpr std::string_view kBaseChannel = "network";

class NetworkContract final : public Contract {
public:
    std::string_view name() const override { return "network"; }

    nlohmann::json invoke(TxContext& ctx, std::string_view op,
                          const nlohmann::json& args) const override {
        if (ctx.submitter().kind != PrincipalKind::network_admin)
            throw ContractError("not-authorized", "only the network admin registers entities");
        if (op == "register_principal") {
            auto p = principal_from_json(args);
            const auto key = "principal/" + p.id;
            if (ctx.get(key)) throw ContractError("duplicate-principal", p.id);
            ctx.put(key, to_json(p).dump());
            return {{"id", p.id}};
        }
        if (op == "register_channel") {
            auto cfg = channel_config_from_json(args);
            const auto key = "channel/" + cfg.name;
            if (ctx.get(key)) throw ContractError("duplicate-channel-name", cfg.name);
            ctx.put(key, to_json(cfg).dump());
            return {{"name", cfg.name}};
        }
        throw ContractError("unknown-operation", std::string(op));
    }
};

ContractSet base_contracts() {
    auto c = make_network_contract();
    return ContractSet{{std::string(c->name()), c}};
}

}  // namespace

std::shared_ptr<const Contract> make_network_contract() {
    return std::make_shared<NetworkContract>();
}

Network::Network(NetworkOptions options) : options_(std::move(options)) {
    directory_.add(Principal{options_.admin_id, PrincipalKind::network_admin, std::nullopt, "admin"});
    base_ = std::make_unique<Channel>(ChannelConfig{std::string(kBaseChannel), options_.admin_id, {}},
                                      directory_, base_contracts(), options_.ledger);
}

std::unique_ptr<Network> Network::restore(std::span<const Block> base_log,
                                          const std::map<std::string, std::vector<Block>>& channel_logs,
                                          ContractSet contracts, NetworkOptions options) {
    auto net = std::make_unique<Network>(options);
    net->contracts_ = std::move(contracts);
    // Rebuild the directory from registrations in commit order.
    std::vector<ChannelConfig> configs;
    for (const auto& b : base_log)
        for (const auto& tx : b.transactions) {
            if (tx.validity != Validity::valid) continue;
            if (tx.invocation.op == "register_principal")
                net->directory_.add(principal_from_json(tx.invocation.args));
            else if (tx.invocation.op == "register_channel")
                configs.push_back(channel_config_from_json(tx.invocation.args));
        }
    net->base_ = Channel::restore(base_log, net->directory_, base_contracts(), options.ledger);
    for (const auto& cfg : configs) {
        auto it = channel_logs.find(cfg.name);
        if (it == channel_logs.end())
            throw Error(Errc::malformed_log, "missing block log for channel " + cfg.name);
        auto ch = Channel::restore(it->second, net->directory_, net->contracts_, options.ledger);
        if (ch->config() != cfg)
            throw Error(Errc::broken_hash_chain, "channel " + cfg.name + " genesis does not match registration");
        net->channels_.emplace(cfg.name, std::move(ch));
    }
    return net;
}

void Network::install(std::shared_ptr<const Contract> contract) {
    std::lock_guard lk(mu_);
    contracts_[std::string(contract->name())] = std::move(contract);
}

void Network::commit_base(Millis now) {
    auto block = base_->commit_block(now);
    const auto& tx = block->transactions.back();
    if (tx.validity != Validity::valid) throw Error(Errc::state_error, "base ledger rejected " + tx.error);
}

void Network::register_principal(Principal p, Millis now) {
    std::lock_guard lk(mu_);
    auto args = to_json(p);
    directory_.add(std::move(p));  // validates before anything reaches the ledger
    base_->submit(options_.admin_id, Invocation{"network", "register_principal", std::move(args)}, now);
    commit_base(now);
}

Channel& Network::create_channel(const std::string& name, const PrincipalId& organisation,
                                 const std::vector<PrincipalId>& companies, Millis now) {
    std::lock_guard lk(mu_);
    if (name.empty() || name == kBaseChannel || name.find_first_of("/:") != std::string::npos)
        throw Error(Errc::invalid_argument, "bad channel name '" + name + "'");
    if (channels_.count(name)) throw Error(Errc::duplicate_channel_name, name);
    auto org = directory_.get(organisation);
    if (org.kind != PrincipalKind::organisation)
        throw Error(Errc::wrong_principal_kind, organisation + " is not an organisation");
    if (companies.empty()) throw Error(Errc::wrong_principal_kind, "a channel needs a transport company");
    for (const auto& c : companies)
        if (directory_.get(c).kind != PrincipalKind::transport_company)
            throw Error(Errc::wrong_principal_kind, c + " is not a transport company");

    ChannelConfig cfg{name, organisation, companies};
    base_->submit(options_.admin_id, Invocation{"network", "register_channel", to_json(cfg)}, now);
    commit_base(now);
    auto ch = std::make_unique<Channel>(std::move(cfg), directory_, contracts_, options_.ledger);
    auto& ref = *ch;
    channels_.emplace(name, std::move(ch));
    return ref;
}

bool Network::has_channel(std::string_view name) const {
    std::lock_guard lk(mu_);
    return channels_.find(name) != channels_.end();
}

Channel& Network::channel(std::string_view name) {
    std::lock_guard lk(mu_);
    auto it = channels_.find(name);
    if (it == channels_.end()) throw Error(Errc::unknown_channel, std::string(name));
    return *it->second;
}

const Channel& Network::channel(std::string_view name) const {
    return const_cast<Network*>(this)->channel(name);
}

std::vector<std::string> Network::channel_names() const {
    std::lock_guard lk(mu_);
    std::vector<std::string> out;
    for (const auto& [n, _] : channels_) out.push_back(n);
    return out;
}

Digest Network::combined_state_hash() const {
    Sha256 h;
    h.update("transit/network/v1");
    h.update_field(kBaseChannel).update_field(base_->state_hash().hex());
    std::lock_guard lk(mu_);
    for (const auto& [n, ch] : channels_) h.update_field(n).update_field(ch->state_hash().hex());
    return h.finish();
}

}  // namespace transit

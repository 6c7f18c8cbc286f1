// transitctl: command-line driver for the transport chain simulator.

#include "transit/bench/bench.hpp"
#include "transit/ledger/block_log.hpp"
#include "transit/scenario/scenario.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fcntl.h>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sys/file.h>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace transit;

namespace {

enum Exit { kOk = 0, kUsage = 2, kValidation = 3, kVerification = 4 };

struct Failure {
    int exit_code;
    std::string message;
};

constexpr Millis kStep = 1000;

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
    return json::parse(in);
}

/// Exclusive lock on the data directory for the lifetime of one command.
class DirLock {
public:
    explicit DirLock(const fs::path& dir) {
        fs::create_directories(dir);
        fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0) throw Error(Errc::io_error, "cannot lock " + dir.string());
    }
    ~DirLock() {
        if (fd_ >= 0) ::close(fd_);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    int fd_ = -1;
};

/// A network persisted as block logs under the data directory.
class Workspace {
public:
    explicit Workspace(fs::path dir) : dir_(std::move(dir)) {}

    fs::path meta_path() const { return dir_ / "meta.json"; }
    bool initialised() const { return fs::exists(meta_path()); }

    void init(std::size_t block_size, Millis start) {
        if (initialised()) throw Failure{kUsage, "network already initialised in " + dir_.string()};
        fs::create_directories(dir_ / "channels");
        fs::create_directories(dir_ / "events");
        meta_ = {{"block_size", block_size}, {"clock", start}};
        NetworkOptions options;
        options.ledger.block_size = block_size;
        net_ = scenario::make_transport_network(options);
        driver_ = std::make_unique<scenario::Driver>(*net_, start);
        save();
    }

    void load() {
        if (!initialised()) throw Failure{kUsage, "no network in " + dir_.string() + " (run 'network init')"};
        meta_ = read_json(meta_path());
        NetworkOptions options;
        options.ledger.block_size = meta_.at("block_size").get<std::size_t>();
        const auto base = read_block_log(dir_ / "base.log");
        std::map<std::string, std::vector<Block>> logs;
        for (const auto& entry : fs::directory_iterator(dir_ / "channels"))
            if (entry.path().extension() == ".log")
                logs[entry.path().stem().string()] = read_block_log(entry.path());
        net_ = Network::restore(base, logs, scenario::standard_contracts(), options);
        saved_base_ = net_->base().height();
        for (const auto& name : net_->channel_names()) saved_[name] = net_->channel(name).height();
        driver_ = std::make_unique<scenario::Driver>(*net_, meta_.at("clock").get<Millis>());
    }

    /// Moves the clock to `at` (or one step on) before a command's transactions.
    void tick(const std::optional<std::string>& at) {
        if (at) {
            const auto t = parse_timestamp(*at);
            if (t < driver_->now()) throw Failure{kUsage, "--at is earlier than the network clock " + format_timestamp(driver_->now())};
            driver_->advance_to(t);
        } else {
            driver_->advance_by(kStep);
        }
    }

    void save() {
        persist(dir_ / "base.log", net_->base(), saved_base_);
        for (const auto& name : net_->channel_names()) persist(dir_ / "channels" / (name + ".log"), net_->channel(name), saved_[name]);
        const auto& events = driver_->events();
        for (; events_saved_ < events.size(); ++events_saved_) {
            const auto& e = events[events_saved_];
            std::ofstream out(dir_ / "events" / (e.channel + ".jsonl"), std::ios::app);
            out << to_json(e).dump() << '\n';
        }
        meta_["clock"] = driver_->now();
        std::ofstream(meta_path(), std::ios::trunc) << meta_.dump(2) << '\n';
    }

    Network& net() { return *net_; }
    scenario::Driver& driver() { return *driver_; }
    const fs::path& dir() const { return dir_; }

    Channel& channel(const std::string& name) {
        if (!net_->has_channel(name)) throw Failure{kUsage, "unknown channel " + name};
        return net_->channel(name);
    }

private:
    /// Appends the blocks committed since the last save.
    static void persist(const fs::path& path, const Channel& ch, std::optional<std::uint64_t>& saved) {
        const auto blocks = ch.blocks();
        for (auto h = saved ? *saved + 1 : 0; h < blocks.size(); ++h) append_block(path, blocks[h]);
        saved = ch.height();
    }

    fs::path dir_;
    json meta_;
    std::unique_ptr<Network> net_;
    std::unique_ptr<scenario::Driver> driver_;
    std::optional<std::uint64_t> saved_base_;
    std::map<std::string, std::optional<std::uint64_t>> saved_;
    std::size_t events_saved_ = 0;
};

json json_arg(const std::string& text) {
    if (!text.empty() && text[0] == '@') return read_json(text.substr(1));
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Failure{kValidation, std::string("malformed JSON argument: ") + e.what()};
    }
}

json parse_conditions(const std::string& text) {
    if (text.empty()) return access::to_json(access::Condition::always());
    try {
        return access::to_json(access::condition_from_json(json_arg(text)));
    } catch (const Error& e) {
        throw Failure{kValidation, e.what()};
    }
}

access::GeoPoint parse_point(const std::string& s) {
    access::GeoPoint p;
    char comma = 0;
    std::istringstream in(s);
    if (!(in >> p.lat >> comma >> p.lon) || comma != ',') throw Failure{kValidation, "expected lat,lon but got '" + s + "'"};
    return p;
}

std::map<std::string, std::int64_t> parse_prices(const std::string& s) {
    std::map<std::string, std::int64_t> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Failure{kValidation, "price list entries look like bus=5"};
        out[item.substr(0, eq)] = std::stoll(item.substr(eq + 1));
    }
    return out;
}

/// Submits one transaction; contract failures become exit code 2.
json run_tx(Workspace& ws, const std::string& channel, const std::string& submitter, Invocation inv) {
    ws.channel(channel);
    auto tx = ws.driver().execute(channel, submitter, std::move(inv));
    if (tx.validity != Validity::valid) {
        ws.save();
        throw Failure{kUsage, tx.error.empty() ? std::string(to_string(*tx.validity)) : tx.error};
    }
    return tx.result;
}

int code_for(const Error& e) {
    switch (e.code()) {
    case Errc::validation_error:
    case Errc::invalid_argument: return kValidation;
    case Errc::broken_hash_chain:
    case Errc::malformed_log: return kVerification;
    default: return kUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transitctl - transport credit chain simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string data_dir = "transit-data";
    if (const char* env = std::getenv("TRANSIT_DATA_DIR")) data_dir = env;
    app.add_option("--data-dir", data_dir, "Directory holding block logs and outputs (env TRANSIT_DATA_DIR)");
    int verbosity = 0;
    app.add_flag("-v,--verbose", verbosity, "Print transaction ids and extra detail");
    std::optional<std::string> at;
    app.add_option("--at", at, "Logical time for this command (YYYY-MM-DDTHH:MMZ); default one second after the last");

    std::function<void()> action;
    auto on = [&](CLI::App* cmd, std::function<void()> f) { cmd->callback([&action, f] { action = f; }); };

    // network init
    auto* network = app.add_subcommand("network", "Network setup")->require_subcommand(1);
    auto* init = network->add_subcommand("init", "Create a new network in the data directory");
    std::size_t block_size = 50;
    std::string start = "2024-01-01T08:00Z";
    init->add_option("--block-size", block_size, "Transactions per block")->check(CLI::PositiveNumber);
    init->add_option("--start", start, "Initial logical time");
    on(init, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.init(block_size, parse_timestamp(start));
        std::cout << "network " << ws.dir().string() << " base=" << ws.net().base().block(0).hash.hex() << '\n';
    });

    // principal add
    auto* principal = app.add_subcommand("principal", "Principals")->require_subcommand(1);
    auto* padd = principal->add_subcommand("add", "Register a principal");
    std::string p_id, p_kind, p_org, p_role;
    padd->add_option("--id", p_id)->required();
    padd->add_option("--kind", p_kind, "organisation|department|employee|transport-company")->required();
    padd->add_option("--org", p_org, "Owning organisation (departments, employees)");
    padd->add_option("--role", p_role);
    on(padd, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        Principal p{p_id, parse_principal_kind(p_kind), p_org.empty() ? std::nullopt : std::optional(p_org), p_role};
        ws.driver().register_principal(p);
        ws.save();
        std::cout << p.id << '\n';
    });

    // channel create
    auto* channel = app.add_subcommand("channel", "Channels")->require_subcommand(1);
    auto* ccreate = channel->add_subcommand("create", "Create an organisation's private channel");
    std::string c_name, c_org;
    std::vector<std::string> c_companies;
    ccreate->add_option("--name", c_name, "Channel name (default <org>-chan)");
    ccreate->add_option("--org", c_org)->required();
    ccreate->add_option("--company", c_companies, "Transport company (repeatable)")->required();
    on(ccreate, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        auto ensure = [&](const std::string& id, PrincipalKind kind) {
            if (!ws.net().directory().contains(id)) ws.driver().register_principal({id, kind, std::nullopt, ""});
        };
        ensure(c_org, PrincipalKind::organisation);
        for (const auto& c : c_companies) ensure(c, PrincipalKind::transport_company);
        const auto name = c_name.empty() ? c_org + "-chan" : c_name;
        ws.driver().create_channel(name, c_org, c_companies);
        ws.save();
        std::cout << name << '\n';
    });

    // account fund
    auto* account = app.add_subcommand("account", "Settlement accounts")->require_subcommand(1);
    auto* fund = account->add_subcommand("fund", "Mint currency into an account (network admin)");
    std::string channel_name, owner;
    std::int64_t amount = 0;
    fund->add_option("--channel", channel_name)->required();
    fund->add_option("--owner", owner)->required();
    fund->add_option("--amount", amount)->required()->check(CLI::NonNegativeNumber);
    on(fund, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        run_tx(ws, channel_name, ws.net().admin_id(), {"token", "mint", json{{"owner", owner}, {"amount", amount}}});
        auto bal = ws.channel(channel_name).evaluate(ws.net().admin_id(), {"token", "account", json{{"owner", owner}}}, ws.driver().now());
        ws.save();
        std::cout << owner << " balance=" << bal.at("balance") << '\n';
    });

    // contract deploy
    auto* contract = app.add_subcommand("contract", "Contracts")->require_subcommand(1);
    auto* deploy = contract->add_subcommand("deploy", "Deploy the access contract or open a token escrow");
    std::string which, conditions, company, prices;
    std::int64_t credits = 0, price = 0;
    deploy->add_option("--channel", channel_name)->required();
    deploy->add_option("--contract", which, "access|token")->required()->check(CLI::IsMember({"access", "token"}));
    deploy->add_option("--conditions", conditions, "Root conditions (JSON or @file), access only");
    deploy->add_option("--company", company, "Selling company, token only");
    deploy->add_option("--credits", credits, "Credits on offer, token only");
    deploy->add_option("--price", price, "Agreed total price, token only");
    deploy->add_option("--prices", prices, "Price list such as bus=5,train=8, token only");
    on(deploy, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        auto& ch = ws.channel(channel_name);
        if (which == "access") {
            auto r = run_tx(ws, channel_name, ch.config().organisation,
                            {"access", "deploy", json{{"conditions", parse_conditions(conditions)}}});
            std::cout << "access root=" << r.at("node").get<std::string>() << '\n';
        } else {
            if (company.empty()) throw Failure{kUsage, "--company is required for a token escrow"};
            token::Proposal p{company, ch.config().organisation, credits, price, parse_prices(prices)};
            auto r = run_tx(ws, channel_name, company, {"token", "init", json{{"proposal", token::to_json(p)}}});
            std::cout << "token escrow " << company << " phase=" << r.at("phase").get<std::string>()
                      << " generation=" << r.at("generation") << '\n';
        }
        ws.save();
    });

    // escrow
    auto* escrow = app.add_subcommand("escrow", "Credit purchase escrow")->require_subcommand(1);
    auto escrow_cmd = [&](const char* name, const char* help, bool deposit) {
        auto* cmd = escrow->add_subcommand(name, help);
        cmd->add_option("--channel", channel_name)->required();
        cmd->add_option("--company", company)->required();
        if (deposit) cmd->add_option("--amount", amount)->required()->check(CLI::NonNegativeNumber);
        return cmd;
    };
    auto deposit = [&](bool tokens) {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        const auto submitter = tokens ? company : ws.channel(channel_name).config().organisation;
        const auto before = ws.driver().events().size();
        auto r = run_tx(ws, channel_name, submitter,
                        {"token", tokens ? "deposit_tokens" : "deposit_payment", json{{"company", company}, {"amount", amount}}});
        std::cout << "phase=" << r.at("phase").get<std::string>() << '\n';
        for (auto i = before; i < ws.driver().events().size(); ++i)
            std::cout << "event " << ws.driver().events()[i].name << ' ' << ws.driver().events()[i].payload.dump() << '\n';
        ws.save();
    };
    on(escrow_cmd("deposit-tokens", "Company places the credits in escrow", true), [&] { deposit(true); });
    on(escrow_cmd("deposit-payment", "Organisation pays into escrow", true), [&] { deposit(false); });
    on(escrow_cmd("balance", "Escrow phase and pool balance", false), [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        auto& ch = ws.channel(channel_name);
        const auto viewer = ch.config().organisation;
        try {
            auto e = ch.evaluate(viewer, {"token", "escrow", json{{"company", company}}}, ws.driver().now());
            auto b = ch.evaluate(viewer, {"token", "balance_of", json{{"company", company}}}, ws.driver().now());
            std::cout << "phase=" << e.at("phase").get<std::string>() << " pool=" << b.at("pool_available")
                      << " held=" << b.at("held") << " spent=" << b.at("spent") << '\n';
        } catch (const ContractError& e) {
            throw Failure{kUsage, e.what()};
        }
    });

    // delegate / revoke
    auto* delegate = app.add_subcommand("delegate", "Delegate access to a grantee");
    std::string as, parent, grantee, sub_limit, node;
    delegate->add_option("--channel", channel_name)->required();
    delegate->add_option("--as", as, "Grantor (the parent node's grantee)")->required();
    delegate->add_option("--parent", parent, "Parent node id")->default_str("root");
    delegate->add_option("--grantee", grantee)->required();
    delegate->add_option("--conditions", conditions, "Added conditions (JSON or @file)");
    delegate->add_option("--sub-limit", sub_limit, "Credits per period, e.g. 200/week");
    on(delegate, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        json args{{"parent", parent.empty() ? std::string(access::kRootNode) : parent},
                  {"grantee", grantee},
                  {"conditions", parse_conditions(conditions)}};
        if (!sub_limit.empty()) {
            const auto slash = sub_limit.find('/');
            if (slash == std::string::npos) throw Failure{kValidation, "--sub-limit looks like 200/week"};
            args["sub_limit"] = {{"credits", std::stoll(sub_limit.substr(0, slash))}, {"period", sub_limit.substr(slash + 1)}};
        }
        auto r = run_tx(ws, channel_name, as, {"access", "delegate", args});
        ws.save();
        std::cout << r.at("node").get<std::string>() << '\n';
    });
    auto* revoke = app.add_subcommand("revoke", "Revoke a delegation node and its subtree");
    revoke->add_option("--channel", channel_name)->required();
    revoke->add_option("--as", as)->required();
    revoke->add_option("--node", node)->required();
    on(revoke, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        auto r = run_tx(ws, channel_name, as, {"access", "revoke", json{{"node", node}}});
        ws.save();
        std::cout << "revoked " << r.at("revoked").dump() << '\n';
    });

    // trip request / finish
    auto* trip = app.add_subcommand("trip", "Trips")->require_subcommand(1);
    auto* request = trip->add_subcommand("request", "Request access for a trip");
    access::TripRequest req;
    std::string from, to, submitter;
    request->add_option("--channel", channel_name)->required();
    request->add_option("--trip-id", req.trip_id)->required();
    request->add_option("--employee", req.employee)->required();
    request->add_option("--company", req.company)->required();
    request->add_option("--transport", req.transport)->required();
    request->add_option("--from", from, "Origin lat,lon")->required();
    request->add_option("--to", to, "Destination lat,lon")->required();
    request->add_option("--max-cost", req.max_cost)->required();
    request->add_option("--as", submitter, "Submitter (default: the employee)");
    on(request, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        req.origin = parse_point(from);
        req.destination = parse_point(to);
        auto r = run_tx(ws, channel_name, submitter.empty() ? req.employee : submitter,
                        {"access", "request_access", json{{"trip", access::to_json(req)}}});
        ws.save();
        auto d = access::Decision::from_json(r);
        if (d.approved) std::cout << "approved hold=" << d.hold_id << '\n';
        else std::cout << "denied " << d.reason << '\n';
    });
    auto* finish = trip->add_subcommand("finish", "Finish a trip (transport company)");
    std::string trip_id;
    std::int64_t actual = 0;
    finish->add_option("--channel", channel_name)->required();
    finish->add_option("--trip-id", trip_id)->required();
    finish->add_option("--actual-cost", actual)->required()->check(CLI::NonNegativeNumber);
    finish->add_option("--as", submitter, "Submitter (default: the trip's company)");
    on(finish, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        ws.tick(at);
        auto& ch = ws.channel(channel_name);
        if (submitter.empty()) {
            auto raw = ch.try_query(access::keys::trip(trip_id));
            if (!raw) throw Failure{kUsage, "unknown-trip: " + trip_id};
            submitter = access::trip_record_from_json(json::parse(*raw)).trip.company;
        }
        auto r = run_tx(ws, channel_name, submitter, {"access", "finish_trip", json{{"trip_id", trip_id}, {"actual_cost", actual}}});
        ws.save();
        std::cout << "finished " << trip_id << " actual=" << r.at("actual_cost") << '\n';
    });

    // ledger export / verify
    auto* ledger = app.add_subcommand("ledger", "Block logs")->require_subcommand(1);
    auto* exp = ledger->add_subcommand("export", "Write a channel's block log");
    std::string out_path, file;
    exp->add_option("--channel", channel_name, "Channel name, or 'base' for the base ledger")->required();
    exp->add_option("--out", out_path, "Output file (default stdout)");
    on(exp, [&] {
        DirLock lock(data_dir);
        Workspace ws(data_dir);
        ws.load();
        const auto blocks = channel_name == "base" ? ws.net().base().blocks() : ws.channel(channel_name).blocks();
        if (out_path.empty()) write_block_log(std::cout, blocks);
        else write_block_log(fs::path(out_path), blocks);
    });
    auto* verify = ledger->add_subcommand("verify", "Replay block logs and check every hash");
    verify->add_option("--channel", channel_name, "Channel name, or 'base'");
    verify->add_option("--file", file, "Verify a block log file directly");
    on(verify, [&] {
        std::vector<fs::path> targets;
        if (!file.empty()) {
            targets.push_back(file);
        } else {
            if (!fs::exists(fs::path(data_dir) / "meta.json")) throw Failure{kUsage, "no network in " + data_dir};
            if (channel_name == "base") targets.push_back(fs::path(data_dir) / "base.log");
            else if (!channel_name.empty()) targets.push_back(fs::path(data_dir) / "channels" / (channel_name + ".log"));
            else {
                targets.push_back(fs::path(data_dir) / "base.log");
                for (const auto& e : fs::directory_iterator(fs::path(data_dir) / "channels"))
                    if (e.path().extension() == ".log") targets.push_back(e.path());
                std::sort(targets.begin() + 1, targets.end());
            }
        }
        DirLock lock(data_dir);
        bool ok = true;
        for (const auto& t : targets) {
            if (!fs::exists(t)) throw Failure{kUsage, "no such log " + t.string()};
            try {
                const auto digest = verify_block_log(t);
                std::cout << "OK " << digest.hex();
            } catch (const Error& e) {
                ok = false;
                std::cout << "FAIL " << to_string(e.code());
                if (verbosity > 0) std::cout << " (" << e.what() << ')';
            }
            if (targets.size() > 1) std::cout << ' ' << t.string();
            std::cout << '\n';
        }
        if (!ok) throw Failure{kVerification, ""};
    });

    // scenario run
    auto* scen = app.add_subcommand("scenario", "Scenario files")->require_subcommand(1);
    auto* srun = scen->add_subcommand("run", "Run a scenario file end to end");
    std::optional<std::uint64_t> seed;
    srun->add_option("file", file, "Scenario JSON")->required();
    srun->add_option("--seed", seed, "Override the scenario seed");
    on(srun, [&] {
        auto s = scenario::load_scenario(file);
        if (seed) s.seed = *seed;
        DirLock lock(data_dir);
        auto result = scenario::run_scenario(s);
        const auto out = fs::path(data_dir) / "scenarios" / s.name;
        scenario::write_network_logs(*result.network, result.events, out);
        std::ofstream(out / "summary.json", std::ios::trunc) << result.summary().dump(2) << '\n';
        if (verbosity > 0)
            for (const auto& t : result.trips)
                std::cout << t.trip.trip_id << ' ' << to_string(t.outcome) << ' ' << t.reason << '\n';
        std::cout << result.state_hash.hex() << '\n';
    });

    // bench run
    auto* bench_cmd = app.add_subcommand("bench", "Benchmark suite")->require_subcommand(1);
    auto* brun = bench_cmd->add_subcommand("run", "Run the send-rate sweep");
    brun->add_option("config", file, "Bench config JSON")->required();
    brun->add_option("--out", out_path, "Output directory (default <data-dir>/bench)");
    on(brun, [&] {
        auto config = bench::load_config(file);
        DirLock lock(data_dir);
        const fs::path out = out_path.empty() ? fs::path(data_dir) / "bench" : fs::path(out_path);
        bench::run_suite(config, out, [&](const bench::RoundMetrics& r) {
            std::cout << "rate=" << r.send_rate << " rep=" << r.rep << " throughput=" << r.overall.throughput
                      << " latency=" << r.overall.latency_avg << '\n';
        });
        std::cout << "wrote " << (out / "rounds.csv").string() << ' ' << (out / "summary.csv").string() << ' '
                  << (out / "plot.json").string() << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (action) action();
        return kOk;
    } catch (const Failure& f) {
        if (!f.message.empty()) std::cerr << "error: " << f.message << '\n';
        return f.exit_code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code_for(e);
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
}

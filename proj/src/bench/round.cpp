#include "transit/bench/bench.hpp"

#include "transit/common/error.hpp"
#include "transit/ledger/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace transit::bench {

using nlohmann::json;

namespace {

struct Track {
    TxType type = TxType::request_access;
    double submit_s = 0;
    double commit_s = 0;
    Validity final = Validity::valid;
    bool settled = false;
};

Millis to_millis(double seconds) { return static_cast<Millis>(std::floor(seconds * 1000.0)); }

TypeMetrics summarize(const std::vector<const Track*>& tracks, std::size_t conflicts, double send_rate) {
    TypeMetrics m;
    m.submitted = tracks.size();
    m.conflicts = conflicts;
    if (tracks.empty()) return m;
    std::vector<double> lat;
    lat.reserve(tracks.size());
    double first_submit = tracks.front()->submit_s, last_submit = first_submit, last_commit = 0;
    for (const auto* t : tracks) {
        first_submit = std::min(first_submit, t->submit_s);
        last_submit = std::max(last_submit, t->submit_s);
        last_commit = std::max(last_commit, t->commit_s);
        lat.push_back(t->commit_s - t->submit_s);
        if (t->final == Validity::valid) ++m.valid;
        else ++m.failed;
    }
    // The generator occupies 1/rate per transaction, so the send window of n
    // transactions ends one slot after the last submission.
    const double span = std::max(last_commit, last_submit + 1.0 / send_rate) - first_submit;
    m.throughput = static_cast<double>(m.valid) / span;
    std::sort(lat.begin(), lat.end());
    double sum = 0;
    for (double l : lat) sum += l;
    m.latency_avg = sum / static_cast<double>(lat.size());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(lat.size())));
    m.latency_p95 = lat[std::max<std::size_t>(rank, 1) - 1];
    m.latency_max = lat.back();
    m.conflict_rate = static_cast<double>(conflicts) / static_cast<double>(tracks.size() + conflicts);
    return m;
}

}  // namespace

RoundMetrics run_round(const Workload& workload, const WorkloadConfig& config) {
    config.validate();
    auto pop = setup_population(config);
    auto& ch = pop.network->channel(pop.channel);

    // Unmeasured setup: approve the trips the Finish_Trip stream will close.
    Millis now = pop.clock;
    for (const auto& trip : workload.preapproved)
        ch.submit(trip.employee, {"access", "request_access", json{{"trip", access::to_json(trip)}}}, now);
    while (auto block = ch.commit_block(now))
        for (const auto& tx : block->transactions)
            if (tx.validity != Validity::valid || tx.result.value("decision", "") != "approved")
                throw Error(Errc::state_error, "setup trip " + tx.tx_id + " was not approved");

    const auto& stream = workload.stream;
    std::vector<Track> tracks(stream.size());
    Gateway gw(ch, config.retry_limit);
    std::deque<std::pair<TxId, Gateway::Ticket>> fifo;  // mirrors the channel's pending queue
    std::map<TxType, std::size_t> conflicts;

    RoundMetrics out;
    out.send_rate = workload.send_rate;
    double t_free = static_cast<double>(now + 1000) / 1000.0;
    std::size_t next = 0;

    while (next < stream.size()) {
        const int phase = stream[next].phase;
        const double phase_start = t_free;
        std::size_t end = next;
        while (end < stream.size() && stream[end].phase == phase) ++end;
        auto arrival = [&](std::size_t i) { return phase_start + static_cast<double>(stream[i].at_us) / 1e6; };
        auto submit_until = [&](double t) {
            for (; next < end && arrival(next) <= t; ++next) {
                const double at = arrival(next);
                const auto ticket = gw.submit(stream[next].submitter, stream[next].invocation, to_millis(at));
                const auto& id = gw.submission(ticket).current;
                fifo.emplace_back(id, ticket);
                tracks[ticket].type = stream[next].type;
                tracks[ticket].submit_s = at;
            }
        };

        while (next < end || !fifo.empty()) {
            double start = t_free;
            if (fifo.empty()) start = std::max(t_free, arrival(next));
            submit_until(start);
            const auto k = std::min(config.block_size, fifo.size());
            double service = 0;
            for (std::size_t j = 0; j < k; ++j) service += config.service_seconds(tracks[fifo[j].second].type);
            const double commit = start + service;
            submit_until(commit);

            auto block = ch.commit_block(to_millis(commit), k);
            if (!block || block->transactions.size() != k)
                throw Error(Errc::state_error, "committer and pending queue disagree");
            ++out.blocks;
            std::vector<Gateway::Ticket> in_block;
            for (const auto& tx : block->transactions) {
                if (tx.tx_id != fifo.front().first) throw Error(Errc::state_error, "block order diverged from FIFO");
                in_block.push_back(fifo.front().second);
                fifo.pop_front();
                if (tx.validity == Validity::mvcc_conflict) ++conflicts[tracks[in_block.back()].type];
            }
            for (auto ticket : gw.on_block(*block, to_millis(commit)))
                fifo.emplace_back(gw.submission(ticket).current, ticket);
            for (auto ticket : in_block) {
                if (!gw.settled(ticket)) continue;
                tracks[ticket].commit_s = commit;
                tracks[ticket].final = *gw.submission(ticket).final->validity;
                tracks[ticket].settled = true;
            }
            t_free = commit;
        }
    }

    std::map<TxType, std::vector<const Track*>> by_type;
    std::vector<const Track*> all;
    double first = 0, last = 0, in_system = 0;
    for (const auto& t : tracks) {
        if (!t.settled) throw Error(Errc::state_error, "transaction left unsettled");
        by_type[t.type].push_back(&t);
        all.push_back(&t);
        first = all.size() == 1 ? t.submit_s : std::min(first, t.submit_s);
        last = std::max(last, t.commit_s);
        in_system += t.commit_s - t.submit_s;
    }
    std::size_t total_conflicts = 0;
    for (const auto& [type, list] : by_type) {
        out.by_type[type] = summarize(list, conflicts[type], workload.send_rate);
        total_conflicts += conflicts[type];
    }
    out.overall = summarize(all, total_conflicts, workload.send_rate);
    out.duration_s = last - first;
    if (out.duration_s > 0) out.mean_in_system = in_system / out.duration_s;
    out.arrival_times_latency = workload.send_rate * out.overall.latency_avg;
    return out;
}

}  // namespace transit::bench

#pragma once

#include "transit/ledger/channel.hpp"

#include <unordered_map>
#include <vector>

namespace transit {

/// Client-side submission tracking with MVCC retry. A transaction that
/// commits as mvcc-conflict is re-endorsed against the latest state and
/// resubmitted, at most `retry_limit` times. Latency is measured from the
/// first submission.
class Gateway {
public:
    using Ticket = std::size_t;

    struct Submission {
        std::string submitter;
        Invocation invocation;
        Millis first_submit = 0;
        int attempts = 0;
        TxId current;
        std::optional<TransactionRecord> final;  // set once no further retry happens
    };

    explicit Gateway(Channel& channel, int retry_limit = 3)
        : channel_(channel), retry_limit_(retry_limit) {}

    Ticket submit(std::string submitter, Invocation invocation, Millis now);

    /// Feed every block committed on the channel. Conflicted transactions
    /// with retries left are resubmitted at `now`; the returned tickets were
    /// resubmitted.
    std::vector<Ticket> on_block(const Block& block, Millis now);

    const Submission& submission(Ticket t) const { return subs_.at(t); }
    bool settled(Ticket t) const { return subs_.at(t).final.has_value(); }
    std::size_t size() const noexcept { return subs_.size(); }
    std::size_t in_flight() const noexcept { return by_tx_.size(); }
    Channel& channel() noexcept { return channel_; }

private:
    Channel& channel_;
    int retry_limit_;
    std::vector<Submission> subs_;
    std::unordered_map<TxId, Ticket> by_tx_;
};

}  // namespace transit

#include "transit/ledger/gateway.hpp"

namespace transit {

Gateway::Ticket Gateway::submit(std::string submitter, Invocation invocation, Millis now) {
    Submission s;
    s.submitter = std::move(submitter);
    s.invocation = std::move(invocation);
    s.first_submit = now;
    s.attempts = 1;
    s.current = channel_.submit(s.submitter, s.invocation, now);
    const Ticket t = subs_.size();
    by_tx_.emplace(s.current, t);
    subs_.push_back(std::move(s));
    return t;
}

std::vector<Gateway::Ticket> Gateway::on_block(const Block& block, Millis now) {
    std::vector<Ticket> retried;
    for (const auto& tx : block.transactions) {
        auto it = by_tx_.find(tx.tx_id);
        if (it == by_tx_.end()) continue;
        const Ticket t = it->second;
        by_tx_.erase(it);
        auto& s = subs_[t];
        if (tx.validity == Validity::mvcc_conflict && s.attempts <= retry_limit_) {
            ++s.attempts;
            s.current = channel_.submit(s.submitter, s.invocation, now);
            by_tx_.emplace(s.current, t);
            retried.push_back(t);
        } else {
            s.final = tx;
        }
    }
    return retried;
}

}  // namespace transit

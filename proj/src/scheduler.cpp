// SPDX-License-Identifier: Apache-2.0

#include "robustlink/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace robustlink::scheduler {

UserLedger::UserLedger(int ack_delay, double floor) : ack_delay_(ack_delay), floor_(floor)
{
    if (ack_delay < 0) {
        throw std::invalid_argument("UserLedger: negative acknowledgement delay");
    }
    if (!(floor > 0.0)) {
        throw std::invalid_argument("UserLedger: throughput floor must be > 0");
    }
}

bool UserLedger::advance(double capacity, const std::optional<RateDecision>& decision)
{
    const long slot = elapsed_ + 1;
    bool success = false;
    double delivered = 0.0;
    if (decision) {
        success = decision->rate <= capacity;
        delivered = success ? decision->rate : 0.0;
        pending_.push_back({slot, decision->rate, 1.0 - decision->outage, success});
    }
    elapsed_ = slot;
    throughput_ += (delivered - throughput_) / static_cast<double>(slot);
    raw_sum_ += delivered;

    // Slot n is acknowledged once n <= N - Delta - 1 for the next slot N = elapsed + 1.
    while (acked_slots_ < elapsed_ - ack_delay_) {
        fold(acked_slots_ + 1);
    }
    return success;
}

void UserLedger::fold(long slot)
{
    double delivered = 0.0;
    if (!pending_.empty() && pending_.front().slot == slot) {
        const auto& tx = pending_.front();
        delivered = tx.success ? tx.rate : 0.0;
        pending_.erase(pending_.begin());
    }
    acked_slots_ = slot;
    acked_throughput_ += (delivered - acked_throughput_) / static_cast<double>(slot);
}

double UserLedger::acknowledged_throughput() const
{
    return std::max(acked_throughput_, floor_);
}

double UserLedger::known_sum() const
{
    const double slots = static_cast<double>(acked_slots_);
    return std::max(slots * acked_throughput_, floor_ * std::max(1.0, slots));
}

double UserLedger::throughput() const
{
    return std::max(throughput_, floor_);
}

double UserLedger::direct_throughput() const
{
    return elapsed_ == 0 ? floor_ : std::max(raw_sum_ / static_cast<double>(elapsed_), floor_);
}

bool resolve_and_advance(UserLedger& ledger, double capacity,
                         const std::optional<RateDecision>& decision)
{
    return ledger.advance(capacity, decision);
}

double expected_rate(const RateDecision& decision)
{
    return (1.0 - decision.outage) * decision.rate;
}

double metric_immediate(double expected_rate, double previous_throughput)
{
    if (!(previous_throughput > 0.0)) {
        throw std::invalid_argument("metric_immediate: throughput must be > 0");
    }
    return expected_rate / previous_throughput;
}

std::vector<Outcome> enumerate_outcomes(std::span<const PendingTx> pending, int max_pending)
{
    if (static_cast<int>(pending.size()) > max_pending) {
        throw EnumerationLimit("enumerate_outcomes: " + std::to_string(pending.size()) +
                               " pending transmissions exceed the cap of " +
                               std::to_string(max_pending));
    }
    std::vector<Outcome> outcomes{{0.0, 1.0}};
    outcomes.reserve(std::size_t{1} << pending.size());
    for (const auto& tx : pending) {
        const std::size_t n = outcomes.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Outcome base = outcomes[i];
            outcomes[i].probability = base.probability * (1.0 - tx.success_prob);
            outcomes.push_back({base.rate_sum + tx.rate, base.probability * tx.success_prob});
        }
    }
    return outcomes;
}

double expected_inverse_throughput(std::span<const PendingTx> pending, double known_sum,
                                   const EnumerationOptions& options, Rng* fallback_rng)
{
    if (!(known_sum > 0.0)) {
        throw std::invalid_argument("expected_inverse_throughput: known sum must be > 0");
    }
    if (static_cast<int>(pending.size()) <= options.max_pending) {
        double acc = 0.0;
        for (const auto& o : enumerate_outcomes(pending, options.max_pending)) {
            acc += o.probability / (known_sum + o.rate_sum);
        }
        return acc;
    }
    if (!options.monte_carlo_fallback || fallback_rng == nullptr) {
        throw EnumerationLimit("expected_inverse_throughput: too many pending transmissions");
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double acc = 0.0;
    for (int draw = 0; draw < options.fallback_draws; ++draw) {
        double d = 0.0;
        for (const auto& tx : pending) {
            if (u(*fallback_rng) < tx.success_prob) {
                d += tx.rate;
            }
        }
        acc += 1.0 / (known_sum + d);
    }
    return acc / options.fallback_draws;
}

double metric_delayed(double expected_rate, std::span<const PendingTx> pending, double known_sum,
                      const EnumerationOptions& options, Rng* fallback_rng)
{
    return expected_rate * expected_inverse_throughput(pending, known_sum, options, fallback_rng);
}

double metric_delayed(double expected_rate, const UserLedger& ledger,
                      const EnumerationOptions& options, Rng* fallback_rng)
{
    return metric_delayed(expected_rate, ledger.pending(), ledger.known_sum(), options,
                          fallback_rng);
}

std::size_t select_user(std::span<const double> metrics)
{
    if (metrics.empty()) {
        throw std::invalid_argument("select_user: no users");
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < metrics.size(); ++k) {
        if (metrics[k] > metrics[best]) {
            best = k;
        }
    }
    return best;
}

double utility(std::span<const double> throughputs)
{
    double u = 0.0;
    for (double t : throughputs) {
        if (!(t > 0.0)) {
            throw std::domain_error("utility: throughput must be > 0");
        }
        u += std::log(t);
    }
    return u;
}

}  // namespace robustlink::scheduler

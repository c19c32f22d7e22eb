// SPDX-License-Identifier: Apache-2.0
//
// Proportional fair user selection with imperfect CSI.
//
// With immediate acknowledgements the PF metric is the expected rate over the
// past throughput. With acknowledgements delayed by Delta slots the scheduler
// only knows the throughput prefix up to slot N - Delta - 1; the outcomes of
// the nu pending transmissions are averaged out exactly by enumerating all
// 2^nu success patterns:
//
//   metric = R_hat * sum_m P{D = d_m} / (w0 N + d_m)
//
// where w0 N is the acknowledged rate sum and d_m the rate sum of pattern m.

#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "robustlink/random.hpp"
#include "robustlink/rate_adapt.hpp"

namespace robustlink::scheduler {

using rate_adapt::RateDecision;

/// Cold-start throughput, bits/s/Hz. Keeps PF ratios and log utility finite.
inline constexpr double kThroughputFloor = 1e-6;

class EnumerationLimit : public std::length_error {
public:
    using std::length_error::length_error;
};

struct PendingTx {
    long slot = 0;
    double rate = 0.0;          // assigned rate
    double success_prob = 1.0;  // 1 - model outage at assignment time
    bool success = false;       // actual outcome, hidden until acknowledged
};

struct Outcome {
    double rate_sum = 0.0;     // d_m
    double probability = 0.0;  // P{D = d_m}
};

struct EnumerationOptions {
    int max_pending = 22;        // exact enumeration up to 2^22 patterns
    bool monte_carlo_fallback = true;
    int fallback_draws = 10000;
};

/// Per-user throughput bookkeeping under delayed acknowledgements.
class UserLedger {
public:
    explicit UserLedger(int ack_delay = 0, double floor = kThroughputFloor);

    /// Resolve the current slot: record a transmission (if any) with outcome
    /// rate <= capacity, then fold acknowledgements older than the delay.
    /// Returns the success indicator (false when not scheduled).
    bool advance(double capacity, const std::optional<RateDecision>& decision);

    int ack_delay() const { return ack_delay_; }
    double floor() const { return floor_; }
    /// Completed slots, i.e. N - 1 while slot N is being scheduled.
    long elapsed() const { return elapsed_; }
    /// N - Delta - 1 (never negative).
    long acknowledged_slots() const { return acked_slots_; }

    /// Scheduled but unacknowledged transmissions, oldest first.
    std::span<const PendingTx> pending() const { return pending_; }
    int pending_count() const { return static_cast<int>(pending_.size()); }

    /// T[N - Delta - 1], floored.
    double acknowledged_throughput() const;
    /// w0 N = (N - Delta - 1) T[N - Delta - 1], floored at floor * max(1, N - Delta - 1).
    double known_sum() const;
    /// T[N - 1] including unacknowledged outcomes, floored. Ground truth.
    double throughput() const;
    /// Same quantity from the raw rate sum instead of the recursion.
    double direct_throughput() const;

private:
    void fold(long slot);

    int ack_delay_;
    double floor_;
    long elapsed_ = 0;
    long acked_slots_ = 0;
    double acked_throughput_ = 0.0;  // recursion over acknowledged slots
    double throughput_ = 0.0;        // recursion over all slots
    double raw_sum_ = 0.0;
    std::vector<PendingTx> pending_;
};

/// Free-function form of UserLedger::advance.
bool resolve_and_advance(UserLedger& ledger, double capacity,
                         const std::optional<RateDecision>& decision);

double expected_rate(const RateDecision& decision);

/// R_hat / T_prev.
double metric_immediate(double expected_rate, double previous_throughput);

/// All 2^nu success patterns of the pending list (bit j of the index set
/// means transmission j succeeded). Throws EnumerationLimit above max_pending.
std::vector<Outcome> enumerate_outcomes(std::span<const PendingTx> pending,
                                        int max_pending = EnumerationOptions{}.max_pending);

/// E{1 / (known_sum + D)}; exact enumeration, or a Monte-Carlo estimate when
/// nu exceeds the cap and a generator is supplied.
double expected_inverse_throughput(std::span<const PendingTx> pending, double known_sum,
                                   const EnumerationOptions& options = {},
                                   Rng* fallback_rng = nullptr);

double metric_delayed(double expected_rate, std::span<const PendingTx> pending, double known_sum,
                      const EnumerationOptions& options = {}, Rng* fallback_rng = nullptr);

double metric_delayed(double expected_rate, const UserLedger& ledger,
                      const EnumerationOptions& options = {}, Rng* fallback_rng = nullptr);

/// Index of the largest metric; ties go to the lowest index.
std::size_t select_user(std::span<const double> metrics);

/// sum_k ln T_k
double utility(std::span<const double> throughputs);

struct SchedulerDecision {
    long slot = 0;
    std::size_t user = 0;
    std::vector<double> metrics;
    std::vector<RateDecision> decisions;
};

}  // namespace robustlink::scheduler

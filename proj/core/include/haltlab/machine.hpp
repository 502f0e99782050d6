#pragma once

// Model-agnostic machine interface: deterministic step semantics, bounded
// runs with exact halting steps, and tick-exact cost accounting.
//
// Tick model: one tick per followed transition of the simulated machine,
// plus one tick per verdict emission. A bounded run that answers
// "still running at T" therefore always costs exactly T + 1 ticks.

#include <concepts>
#include <cstdint>
#include <optional>
#include <variant>

namespace haltlab {

using StepIndex = std::uint64_t;
using Tick = std::uint64_t;

struct CostLedger {
    Tick simulated_steps = 0;
    Tick verdict_ticks = 0;

    Tick total() const { return simulated_steps + verdict_ticks; }

    CostLedger& operator+=(const CostLedger& other) {
        simulated_steps += other.simulated_steps;
        verdict_ticks += other.verdict_ticks;
        return *this;
    }
};

// Result of a bounded run: either the exact halting step k <= T, or the
// machine was still running when the budget T was exhausted.
class RunVerdict {
public:
    enum class Kind { HaltsAt, RunningAt };

    static RunVerdict halts_at(StepIndex k) { return RunVerdict(Kind::HaltsAt, k); }
    static RunVerdict running_at(StepIndex t) { return RunVerdict(Kind::RunningAt, t); }

    Kind kind() const { return kind_; }
    bool halted() const { return kind_ == Kind::HaltsAt; }
    // Exact halting step for HaltsAt, the exhausted bound for RunningAt.
    StepIndex step() const { return step_; }

    bool operator==(const RunVerdict&) const = default;

private:
    RunVerdict(Kind kind, StepIndex step) : kind_(kind), step_(step) {}
    Kind kind_;
    StepIndex step_;
};

struct RunResult {
    RunVerdict verdict;
    CostLedger ledger;
};

// Outcome of advancing one configuration: the unique successor, or Halted
// when the configuration is already halting and has no successor.
template <typename Config>
class StepOutcome {
public:
    static StepOutcome halted() { return StepOutcome(std::nullopt); }
    static StepOutcome running(Config next) { return StepOutcome(std::move(next)); }

    bool is_halted() const { return !next_.has_value(); }
    const Config& next() const { return *next_; }

private:
    explicit StepOutcome(std::optional<Config> next) : next_(std::move(next)) {}
    std::optional<Config> next_;
};

// A deterministic computational device. Configurations are immutable values;
// next() is only called on non-halting configurations and yields the unique
// successor with its step index advanced by the transition's tick cost.
template <typename M>
concept MachineModel = requires(const M& m, const typename M::Config& c,
                                const typename M::Input& in) {
    typename M::Config;
    typename M::Input;
    { m.initial_config(in) } -> std::same_as<typename M::Config>;
    { m.is_halting(c) } -> std::same_as<bool>;
    { m.next(c) } -> std::same_as<typename M::Config>;
    { c.step } -> std::convertible_to<StepIndex>;
};

template <MachineModel M>
StepOutcome<typename M::Config> step(const M& m, const typename M::Config& config) {
    if (m.is_halting(config)) {
        return StepOutcome<typename M::Config>::halted();
    }
    return StepOutcome<typename M::Config>::running(m.next(config));
}

// Reference bounded run: drives step() one configuration at a time. Kept
// deliberately naive; concrete models may provide an equivalent fast path
// via run_bounded_fast, and tests pin the two against each other.
template <MachineModel M>
RunResult run_bounded_reference(const M& m, const typename M::Input& input, StepIndex bound) {
    typename M::Config config = m.initial_config(input);
    CostLedger ledger;
    while (true) {
        if (m.is_halting(config)) {
            ledger.verdict_ticks = 1;
            return {RunVerdict::halts_at(config.step), ledger};
        }
        if (config.step >= bound) {
            break;
        }
        typename M::Config next = m.next(config);
        if (next.step > bound) {
            // The pending transition costs more ticks than the budget has
            // left (weighted steps); the run is cut mid-transition.
            break;
        }
        ledger.simulated_steps += next.step - config.step;
        config = std::move(next);
    }
    ledger.simulated_steps = bound;
    ledger.verdict_ticks = 1;
    return {RunVerdict::running_at(bound), ledger};
}

template <typename M>
concept HasFastBoundedRun = requires(const M& m, const typename M::Input& in, StepIndex t) {
    { m.run_bounded_fast(in, t) } -> std::same_as<RunResult>;
};

template <MachineModel M>
RunResult run_bounded(const M& m, const typename M::Input& input, StepIndex bound) {
    if constexpr (HasFastBoundedRun<M>) {
        return m.run_bounded_fast(input, bound);
    } else {
        return run_bounded_reference(m, input, bound);
    }
}

// True iff the machine's exact halting step equals k. Answered by bounded
// simulation to step k; no structural shortcut exists for an arbitrary
// machine.
template <MachineModel M>
bool halts_at_exact(const M& m, const typename M::Input& input, StepIndex k) {
    const RunResult r = run_bounded(m, input, k);
    return r.verdict.halted() && r.verdict.step() == k;
}

} // namespace haltlab

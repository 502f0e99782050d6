#include "haltlab/fixpoint.hpp"

#include <algorithm>

namespace haltlab {

ExactHaltFn exact_halt_oracle(tm::TuringMachine machine, tm::TuringMachine::Input input) {
    struct State {
        tm::TuringMachine machine;
        tm::BoundedRunner runner;
        State(tm::TuringMachine m, tm::TuringMachine::Input in)
            : machine(std::move(m)), runner(machine, std::move(in)) {}
    };
    auto state = std::make_shared<State>(std::move(machine), std::move(input));
    return [state](StepIndex k) -> OracleReply {
        const RunResult r = state->runner.run(k);
        return {r.verdict.halted() && r.verdict.step() == k, r.ledger};
    };
}

ExactHaltFn cached_exact_halt_oracle(tm::TuringMachine machine, tm::TuringMachine::Input input) {
    struct State {
        tm::TuringMachine machine;
        tm::Configuration config;
        std::optional<StepIndex> halted_at;
        State(tm::TuringMachine m, const tm::TuringMachine::Input& in)
            : machine(std::move(m)), config(machine.initial_config(in)) {}
    };
    auto state = std::make_shared<State>(std::move(machine), input);
    return [state](StepIndex k) -> OracleReply {
        while (!state->halted_at && state->config.step < k) {
            if (state->machine.is_halting(state->config)) {
                state->halted_at = state->config.step;
                break;
            }
            state->config = state->machine.next(state->config);
        }
        if (!state->halted_at && state->machine.is_halting(state->config)) {
            state->halted_at = state->config.step;
        }
        // Ledger a fresh bounded run to k would report: min(K, k) simulated
        // transitions plus the verdict tick.
        CostLedger ledger;
        ledger.simulated_steps = state->halted_at ? std::min(*state->halted_at, k) : k;
        ledger.verdict_ticks = 1;
        return {state->halted_at && *state->halted_at == k, ledger};
    };
}

namespace {

bool query(const ExactHaltFn& oracle, StepIndex k, CostLedger* cost) {
    const OracleReply reply = oracle(k);
    if (cost) *cost += reply.cost;
    return reply.halts_at_exact;
}

Obs zero_branch(const ExactHaltFn& oracle, StepIndex index, FVariant variant, CostLedger* cost) {
    const bool exact = query(oracle, index, cost);
    if (variant == FVariant::SwapZeroOne) return exact ? Obs::Zero : Obs::One;
    return exact ? Obs::One : Obs::Zero;
}

Obs base_value(const ExactHaltFn& oracle, FVariant variant, CostLedger* cost) {
    const StepIndex probe = variant == FVariant::BaseOffByOne ? 1 : 0;
    return query(oracle, probe, cost) ? Obs::One : Obs::Zero;
}

// Value of F(p) at index k+1, determined by p(k) alone.
Obs succ_value(const ExactHaltFn& oracle, Obs prev, StepIndex next_index, FVariant variant,
               CostLedger* cost) {
    switch (prev) {
    case Obs::Undefined:
        if (variant == FVariant::DropBottomPropagation) {
            return zero_branch(oracle, next_index, variant, cost);
        }
        return Obs::Undefined;
    case Obs::One:
        return Obs::One;
    case Obs::Zero:
        return zero_branch(oracle, next_index, variant, cost);
    }
    return Obs::Undefined;
}

void put(PartialObservation::EntryMap& entries, StepIndex k, Obs v) {
    if (v != Obs::Undefined) entries[k] = (v == Obs::One);
}

} // namespace

PartialObservation apply_F(const ExactHaltFn& oracle, const PartialObservation& p,
                           StepIndex window, FVariant variant, CostLedger* cost) {
    PartialObservation::EntryMap entries;
    put(entries, 0, base_value(oracle, variant, cost));

    switch (p.tail()) {
    case TailKind::Bottom: {
        if (variant == FVariant::DropBottomPropagation) {
            for (StepIndex k = 0; k + 1 < window; ++k) {
                put(entries, k + 1, succ_value(oracle, p.lookup(k), k + 1, variant, cost));
            }
            // Defined positions beyond the window still extend by one step.
            for (const auto& [k, v] : p.entries()) {
                if (k + 1 >= window) {
                    put(entries, k + 1,
                        succ_value(oracle, v ? Obs::One : Obs::Zero, k + 1, variant, cost));
                }
            }
        } else {
            for (const auto& [k, v] : p.entries()) {
                put(entries, k + 1,
                    succ_value(oracle, v ? Obs::One : Obs::Zero, k + 1, variant, cost));
            }
        }
        return PartialObservation::make(std::move(entries), TailKind::Bottom);
    }
    case TailKind::ZeroClaim: {
        // Case analysis on a finite window plus claim propagation: if no 1
        // surfaces, the claim carries through; a refuted claim cannot be
        // represented with a zero tail, so the result is truncated to the
        // window's entries with no tail information.
        bool refuted = false;
        for (StepIndex k = 0; k + 1 < window; ++k) {
            put(entries, k + 1, succ_value(oracle, p.lookup(k), k + 1, variant, cost));
        }
        for (const auto& [k, v] : entries) {
            (void)k;
            if (v) refuted = true;
        }
        if (refuted) {
            return PartialObservation::make(std::move(entries), TailKind::Bottom);
        }
        return PartialObservation::make(std::move(entries), TailKind::ZeroClaim);
    }
    case TailKind::OneFrom: {
        const StepIndex from = p.one_from();
        for (const auto& [k, v] : p.entries()) {
            put(entries, k + 1, succ_value(oracle, v ? Obs::One : Obs::Zero, k + 1, variant, cost));
        }
        if (variant == FVariant::DropBottomPropagation) {
            for (StepIndex k = 0; k + 1 < window && k < from; ++k) {
                if (p.lookup(k) == Obs::Undefined) {
                    put(entries, k + 1, succ_value(oracle, Obs::Undefined, k + 1, variant, cost));
                }
            }
        }
        // p(k) = 1 for every k >= from, so F(p) is 1 from from + 1 on;
        // canonicalization lowers the tail through any adjacent 1-entries.
        return PartialObservation::make(std::move(entries), TailKind::OneFrom, from + 1);
    }
    }
    return PartialObservation::bottom();
}

ChainRecord iterate_chain(const ExactHaltFn& oracle, StepIndex n_stages, FVariant variant,
                          StepIndex window) {
    ChainRecord record;
    record.stages.push_back(PartialObservation::bottom());
    record.ledger_per_stage.push_back(CostLedger{});
    for (StepIndex i = 0; i < n_stages; ++i) {
        CostLedger cost;
        record.stages.push_back(apply_F(oracle, record.stages.back(), window, variant, &cost));
        record.ledger_per_stage.push_back(cost);
    }
    return record;
}

FixedPointCheck is_fixed_point(const ExactHaltFn& oracle, const PartialObservation& p,
                               StepIndex window, FVariant variant) {
    const PartialObservation q = apply_F(oracle, p, window, variant, nullptr);
    const StepIndex scan = std::max(p.horizon(), q.horizon()) + 1;
    for (StepIndex k = 0; k <= scan; ++k) {
        if (p.lookup(k) != q.lookup(k)) {
            return {false, k};
        }
    }
    // Canonical values that agree pointwise through both horizons plus one
    // tail sample are structurally equal.
    return {true, std::nullopt};
}

} // namespace haltlab

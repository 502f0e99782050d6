#pragma once

// The halting-observation operator F over partial observations, the
// ascending chain from bottom, fixed-point checks, fully-resolved
// observations for halting machines, and the one-sided decision procedure.
//
// F consults the machine only through exact-halting-step queries at the
// single index its case table needs; machines are abstracted behind
// ExactHaltFn so any model (or a test stub) can drive it.

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "haltlab/errors.hpp"
#include "haltlab/machine.hpp"
#include "haltlab/obs.hpp"
#include "haltlab/tm.hpp"

namespace haltlab {

struct OracleReply {
    bool halts_at_exact = false;
    CostLedger cost;
};

// k -> "does the machine halt at exactly step k", with the simulation cost
// of answering.
using ExactHaltFn = std::function<OracleReply(StepIndex)>;

// Generic adapter: every query is an honest bounded run to step k.
template <MachineModel M>
ExactHaltFn exact_halt_oracle(M machine, typename M::Input input) {
    auto state = std::make_shared<std::pair<M, typename M::Input>>(std::move(machine),
                                                                   std::move(input));
    return [state](StepIndex k) -> OracleReply {
        const RunResult r = run_bounded(state->first, state->second, k);
        return {r.verdict.halted() && r.verdict.step() == k, r.ledger};
    };
}

// Buffered adapter for Turing machines: same answers and the same per-query
// ledgers as the generic one, but reuses a tape image across the thousands
// of bounded runs a chain iteration issues.
ExactHaltFn exact_halt_oracle(tm::TuringMachine machine, tm::TuringMachine::Input input);

// Caching adapter: extends one simulation incrementally instead of
// re-running per query. Answers and reported ledgers are tick-identical to
// the fresh adapters (the tick model is deterministic), which the suite
// cross-checks; use it for bulk sweeps.
ExactHaltFn cached_exact_halt_oracle(tm::TuringMachine machine, tm::TuringMachine::Input input);

// The operator's case table plus the three documented mutants used to
// check suite sensitivity (see docs/formats.md).
enum class FVariant {
    Standard,
    SwapZeroOne,           // swap the two outputs of the p(k) = 0 branch
    DropBottomPropagation, // treat undefined p(k) as 0
    BaseOffByOne,          // base case observes step 1 instead of step 0
};

// One application of F. The window bounds evaluation for total
// (tail-carrying) inputs and for the bottom-dropping mutant; finite
// observations are extended exactly (one new index), independent of the
// window. Oracle costs are accumulated into *cost when given.
PartialObservation apply_F(const ExactHaltFn& oracle, const PartialObservation& p,
                           StepIndex window = 64, FVariant variant = FVariant::Standard,
                           CostLedger* cost = nullptr);

// The chain p0 = bottom, p_{i+1} = F(p_i), with the simulation ticks spent
// computing each stage.
struct ChainRecord {
    std::vector<PartialObservation> stages;
    std::vector<CostLedger> ledger_per_stage;
};

ChainRecord iterate_chain(const ExactHaltFn& oracle, StepIndex n_stages,
                          FVariant variant = FVariant::Standard, StepIndex window = 64);

struct FixedPointCheck {
    bool fixed = false;
    // First index where p and F(p) disagree (value or definedness); for a
    // hole-free finite observation this equals its defined-set size.
    std::optional<StepIndex> witness;
};

FixedPointCheck is_fixed_point(const ExactHaltFn& oracle, const PartialObservation& p,
                               StepIndex window = 64, FVariant variant = FVariant::Standard);

// Fully-resolved observation of a halting machine: zeros below the exact
// halting step, ones from it on. Never fabricates an all-zeros claim for a
// machine that merely has not halted yet.
struct StillRunning {
    StepIndex fuel;
};
using OmegaResult = std::variant<PartialObservation, StillRunning>;

template <MachineModel M>
OmegaResult make_p_omega(const M& machine, const typename M::Input& input, StepIndex fuel) {
    const RunResult r = run_bounded(machine, input, fuel);
    if (r.verdict.halted()) {
        return PartialObservation::resolved_halting(r.verdict.step());
    }
    return StillRunning{fuel};
}

// One-sided decision: scan an increasing fuel schedule; answer positively at
// the first schedule point at or beyond the halting step, and never answer
// "does not halt".
struct SemiDecision {
    std::optional<StepIndex> halts_at;
    StepIndex schedule_point = 0; // answering fuel, or the last fuel tried
    std::vector<RunResult> attempts;

    bool positive() const { return halts_at.has_value(); }
};

template <MachineModel M>
SemiDecision semidecide_halts(const M& machine, const typename M::Input& input,
                              const std::vector<StepIndex>& schedule) {
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (schedule[i] <= schedule[i - 1]) {
            throw ValidationError("fuel schedule must be strictly increasing");
        }
    }
    SemiDecision out;
    for (StepIndex fuel : schedule) {
        const RunResult r = run_bounded(machine, input, fuel);
        out.attempts.push_back(r);
        out.schedule_point = fuel;
        if (r.verdict.halted()) {
            out.halts_at = r.verdict.step();
            return out;
        }
    }
    return out;
}

} // namespace haltlab

#pragma once

// Property-suite engine: every cross-module law the harness can check, as
// individually runnable properties with a deterministic, seed-driven
// report. The CLI `suite` command and the acceptance runner both feed off
// this so their verdicts cannot drift apart.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "haltlab/fixpoint.hpp"
#include "haltlab/guest_vm.hpp"
#include "haltlab/obs.hpp"
#include "haltlab/tm.hpp"

namespace haltlab::suite {

struct Scale {
    std::uint64_t seed = 1;
    FVariant variant = FVariant::Standard;

    StepIndex chain_stages = 64;
    std::uint32_t enum_states = 2;
    std::uint32_t enum_symbols = 2;

    StepIndex obs_positions = 5;        // exhaustive observations on {0..4}
    std::size_t monotonicity_machines = 50;
    std::size_t continuity_machines = 20;
    std::size_t continuity_sets = 1000;

    StepIndex window = 64;
    StepIndex omega_fuel = 64;
    std::size_t omega_search_machines = 40; // sampled halting machines for the search

    StepIndex overhead_max_bound = 100;
    StepIndex diag_max_bound = 25;

    std::vector<StepIndex> fuel_schedule = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
};

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::uint64_t checks = 0;
    std::string detail; // first failure, or a one-line summary
};

struct SuiteReport {
    std::uint64_t seed = 0;
    FVariant variant = FVariant::Standard;
    std::vector<PropertyResult> results;

    bool all_passed() const {
        for (const auto& r : results) {
            if (!r.passed) return false;
        }
        return true;
    }
};

SuiteReport run_suite(const Scale& scale);

// Individual properties (acceptance criteria pick these out one by one).
// The chain pass yields two results from a single sweep: the stage-shape
// law and the no-bounded-fixed-point law.
std::pair<PropertyResult, PropertyResult> prop_chain_laws(const Scale& scale);
PropertyResult prop_monotonicity(const Scale& scale);
PropertyResult prop_continuity(const Scale& scale);
PropertyResult prop_omega_least_fixed_point(const Scale& scale);
PropertyResult prop_overhead_tightness(const Scale& scale);
PropertyResult prop_diagonal_contradiction(const Scale& scale);
PropertyResult prop_semidecidability(const Scale& scale);
PropertyResult prop_order_laws(const Scale& scale);
PropertyResult prop_lub_laws(const Scale& scale);
PropertyResult prop_stepper_equivalence(const Scale& scale);
PropertyResult prop_exact_halt_uniqueness(const Scale& scale);
PropertyResult prop_determinism(const Scale& scale);
PropertyResult prop_verdict_consistency(const Scale& scale);
PropertyResult prop_quine_fidelity(const Scale& scale);
PropertyResult prop_exec_cost_law(const Scale& scale);
PropertyResult prop_oracle_equivalence(const Scale& scale);

// Shared fixtures (the machines/ directory mirrors these as files).
tm::MachineSpec fixture_halt0();
tm::MachineSpec fixture_halt2();
tm::MachineSpec fixture_halt5();
tm::MachineSpec fixture_loop();
guest::Program fixture_guest_halt();
guest::Program fixture_guest_inc_halt();
guest::Program fixture_guest_loop();

// All observations with entries inside {0..n-1} and no tail (3^n lookup
// patterns), optionally restricted to the monotone fragment. Deterministic
// order.
std::vector<PartialObservation> all_bottom_observations(StepIndex n, bool monotone_only);

const char* variant_name(FVariant v);

} // namespace haltlab::suite

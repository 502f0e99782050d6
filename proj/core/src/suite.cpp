#include "haltlab/suite.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "haltlab/errors.hpp"

namespace haltlab::suite {

const char* variant_name(FVariant v) {
    switch (v) {
    case FVariant::Standard: return "standard";
    case FVariant::SwapZeroOne: return "swap-zero-one";
    case FVariant::DropBottomPropagation: return "drop-bottom-propagation";
    case FVariant::BaseOffByOne: return "base-off-by-one";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Fixtures

tm::MachineSpec fixture_halt0() {
    tm::MachineSpec spec;
    spec.states = {"q0"};
    spec.tape_alphabet = {"_"};
    spec.blank = 0;
    spec.start_state = 0;
    spec.halt_states = {0};
    spec.validate();
    return spec;
}

tm::MachineSpec fixture_halt2() {
    tm::MachineSpec spec;
    spec.states = {"q0", "q1", "qh"};
    spec.tape_alphabet = {"_", "1"};
    spec.blank = 0;
    spec.start_state = 0;
    spec.halt_states = {2};
    spec.transitions[{0, 0}] = {1, 0, tm::Move::Right};
    spec.transitions[{0, 1}] = {1, 1, tm::Move::Right};
    spec.transitions[{1, 0}] = {2, 0, tm::Move::Right};
    spec.transitions[{1, 1}] = {2, 1, tm::Move::Right};
    spec.validate();
    return spec;
}

tm::MachineSpec fixture_halt5() {
    tm::MachineSpec spec;
    for (int i = 0; i < 5; ++i) spec.states.push_back("q" + std::to_string(i));
    spec.states.push_back("qh");
    spec.tape_alphabet = {"_"};
    spec.blank = 0;
    spec.start_state = 0;
    spec.halt_states = {5};
    for (std::uint32_t i = 0; i < 5; ++i) {
        spec.transitions[{i, 0}] = {i + 1, 0, tm::Move::Right};
    }
    spec.validate();
    return spec;
}

tm::MachineSpec fixture_loop() {
    tm::MachineSpec spec;
    spec.states = {"q0", "qh"};
    spec.tape_alphabet = {"_", "1"};
    spec.blank = 0;
    spec.start_state = 0;
    spec.halt_states = {1}; // declared but unreachable
    spec.transitions[{0, 0}] = {0, 0, tm::Move::Right};
    spec.transitions[{0, 1}] = {0, 1, tm::Move::Right};
    spec.validate();
    return spec;
}

guest::Program fixture_guest_halt() {
    return guest::Program::from_instructions({guest::Instruction{guest::Opcode::Halt}}, false);
}

guest::Program fixture_guest_inc_halt() {
    return guest::Program::from_instructions(
        {guest::Instruction{guest::Opcode::Inc, 0}, guest::Instruction{guest::Opcode::Halt}},
        false);
}

guest::Program fixture_guest_loop() {
    return guest::Program::from_instructions({guest::Instruction{guest::Opcode::Loop}}, false);
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    std::uint64_t below(std::uint64_t n) { return n ? engine() % n : 0; }
};

struct Check {
    PropertyResult result;
    explicit Check(std::string name) { result.name = std::move(name); result.passed = true; }

    void fail(const std::string& detail) {
        if (result.passed) {
            result.passed = false;
            result.detail = detail;
        }
    }
    void expect(bool ok, const std::string& detail) {
        ++result.checks;
        if (!ok) fail(detail);
    }
    PropertyResult done(const std::string& summary = "") {
        if (result.passed && result.detail.empty()) result.detail = summary;
        return result;
    }
};

std::vector<std::uint64_t> sample_indices(Rng& rng, std::uint64_t total, std::size_t want) {
    std::vector<std::uint64_t> out;
    if (total == 0) return out;
    if (want >= total) {
        for (std::uint64_t i = 0; i < total; ++i) out.push_back(i);
        return out;
    }
    std::set<std::uint64_t> seen;
    while (seen.size() < want) seen.insert(rng.below(total));
    out.assign(seen.begin(), seen.end());
    return out;
}

// Exact halting step within the probe horizon, or nullopt.
std::optional<StepIndex> probe_halting_step(const tm::TuringMachine& m,
                                            const tm::TuringMachine::Input& input,
                                            StepIndex horizon) {
    const RunResult r = run_bounded(m, input, horizon);
    if (r.verdict.halted()) return r.verdict.step();
    return std::nullopt;
}

// Value-only oracle from a known halting step; ledgers match what a fresh
// bounded run would report. Valid for queries at or below the horizon the
// step was probed with.
ExactHaltFn known_step_oracle(std::optional<StepIndex> halting_step) {
    return [halting_step](StepIndex k) -> OracleReply {
        CostLedger ledger;
        ledger.simulated_steps = halting_step ? std::min(*halting_step, k) : k;
        ledger.verdict_ticks = 1;
        return {halting_step && *halting_step == k, ledger};
    };
}

std::string obs_text(const PartialObservation& p) { return p.to_text(); }

// An independently written reference stepper: interprets the declarative
// spec directly, stores blanks explicitly, and never prunes the tape. Used
// to pin the compiled runner's semantics.
struct NaiveStepper {
    const tm::MachineSpec& spec;
    std::map<std::int64_t, tm::SymbolId> tape;
    std::int64_t head = 0;
    tm::StateId state;
    StepIndex steps = 0;

    NaiveStepper(const tm::MachineSpec& s, const std::vector<tm::SymbolId>& input) : spec(s) {
        state = s.start_state;
        for (std::size_t i = 0; i < input.size(); ++i) {
            tape[static_cast<std::int64_t>(i)] = input[i];
        }
    }

    bool halted() const { return spec.halt_states.count(state) != 0; }

    void advance() {
        const auto cell = tape.find(head);
        const tm::SymbolId scanned = cell == tape.end() ? spec.blank : cell->second;
        const auto rule = spec.transitions.find({state, scanned});
        tape[head] = rule->second.write;
        switch (rule->second.move) {
        case tm::Move::Left: --head; break;
        case tm::Move::Right: ++head; break;
        case tm::Move::Stay: break;
        }
        state = rule->second.next_state;
        ++steps;
    }

    RunResult run_bounded(StepIndex bound) {
        while (!halted() && steps < bound) advance();
        CostLedger ledger;
        ledger.verdict_ticks = 1;
        if (halted()) {
            ledger.simulated_steps = steps;
            return {RunVerdict::halts_at(steps), ledger};
        }
        ledger.simulated_steps = bound;
        return {RunVerdict::running_at(bound), ledger};
    }

    // Canonical view for comparison against Configuration (blanks pruned).
    std::map<std::int64_t, tm::SymbolId> pruned_tape() const {
        std::map<std::int64_t, tm::SymbolId> out;
        for (const auto& [k, v] : tape) {
            if (v != spec.blank) out[k] = v;
        }
        return out;
    }
};

struct NamedMachine {
    std::string label;
    tm::TuringMachine machine;
    tm::TuringMachine::Input input;
};

std::vector<NamedMachine> tm_fixture_machines() {
    std::vector<NamedMachine> out;
    const std::vector<std::pair<std::string, tm::MachineSpec>> fixtures = {
        {"fixture/m_halt0", fixture_halt0()},
        {"fixture/m_halt2", fixture_halt2()},
        {"fixture/m_halt5", fixture_halt5()},
        {"fixture/m_loop", fixture_loop()},
    };
    for (const auto& [label, spec] : fixtures) {
        out.push_back({label, tm::TuringMachine(spec), tm::self_input(spec)});
    }
    return out;
}

} // namespace

std::vector<PartialObservation> all_bottom_observations(StepIndex n, bool monotone_only) {
    std::vector<PartialObservation> out;
    std::uint64_t total = 1;
    for (StepIndex i = 0; i < n; ++i) total *= 3;
    for (std::uint64_t code = 0; code < total; ++code) {
        PartialObservation::EntryMap entries;
        std::uint64_t rest = code;
        for (StepIndex k = 0; k < n; ++k) {
            const std::uint64_t digit = rest % 3;
            rest /= 3;
            if (digit == 1) entries[k] = false;
            if (digit == 2) entries[k] = true;
        }
        PartialObservation p = PartialObservation::make(std::move(entries), TailKind::Bottom);
        if (monotone_only && !p.is_monotone()) continue;
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chain laws (stage shape + no bounded fixed point), one sweep

std::pair<PropertyResult, PropertyResult> prop_chain_laws(const Scale& scale) {
    Check shape("chain-shape-law");
    Check nofp("no-bounded-fixed-point");

    const StepIndex n = scale.chain_stages;
    std::uint64_t machines_checked = 0;

    auto check_chain = [&](const std::string& label, const ExactHaltFn& oracle) {
        const ChainRecord record = iterate_chain(oracle, n, scale.variant, scale.window);
        for (StepIndex i = 0; i <= n; ++i) {
            const PartialObservation& stage = record.stages[i];
            // Defined set is exactly {0..i-1}: i entries, all below i, no tail.
            bool ok = stage.tail() == TailKind::Bottom && stage.entry_count() == i &&
                      in_bounded_class(stage, i) && (i == 0 || !in_bounded_class(stage, i - 1));
            shape.expect(ok, label + ": stage " + std::to_string(i) +
                                 " has defined set != {0.." + std::to_string(i) + "-1}: " +
                                 obs_text(stage));
            if (i > 0) {
                shape.expect(leq(record.stages[i - 1], stage),
                             label + ": chain not ascending at stage " + std::to_string(i));
            }
            // The next stage IS F(stage), so comparing adjacent stages is the
            // fixed-point check; exercise the public operation on the small
            // prefix and at the top as well.
            std::optional<StepIndex> witness;
            bool fixed = true;
            if (i < n) {
                const PartialObservation& next = record.stages[i + 1];
                const StepIndex scan = std::max(stage.horizon(), next.horizon()) + 1;
                for (StepIndex k = 0; k <= scan; ++k) {
                    if (stage.lookup(k) != next.lookup(k)) {
                        fixed = false;
                        witness = k;
                        break;
                    }
                }
            }
            if (i >= n || i <= 4) {
                const FixedPointCheck direct = is_fixed_point(oracle, stage, scale.window, scale.variant);
                fixed = direct.fixed;
                witness = direct.witness;
            }
            nofp.expect(!fixed && witness && *witness == i,
                        label + ": stage " + std::to_string(i) +
                            " fixed-point check wrong (fixed=" + (fixed ? "yes" : "no") +
                            ", witness=" +
                            (witness ? std::to_string(*witness) : std::string("none")) + ")");
        }
        ++machines_checked;
    };

    const tm::MachineEnumerator all = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    all.for_each([&](const tm::MachineSpec& spec) {
        tm::TuringMachine m(spec);
        check_chain("enum", cached_exact_halt_oracle(m, tm::self_input(spec)));
    });
    for (const auto& named : tm_fixture_machines()) {
        check_chain(named.label, cached_exact_halt_oracle(named.machine, named.input));
    }
    for (const auto& [label, prog] :
         std::vector<std::pair<std::string, guest::Program>>{{"guest/halt", fixture_guest_halt()},
                                                             {"guest/inc-halt", fixture_guest_inc_halt()},
                                                             {"guest/loop", fixture_guest_loop()}}) {
        check_chain(label, exact_halt_oracle(prog, guest::Nat(0)));
    }

    const std::string summary = std::to_string(machines_checked) + " machines, " +
                                std::to_string(n) + " stages each";
    return {shape.done(summary), nofp.done(summary)};
}

// ---------------------------------------------------------------------------
// Monotonicity of F

PropertyResult prop_monotonicity(const Scale& scale) {
    Check check("monotonicity");
    Rng rng(scale.seed ^ 0x6d6f6e6fULL);

    const auto observations = all_bottom_observations(scale.obs_positions, true);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < observations.size(); ++i) {
        for (std::size_t j = 0; j < observations.size(); ++j) {
            if (i != j && leq(observations[i], observations[j])) pairs.emplace_back(i, j);
        }
    }

    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    const auto indices = sample_indices(rng, en.count(), scale.monotonicity_machines);
    const StepIndex horizon = scale.obs_positions + 4;

    for (std::uint64_t idx : indices) {
        const tm::MachineSpec spec = en.at(idx);
        const tm::TuringMachine m(spec);
        const auto oracle = known_step_oracle(probe_halting_step(m, tm::self_input(spec), horizon));
        std::vector<PartialObservation> images;
        images.reserve(observations.size());
        for (const auto& p : observations) {
            images.push_back(apply_F(oracle, p, scale.window, scale.variant));
        }
        for (const auto& [i, j] : pairs) {
            check.expect(leq(images[i], images[j]),
                         "machine #" + std::to_string(idx) + ": F not monotone on " +
                             obs_text(observations[i]) + " below " + obs_text(observations[j]));
        }
    }
    return check.done(std::to_string(indices.size()) + " machines x " +
                      std::to_string(pairs.size()) + " ordered pairs");
}

// ---------------------------------------------------------------------------
// Continuity of F on finite directed sets

PropertyResult prop_continuity(const Scale& scale) {
    Check check("continuity");
    Rng rng(scale.seed ^ 0x636f6e74ULL);

    const auto monotone = all_bottom_observations(scale.obs_positions, true);
    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    const auto indices = sample_indices(rng, en.count(), scale.continuity_machines);
    const StepIndex horizon = scale.obs_positions + 4;

    for (std::uint64_t idx : indices) {
        const tm::MachineSpec spec = en.at(idx);
        const tm::TuringMachine m(spec);
        const auto oracle = known_step_oracle(probe_halting_step(m, tm::self_input(spec), horizon));

        for (std::size_t round = 0; round < scale.continuity_sets; ++round) {
            // Restrictions of one limit observation, closed under union:
            // always a directed set (chains and compatible fans included).
            const PartialObservation& limit = monotone[rng.below(monotone.size())];
            std::vector<StepIndex> keys;
            for (const auto& [k, v] : limit.entries()) {
                (void)v;
                keys.push_back(k);
            }
            const std::size_t base_count = 1 + rng.below(4);
            std::set<std::uint64_t> masks;
            for (std::size_t b = 0; b < base_count; ++b) {
                masks.insert(rng.below(1ULL << keys.size()));
            }
            // close under union
            while (true) {
                std::set<std::uint64_t> grown = masks;
                for (auto a : masks) {
                    for (auto b : masks) grown.insert(a | b);
                }
                if (grown.size() == masks.size()) break;
                masks = std::move(grown);
            }
            std::vector<PartialObservation> family;
            for (std::uint64_t mask : masks) {
                PartialObservation::EntryMap entries;
                for (std::size_t b = 0; b < keys.size(); ++b) {
                    if (mask & (1ULL << b)) entries[keys[b]] = limit.lookup(keys[b]) == Obs::One;
                }
                family.push_back(PartialObservation::make(std::move(entries), TailKind::Bottom));
            }
            check.expect(is_directed(family), "generated family is not directed");

            const PartialObservation sup = lub(family);
            std::vector<PartialObservation> images;
            images.reserve(family.size());
            for (const auto& p : family) {
                images.push_back(apply_F(oracle, p, scale.window, scale.variant));
            }
            const PartialObservation lhs = apply_F(oracle, sup, scale.window, scale.variant);
            try {
                const PartialObservation rhs = lub(images);
                check.expect(lhs == rhs, "machine #" + std::to_string(idx) + ": F(lub C) = " +
                                             obs_text(lhs) + " but lub F(C) = " + obs_text(rhs));
            } catch (const ConflictError& e) {
                // Images of a directed set must stay compatible; a clash is
                // itself a continuity violation.
                check.expect(false, "machine #" + std::to_string(idx) +
                                        ": F-images of a directed set conflict: " + e.what());
            }
        }
    }
    return check.done(std::to_string(indices.size()) + " machines x " +
                      std::to_string(scale.continuity_sets) + " directed sets");
}

// ---------------------------------------------------------------------------
// Fully-resolved observation: fixed point and least-ness at desk scale

PropertyResult prop_omega_least_fixed_point(const Scale& scale) {
    Check check("omega-least-fixed-point");
    Rng rng(scale.seed ^ 0x6f6d6567ULL);

    struct Subject {
        std::string label;
        ExactHaltFn honest;
        std::optional<StepIndex> halting_step;
        OmegaResult omega;
    };
    std::vector<Subject> subjects;

    auto add_tm = [&](const std::string& label, const tm::MachineSpec& spec) {
        tm::TuringMachine m(spec);
        const auto input = tm::self_input(spec);
        Subject s{label, cached_exact_halt_oracle(m, input),
                  probe_halting_step(m, input, scale.omega_fuel),
                  make_p_omega(m, input, scale.omega_fuel)};
        subjects.push_back(std::move(s));
    };
    add_tm("fixture/m_halt0", fixture_halt0());
    add_tm("fixture/m_halt2", fixture_halt2());
    add_tm("fixture/m_halt5", fixture_halt5());

    for (const auto& [label, prog] : std::vector<std::pair<std::string, guest::Program>>{
             {"guest/halt", fixture_guest_halt()}, {"guest/inc-halt", fixture_guest_inc_halt()}}) {
        const RunResult r = run_bounded(prog, guest::Nat(0), scale.omega_fuel);
        Subject s{label, exact_halt_oracle(prog, guest::Nat(0)),
                  r.verdict.halted() ? std::optional<StepIndex>(r.verdict.step()) : std::nullopt,
                  make_p_omega(prog, guest::Nat(0), scale.omega_fuel)};
        subjects.push_back(std::move(s));
    }

    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    std::size_t found = 0;
    std::uint64_t attempts = 0;
    while (found < scale.omega_search_machines && attempts < 50 * scale.omega_search_machines) {
        const std::uint64_t idx = rng.below(en.count());
        ++attempts;
        const tm::MachineSpec spec = en.at(idx);
        const tm::TuringMachine m(spec);
        const auto input = tm::self_input(spec);
        const auto k = probe_halting_step(m, input, scale.omega_fuel);
        if (!k) continue;
        subjects.push_back({"enum#" + std::to_string(idx), cached_exact_halt_oracle(m, input), k,
                            make_p_omega(m, input, scale.omega_fuel)});
        ++found;
    }

    // Non-halting fixtures must come back as StillRunning, never a claim.
    {
        const tm::TuringMachine loop(fixture_loop());
        const OmegaResult r = make_p_omega(loop, tm::self_input(fixture_loop()), scale.omega_fuel);
        check.expect(std::holds_alternative<StillRunning>(r),
                     "m_loop: make_p_omega fabricated an observation for a running machine");
        const OmegaResult g = make_p_omega(fixture_guest_loop(), guest::Nat(0), scale.omega_fuel);
        check.expect(std::holds_alternative<StillRunning>(g),
                     "guest loop: make_p_omega fabricated an observation");
    }

    for (const Subject& s : subjects) {
        if (!s.halting_step) {
            check.fail(s.label + ": subject unexpectedly non-halting");
            continue;
        }
        const StepIndex k = *s.halting_step;
        if (!std::holds_alternative<PartialObservation>(s.omega)) {
            check.fail(s.label + ": make_p_omega returned StillRunning for a halting machine");
            continue;
        }
        const PartialObservation omega = std::get<PartialObservation>(s.omega);
        check.expect(omega == PartialObservation::resolved_halting(k),
                     s.label + ": p_omega != zeros + ones-from-" + std::to_string(k) + ": " +
                         obs_text(omega));
        const FixedPointCheck fp = is_fixed_point(s.honest, omega, scale.window, scale.variant);
        check.expect(fp.fixed, s.label + ": p_omega is not a fixed point (witness " +
                                   (fp.witness ? std::to_string(*fp.witness) : std::string("-")) +
                                   ")");

        // Exhaustive search over tail-bearing observations with entries on
        // {0..K+2}: no fixed point strictly below p_omega.
        if (k > 12) {
            check.fail(s.label + ": halting step too large for the exhaustive search");
            continue;
        }
        const auto oracle = known_step_oracle(k);
        const StepIndex positions = k + 3;
        std::uint64_t total = 1;
        for (StepIndex i = 0; i < positions; ++i) total *= 3;
        for (std::uint64_t code = 0; code < total; ++code) {
            PartialObservation::EntryMap base;
            std::uint64_t rest = code;
            for (StepIndex pos = 0; pos < positions; ++pos) {
                const std::uint64_t digit = rest % 3;
                rest /= 3;
                if (digit == 1) base[pos] = false;
                if (digit == 2) base[pos] = true;
            }
            for (StepIndex tail_code = 0; tail_code <= positions + 2; ++tail_code) {
                PartialObservation cand =
                    tail_code == 0
                        ? PartialObservation::make(base, TailKind::ZeroClaim)
                        : PartialObservation::make(base, TailKind::OneFrom, tail_code - 1);
                const FixedPointCheck cfp = is_fixed_point(oracle, cand, scale.window, scale.variant);
                ++check.result.checks;
                if (cfp.fixed && leq(cand, omega) && !(cand == omega)) {
                    check.fail(s.label + ": fixed point strictly below p_omega: " + obs_text(cand));
                }
                if (cfp.fixed && scale.variant == FVariant::Standard) {
                    // With the honest table the resolved observation is the
                    // only fixed point in this search space.
                    check.expect(cand == omega,
                                 s.label + ": unexpected extra fixed point " + obs_text(cand));
                }
            }
        }
    }
    return check.done(std::to_string(subjects.size()) + " halting subjects searched");
}

// ---------------------------------------------------------------------------
// Tick-model tightness on non-halting machines

PropertyResult prop_overhead_tightness(const Scale& scale) {
    Check check("overhead-tightness");
    const tm::TuringMachine loop(fixture_loop());
    const auto self = tm::self_input(fixture_loop());
    const guest::Program gloop = fixture_guest_loop();
    for (StepIndex t = 0; t <= scale.overhead_max_bound; ++t) {
        const RunResult r = run_bounded(loop, self, t);
        check.expect(!r.verdict.halted() && r.ledger.total() == t + 1,
                     "m_loop at T=" + std::to_string(t) + ": total " +
                         std::to_string(r.ledger.total()) + " != T+1");
        const RunResult g = run_bounded(gloop, guest::Nat(0), t);
        check.expect(!g.verdict.halted() && g.ledger.total() == t + 1,
                     "guest loop at T=" + std::to_string(t) + ": total " +
                         std::to_string(g.ledger.total()) + " != T+1");
    }
    // Halting fixture: totals plateau at K+1 once T >= K.
    const tm::TuringMachine halt2(fixture_halt2());
    for (StepIndex t = 2; t <= scale.overhead_max_bound; ++t) {
        const RunResult r = run_bounded(halt2, {}, t);
        check.expect(r.verdict.halted() && r.ledger.total() == 3,
                     "m_halt2 at T=" + std::to_string(t) + ": total != 3");
    }
    return check.done("T in 0.." + std::to_string(scale.overhead_max_bound));
}

// ---------------------------------------------------------------------------
// Diagonalization at desk scale

PropertyResult prop_diagonal_contradiction(const Scale& scale) {
    Check check("diagonal-contradiction");
    for (StepIndex t = 0; t <= scale.diag_max_bound; ++t) {
        const guest::BoundedDecider decider = guest::make_bounded_decider(t);
        const guest::Program x = guest::make_diagonalizer(decider);
        const guest::Nat x_nat = guest::program_nat(x);

        const guest::RunOutcome d_run = guest::run_collect(decider.program, x_nat, decider.cost_bound);
        check.expect(d_run.result.verdict.halted(),
                     "T=" + std::to_string(t) + ": decider did not halt within its bound");
        const auto verdict = guest::verdict_of(d_run.emitted());
        check.expect(verdict.has_value(), "T=" + std::to_string(t) + ": decider emitted no verdict");
        if (!verdict) continue;

        // The decider is honest about the bounded claim...
        const RunResult bounded = run_bounded(x, guest::Nat(0), t);
        check.expect(bounded.verdict.halted() == (*verdict == guest::GuestVerdict::Halts),
                     "T=" + std::to_string(t) + ": verdict disagrees with the bounded run");

        // ...and X contradicts the verdict read as a global halting claim.
        if (*verdict == guest::GuestVerdict::DoesNotHalt) {
            const StepIndex fuel = 16 * t + 256;
            const guest::RunOutcome x_run = guest::run_collect(x, guest::Nat(0), fuel);
            check.expect(x_run.result.verdict.halted(),
                         "T=" + std::to_string(t) + ": X failed to halt within fuel");
            if (x_run.result.verdict.halted()) {
                check.expect(x_run.result.verdict.step() >= t + 1,
                             "T=" + std::to_string(t) + ": X halted at step " +
                                 std::to_string(x_run.result.verdict.step()) + " <= T");
            }
        } else {
            const guest::LoopSearch ls = guest::run_until_loop_or_halt(x, guest::Nat(0), 16 * t + 256);
            check.expect(ls.kind == guest::LoopSearch::Kind::ReachedLoop,
                         "T=" + std::to_string(t) + ": HALTS verdict but X never reached LOOP");
        }
    }
    return check.done("T in 0.." + std::to_string(scale.diag_max_bound));
}

// ---------------------------------------------------------------------------
// One-sided decidability

PropertyResult prop_semidecidability(const Scale& scale) {
    Check check("semidecidability");
    const auto& schedule = scale.fuel_schedule;

    struct HaltingCase {
        std::string label;
        std::function<SemiDecision()> run;
        StepIndex expect_k;
    };
    const tm::TuringMachine halt0(fixture_halt0());
    const tm::TuringMachine halt2(fixture_halt2());
    const tm::TuringMachine halt5(fixture_halt5());
    const guest::Program ghalt = fixture_guest_halt();
    const guest::Program ginc = fixture_guest_inc_halt();

    std::vector<HaltingCase> cases = {
        {"m_halt0", [&] { return semidecide_halts(halt0, {}, schedule); }, 0},
        {"m_halt2", [&] { return semidecide_halts(halt2, {}, schedule); }, 2},
        {"m_halt5", [&] { return semidecide_halts(halt5, {}, schedule); }, 5},
        {"guest/halt", [&] { return semidecide_halts(ghalt, guest::Nat(0), schedule); }, 0},
        {"guest/inc-halt", [&] { return semidecide_halts(ginc, guest::Nat(0), schedule); }, 1},
    };
    for (const auto& c : cases) {
        const SemiDecision d = c.run();
        check.expect(d.positive() && *d.halts_at == c.expect_k,
                     c.label + ": expected positive answer at step " + std::to_string(c.expect_k));
        StepIndex first_fuel = 0;
        for (StepIndex f : schedule) {
            if (f >= c.expect_k) {
                first_fuel = f;
                break;
            }
        }
        check.expect(d.schedule_point == first_fuel,
                     c.label + ": answered at schedule point " + std::to_string(d.schedule_point) +
                         ", expected " + std::to_string(first_fuel));
    }

    const tm::TuringMachine loop(fixture_loop());
    const SemiDecision neg = semidecide_halts(loop, tm::self_input(fixture_loop()), schedule);
    check.expect(!neg.positive() && neg.attempts.size() == schedule.size(),
                 "m_loop: procedure must exhaust fuel without a negative verdict");
    const SemiDecision gneg = semidecide_halts(fixture_guest_loop(), guest::Nat(0), schedule);
    check.expect(!gneg.positive(), "guest loop: procedure answered negatively");
    return check.done(std::to_string(cases.size()) + " positive + 2 negative fixtures");
}

// ---------------------------------------------------------------------------
// Partial-order laws on the exhaustive small domain

PropertyResult prop_order_laws(const Scale& scale) {
    Check check("order-laws");
    auto domain = all_bottom_observations(scale.obs_positions, true);
    // A few tail-bearing members keep the symbolic comparisons honest.
    for (StepIndex k = 0; k <= 3; ++k) domain.push_back(PartialObservation::resolved_halting(k));
    domain.push_back(PartialObservation::zero_claim());
    {
        PartialObservation::EntryMap holes;
        holes[1] = false;
        domain.push_back(PartialObservation::make(holes, TailKind::OneFrom, 3));
    }

    for (const auto& p : domain) {
        check.expect(leq(p, p), "leq not reflexive on " + obs_text(p));
    }
    for (std::size_t i = 0; i < domain.size(); ++i) {
        for (std::size_t j = 0; j < domain.size(); ++j) {
            if (leq(domain[i], domain[j]) && leq(domain[j], domain[i])) {
                check.expect(domain[i] == domain[j],
                             "antisymmetry fails: " + obs_text(domain[i]) + " vs " +
                                 obs_text(domain[j]));
            }
        }
    }
    for (std::size_t i = 0; i < domain.size(); ++i) {
        for (std::size_t j = 0; j < domain.size(); ++j) {
            if (!leq(domain[i], domain[j])) continue;
            for (std::size_t k = 0; k < domain.size(); ++k) {
                if (leq(domain[j], domain[k])) {
                    check.expect(leq(domain[i], domain[k]),
                                 "transitivity fails through " + obs_text(domain[j]));
                }
            }
        }
    }
    const PartialObservation bottom = PartialObservation::bottom();
    for (const auto& p : domain) {
        check.expect(leq(bottom, p), "bottom not below " + obs_text(p));
    }
    return check.done(std::to_string(domain.size()) + " observations, full O(n^3) closure");
}

// ---------------------------------------------------------------------------
// lub laws on compatible families

PropertyResult prop_lub_laws(const Scale& scale) {
    Check check("lub-laws");
    Rng rng(scale.seed ^ 0x6c756221ULL);
    const auto monotone = all_bottom_observations(scale.obs_positions, true);

    for (std::size_t round = 0; round < 2000; ++round) {
        const bool tailed = round % 4 == 0;
        const PartialObservation limit =
            tailed ? PartialObservation::resolved_halting(1 + rng.below(4))
                   : monotone[rng.below(monotone.size())];
        auto restrict = [&](bool keep_tail) {
            PartialObservation::EntryMap entries;
            const StepIndex h = limit.horizon();
            for (StepIndex k = 0; k < h; ++k) {
                if (limit.lookup(k) != Obs::Undefined && rng.below(2)) {
                    entries[k] = limit.lookup(k) == Obs::One;
                }
            }
            return PartialObservation::make(std::move(entries),
                                            keep_tail ? limit.tail() : TailKind::Bottom,
                                            limit.one_from());
        };
        const PartialObservation a = restrict(tailed && rng.below(2));
        const PartialObservation b = restrict(tailed && rng.below(2));
        const PartialObservation c = restrict(tailed && rng.below(2));

        const PartialObservation ab_c = lub({lub({a, b}), c});
        const PartialObservation a_bc = lub({a, lub({b, c})});
        const PartialObservation abc = lub({a, b, c});
        check.expect(ab_c == a_bc && ab_c == abc, "lub not associative");
        check.expect(lub({a, b}) == lub({b, a}), "lub not commutative");
        check.expect(lub({a, a}) == a, "lub not idempotent");
        check.expect(leq(a, abc) && leq(b, abc) && leq(c, abc), "lub not an upper bound");
        check.expect(leq(abc, limit), "lub above the limit it was drawn from");
        check.expect(lub({PartialObservation::bottom(), a}) == a, "bottom not neutral");

        // A chain's lub is its maximum.
        if (leq(a, b) || leq(b, a)) {
            const auto chain = leq(a, b) ? std::vector<PartialObservation>{a, b}
                                         : std::vector<PartialObservation>{b, a};
            check.expect(lub(chain) == chain[1], "lub of a chain is not its maximum");
        }
    }
    return check.done("2000 compatible families");
}

// ---------------------------------------------------------------------------
// Compiled runner vs independent reference stepper

PropertyResult prop_stepper_equivalence(const Scale& scale) {
    Check check("stepper-equivalence");
    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    std::uint64_t machines = 0;
    en.for_each([&](const tm::MachineSpec& spec) {
        const tm::TuringMachine m(spec);
        // A short prefix of the self-input keeps value-semantic configs
        // cheap; step mechanics do not depend on the word's length.
        auto input = tm::self_input(spec);
        if (input.size() > 16) input.resize(16);
        NaiveStepper naive(spec, input);
        tm::Configuration config = m.initial_config(input);
        for (int s = 0; s < 50; ++s) {
            const bool h1 = m.is_halting(config);
            const bool h2 = naive.halted();
            check.expect(h1 == h2, "halting disagreement at step " + std::to_string(s));
            if (h1 || h2) break;
            config = m.next(config);
            naive.advance();
            const bool same = config.head == naive.head && config.state == naive.state &&
                              config.tape == naive.pruned_tape();
            check.expect(same, "configuration divergence at step " + std::to_string(s + 1));
            if (!same) break;
        }
        for (StepIndex bound : {StepIndex(0), StepIndex(7), StepIndex(50)}) {
            NaiveStepper fresh(spec, input);
            const RunResult a = m.run_bounded_fast(input, bound);
            const RunResult b = fresh.run_bounded(bound);
            check.expect(a.verdict == b.verdict &&
                             a.ledger.simulated_steps == b.ledger.simulated_steps &&
                             a.ledger.verdict_ticks == b.ledger.verdict_ticks,
                         "bounded-run disagreement at bound " + std::to_string(bound));
        }
        ++machines;
    });
    return check.done(std::to_string(machines) + " machines, 50 steps each");
}

// ---------------------------------------------------------------------------
// Exactly one halting step

PropertyResult prop_exact_halt_uniqueness(const Scale& scale) {
    Check check("exact-halt-uniqueness");
    Rng rng(scale.seed ^ 0x756e6971ULL);
    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    auto indices = sample_indices(rng, en.count(), 200);
    for (std::uint64_t idx : indices) {
        const tm::MachineSpec spec = en.at(idx);
        const tm::TuringMachine m(spec);
        const auto input = tm::self_input(spec);
        int positives = 0;
        for (StepIndex k = 0; k <= 40; ++k) {
            if (halts_at_exact(m, input, k)) ++positives;
        }
        const auto probed = probe_halting_step(m, input, 40);
        check.expect(positives == (probed ? 1 : 0),
                     "machine #" + std::to_string(idx) + ": " + std::to_string(positives) +
                         " exact halting steps");
    }
    return check.done(std::to_string(indices.size()) + " machines, k in 0..40");
}

// ---------------------------------------------------------------------------
// Determinism of step iteration

PropertyResult prop_determinism(const Scale& scale) {
    Check check("determinism");
    Rng rng(scale.seed ^ 0x64657421ULL);
    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    auto indices = sample_indices(rng, en.count(), 50);
    for (std::uint64_t idx : indices) {
        const tm::MachineSpec spec = en.at(idx);
        const tm::TuringMachine m(spec);
        const auto input = tm::self_input(spec);
        std::vector<std::string> first, second;
        for (int pass = 0; pass < 2; ++pass) {
            auto& log = pass == 0 ? first : second;
            tm::Configuration c = m.initial_config(input);
            log.push_back(describe(spec, c));
            for (int s = 0; s < 100 && !m.is_halting(c); ++s) {
                c = m.next(c);
                log.push_back(describe(spec, c));
            }
        }
        check.expect(first == second, "machine #" + std::to_string(idx) + ": snapshot divergence");
    }
    // Guest side: identical configuration sequences under operator==.
    for (const auto& prog : {fixture_guest_inc_halt(), fixture_guest_loop()}) {
        std::vector<guest::Program::Config> first, second;
        for (int pass = 0; pass < 2; ++pass) {
            auto& log = pass == 0 ? first : second;
            auto c = prog.initial_config(guest::Nat(3));
            log.push_back(c);
            for (int s = 0; s < 100 && !prog.is_halting(c); ++s) {
                c = prog.next(c);
                log.push_back(c);
            }
        }
        check.expect(first == second, "guest configuration sequence divergence");
    }
    return check.done(std::to_string(indices.size()) + " machines, two 100-step passes");
}

// ---------------------------------------------------------------------------
// Verdict consistency across bounds

PropertyResult prop_verdict_consistency(const Scale& scale) {
    Check check("verdict-consistency");
    Rng rng(scale.seed ^ 0x76657264ULL);
    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    auto indices = sample_indices(rng, en.count(), 100);
    for (std::uint64_t idx : indices) {
        const tm::MachineSpec spec = en.at(idx);
        const tm::TuringMachine m(spec);
        const auto input = tm::self_input(spec);
        const RunResult base = run_bounded(m, input, 48);
        if (!base.verdict.halted()) continue;
        const StepIndex k = base.verdict.step();
        for (StepIndex t : {k, k + 1, k + 9, StepIndex(96)}) {
            if (t < k) continue;
            const RunResult r = run_bounded(m, input, t);
            check.expect(r.verdict == RunVerdict::halts_at(k),
                         "machine #" + std::to_string(idx) + ": verdict changed at bound " +
                             std::to_string(t));
        }
    }
    return check.done(std::to_string(indices.size()) + " machines");
}

// ---------------------------------------------------------------------------
// Quine fidelity

PropertyResult prop_quine_fidelity(const Scale&) {
    Check check("quine-fidelity");
    using namespace guest;
    struct Case {
        std::string label;
        std::vector<Instruction> templ;
        std::uint32_t self_reg;
        bool emits;
    };
    const std::vector<Case> cases = {
        {"self-emit", {{Opcode::Self, 0}, {Opcode::EmitReg, 0}, {Opcode::Halt}}, 0, true},
        {"self-quiet", {{Opcode::Self, 0}, {Opcode::Halt}}, 0, false},
        {"self-r3",
         {{Opcode::Self, 3}, {Opcode::Inc, 1}, {Opcode::EmitReg, 3}, {Opcode::Halt}},
         3,
         true},
    };
    std::vector<Program> transformed;
    for (const auto& c : cases) {
        const Program raw = Program::from_instructions(c.templ, false);
        const Program p = quine_transform(raw);
        transformed.push_back(p);
        const RunOutcome run = run_collect(p, Nat(0), 1000);
        check.expect(run.result.verdict.halted() && !run.fault(), c.label + ": run misbehaved");
        const Nat expected = program_nat(p);
        check.expect(run.final_config.regs.at(c.self_reg) == expected,
                     c.label + ": SELF register differs from the program's own encoding");
        if (c.emits) {
            check.expect(run.emitted() && *run.emitted() == expected,
                         c.label + ": emitted bytes differ from the program's own encoding");
            if (run.emitted()) {
                check.expect(nat_to_encoding(*run.emitted()) == encode(p),
                             c.label + ": byte-level mismatch after decode");
            }
        }
    }
    check.expect(!(transformed[0] == transformed[2]),
                 "distinct templates must transform to distinct programs");
    return check.done(std::to_string(cases.size()) + " templates");
}

// ---------------------------------------------------------------------------
// EXEC cost law

PropertyResult prop_exec_cost_law(const Scale&) {
    Check check("exec-cost-law");
    using namespace guest;
    const std::vector<std::pair<std::string, Program>> inners = {
        {"halt", fixture_guest_halt()},
        {"inc-halt", fixture_guest_inc_halt()},
        {"loop", fixture_guest_loop()},
        {"inc3-halt", Program::from_instructions({Instruction{Opcode::Inc, 0},
                                                  Instruction{Opcode::Inc, 0},
                                                  Instruction{Opcode::Inc, 0},
                                                  Instruction{Opcode::Halt}},
                                                 false)},
    };
    for (const auto& [label, inner] : inners) {
        for (StepIndex budget = 0; budget <= 10; ++budget) {
            const RunResult inner_run = run_bounded(inner, Nat(0), budget);
            std::vector<Instruction> outer_ins = {
                Instruction{Opcode::Load, 0, 0, 0, program_nat(inner)},
                Instruction{Opcode::Load, 1, 0, 0, Nat(budget)},
                Instruction{Opcode::Exec, 0, 2, 1},
                Instruction{Opcode::Halt},
            };
            const Program outer = Program::from_instructions(std::move(outer_ins), false);
            const RunOutcome run = run_collect(outer, Nat(0), 100000);
            check.expect(run.result.verdict.halted(), label + ": outer did not halt");
            if (!run.result.verdict.halted()) continue;
            // Outer halting step = LOAD + LOAD + EXEC charge, where the
            // charge is the inner bounded-run total plus one dispatch tick.
            const Tick expected_charge = inner_run.ledger.total() + 1;
            check.expect(run.result.verdict.step() == 2 + expected_charge,
                         label + " budget " + std::to_string(budget) + ": outer halted at " +
                             std::to_string(run.result.verdict.step()) + ", expected " +
                             std::to_string(2 + expected_charge));
            check.expect(run.final_config.regs.at(1) ==
                             (inner_run.verdict.halted() ? 1 : 0),
                         label + ": EXEC halted-flag writeback wrong");
        }
    }
    return check.done(std::to_string(inners.size()) + " inner programs x budgets 0..10");
}

// ---------------------------------------------------------------------------
// Chain stages vs run-based ground truth, and cached-vs-fresh oracle parity

PropertyResult prop_oracle_equivalence(const Scale& scale) {
    Check check("oracle-equivalence");
    Rng rng(scale.seed ^ 0x6f726163ULL);

    std::vector<std::pair<std::string, tm::MachineSpec>> specs;
    const tm::MachineEnumerator small = tm::enumerate_machines(1, scale.enum_symbols);
    small.for_each([&](const tm::MachineSpec& s) {
        specs.emplace_back("enum1x#" + std::to_string(specs.size()), s);
    });
    const tm::MachineEnumerator en = tm::enumerate_machines(scale.enum_states, scale.enum_symbols);
    for (std::uint64_t idx : sample_indices(rng, en.count(), 100)) {
        specs.emplace_back("enum#" + std::to_string(idx), en.at(idx));
    }

    const StepIndex stages = 16;
    for (const auto& [label, spec] : specs) {
        const tm::TuringMachine m(spec);
        const auto input = tm::self_input(spec);
        const auto fresh = exact_halt_oracle(m, input);
        const auto cached = cached_exact_halt_oracle(m, input);
        for (StepIndex k = 0; k <= stages + 1; ++k) {
            const OracleReply a = fresh(k);
            const OracleReply b = cached(k);
            check.expect(a.halts_at_exact == b.halts_at_exact &&
                             a.cost.simulated_steps == b.cost.simulated_steps &&
                             a.cost.verdict_ticks == b.cost.verdict_ticks,
                         label + ": cached oracle diverges from fresh runs at k=" +
                             std::to_string(k));
        }

        const ChainRecord record = iterate_chain(fresh, stages, scale.variant, scale.window);
        const auto halting = probe_halting_step(m, input, stages + 2);
        for (StepIndex i = 1; i <= stages; ++i) {
            for (StepIndex k = 0; k < i; ++k) {
                const Obs truth = (halting && *halting <= k) ? Obs::One : Obs::Zero;
                check.expect(record.stages[i].lookup(k) == truth,
                             label + ": stage " + std::to_string(i) + " at index " +
                                 std::to_string(k) + " disagrees with the run-based truth");
            }
        }
    }
    return check.done(std::to_string(specs.size()) + " machines, 16 stages");
}

// ---------------------------------------------------------------------------

SuiteReport run_suite(const Scale& scale) {
    SuiteReport report;
    report.seed = scale.seed;
    report.variant = scale.variant;

    auto guarded = [&](const char* name, auto&& fn) {
        try {
            report.results.push_back(fn());
        } catch (const std::exception& e) {
            PropertyResult r;
            r.name = name;
            r.passed = false;
            r.detail = std::string("property aborted: ") + e.what();
            report.results.push_back(std::move(r));
        }
    };

    try {
        auto [shape, nofp] = prop_chain_laws(scale);
        report.results.push_back(std::move(shape));
        report.results.push_back(std::move(nofp));
    } catch (const std::exception& e) {
        for (const char* name : {"chain-shape-law", "no-bounded-fixed-point"}) {
            PropertyResult r;
            r.name = name;
            r.passed = false;
            r.detail = std::string("property aborted: ") + e.what();
            report.results.push_back(std::move(r));
        }
    }
    guarded("monotonicity", [&] { return prop_monotonicity(scale); });
    guarded("continuity", [&] { return prop_continuity(scale); });
    guarded("omega-least-fixed-point", [&] { return prop_omega_least_fixed_point(scale); });
    guarded("overhead-tightness", [&] { return prop_overhead_tightness(scale); });
    guarded("diagonal-contradiction", [&] { return prop_diagonal_contradiction(scale); });
    guarded("semidecidability", [&] { return prop_semidecidability(scale); });
    guarded("order-laws", [&] { return prop_order_laws(scale); });
    guarded("lub-laws", [&] { return prop_lub_laws(scale); });
    guarded("stepper-equivalence", [&] { return prop_stepper_equivalence(scale); });
    guarded("exact-halt-uniqueness", [&] { return prop_exact_halt_uniqueness(scale); });
    guarded("determinism", [&] { return prop_determinism(scale); });
    guarded("verdict-consistency", [&] { return prop_verdict_consistency(scale); });
    guarded("quine-fidelity", [&] { return prop_quine_fidelity(scale); });
    guarded("exec-cost-law", [&] { return prop_exec_cost_law(scale); });
    guarded("oracle-equivalence", [&] { return prop_oracle_equivalence(scale); });
    return report;
}

} // namespace haltlab::suite

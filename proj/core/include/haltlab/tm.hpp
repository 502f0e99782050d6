#pragma once

// Single-tape deterministic Turing machine: textual description format,
// canonical binary encoding, exhaustive small-machine enumeration, and a
// compiled runner implementing the model-agnostic machine interface.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "haltlab/machine.hpp"

namespace haltlab::tm {

using StateId = std::uint32_t;
using SymbolId = std::uint32_t;

enum class Move : std::uint8_t { Left = 0, Right = 1, Stay = 2 };

char move_char(Move m);

struct Transition {
    StateId next_state;
    SymbolId write;
    Move move;

    bool operator==(const Transition&) const = default;
};

// Declarative machine description. Deterministic by construction (the
// transition map allows one rule per (state, symbol)); validate() enforces
// totality on non-halting states and that halt states have no outgoing
// rules.
struct MachineSpec {
    std::vector<std::string> states;
    std::vector<std::string> tape_alphabet;
    SymbolId blank = 0;
    StateId start_state = 0;
    std::set<StateId> halt_states;
    std::map<std::pair<StateId, SymbolId>, Transition> transitions;

    std::size_t state_count() const { return states.size(); }
    std::size_t symbol_count() const { return tape_alphabet.size(); }
    bool is_halt_state(StateId s) const { return halt_states.count(s) != 0; }

    void validate() const; // throws ValidationError

    bool operator==(const MachineSpec&) const = default;
};

// One machine snapshot: sparse tape (blanks never stored), head position,
// control state, and the exact number of transitions taken so far.
struct Configuration {
    std::map<std::int64_t, SymbolId> tape;
    std::int64_t head = 0;
    StateId state = 0;
    StepIndex step = 0;

    bool operator==(const Configuration&) const = default;
};

std::string describe(const MachineSpec& spec, const Configuration& config);

// Line-based description format:
//   states: q0 q1 qh
//   alphabet: _ 0 1
//   blank: _
//   start: q0
//   halt: qh
//   q0 _ -> q1 _ R
// '#' starts a comment. Throws ParseError with the offending line number.
MachineSpec parse_machine(const std::string& text);
std::string format_machine(const MachineSpec& spec);

// Canonical length-prefixed binary form of a spec (state/symbol names are
// not carried; decode assigns canonical names). Byte layout documented in
// docs/formats.md and stable across releases.
struct Encoding {
    std::vector<std::uint8_t> bytes;

    bool operator==(const Encoding&) const = default;
};

Encoding encode(const MachineSpec& spec);
MachineSpec decode(const Encoding& enc); // throws DecodeError with byte offset

// True when the two specs are identical up to renaming of states/symbols
// (declaration order and all indices preserved).
bool structurally_equal(const MachineSpec& a, const MachineSpec& b);

// The machine's own encoding rendered as an input word: encoding bytes,
// most significant bit of each byte first; a set bit becomes the first
// non-blank symbol, a clear bit the blank. Machines with a blank-only
// alphabet get the empty input.
std::vector<SymbolId> self_input(const MachineSpec& spec);

struct EnumLimits {
    std::uint32_t max_states = 3;
    std::uint32_t max_symbols = 2;
};

// Every total deterministic machine with n working states and n_symbols
// tape symbols, one halt state appended. Per (state, symbol) key the
// options are the 3 * |Q| * |Sigma| working transitions plus a single halt
// option (write the scanned symbol back, move right, enter the halt
// state). Deterministic order; index-addressable for seeded sampling.
class MachineEnumerator {
public:
    MachineEnumerator(std::uint32_t n_states, std::uint32_t n_symbols,
                      EnumLimits limits = {});

    std::uint64_t count() const { return count_; }
    MachineSpec at(std::uint64_t index) const;

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::uint64_t i = 0; i < count_; ++i) fn(at(i));
    }

    std::uint32_t working_states() const { return n_states_; }
    std::uint32_t symbols() const { return n_symbols_; }
    std::uint64_t options_per_key() const { return per_key_; }

private:
    std::uint32_t n_states_;
    std::uint32_t n_symbols_;
    std::uint64_t per_key_;
    std::uint64_t count_;
};

inline MachineEnumerator enumerate_machines(std::uint32_t n_states, std::uint32_t n_symbols,
                                            EnumLimits limits = {}) {
    return MachineEnumerator(n_states, n_symbols, limits);
}

// Compiled machine: flattened transition tables over id-coded states and
// symbols. Implements the MachineModel concept; run_bounded_fast avoids
// per-step configuration copies but matches the reference stepper exactly.
class TuringMachine {
public:
    using Config = Configuration;
    using Input = std::vector<SymbolId>;

    explicit TuringMachine(MachineSpec spec); // validates

    const MachineSpec& spec() const { return spec_; }

    Config initial_config(const Input& input) const;
    bool is_halting(const Config& config) const;
    Config next(const Config& config) const;

    RunResult run_bounded_fast(const Input& input, StepIndex bound) const;

private:
    friend class BoundedRunner;

    MachineSpec spec_;
    std::uint32_t n_symbols_ = 0;
    std::vector<StateId> next_state_;
    std::vector<SymbolId> write_;
    std::vector<std::int8_t> move_;
    std::vector<std::uint8_t> halt_;

    void check_config(const Config& config) const;
};

// Reusable bounded-run engine for one (machine, input) pair: keeps the
// initial tape image and scratch tape between runs, which matters when a
// chain iteration issues thousands of bounded runs against one machine.
class BoundedRunner {
public:
    BoundedRunner(const TuringMachine& machine, TuringMachine::Input input);

    RunResult run(StepIndex bound);

    // Exact halting step if one is known to exist at or below the largest
    // bound probed so far.
    const TuringMachine& machine() const { return machine_; }

private:
    const TuringMachine& machine_;
    TuringMachine::Input input_;
    std::vector<SymbolId> tape_;
    std::int64_t origin_ = 0;
    StepIndex capacity_bound_ = 0;

    void ensure_capacity(StepIndex bound);
};

} // namespace haltlab::tm

#pragma once

// Minimal register VM with a bounded simulate primitive (EXEC), an s-m-n
// specializer, and a quine transform giving programs access to their own
// canonical encoding. Registers hold unbounded naturals, so a program
// encoding travels as a single register value.
//
// Tick accounting: every retired instruction costs one tick, except EXEC,
// which costs the inner bounded run's total (simulated transitions + its
// verdict tick) plus one dispatch tick. A configuration whose program
// counter sits on HALT (or past the end) is already halting; reaching it
// costs nothing extra.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "haltlab/machine.hpp"

namespace haltlab::guest {

using Nat = boost::multiprecision::cpp_int;

enum class Opcode : std::uint8_t {
    Load = 1,  // LOAD r, literal
    Copy,      // COPY rd, rs
    Inc,       // INC r
    Dec,       // DEC r            (saturates at 0)
    Jz,        // JZ r, target
    Jmp,       // JMP target
    Exec,      // EXEC rp, ri, rb  (program, input, budget)
    EmitImm,   // EMIT HALTS | EMIT DOES_NOT_HALT
    EmitReg,   // EMIT r
    Self,      // SELF rd          (own encoding as a natural)
    Halt,      // HALT
    Loop,      // LOOP             (designated non-halting instruction)
};

const char* opcode_name(Opcode op);

struct Instruction {
    Opcode op;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t c = 0;
    Nat literal = 0;

    bool operator==(const Instruction&) const = default;
};

enum class GuestVerdict : std::uint8_t { DoesNotHalt = 0, Halts = 1 };

// Wire encoding of a verdict: single byte, 1 = HALTS, 0 = DOES_NOT_HALT.
inline std::uint8_t verdict_wire_byte(GuestVerdict v) { return static_cast<std::uint8_t>(v); }

// Interprets an emitted value as a verdict; values other than 0/1 are not
// verdicts.
std::optional<GuestVerdict> verdict_of(const std::optional<Nat>& emitted);

struct Encoding {
    std::vector<std::uint8_t> bytes;

    bool operator==(const Encoding&) const = default;
};

class Program {
public:
    struct Config {
        std::uint32_t pc = 0;
        std::vector<Nat> regs;
        StepIndex step = 0;
        bool fault = false;
        std::optional<Nat> emitted;

        bool operator==(const Config&) const = default;
    };
    using Input = Nat;

    Program() = default;

    // Validates register indices, jump targets and EMIT immediates. A raw
    // program containing SELF is retained but not executable until it goes
    // through quine_transform (or arrives by decoding, where the encoding
    // itself establishes the self-reference).
    static Program from_instructions(std::vector<Instruction> instructions,
                                     bool self_resolved = false);

    const std::vector<Instruction>& instructions() const { return instructions_; }
    std::size_t size() const { return instructions_.size(); }
    std::uint32_t register_count() const { return register_count_; }
    bool uses_self() const { return uses_self_; }
    bool self_resolved() const { return self_resolved_; }
    bool executable() const { return !uses_self_ || self_resolved_; }

    // MachineModel surface. Throws ValidationError when the program is a
    // raw SELF template.
    Config initial_config(const Input& input) const;
    bool is_halting(const Config& config) const;
    Config next(const Config& config) const;
    RunResult run_bounded_fast(const Input& input, StepIndex bound) const;

    // Like next(), but refuses to evaluate a transition whose tick cost
    // provably exceeds the allowance (nullopt = unlimited). Bounded runs
    // use this to cut mid-EXEC without paying for unaffordable inner work,
    // which also keeps self-referential EXEC towers finite.
    std::optional<Config> next_bounded(const Config& config,
                                       std::optional<Tick> allowance) const;

    bool operator==(const Program& other) const {
        return instructions_ == other.instructions_;
    }

private:
    std::vector<Instruction> instructions_;
    std::uint32_t register_count_ = 1;
    bool uses_self_ = false;
    bool self_resolved_ = false;
    Nat self_value_ = 0; // own encoding as a natural, precomputed
};

// Guest assembly: one instruction per line, optional `label:` prefix lines,
// '#' comments, registers r0, r1, ... Jump targets are labels or absolute
// instruction indices. EMIT takes a register, HALTS, DOES_NOT_HALT, or the
// immediate 0/1.
Program assemble(const std::string& text);
std::string to_assembly(const Program& program);

// Canonical length-prefixed binary encoding (layout in docs/formats.md).
Encoding encode(const Program& program);
Program decode(const Encoding& enc); // throws DecodeError with byte offset

// Encodings as naturals: bytes little-endian, first byte least significant.
Nat encoding_to_nat(const Encoding& enc);
Encoding nat_to_encoding(const Nat& value); // throws DecodeError
inline Nat program_nat(const Program& p) { return encoding_to_nat(encode(p)); }
Program decode_nat(const Nat& value);

// Bounded run that keeps the final configuration, so callers can read the
// emitted value and fault flag next to the verdict.
struct RunOutcome {
    RunResult result;
    Program::Config final_config;

    const std::optional<Nat>& emitted() const { return final_config.emitted; }
    bool fault() const { return final_config.fault; }
};

RunOutcome run_collect(const Program& program, const Nat& input, StepIndex bound);

// Structural non-halting certificate: stop as soon as the program counter
// sits on the designated LOOP instruction.
struct LoopSearch {
    enum class Kind { HaltedAt, ReachedLoop, Exhausted };
    Kind kind;
    StepIndex step = 0;   // halting step / step at which LOOP was reached / fuel
    std::uint32_t pc = 0; // the LOOP site for ReachedLoop
};

LoopSearch run_until_loop_or_halt(const Program& program, const Nat& input, StepIndex fuel);

// s-m-n specializer: fixes the program's first input by prepending a LOAD
// into register 0 (jump targets shifted); no execution happens.
Program smn(const Program& program, const Nat& literal);

// Closes a template that requests its own encoding via SELF. The returned
// program P places encode(P), byte-identical, into SELF's destination
// register when that instruction retires. Rejects templates without SELF.
Program quine_transform(const Program& templ);

struct BoundedDecider {
    Program program;
    // Ticks within which the decider halts (and has emitted its verdict)
    // on every input.
    Tick cost_bound = 0;
};

// D_T: reads a program encoding from input, simulates it with budget T,
// emits HALTS iff the inner run halted within T steps. On malformed input
// encodings the EXEC consumes its whole budget and reports not-halted, so
// D_T emits DOES_NOT_HALT.
BoundedDecider make_bounded_decider(StepIndex bound);

// X: obtains its own encoding, runs the decider on it with a budget derived
// from the decider's declared cost bound plus slack, and inverts the
// verdict (halt on DOES_NOT_HALT, spin on LOOP for HALTS). Probe-validates
// that the decider emits exactly one verdict within its bound.
Program make_diagonalizer(const BoundedDecider& decider);

} // namespace haltlab::guest

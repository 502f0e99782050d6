#include <doctest.h>

#include <fstream>
#include <sstream>

#include "haltlab/errors.hpp"
#include "haltlab/suite.hpp"
#include "haltlab/guest_vm.hpp"

using namespace haltlab;
using namespace haltlab::guest;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(HALTLAB_MACHINES_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// r1 := r0 (by countdown), with `per_loop` INCs per iteration and a fixed
// prologue of `warmup` INCs; emits r1. Halts on every input.
Program countdown_program(int warmup, int per_loop) {
    std::ostringstream src;
    for (int i = 0; i < warmup; ++i) src << "INC r1\n";
    src << "top:\n";
    src << "JZ r0, done\n";
    src << "DEC r0\n";
    for (int i = 0; i < per_loop; ++i) src << "INC r1\n";
    src << "JMP top\n";
    src << "done:\n";
    src << "EMIT r1\n";
    src << "HALT\n";
    return assemble(src.str());
}

Nat run_emitted(const Program& p, const Nat& input, StepIndex fuel = 100000) {
    const RunOutcome run = run_collect(p, input, fuel);
    REQUIRE(run.result.verdict.halted());
    REQUIRE(run.emitted().has_value());
    return *run.emitted();
}

} // namespace

TEST_CASE("guest step semantics: HALT at pc 0 is already halted, LOOP never is") {
    const Program halt = assemble(read_fixture("halt.gasm"));
    CHECK(halt.is_halting(halt.initial_config(0)));
    CHECK(run_bounded(halt, Nat(0), 0).verdict == RunVerdict::halts_at(0));

    const Program loop = assemble(read_fixture("loop.gasm"));
    for (StepIndex t : {StepIndex(0), StepIndex(1), StepIndex(13), StepIndex(200)}) {
        CHECK(run_bounded(loop, Nat(0), t).verdict == RunVerdict::running_at(t));
    }

    const Program inc_halt = assemble(read_fixture("inc_halt.gasm"));
    const RunResult r = run_bounded(inc_halt, Nat(0), 10);
    CHECK(r.verdict == RunVerdict::halts_at(1));
    CHECK(r.ledger.total() == 2);
}

TEST_CASE("EXEC: inner bounded-run ticks plus one dispatch tick") {
    const Program inner = suite::fixture_guest_inc_halt();
    const RunResult inner_run = run_bounded(inner, Nat(0), 10);
    CHECK(inner_run.ledger.total() == 2); // 1 transition + 1 verdict tick

    const Program outer = Program::from_instructions(
        {
            Instruction{Opcode::Load, 0, 0, 0, program_nat(inner)},
            Instruction{Opcode::Load, 1, 0, 0, Nat(10)},
            Instruction{Opcode::Exec, 0, 2, 1},
            Instruction{Opcode::Halt},
        },
        false);
    const RunOutcome run = run_collect(outer, Nat(0), 1000);
    REQUIRE(run.result.verdict.halted());
    // LOAD + LOAD + (2 inner ticks + 1 dispatch) = 5.
    CHECK(run.result.verdict.step() == 5);
    CHECK(run.final_config.regs[1] == 1); // inner halted within budget
}

TEST_CASE("EXEC: budget exhaustion reports not-halted and writes back the flag") {
    const Program loop = suite::fixture_guest_loop();
    const Program outer = Program::from_instructions(
        {
            Instruction{Opcode::Load, 0, 0, 0, program_nat(loop)},
            Instruction{Opcode::Load, 1, 0, 0, Nat(7)},
            Instruction{Opcode::Exec, 0, 2, 1},
            Instruction{Opcode::Halt},
        },
        false);
    const RunOutcome run = run_collect(outer, Nat(0), 1000);
    REQUIRE(run.result.verdict.halted());
    CHECK(run.result.verdict.step() == 2 + (7 + 1) + 1);
    CHECK(run.final_config.regs[1] == 0);
}

TEST_CASE("EXEC: malformed inner encoding consumes the budget and reports not-halted") {
    const Program outer = Program::from_instructions(
        {
            Instruction{Opcode::Load, 0, 0, 0, Nat(123456789)}, // not an encoding
            Instruction{Opcode::Load, 1, 0, 0, Nat(9)},
            Instruction{Opcode::Exec, 0, 2, 1},
            Instruction{Opcode::Halt},
        },
        false);
    const RunOutcome run = run_collect(outer, Nat(0), 1000);
    REQUIRE(run.result.verdict.halted());
    CHECK(run.result.verdict.step() == 2 + 9 + 1);
    CHECK(run.final_config.regs[1] == 0);
}

TEST_CASE("smn: writes the literal into register 0 before the program runs") {
    const Program ident = assemble(read_fixture("ident.gasm"));
    const Program seven = smn(ident, 7);
    for (const Nat& input : {Nat(0), Nat(3), Nat(12345)}) {
        CHECK(run_emitted(seven, input) == 7);
    }
    // Twice-specialized: the inner (last-written) literal wins.
    const Program both = smn(smn(ident, 7), 99);
    CHECK(run_emitted(both, 5) == 7);
}

TEST_CASE("smn then EXEC equals running the program on the literal directly") {
    int case_index = 0;
    for (int warmup = 0; warmup < 4; ++warmup) {
        for (int per_loop = 1; per_loop <= 3; ++per_loop) {
            for (const Nat& x : {Nat(0), Nat(4)}) {
                if (++case_index > 20) break;
                const Program p = countdown_program(warmup, per_loop);
                const Nat direct = run_emitted(p, x);

                const Program specialized = smn(p, x);
                const Program outer = Program::from_instructions(
                    {
                        Instruction{Opcode::Load, 0, 0, 0, program_nat(specialized)},
                        Instruction{Opcode::Load, 2, 0, 0, Nat(100000)},
                        Instruction{Opcode::Exec, 0, 1, 2},
                        Instruction{Opcode::Halt},
                    },
                    false);
                const RunOutcome run = run_collect(outer, Nat(0), 1000000);
                REQUIRE(run.result.verdict.halted());
                CHECK(run.final_config.regs[1] == direct); // inner emitted value
                // And on an unrelated input, specialization still wins.
                CHECK(run_emitted(specialized, 999) == direct);
            }
        }
    }
    CHECK(case_index >= 20);
}

TEST_CASE("quine_transform: SELF resolves to the program's own bytes") {
    const Program templ = assemble(read_fixture("quine.gasm"));
    CHECK(templ.uses_self());
    CHECK(!templ.executable());
    CHECK_THROWS_AS(run_collect(templ, Nat(0), 10), ValidationError);

    const Program quine = quine_transform(templ);
    const Nat out = run_emitted(quine, 0);
    CHECK(out == program_nat(quine));
    CHECK(nat_to_encoding(out) == encode(quine));

    // A template without SELF is rejected; use the program directly.
    CHECK_THROWS_AS(quine_transform(suite::fixture_guest_halt()), ValidationError);

    // Quiet template: halts, SELF costs one tick like any instruction.
    const Program quiet = quine_transform(
        Program::from_instructions({Instruction{Opcode::Self, 0}, Instruction{Opcode::Halt}}, false));
    const RunOutcome run = run_collect(quiet, Nat(0), 10);
    CHECK(run.result.verdict == RunVerdict::halts_at(1));
    CHECK(run.final_config.regs[0] == program_nat(quiet));

    // Distinct templates transform to distinct programs.
    CHECK(!(quine == quiet));
}

TEST_CASE("decode: an encoding with SELF arrives closed and runnable") {
    const Program quine = quine_transform(assemble(read_fixture("quine.gasm")));
    const Program back = decode(encode(quine));
    CHECK(back.uses_self());
    CHECK(back.executable());
    CHECK(run_emitted(back, 0) == program_nat(quine));
}

TEST_CASE("decode: malformed bytes are rejected with offsets") {
    const Encoding good = encode(suite::fixture_guest_inc_halt());
    Encoding truncated = good;
    truncated.bytes.pop_back();
    CHECK_THROWS_AS(decode(truncated), DecodeError);

    Encoding trailing = good;
    trailing.bytes.push_back(7);
    CHECK_THROWS_AS(decode(trailing), DecodeError);

    CHECK_THROWS_AS(nat_to_encoding(Nat(0)), DecodeError);
    CHECK_THROWS_AS(decode_nat(Nat(123456789)), DecodeError);
}

TEST_CASE("loader validation: registers, targets, verdict immediates") {
    CHECK_THROWS_AS(Program::from_instructions({Instruction{Opcode::Inc, 999}}, false),
                    ValidationError);
    CHECK_THROWS_AS(Program::from_instructions({Instruction{Opcode::Jmp, 5}}, false),
                    ValidationError);
    CHECK_THROWS_AS(
        Program::from_instructions({Instruction{Opcode::EmitImm, 0, 0, 0, Nat(2)}}, false),
        ValidationError);
    // Jump to one-past-the-end is falling off, which halts.
    const Program fall = Program::from_instructions({Instruction{Opcode::Jmp, 1}}, false);
    CHECK(run_bounded(fall, Nat(0), 10).verdict == RunVerdict::halts_at(1));
}

TEST_CASE("assembler: labels, comments, errors with line numbers") {
    const Program p = assemble("# demo\nstart:\n  JZ r0, end\n  DEC r0\n  JMP start\nend: HALT\n");
    CHECK(p.size() == 4);
    // three (JZ, DEC, JMP) rounds plus the final JZ that lands on HALT
    CHECK(run_bounded(p, Nat(3), 100).verdict == RunVerdict::halts_at(10));

    CHECK_THROWS_AS(assemble("FROB r0\n"), ParseError);
    CHECK_THROWS_AS(assemble("JMP nowhere\n"), ParseError);
    CHECK_THROWS_AS(assemble("INC rx\n"), ParseError);
    CHECK_THROWS_AS(assemble("l: HALT\nl: HALT\n"), ParseError);
    CHECK_THROWS_AS(assemble("EMIT XYZ\n"), ParseError);
    try {
        assemble("HALT\nFROB r0\n");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("EMIT fires at most once per run; the second faults the machine") {
    const Program p = assemble("EMIT HALTS\nEMIT DOES_NOT_HALT\nHALT\n");
    const RunOutcome run = run_collect(p, Nat(0), 10);
    CHECK(run.fault());
    CHECK(run.result.verdict.halted());
    CHECK(run.emitted().has_value());
    CHECK(*run.emitted() == 1); // the first EMIT stands
}

TEST_CASE("verdicts: wire byte and interpretation of emitted values") {
    CHECK(verdict_wire_byte(GuestVerdict::Halts) == 1);
    CHECK(verdict_wire_byte(GuestVerdict::DoesNotHalt) == 0);
    CHECK(verdict_of(Nat(1)) == GuestVerdict::Halts);
    CHECK(verdict_of(Nat(0)) == GuestVerdict::DoesNotHalt);
    CHECK(!verdict_of(Nat(2)).has_value());
    CHECK(!verdict_of(std::nullopt).has_value());
}

TEST_CASE("make_bounded_decider: verdicts and the T+1 ledger bound") {
    const BoundedDecider d5 = make_bounded_decider(5);
    const RunOutcome a = run_collect(d5.program, program_nat(suite::fixture_guest_inc_halt()),
                                     d5.cost_bound);
    CHECK(verdict_of(a.emitted()) == GuestVerdict::Halts);

    const BoundedDecider d3 = make_bounded_decider(3);
    const RunOutcome b = run_collect(d3.program, program_nat(suite::fixture_guest_loop()),
                                     d3.cost_bound);
    CHECK(verdict_of(b.emitted()) == GuestVerdict::DoesNotHalt);
    CHECK(b.result.ledger.total() >= 4); // deciding "not within T" costs at least T+1 ticks

    const BoundedDecider d0 = make_bounded_decider(0);
    const RunOutcome c = run_collect(d0.program, program_nat(suite::fixture_guest_halt()),
                                     d0.cost_bound);
    CHECK(verdict_of(c.emitted()) == GuestVerdict::Halts);

    // Malformed input encoding: exhausts the budget, answers DOES_NOT_HALT.
    const RunOutcome m = run_collect(d3.program, Nat(424242), d3.cost_bound);
    CHECK(verdict_of(m.emitted()) == GuestVerdict::DoesNotHalt);
    CHECK(m.result.ledger.total() >= 4);
}

TEST_CASE("make_diagonalizer: inverts the verdict, halting step lands beyond the bound") {
    const BoundedDecider d3 = make_bounded_decider(3);
    const Program x = make_diagonalizer(d3);

    const RunOutcome d_run = run_collect(d3.program, program_nat(x), d3.cost_bound);
    REQUIRE(verdict_of(d_run.emitted()) == GuestVerdict::DoesNotHalt);

    const RunOutcome x_run = run_collect(x, Nat(0), 1000);
    REQUIRE(x_run.result.verdict.halted());
    CHECK(x_run.result.verdict.step() >= 4);
}

TEST_CASE("make_diagonalizer: a constant-HALTS decider sends X to LOOP") {
    BoundedDecider fake;
    fake.program = assemble("EMIT HALTS\nHALT\n");
    fake.cost_bound = 4;
    const Program x = make_diagonalizer(fake);
    const LoopSearch ls = run_until_loop_or_halt(x, Nat(0), 1000);
    CHECK(ls.kind == LoopSearch::Kind::ReachedLoop);
    // And bounded runs keep reporting running, for any bound tried.
    for (StepIndex t : {StepIndex(10), StepIndex(100), StepIndex(1000)}) {
        CHECK(!run_bounded(x, Nat(0), t).verdict.halted());
    }
}

TEST_CASE("make_diagonalizer: deciders that never emit are rejected at construction") {
    BoundedDecider silent;
    silent.program = assemble("HALT\n");
    silent.cost_bound = 4;
    CHECK_THROWS_AS(make_diagonalizer(silent), ValidationError);

    BoundedDecider spinner;
    spinner.program = assemble("LOOP\n");
    spinner.cost_bound = 16;
    CHECK_THROWS_AS(make_diagonalizer(spinner), ValidationError);
}

TEST_CASE("run_until_loop_or_halt: structural certificate vs plain halting") {
    CHECK(run_until_loop_or_halt(suite::fixture_guest_loop(), Nat(0), 100).kind ==
          LoopSearch::Kind::ReachedLoop);
    CHECK(run_until_loop_or_halt(suite::fixture_guest_halt(), Nat(0), 100).kind ==
          LoopSearch::Kind::HaltedAt);
    // A countdown never reaches a LOOP site and halts.
    const LoopSearch ls = run_until_loop_or_halt(countdown_program(0, 1), Nat(2), 100);
    CHECK(ls.kind == LoopSearch::Kind::HaltedAt);
}

TEST_CASE("bounded runs: reference stepping agrees with the budget-aware runner") {
    // Reference evaluation retires EXEC atomically; keep diagonalizer
    // bounds at or below 3 so the self-referential tower stays finite on
    // that path (the budget-aware runner handles any bound).
    std::vector<Program> programs = {
        suite::fixture_guest_halt(),
        suite::fixture_guest_inc_halt(),
        suite::fixture_guest_loop(),
        countdown_program(1, 2),
        make_bounded_decider(5).program,
        make_diagonalizer(make_bounded_decider(2)),
        make_diagonalizer(make_bounded_decider(3)),
    };
    // An EXEC that the outer bound cuts mid-instruction: inner loop with a
    // big budget.
    programs.push_back(Program::from_instructions(
        {
            Instruction{Opcode::Load, 0, 0, 0, program_nat(suite::fixture_guest_loop())},
            Instruction{Opcode::Load, 1, 0, 0, Nat(1000)},
            Instruction{Opcode::Exec, 0, 2, 1},
            Instruction{Opcode::Halt},
        },
        false));

    const Nat decider_input = program_nat(make_diagonalizer(make_bounded_decider(2)));
    for (std::size_t pi = 0; pi < programs.size(); ++pi) {
        const Program& p = programs[pi];
        const Nat input = pi == 4 ? decider_input : Nat(0);
        for (StepIndex bound = 0; bound <= 40; ++bound) {
            const RunResult fast = run_bounded(p, input, bound);
            const RunResult ref = run_bounded_reference(p, input, bound);
            CAPTURE(pi);
            CAPTURE(bound);
            CHECK(fast.verdict == ref.verdict);
            CHECK(fast.ledger.simulated_steps == ref.ledger.simulated_steps);
            CHECK(fast.ledger.verdict_ticks == ref.ledger.verdict_ticks);
        }
    }
}

TEST_CASE("to_assembly/assemble round trip preserves the instruction list") {
    const Program p = countdown_program(2, 3);
    const Program back = assemble(to_assembly(p));
    CHECK(p == back);
    CHECK(encode(p) == encode(back));
}

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "haltlab/errors.hpp"
#include "haltlab/suite.hpp"
#include "haltlab/tm.hpp"

using namespace haltlab;

namespace {

std::string read_fixture(const std::string& name) {
    std::ifstream in(std::string(HALTLAB_MACHINES_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

TEST_CASE("parse_machine: fixture files round through and behave as authored") {
    const tm::MachineSpec halt0 = tm::parse_machine(read_fixture("m_halt0.tm"));
    CHECK(halt0.transitions.empty());
    CHECK(halt0.halt_states.count(halt0.start_state));

    const tm::MachineSpec halt2 = tm::parse_machine(read_fixture("m_halt2.tm"));
    const tm::TuringMachine m2(halt2);
    CHECK(run_bounded(m2, {}, 10).verdict == RunVerdict::halts_at(2));
    CHECK(tm::structurally_equal(halt2, suite::fixture_halt2()));

    const tm::MachineSpec loop = tm::parse_machine(read_fixture("m_loop.tm"));
    const tm::TuringMachine ml(loop);
    CHECK(run_bounded(ml, tm::self_input(loop), 100).verdict == RunVerdict::running_at(100));

    const tm::MachineSpec halt5 = tm::parse_machine(read_fixture("m_halt5.tm"));
    CHECK(run_bounded(tm::TuringMachine(halt5), {}, 10).verdict == RunVerdict::halts_at(5));
}

TEST_CASE("parse_machine: single-symbol two-mover needs exactly two rules") {
    const std::string text =
        "states: q0 q1 qh\nalphabet: _\nblank: _\nstart: q0\nhalt: qh\n"
        "q0 _ -> q1 _ R\nq1 _ -> qh _ R\n";
    const tm::MachineSpec spec = tm::parse_machine(text);
    CHECK(spec.transitions.size() == 2);
    CHECK(run_bounded(tm::TuringMachine(spec), {}, 5).verdict == RunVerdict::halts_at(2));
}

TEST_CASE("parse_machine: error paths carry line numbers") {
    const std::string dup =
        "states: q0 qh\nalphabet: _\nblank: _\nstart: q0\nhalt: qh\n"
        "q0 _ -> q0 _ R\nq0 _ -> qh _ R\n";
    CHECK_THROWS_WITH_AS(tm::parse_machine(dup),
                         doctest::Contains("deterministic"), ParseError);
    try {
        tm::parse_machine(dup);
    } catch (const ParseError& e) {
        CHECK(e.line() == 7);
    }

    CHECK_THROWS_AS(tm::parse_machine("states: q0\nalphabet: _\nblank: _\nstart: q0\nhalt: qh\n"),
                    ParseError); // unknown halt state
    CHECK_THROWS_AS(tm::parse_machine("states: q0 qh\nalphabet: _\nblank: _\nstart: q0\nhalt: qh\n"
                                      "q0 X -> q0 _ R\n"),
                    ParseError); // unknown symbol
    CHECK_THROWS_AS(tm::parse_machine("q0 _ -> q0 _ R\nstates: q0 qh\nalphabet: _\nblank: _\n"
                                      "start: q0\nhalt: qh\n"),
                    ParseError); // transition before headers
    CHECK_THROWS_AS(tm::parse_machine("states: q0 qh\nalphabet: _\nblank: _\nstart: q0\nhalt: qh\n"
                                      "q0 _ -> q0 _ X\n"),
                    ParseError); // bad move letter
}

TEST_CASE("validate: totality and silent-halt rejection") {
    // A missing transition is a validation error, not an implicit halt.
    tm::MachineSpec spec = suite::fixture_halt2();
    spec.transitions.erase({1, 1});
    CHECK_THROWS_AS(spec.validate(), ValidationError);

    tm::MachineSpec outgoing = suite::fixture_halt2();
    outgoing.transitions[{2, 0}] = {0, 0, tm::Move::Right};
    CHECK_THROWS_AS(outgoing.validate(), ValidationError);
}

TEST_CASE("encode/decode: deterministic canonical round trip") {
    for (const auto& spec : {suite::fixture_halt0(), suite::fixture_halt2(),
                             suite::fixture_halt5(), suite::fixture_loop()}) {
        const tm::Encoding a = tm::encode(spec);
        const tm::Encoding b = tm::encode(spec);
        CHECK(a == b);
        const tm::MachineSpec back = tm::decode(a);
        CHECK(tm::structurally_equal(spec, back));
        CHECK(tm::encode(back) == a);
    }
}

TEST_CASE("decode: malformed encodings carry byte offsets") {
    const tm::Encoding good = tm::encode(suite::fixture_halt2());

    tm::Encoding truncated = good;
    truncated.bytes.resize(truncated.bytes.size() / 2);
    CHECK_THROWS_AS(tm::decode(truncated), DecodeError);

    tm::Encoding magic = good;
    magic.bytes[0] = 'X';
    CHECK_THROWS_AS(tm::decode(magic), DecodeError);

    tm::Encoding trailing = good;
    trailing.bytes.push_back(0);
    CHECK_THROWS_AS(tm::decode(trailing), DecodeError);

    CHECK_THROWS_AS(tm::decode(tm::Encoding{}), DecodeError);

    try {
        tm::decode(truncated);
    } catch (const DecodeError& e) {
        CHECK(e.offset() > 0);
        CHECK(e.offset() <= good.bytes.size());
    }
}

TEST_CASE("enumerate_machines: counts match the brute-force per-key product") {
    const tm::MachineEnumerator one = tm::enumerate_machines(1, 2);
    // Options per key counted directly: every (next state, write, move)
    // combination over the working states plus the single halt option.
    std::uint64_t per_key = 0;
    for (std::uint32_t next = 0; next < 1; ++next) {
        for (std::uint32_t write = 0; write < 2; ++write) {
            for (int move = 0; move < 3; ++move) ++per_key;
        }
    }
    per_key += 1;
    CHECK(per_key == 7);
    std::uint64_t expected = 1;
    for (int key = 0; key < 1 * 2; ++key) expected *= per_key;
    CHECK(one.count() == expected);
    CHECK(one.count() == 49);

    const tm::MachineEnumerator two = tm::enumerate_machines(2, 2);
    CHECK(two.count() == 28561); // 13^4

    CHECK(tm::enumerate_machines(0, 2).count() == 0);
}

TEST_CASE("enumerate_machines: deterministic order, validity, one halt state") {
    const tm::MachineEnumerator en = tm::enumerate_machines(1, 2);
    std::vector<tm::Encoding> first, second;
    en.for_each([&](const tm::MachineSpec& s) { first.push_back(tm::encode(s)); });
    en.for_each([&](const tm::MachineSpec& s) { second.push_back(tm::encode(s)); });
    CHECK(first == second);

    std::set<std::vector<std::uint8_t>> distinct;
    en.for_each([&](const tm::MachineSpec& s) {
        CHECK_NOTHROW(s.validate());
        CHECK(s.halt_states.size() == 1);
        CHECK(*s.halt_states.begin() == s.state_count() - 1);
        distinct.insert(tm::encode(s).bytes);
    });
    CHECK(distinct.size() == en.count());
}

TEST_CASE("enumerate_machines: guard refuses big requests unless overridden") {
    CHECK_THROWS_AS(tm::enumerate_machines(4, 2), GuardError);
    CHECK_THROWS_AS(tm::enumerate_machines(2, 3), GuardError);
    const tm::MachineEnumerator big = tm::enumerate_machines(3, 2, {3, 2});
    CHECK(big.count() == 47045881); // 19^6, count only
}

TEST_CASE("self_input: encoding bits over blank/mark, empty for blank-only alphabets") {
    const tm::MachineSpec spec = suite::fixture_halt2();
    const auto input = tm::self_input(spec);
    const tm::Encoding enc = tm::encode(spec);
    REQUIRE(input.size() == enc.bytes.size() * 8);
    // First byte is 'T' = 0x54 = 01010100.
    const std::vector<tm::SymbolId> expect_prefix = {0, 1, 0, 1, 0, 1, 0, 0};
    for (int i = 0; i < 8; ++i) CHECK(input[i] == expect_prefix[i]);

    CHECK(tm::self_input(suite::fixture_halt0()).empty());
}

TEST_CASE("configurations never store explicit blanks") {
    // An eraser: replaces marks with blanks while moving right.
    tm::MachineSpec spec;
    spec.states = {"q0", "qh"};
    spec.tape_alphabet = {"_", "1"};
    spec.blank = 0;
    spec.start_state = 0;
    spec.halt_states = {1};
    spec.transitions[{0, 1}] = {0, 0, tm::Move::Right};
    spec.transitions[{0, 0}] = {1, 0, tm::Move::Right};
    spec.validate();
    const tm::TuringMachine m(spec);
    auto c = m.initial_config({1, 1, 1});
    CHECK(c.tape.size() == 3);
    while (!m.is_halting(c)) {
        c = m.next(c);
        for (const auto& [cell, sym] : c.tape) {
            (void)cell;
            CHECK(sym != spec.blank);
        }
    }
    CHECK(c.tape.empty());
    CHECK(c.step == 4);
}

TEST_CASE("format_machine: parse of the formatted text is structurally identical") {
    for (const auto& spec : {suite::fixture_halt2(), suite::fixture_loop()}) {
        const tm::MachineSpec back = tm::parse_machine(tm::format_machine(spec));
        CHECK(tm::structurally_equal(spec, back));
    }
}

#include "haltlab/guest_vm.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <sstream>

#include "haltlab/errors.hpp"
#include "wire.hpp"

namespace haltlab::guest {

namespace {

constexpr char kMagic[4] = {'G', 'A', '0', '1'};
constexpr std::uint32_t kMaxRegisters = 256;
constexpr Tick kBudgetClamp = Tick(1) << 62;

// Nesting guard for self-referential EXEC towers. The per-level budget
// clipping already forces the depth down by at least two ticks per level,
// so hitting this limit requires a deliberately pathological program.
constexpr int kMaxExecDepth = 4096;
thread_local int g_exec_depth = 0;

struct ExecDepthGuard {
    ExecDepthGuard() {
        if (++g_exec_depth > kMaxExecDepth) {
            --g_exec_depth;
            throw ValidationError("EXEC nesting exceeds the interpreter's depth limit");
        }
    }
    ~ExecDepthGuard() { --g_exec_depth; }
};

Tick clamp_budget(const Nat& value) {
    if (value < 0) return 0;
    if (value > kBudgetClamp) return kBudgetClamp;
    return value.convert_to<Tick>();
}

} // namespace

const char* opcode_name(Opcode op) {
    switch (op) {
    case Opcode::Load: return "LOAD";
    case Opcode::Copy: return "COPY";
    case Opcode::Inc: return "INC";
    case Opcode::Dec: return "DEC";
    case Opcode::Jz: return "JZ";
    case Opcode::Jmp: return "JMP";
    case Opcode::Exec: return "EXEC";
    case Opcode::EmitImm: return "EMIT";
    case Opcode::EmitReg: return "EMIT";
    case Opcode::Self: return "SELF";
    case Opcode::Halt: return "HALT";
    case Opcode::Loop: return "LOOP";
    }
    return "?";
}

std::optional<GuestVerdict> verdict_of(const std::optional<Nat>& emitted) {
    if (!emitted) return std::nullopt;
    if (*emitted == 0) return GuestVerdict::DoesNotHalt;
    if (*emitted == 1) return GuestVerdict::Halts;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Program construction and validation

namespace {

Encoding encode_instructions(const std::vector<Instruction>& instructions);

} // namespace

Program Program::from_instructions(std::vector<Instruction> instructions, bool self_resolved) {
    Program p;
    p.instructions_ = std::move(instructions);
    const std::size_t n = p.instructions_.size();
    std::uint32_t max_reg = 0;

    auto reg = [&](std::uint32_t r, std::size_t at) {
        if (r >= kMaxRegisters) {
            throw ValidationError("invalid register index r" + std::to_string(r) +
                                  " at instruction " + std::to_string(at));
        }
        max_reg = std::max(max_reg, r);
    };
    auto target = [&](std::uint32_t t, std::size_t at) {
        if (t > n) {
            throw ValidationError("jump target " + std::to_string(t) + " out of range at instruction " +
                                  std::to_string(at));
        }
    };

    for (std::size_t i = 0; i < n; ++i) {
        const Instruction& ins = p.instructions_[i];
        switch (ins.op) {
        case Opcode::Load:
            reg(ins.a, i);
            if (ins.literal < 0) throw ValidationError("negative literal at instruction " + std::to_string(i));
            break;
        case Opcode::Copy:
            reg(ins.a, i);
            reg(ins.b, i);
            break;
        case Opcode::Inc:
        case Opcode::Dec:
        case Opcode::EmitReg:
        case Opcode::Self:
            reg(ins.a, i);
            break;
        case Opcode::Jz:
            reg(ins.a, i);
            target(ins.b, i);
            break;
        case Opcode::Jmp:
            target(ins.a, i);
            break;
        case Opcode::Exec:
            reg(ins.a, i);
            reg(ins.b, i);
            reg(ins.c, i);
            break;
        case Opcode::EmitImm:
            if (ins.literal != 0 && ins.literal != 1) {
                throw ValidationError("EMIT immediate must be a verdict (0 or 1) at instruction " +
                                      std::to_string(i));
            }
            break;
        case Opcode::Halt:
        case Opcode::Loop:
            break;
        default:
            throw ValidationError("unknown opcode at instruction " + std::to_string(i));
        }
        if (ins.op == Opcode::Self) p.uses_self_ = true;
    }
    p.register_count_ = max_reg + 1;
    p.self_resolved_ = self_resolved;
    p.self_value_ = encoding_to_nat(encode_instructions(p.instructions_));
    return p;
}

// ---------------------------------------------------------------------------
// Interpreter

Program::Config Program::initial_config(const Input& input) const {
    if (!executable()) {
        throw ValidationError("raw program contains SELF; apply quine_transform before running");
    }
    if (input < 0) throw ValidationError("guest input must be a non-negative natural");
    Config c;
    c.regs.assign(register_count_, Nat(0));
    c.regs[0] = input;
    return c;
}

bool Program::is_halting(const Config& config) const {
    if (config.regs.size() != register_count_) {
        throw ValidationError("configuration register file does not match this program");
    }
    if (config.pc > instructions_.size()) {
        throw ValidationError("configuration pc out of range for this program");
    }
    if (config.fault) return true;
    if (config.pc == instructions_.size()) return true; // fell off the end
    return instructions_[config.pc].op == Opcode::Halt;
}

namespace {

struct ExecEval {
    bool overshoot = false; // true charge provably exceeds the allowance
    Tick charge = 0;
    bool inner_halted = false;
    Nat inner_emitted = 0;
};

// Evaluates an EXEC without doing more inner work than `allowance` ticks
// can pay for. When the true charge (inner bounded-run total + 1 dispatch)
// exceeds the allowance the caller's run is being cut anyway, so the exact
// value is irrelevant and `overshoot` is reported instead. This keeps
// self-referential towers finite: every nesting level shrinks the
// allowance.
ExecEval eval_exec(const Nat& program_nat, const Nat& input, const Nat& budget_nat,
                   std::optional<Tick> allowance) {
    ExecDepthGuard depth;
    const Tick budget = clamp_budget(budget_nat);
    ExecEval out;
    if (allowance && *allowance == 0) {
        out.overshoot = true;
        return out;
    }

    Program inner;
    bool malformed = false;
    try {
        inner = decode_nat(program_nat);
    } catch (const DecodeError&) {
        malformed = true;
    }
    if (malformed) {
        // Documented convention: a malformed encoding consumes the whole
        // budget's worth of attempts plus the dispatch tick.
        out.charge = budget + 1;
        out.overshoot = allowance && out.charge > *allowance;
        return out;
    }

    const Tick inner_bound = allowance ? std::min<Tick>(budget, *allowance - 1) : budget;
    const RunOutcome run = run_collect(inner, input, inner_bound);
    if (run.result.verdict.halted()) {
        out.inner_halted = true;
        out.charge = run.result.ledger.total() + 1;
        out.inner_emitted = run.emitted().value_or(Nat(0));
        out.overshoot = allowance && out.charge > *allowance;
        return out;
    }
    if (inner_bound < budget) {
        // Clipped below the budget register: the true charge is at least
        // allowance + 1, so the outer run cannot afford this instruction.
        out.overshoot = true;
        return out;
    }
    out.charge = run.result.ledger.total() + 1; // budget + 2
    out.inner_emitted = run.emitted().value_or(Nat(0));
    out.overshoot = allowance && out.charge > *allowance;
    return out;
}

} // namespace

std::optional<Program::Config> Program::next_bounded(const Config& config,
                                                     std::optional<Tick> allowance) const {
    if (is_halting(config)) {
        throw ValidationError("next() called on a halting configuration");
    }
    const Instruction& ins = instructions_[config.pc];
    if (ins.op == Opcode::Self && !executable()) {
        throw ValidationError("SELF in a raw program; apply quine_transform");
    }
    if (allowance && *allowance == 0) return std::nullopt;

    Config out = config;
    out.step = config.step + 1;
    out.pc = config.pc + 1;
    switch (ins.op) {
    case Opcode::Load:
        out.regs[ins.a] = ins.literal;
        break;
    case Opcode::Copy:
        out.regs[ins.a] = out.regs[ins.b];
        break;
    case Opcode::Inc:
        out.regs[ins.a] += 1;
        break;
    case Opcode::Dec:
        if (out.regs[ins.a] > 0) out.regs[ins.a] -= 1;
        break;
    case Opcode::Jz:
        out.pc = (config.regs[ins.a] == 0) ? ins.b : config.pc + 1;
        break;
    case Opcode::Jmp:
        out.pc = ins.a;
        break;
    case Opcode::EmitImm:
    case Opcode::EmitReg: {
        if (config.emitted) {
            out.fault = true; // at most one EMIT per run
            out.pc = config.pc;
            break;
        }
        out.emitted = ins.op == Opcode::EmitImm ? ins.literal : config.regs[ins.a];
        break;
    }
    case Opcode::Self:
        out.regs[ins.a] = self_value_;
        break;
    case Opcode::Loop:
        out.pc = config.pc;
        break;
    case Opcode::Exec: {
        const ExecEval eval = eval_exec(config.regs[ins.a], config.regs[ins.b],
                                        config.regs[ins.c], allowance);
        if (eval.overshoot) return std::nullopt;
        if (eval.charge > std::numeric_limits<Tick>::max() - config.step) {
            // Step indices must not silently wrap; only EXEC can jump by
            // more than one tick.
            throw ValidationError("step index overflow in EXEC accounting");
        }
        out.regs[ins.c] = eval.inner_halted ? 1 : 0;
        out.regs[ins.b] = eval.inner_emitted;
        out.step = config.step + eval.charge;
        break;
    }
    case Opcode::Halt:
        throw ValidationError("HALT is a halting configuration, not a transition");
    }
    return out;
}

Program::Config Program::next(const Config& config) const {
    auto out = next_bounded(config, std::nullopt);
    return *out; // unbounded evaluation never reports overshoot
}

RunOutcome run_collect(const Program& program, const Nat& input, StepIndex bound) {
    Program::Config config = program.initial_config(input);
    CostLedger ledger;
    while (true) {
        if (program.is_halting(config)) {
            ledger.simulated_steps = config.step;
            ledger.verdict_ticks = 1;
            return {RunResult{RunVerdict::halts_at(config.step), ledger}, std::move(config)};
        }
        if (config.step >= bound) break;
        auto next = program.next_bounded(config, bound - config.step);
        if (!next) break; // the pending instruction costs more than remains
        config = std::move(*next);
    }
    ledger.simulated_steps = bound;
    ledger.verdict_ticks = 1;
    return {RunResult{RunVerdict::running_at(bound), ledger}, std::move(config)};
}

RunResult Program::run_bounded_fast(const Input& input, StepIndex bound) const {
    return run_collect(*this, input, bound).result;
}

LoopSearch run_until_loop_or_halt(const Program& program, const Nat& input, StepIndex fuel) {
    Program::Config config = program.initial_config(input);
    while (true) {
        if (program.is_halting(config)) {
            return {LoopSearch::Kind::HaltedAt, config.step, config.pc};
        }
        if (config.pc < program.size() &&
            program.instructions()[config.pc].op == Opcode::Loop) {
            return {LoopSearch::Kind::ReachedLoop, config.step, config.pc};
        }
        if (config.step >= fuel) break;
        auto next = program.next_bounded(config, fuel - config.step);
        if (!next) break;
        config = std::move(*next);
    }
    return {LoopSearch::Kind::Exhausted, fuel, config.pc};
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

bool parse_reg(const std::string& tok, std::uint32_t& out) {
    if (tok.size() < 2 || (tok[0] != 'r' && tok[0] != 'R')) return false;
    std::uint64_t v = 0;
    for (std::size_t i = 1; i < tok.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
        v = v * 10 + (tok[i] - '0');
        if (v > kMaxRegisters) return false;
    }
    out = static_cast<std::uint32_t>(v);
    return true;
}

} // namespace

Program assemble(const std::string& text) {
    struct Pending {
        std::size_t line_no;
        std::vector<std::string> tokens;
    };
    std::vector<Pending> raw;
    std::map<std::string, std::uint32_t> labels;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        for (char& c : line) {
            if (c == ',') c = ' ';
        }
        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;
        if (tokens[0].back() == ':') {
            const std::string name = tokens[0].substr(0, tokens[0].size() - 1);
            if (name.empty()) throw ParseError("empty label", line_no);
            if (!labels.emplace(name, static_cast<std::uint32_t>(raw.size())).second) {
                throw ParseError("duplicate label '" + name + "'", line_no);
            }
            tokens.erase(tokens.begin());
            if (tokens.empty()) continue;
        }
        raw.push_back({line_no, std::move(tokens)});
    }

    auto resolve_target = [&](const std::string& tok, std::size_t at_line) -> std::uint32_t {
        auto it = labels.find(tok);
        if (it != labels.end()) return it->second;
        try {
            const std::size_t pos_end = tok.find_first_not_of("0123456789");
            if (pos_end != std::string::npos) throw std::invalid_argument(tok);
            return static_cast<std::uint32_t>(std::stoul(tok));
        } catch (const std::logic_error&) {
            throw ParseError("unknown label or bad target '" + tok + "'", at_line);
        }
    };

    std::vector<Instruction> instructions;
    for (const Pending& p : raw) {
        const std::string op = upper(p.tokens[0]);
        const auto& t = p.tokens;
        auto want = [&](std::size_t n) {
            if (t.size() != n + 1) {
                throw ParseError(op + " takes " + std::to_string(n) + " operand(s)", p.line_no);
            }
        };
        auto reg_at = [&](std::size_t i) {
            std::uint32_t r;
            if (!parse_reg(t[i], r)) {
                throw ParseError("expected register, got '" + t[i] + "'", p.line_no);
            }
            return r;
        };
        Instruction ins;
        if (op == "LOAD") {
            want(2);
            ins.op = Opcode::Load;
            ins.a = reg_at(1);
            try {
                ins.literal = Nat(t[2]);
            } catch (const std::runtime_error&) {
                throw ParseError("bad literal '" + t[2] + "'", p.line_no);
            }
        } else if (op == "COPY") {
            want(2);
            ins.op = Opcode::Copy;
            ins.a = reg_at(1);
            ins.b = reg_at(2);
        } else if (op == "INC" || op == "DEC") {
            want(1);
            ins.op = op == "INC" ? Opcode::Inc : Opcode::Dec;
            ins.a = reg_at(1);
        } else if (op == "JZ") {
            want(2);
            ins.op = Opcode::Jz;
            ins.a = reg_at(1);
            ins.b = resolve_target(t[2], p.line_no);
        } else if (op == "JMP") {
            want(1);
            ins.op = Opcode::Jmp;
            ins.a = resolve_target(t[1], p.line_no);
        } else if (op == "EXEC") {
            want(3);
            ins.op = Opcode::Exec;
            ins.a = reg_at(1);
            ins.b = reg_at(2);
            ins.c = reg_at(3);
        } else if (op == "EMIT") {
            want(1);
            std::uint32_t r;
            const std::string arg = upper(t[1]);
            if (parse_reg(t[1], r)) {
                ins.op = Opcode::EmitReg;
                ins.a = r;
            } else if (arg == "HALTS" || arg == "1") {
                ins.op = Opcode::EmitImm;
                ins.literal = 1;
            } else if (arg == "DOES_NOT_HALT" || arg == "0") {
                ins.op = Opcode::EmitImm;
                ins.literal = 0;
            } else {
                throw ParseError("EMIT takes a register, HALTS or DOES_NOT_HALT", p.line_no);
            }
        } else if (op == "SELF") {
            want(1);
            ins.op = Opcode::Self;
            ins.a = reg_at(1);
        } else if (op == "HALT") {
            want(0);
            ins.op = Opcode::Halt;
        } else if (op == "LOOP") {
            want(0);
            ins.op = Opcode::Loop;
        } else {
            throw ParseError("unknown mnemonic '" + t[0] + "'", p.line_no);
        }
        instructions.push_back(std::move(ins));
    }
    try {
        return Program::from_instructions(std::move(instructions), false);
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
}

std::string to_assembly(const Program& program) {
    std::ostringstream out;
    for (const Instruction& ins : program.instructions()) {
        out << opcode_name(ins.op);
        switch (ins.op) {
        case Opcode::Load: out << " r" << ins.a << ", " << ins.literal; break;
        case Opcode::Copy: out << " r" << ins.a << ", r" << ins.b; break;
        case Opcode::Inc:
        case Opcode::Dec:
        case Opcode::EmitReg:
        case Opcode::Self: out << " r" << ins.a; break;
        case Opcode::Jz: out << " r" << ins.a << ", " << ins.b; break;
        case Opcode::Jmp: out << ' ' << ins.a; break;
        case Opcode::Exec: out << " r" << ins.a << ", r" << ins.b << ", r" << ins.c; break;
        case Opcode::EmitImm: out << (ins.literal == 1 ? " HALTS" : " DOES_NOT_HALT"); break;
        case Opcode::Halt:
        case Opcode::Loop: break;
        }
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Binary encoding

namespace {

void put_nat(std::vector<std::uint8_t>& out, const Nat& value) {
    std::vector<std::uint8_t> bytes;
    if (value > 0) {
        boost::multiprecision::export_bits(value, std::back_inserter(bytes), 8, false);
    }
    wire::put_varint(out, bytes.size());
    out.insert(out.end(), bytes.begin(), bytes.end());
}

Nat read_nat(wire::Reader& r, const char* what) {
    const std::uint64_t len = r.varint(what);
    if (len > (1u << 20)) throw DecodeError(std::string("unreasonable literal size in ") + what, r.offset());
    std::vector<std::uint8_t> bytes(len);
    if (len) r.bytes(bytes.data(), len, what);
    Nat value = 0;
    if (!bytes.empty() && bytes.back() == 0) {
        throw DecodeError(std::string("non-canonical literal (high zero byte) in ") + what, r.offset());
    }
    if (!bytes.empty()) {
        boost::multiprecision::import_bits(value, bytes.begin(), bytes.end(), 8, false);
    }
    return value;
}

Encoding encode_instructions(const std::vector<Instruction>& instructions) {
    std::vector<std::uint8_t> payload;
    wire::put_varint(payload, instructions.size());
    for (const Instruction& ins : instructions) {
        payload.push_back(static_cast<std::uint8_t>(ins.op));
        switch (ins.op) {
        case Opcode::Load:
            wire::put_varint(payload, ins.a);
            put_nat(payload, ins.literal);
            break;
        case Opcode::Copy:
        case Opcode::Jz:
            wire::put_varint(payload, ins.a);
            wire::put_varint(payload, ins.b);
            break;
        case Opcode::Inc:
        case Opcode::Dec:
        case Opcode::EmitReg:
        case Opcode::Self:
        case Opcode::Jmp:
            wire::put_varint(payload, ins.a);
            break;
        case Opcode::Exec:
            wire::put_varint(payload, ins.a);
            wire::put_varint(payload, ins.b);
            wire::put_varint(payload, ins.c);
            break;
        case Opcode::EmitImm:
            payload.push_back(static_cast<std::uint8_t>(ins.literal.convert_to<unsigned>()));
            break;
        case Opcode::Halt:
        case Opcode::Loop:
            break;
        }
    }
    Encoding enc;
    enc.bytes.assign(kMagic, kMagic + 4);
    wire::put_varint(enc.bytes, payload.size());
    enc.bytes.insert(enc.bytes.end(), payload.begin(), payload.end());
    return enc;
}

} // namespace

Encoding encode(const Program& program) { return encode_instructions(program.instructions()); }

Program decode(const Encoding& enc) {
    wire::Reader header(enc.bytes.data(), enc.bytes.size());
    char magic[4];
    header.bytes(reinterpret_cast<std::uint8_t*>(magic), 4, "magic");
    if (!std::equal(magic, magic + 4, kMagic)) {
        throw DecodeError("bad magic, expected GA01", 0);
    }
    const std::uint64_t payload_len = header.varint("payload length");
    if (header.remaining() != payload_len) {
        throw DecodeError("payload length mismatch: declared " + std::to_string(payload_len) +
                              ", have " + std::to_string(header.remaining()),
                          header.offset());
    }
    wire::Reader r(enc.bytes.data() + (enc.bytes.size() - payload_len), payload_len,
                   enc.bytes.size() - payload_len);
    const std::uint64_t n = r.varint("instruction count");
    if (n > (1u << 20)) throw DecodeError("unreasonable instruction count", r.offset());
    std::vector<Instruction> instructions;
    instructions.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint8_t op_byte = r.byte("opcode");
        if (op_byte < static_cast<std::uint8_t>(Opcode::Load) ||
            op_byte > static_cast<std::uint8_t>(Opcode::Loop)) {
            throw DecodeError("unknown opcode " + std::to_string(op_byte), r.offset() - 1);
        }
        Instruction ins;
        ins.op = static_cast<Opcode>(op_byte);
        switch (ins.op) {
        case Opcode::Load:
            ins.a = static_cast<std::uint32_t>(r.varint("register"));
            ins.literal = read_nat(r, "literal");
            break;
        case Opcode::Copy:
        case Opcode::Jz:
            ins.a = static_cast<std::uint32_t>(r.varint("operand"));
            ins.b = static_cast<std::uint32_t>(r.varint("operand"));
            break;
        case Opcode::Inc:
        case Opcode::Dec:
        case Opcode::EmitReg:
        case Opcode::Self:
        case Opcode::Jmp:
            ins.a = static_cast<std::uint32_t>(r.varint("operand"));
            break;
        case Opcode::Exec:
            ins.a = static_cast<std::uint32_t>(r.varint("operand"));
            ins.b = static_cast<std::uint32_t>(r.varint("operand"));
            ins.c = static_cast<std::uint32_t>(r.varint("operand"));
            break;
        case Opcode::EmitImm: {
            const std::uint8_t v = r.byte("verdict");
            if (v > 1) throw DecodeError("EMIT immediate must be 0 or 1", r.offset() - 1);
            ins.literal = v;
            break;
        }
        case Opcode::Halt:
        case Opcode::Loop:
            break;
        }
        instructions.push_back(std::move(ins));
    }
    if (!r.done()) throw DecodeError("trailing bytes after instructions", r.offset());
    try {
        // An encoding in circulation is the program's byte identity; SELF
        // inside it resolves to exactly these bytes, so it arrives closed.
        return Program::from_instructions(std::move(instructions), true);
    } catch (const ValidationError& e) {
        throw DecodeError(std::string("decoded program invalid: ") + e.what(), enc.bytes.size());
    }
}

Nat encoding_to_nat(const Encoding& enc) {
    Nat value = 0;
    if (!enc.bytes.empty()) {
        boost::multiprecision::import_bits(value, enc.bytes.begin(), enc.bytes.end(), 8, false);
    }
    return value;
}

Encoding nat_to_encoding(const Nat& value) {
    if (value <= 0) throw DecodeError("not a program encoding (zero or negative)", 0);
    std::vector<std::uint8_t> bytes;
    boost::multiprecision::export_bits(value, std::back_inserter(bytes), 8, false);
    // Recover the exact byte length from the self-describing header; the
    // number representation drops trailing zero bytes.
    wire::Reader header(bytes.data(), bytes.size());
    char magic[4];
    header.bytes(reinterpret_cast<std::uint8_t*>(magic), 4, "magic");
    if (!std::equal(magic, magic + 4, kMagic)) {
        throw DecodeError("bad magic, expected GA01", 0);
    }
    const std::uint64_t payload_len = header.varint("payload length");
    const std::size_t declared = bytes.size() - header.remaining() + payload_len;
    if (bytes.size() > declared) {
        throw DecodeError("trailing bytes beyond declared payload", declared);
    }
    bytes.resize(declared, 0);
    return Encoding{std::move(bytes)};
}

Program decode_nat(const Nat& value) { return decode(nat_to_encoding(value)); }

// ---------------------------------------------------------------------------
// s-m-n, quine transform, decider, diagonalizer

Program smn(const Program& program, const Nat& literal) {
    if (literal < 0) throw ValidationError("smn literal must be a non-negative natural");
    std::vector<Instruction> out;
    out.reserve(program.size() + 1);
    Instruction load;
    load.op = Opcode::Load;
    load.a = 0;
    load.literal = literal;
    out.push_back(std::move(load));
    for (Instruction ins : program.instructions()) {
        if (ins.op == Opcode::Jz) ins.b += 1;
        if (ins.op == Opcode::Jmp) ins.a += 1;
        out.push_back(std::move(ins));
    }
    return Program::from_instructions(std::move(out), program.self_resolved());
}

Program quine_transform(const Program& templ) {
    if (!templ.uses_self()) {
        throw ValidationError("template has no SELF instruction; use the program directly");
    }
    return Program::from_instructions(templ.instructions(), true);
}

BoundedDecider make_bounded_decider(StepIndex bound) {
    std::vector<Instruction> ins(7);
    ins[0] = {Opcode::Load, 1, 0, 0, Nat(bound)};
    ins[1] = {Opcode::Exec, 0, 2, 1};      // program from input, input 0, budget T
    ins[2] = {Opcode::Jz, 1, 5};           // not halted within T -> DOES_NOT_HALT
    ins[3] = {Opcode::EmitImm, 0, 0, 0, Nat(1)};
    ins[4] = {Opcode::Halt};
    ins[5] = {Opcode::EmitImm, 0, 0, 0, Nat(0)};
    ins[6] = {Opcode::Halt};
    BoundedDecider d;
    d.program = Program::from_instructions(std::move(ins), false);
    // Worst case: LOAD (1) + EXEC (inner total <= T+1, +1 dispatch) +
    // JZ (1) + EMIT (1), then the pc sits on HALT; one more verdict tick
    // for whoever observes the run.
    d.cost_bound = bound + 6;
    return d;
}

Program make_diagonalizer(const BoundedDecider& decider) {
    if (decider.program.size() == 0) {
        throw ValidationError("decider program is empty");
    }
    // Probe validation: the decider must halt and emit exactly one verdict
    // within its declared bound on representative inputs.
    const Program halt_probe = Program::from_instructions({Instruction{Opcode::Halt}}, false);
    const std::vector<Nat> probes = {Nat(0), program_nat(halt_probe)};
    for (const Nat& input : probes) {
        const RunOutcome run = run_collect(decider.program, input, decider.cost_bound);
        if (!run.result.verdict.halted()) {
            throw ValidationError("decider does not halt within its declared cost bound");
        }
        if (run.fault()) {
            throw ValidationError("decider faults (multiple EMITs?) on a probe input");
        }
        if (!verdict_of(run.emitted())) {
            throw ValidationError("decider does not emit a verdict within its declared budget");
        }
    }

    const Nat decider_nat = program_nat(decider.program);
    const Nat exec_budget = Nat(decider.cost_bound) + 8; // declared bound plus slack
    std::vector<Instruction> ins(7);
    ins[0] = {Opcode::Self, 0};            // r0 := <X>
    ins[1] = {Opcode::Load, 1, 0, 0, decider_nat};
    ins[2] = {Opcode::Load, 2, 0, 0, exec_budget};
    ins[3] = {Opcode::Exec, 1, 0, 2};      // r0 := decider's verdict, r2 := halted flag
    ins[4] = {Opcode::Jz, 0, 6};           // DOES_NOT_HALT -> halt
    ins[5] = {Opcode::Loop};               // HALTS -> spin forever
    ins[6] = {Opcode::Halt};
    return quine_transform(Program::from_instructions(std::move(ins), false));
}

} // namespace haltlab::guest

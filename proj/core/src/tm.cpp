#include "haltlab/tm.hpp"

#include <algorithm>
#include <sstream>

#include "haltlab/errors.hpp"
#include "wire.hpp"

namespace haltlab::tm {

char move_char(Move m) {
    switch (m) {
    case Move::Left: return 'L';
    case Move::Right: return 'R';
    default: return 'S';
    }
}

void MachineSpec::validate() const {
    if (states.empty()) throw ValidationError("machine has no states");
    if (tape_alphabet.empty()) throw ValidationError("machine has no tape symbols");
    {
        std::set<std::string> seen;
        for (const auto& s : states) {
            if (!seen.insert(s).second) throw ValidationError("duplicate state name: " + s);
        }
        seen.clear();
        for (const auto& s : tape_alphabet) {
            if (!seen.insert(s).second) throw ValidationError("duplicate symbol: " + s);
        }
    }
    if (start_state >= states.size()) throw ValidationError("start state out of range");
    if (blank >= tape_alphabet.size()) throw ValidationError("blank symbol out of range");
    for (StateId h : halt_states) {
        if (h >= states.size()) throw ValidationError("halt state out of range");
    }
    for (const auto& [key, t] : transitions) {
        const auto& [state, symbol] = key;
        if (state >= states.size() || symbol >= tape_alphabet.size() ||
            t.next_state >= states.size() || t.write >= tape_alphabet.size()) {
            throw ValidationError("transition references unknown state or symbol");
        }
        if (is_halt_state(state)) {
            throw ValidationError("halt state '" + states[state] + "' has an outgoing transition");
        }
    }
    for (StateId q = 0; q < states.size(); ++q) {
        if (is_halt_state(q)) continue;
        for (SymbolId s = 0; s < tape_alphabet.size(); ++s) {
            if (!transitions.count({q, s})) {
                throw ValidationError("missing transition for (" + states[q] + ", " +
                                      tape_alphabet[s] + ")");
            }
        }
    }
}

std::string describe(const MachineSpec& spec, const Configuration& config) {
    std::ostringstream out;
    out << "step=" << config.step << " state=" << spec.states.at(config.state)
        << " head=" << config.head << " tape={";
    bool first = true;
    for (const auto& [cell, sym] : config.tape) {
        if (!first) out << ' ';
        first = false;
        out << cell << ':' << spec.tape_alphabet.at(sym);
    }
    out << '}';
    return out.str();
}

// ---------------------------------------------------------------------------
// Text format

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name,
                     const char* kind, std::size_t line_no) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw ParseError(std::string("unknown ") + kind + " '" + name + "'", line_no);
    }
    return static_cast<std::size_t>(it - names.begin());
}

} // namespace

MachineSpec parse_machine(const std::string& text) {
    MachineSpec spec;
    bool have_states = false, have_alphabet = false, have_blank = false, have_start = false,
         have_halt = false;
    std::string blank_name, start_name;
    std::vector<std::string> halt_names;

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        auto tokens = split_tokens(line);
        if (tokens.empty()) continue;

        auto header_args = [&](const char* name) {
            tokens.erase(tokens.begin());
            if (std::string(name) != "halt" && tokens.empty()) {
                throw ParseError(std::string(name) + ": needs at least one name", line_no);
            }
            return tokens;
        };

        if (tokens[0] == "states:") {
            if (have_states) throw ParseError("duplicate states: header", line_no);
            spec.states = header_args("states");
            have_states = true;
        } else if (tokens[0] == "alphabet:") {
            if (have_alphabet) throw ParseError("duplicate alphabet: header", line_no);
            spec.tape_alphabet = header_args("alphabet");
            have_alphabet = true;
        } else if (tokens[0] == "blank:") {
            auto args = header_args("blank");
            if (args.size() != 1) throw ParseError("blank: takes exactly one symbol", line_no);
            blank_name = args[0];
            have_blank = true;
        } else if (tokens[0] == "start:") {
            auto args = header_args("start");
            if (args.size() != 1) throw ParseError("start: takes exactly one state", line_no);
            start_name = args[0];
            have_start = true;
        } else if (tokens[0] == "halt:") {
            if (have_halt) throw ParseError("duplicate halt: header", line_no);
            halt_names = header_args("halt");
            have_halt = true;
        } else {
            // transition: state symbol -> state symbol move
            if (!(have_states && have_alphabet)) {
                throw ParseError("transition before states:/alphabet: headers", line_no);
            }
            if (tokens.size() != 6 || tokens[2] != "->") {
                throw ParseError("expected 'state symbol -> state symbol move'", line_no);
            }
            const StateId q = static_cast<StateId>(index_of(spec.states, tokens[0], "state", line_no));
            const SymbolId s =
                static_cast<SymbolId>(index_of(spec.tape_alphabet, tokens[1], "symbol", line_no));
            Transition t;
            t.next_state = static_cast<StateId>(index_of(spec.states, tokens[3], "state", line_no));
            t.write = static_cast<SymbolId>(index_of(spec.tape_alphabet, tokens[4], "symbol", line_no));
            if (tokens[5] == "L") t.move = Move::Left;
            else if (tokens[5] == "R") t.move = Move::Right;
            else if (tokens[5] == "S") t.move = Move::Stay;
            else throw ParseError("move must be L, R or S, got '" + tokens[5] + "'", line_no);
            auto [it, inserted] = spec.transitions.insert({{q, s}, t});
            (void)it;
            if (!inserted) {
                throw ParseError("second rule for (" + tokens[0] + ", " + tokens[1] +
                                     "): machines are deterministic",
                                 line_no);
            }
        }
    }

    if (!have_states) throw ParseError("missing states: header");
    if (!have_alphabet) throw ParseError("missing alphabet: header");
    if (!have_blank) throw ParseError("missing blank: header");
    if (!have_start) throw ParseError("missing start: header");
    if (!have_halt) throw ParseError("missing halt: header");

    spec.blank = static_cast<SymbolId>(index_of(spec.tape_alphabet, blank_name, "symbol", 0));
    spec.start_state = static_cast<StateId>(index_of(spec.states, start_name, "state", 0));
    for (const auto& h : halt_names) {
        spec.halt_states.insert(static_cast<StateId>(index_of(spec.states, h, "state", 0)));
    }
    spec.validate();
    return spec;
}

std::string format_machine(const MachineSpec& spec) {
    std::ostringstream out;
    auto join = [&](const std::vector<std::string>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
    };
    out << "states: ";
    join(spec.states);
    out << "\nalphabet: ";
    join(spec.tape_alphabet);
    out << "\nblank: " << spec.tape_alphabet.at(spec.blank);
    out << "\nstart: " << spec.states.at(spec.start_state);
    out << "\nhalt:";
    for (StateId h : spec.halt_states) out << ' ' << spec.states.at(h);
    out << '\n';
    for (const auto& [key, t] : spec.transitions) {
        out << spec.states.at(key.first) << ' ' << spec.tape_alphabet.at(key.second) << " -> "
            << spec.states.at(t.next_state) << ' ' << spec.tape_alphabet.at(t.write) << ' '
            << move_char(t.move) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Canonical binary encoding

namespace {
constexpr char kMagic[4] = {'T', 'M', '0', '1'};
}

Encoding encode(const MachineSpec& spec) {
    spec.validate();
    std::vector<std::uint8_t> payload;
    wire::put_varint(payload, spec.states.size());
    wire::put_varint(payload, spec.tape_alphabet.size());
    wire::put_varint(payload, spec.start_state);
    wire::put_varint(payload, spec.blank);
    wire::put_varint(payload, spec.halt_states.size());
    for (StateId h : spec.halt_states) wire::put_varint(payload, h);
    wire::put_varint(payload, spec.transitions.size());
    for (const auto& [key, t] : spec.transitions) {
        wire::put_varint(payload, key.first);
        wire::put_varint(payload, key.second);
        wire::put_varint(payload, t.next_state);
        wire::put_varint(payload, t.write);
        payload.push_back(static_cast<std::uint8_t>(t.move));
    }

    Encoding enc;
    enc.bytes.assign(kMagic, kMagic + 4);
    wire::put_varint(enc.bytes, payload.size());
    enc.bytes.insert(enc.bytes.end(), payload.begin(), payload.end());
    return enc;
}

MachineSpec decode(const Encoding& enc) {
    wire::Reader header(enc.bytes.data(), enc.bytes.size());
    char magic[4];
    header.bytes(reinterpret_cast<std::uint8_t*>(magic), 4, "magic");
    if (!std::equal(magic, magic + 4, kMagic)) {
        throw DecodeError("bad magic, expected TM01", 0);
    }
    const std::uint64_t payload_len = header.varint("payload length");
    if (header.remaining() != payload_len) {
        throw DecodeError("payload length mismatch: declared " + std::to_string(payload_len) +
                              ", have " + std::to_string(header.remaining()),
                          header.offset());
    }
    wire::Reader r(enc.bytes.data() + (enc.bytes.size() - payload_len), payload_len,
                   enc.bytes.size() - payload_len);

    MachineSpec spec;
    const std::uint64_t n_states = r.varint("state count");
    const std::uint64_t n_symbols = r.varint("symbol count");
    if (n_states == 0 || n_states > 4096) throw DecodeError("state count out of range", r.offset());
    if (n_symbols == 0 || n_symbols > 4096) throw DecodeError("symbol count out of range", r.offset());
    spec.start_state = static_cast<StateId>(r.varint("start state"));
    spec.blank = static_cast<SymbolId>(r.varint("blank symbol"));
    const std::uint64_t n_halt = r.varint("halt count");
    StateId prev_halt = 0;
    for (std::uint64_t i = 0; i < n_halt; ++i) {
        const StateId h = static_cast<StateId>(r.varint("halt state"));
        if (i > 0 && h <= prev_halt) throw DecodeError("halt states not ascending", r.offset());
        prev_halt = h;
        spec.halt_states.insert(h);
    }
    const std::uint64_t n_transitions = r.varint("transition count");
    std::pair<std::uint64_t, std::uint64_t> prev_key{0, 0};
    for (std::uint64_t i = 0; i < n_transitions; ++i) {
        const std::uint64_t q = r.varint("transition state");
        const std::uint64_t s = r.varint("transition symbol");
        if (i > 0 && std::pair{q, s} <= prev_key) {
            throw DecodeError("transitions not in canonical order", r.offset());
        }
        prev_key = {q, s};
        Transition t;
        t.next_state = static_cast<StateId>(r.varint("next state"));
        t.write = static_cast<SymbolId>(r.varint("write symbol"));
        const std::uint8_t m = r.byte("move");
        if (m > 2) throw DecodeError("bad move byte", r.offset() - 1);
        t.move = static_cast<Move>(m);
        spec.transitions.insert({{static_cast<StateId>(q), static_cast<SymbolId>(s)}, t});
    }
    if (!r.done()) throw DecodeError("trailing bytes after transitions", r.offset());

    for (std::uint64_t q = 0; q < n_states; ++q) {
        spec.states.push_back("q" + std::to_string(q));
    }
    for (std::uint64_t s = 0; s < n_symbols; ++s) {
        spec.tape_alphabet.push_back(s == spec.blank ? "_" : "s" + std::to_string(s));
    }
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        throw DecodeError(std::string("decoded machine invalid: ") + e.what(), enc.bytes.size());
    }
    return spec;
}

bool structurally_equal(const MachineSpec& a, const MachineSpec& b) {
    return a.state_count() == b.state_count() && a.symbol_count() == b.symbol_count() &&
           a.start_state == b.start_state && a.blank == b.blank &&
           a.halt_states == b.halt_states && a.transitions == b.transitions;
}

std::vector<SymbolId> self_input(const MachineSpec& spec) {
    SymbolId mark = spec.blank;
    for (SymbolId s = 0; s < spec.tape_alphabet.size(); ++s) {
        if (s != spec.blank) {
            mark = s;
            break;
        }
    }
    if (mark == spec.blank) return {}; // blank-only alphabet
    const Encoding enc = encode(spec);
    std::vector<SymbolId> input;
    input.reserve(enc.bytes.size() * 8);
    for (std::uint8_t byte : enc.bytes) {
        for (int bit = 7; bit >= 0; --bit) {
            input.push_back((byte >> bit) & 1 ? mark : spec.blank);
        }
    }
    return input;
}

// ---------------------------------------------------------------------------
// Enumeration

MachineEnumerator::MachineEnumerator(std::uint32_t n_states, std::uint32_t n_symbols,
                                     EnumLimits limits)
    : n_states_(n_states), n_symbols_(n_symbols) {
    if (n_states > limits.max_states || n_symbols > limits.max_symbols) {
        throw GuardError("enumeration of " + std::to_string(n_states) + "-state " +
                         std::to_string(n_symbols) +
                         "-symbol machines exceeds the guard; pass explicit limits to override");
    }
    if (n_states == 0 || n_symbols == 0) {
        per_key_ = 0;
        count_ = 0;
        return;
    }
    per_key_ = 3ULL * n_states * n_symbols + 1;
    const std::uint64_t keys = static_cast<std::uint64_t>(n_states) * n_symbols;
    unsigned __int128 total = 1;
    for (std::uint64_t i = 0; i < keys; ++i) {
        total *= per_key_;
        if (total > static_cast<unsigned __int128>(UINT64_MAX)) {
            throw GuardError("enumeration too large to index");
        }
    }
    count_ = static_cast<std::uint64_t>(total);
}

MachineSpec MachineEnumerator::at(std::uint64_t index) const {
    if (index >= count_) throw ValidationError("enumeration index out of range");
    MachineSpec spec;
    for (std::uint32_t q = 0; q < n_states_; ++q) spec.states.push_back("q" + std::to_string(q));
    spec.states.push_back("qh");
    spec.tape_alphabet.push_back("_");
    for (std::uint32_t s = 1; s < n_symbols_; ++s) {
        spec.tape_alphabet.push_back(std::to_string(s));
    }
    spec.blank = 0;
    spec.start_state = 0;
    const StateId halt = n_states_;
    spec.halt_states.insert(halt);

    std::uint64_t rest = index;
    for (std::uint32_t q = 0; q < n_states_; ++q) {
        for (std::uint32_t s = 0; s < n_symbols_; ++s) {
            const std::uint64_t option = rest % per_key_;
            rest /= per_key_;
            Transition t;
            if (option == 0) {
                t = {halt, s, Move::Right};
            } else {
                const std::uint64_t o = option - 1;
                t.move = static_cast<Move>(o % 3);
                t.write = static_cast<SymbolId>((o / 3) % n_symbols_);
                t.next_state = static_cast<StateId>(o / (3ULL * n_symbols_));
            }
            spec.transitions.insert({{q, s}, t});
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Compiled runner

TuringMachine::TuringMachine(MachineSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const std::size_t n_states = spec_.state_count();
    n_symbols_ = static_cast<std::uint32_t>(spec_.symbol_count());
    next_state_.assign(n_states * n_symbols_, 0);
    write_.assign(n_states * n_symbols_, 0);
    move_.assign(n_states * n_symbols_, 0);
    halt_.assign(n_states, 0);
    for (StateId h : spec_.halt_states) halt_[h] = 1;
    for (const auto& [key, t] : spec_.transitions) {
        const std::size_t idx = key.first * n_symbols_ + key.second;
        next_state_[idx] = t.next_state;
        write_[idx] = t.write;
        move_[idx] = t.move == Move::Left ? -1 : (t.move == Move::Right ? 1 : 0);
    }
}

TuringMachine::Config TuringMachine::initial_config(const Input& input) const {
    Config c;
    c.state = spec_.start_state;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (input[i] >= n_symbols_) throw ValidationError("input symbol out of range");
        if (input[i] != spec_.blank) c.tape[static_cast<std::int64_t>(i)] = input[i];
    }
    return c;
}

void TuringMachine::check_config(const Config& config) const {
    if (config.state >= spec_.state_count()) {
        throw ValidationError("configuration state out of range for this machine");
    }
    for (const auto& [cell, sym] : config.tape) {
        (void)cell;
        if (sym >= n_symbols_) throw ValidationError("configuration tape symbol out of range");
        if (sym == spec_.blank) throw ValidationError("configuration stores an explicit blank");
    }
}

bool TuringMachine::is_halting(const Config& config) const {
    check_config(config);
    return halt_[config.state] != 0;
}

TuringMachine::Config TuringMachine::next(const Config& config) const {
    check_config(config);
    if (halt_[config.state]) throw ValidationError("next() called on a halting configuration");
    Config out = config;
    const auto it = out.tape.find(out.head);
    const SymbolId scanned = it == out.tape.end() ? spec_.blank : it->second;
    const std::size_t idx = config.state * n_symbols_ + scanned;
    const SymbolId w = write_[idx];
    if (w == spec_.blank) {
        if (it != out.tape.end()) out.tape.erase(out.head);
    } else {
        out.tape[out.head] = w;
    }
    out.head += move_[idx];
    out.state = next_state_[idx];
    out.step = config.step + 1;
    return out;
}

RunResult TuringMachine::run_bounded_fast(const Input& input, StepIndex bound) const {
    BoundedRunner runner(*this, input);
    return runner.run(bound);
}

BoundedRunner::BoundedRunner(const TuringMachine& machine, TuringMachine::Input input)
    : machine_(machine), input_(std::move(input)) {
    for (SymbolId s : input_) {
        if (s >= machine_.n_symbols_) throw ValidationError("input symbol out of range");
    }
    ensure_capacity(64);
}

void BoundedRunner::ensure_capacity(StepIndex bound) {
    if (bound <= capacity_bound_ && !tape_.empty()) return;
    capacity_bound_ = std::max<StepIndex>(bound, 2 * capacity_bound_);
    const std::size_t left = static_cast<std::size_t>(capacity_bound_) + 1;
    const std::size_t right = input_.size() + static_cast<std::size_t>(capacity_bound_) + 1;
    origin_ = static_cast<std::int64_t>(left);
    tape_.assign(left + right, machine_.spec_.blank);
}

RunResult BoundedRunner::run(StepIndex bound) {
    ensure_capacity(bound);
    std::fill(tape_.begin(), tape_.end(), machine_.spec_.blank);
    std::copy(input_.begin(), input_.end(), tape_.begin() + origin_);

    const auto& next_state = machine_.next_state_;
    const auto& write = machine_.write_;
    const auto& move = machine_.move_;
    const auto& halt = machine_.halt_;
    const std::uint32_t n_symbols = machine_.n_symbols_;

    std::int64_t head = origin_;
    StateId state = machine_.spec_.start_state;
    CostLedger ledger;
    StepIndex steps = 0;
    while (true) {
        if (halt[state]) {
            ledger.simulated_steps = steps;
            ledger.verdict_ticks = 1;
            return {RunVerdict::halts_at(steps), ledger};
        }
        if (steps >= bound) break;
        const std::size_t idx = state * n_symbols + tape_[head];
        tape_[head] = write[idx];
        head += move[idx];
        state = next_state[idx];
        ++steps;
    }
    ledger.simulated_steps = bound;
    ledger.verdict_ticks = 1;
    return {RunVerdict::running_at(bound), ledger};
}

} // namespace haltlab::tm

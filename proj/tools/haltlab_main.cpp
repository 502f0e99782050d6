// haltlab: bounded-run experiments, observation chains, overhead tables,
// diagonalization transcripts and the property suite, over Turing machine
// descriptions (.tm) and guest VM assembly (.gasm).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "haltlab/digest.hpp"
#include "haltlab/errors.hpp"
#include "haltlab/fixpoint.hpp"
#include "haltlab/guest_vm.hpp"
#include "haltlab/machine.hpp"
#include "haltlab/obs.hpp"
#include "haltlab/suite.hpp"
#include "haltlab/tm.hpp"

namespace {

using json = nlohmann::json;
using namespace haltlab;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct TmJob {
    tm::MachineSpec spec;
    tm::TuringMachine machine;
    tm::TuringMachine::Input input;

    TmJob(tm::MachineSpec s, tm::TuringMachine::Input in)
        : spec(std::move(s)), machine(spec), input(std::move(in)) {}
};

struct GuestJob {
    guest::Program program;
    guest::Nat input;
};

struct Job {
    std::string label;
    std::string digest;
    std::string input_desc;
    std::variant<GuestJob, TmJob> body;

    RunResult run(StepIndex bound) const {
        if (const auto* t = std::get_if<TmJob>(&body)) {
            return run_bounded(t->machine, t->input, bound);
        }
        const auto& g = std::get<GuestJob>(body);
        return run_bounded(g.program, g.input, bound);
    }

    ExactHaltFn oracle() const {
        if (const auto* t = std::get_if<TmJob>(&body)) {
            return exact_halt_oracle(t->machine, t->input);
        }
        const auto& g = std::get<GuestJob>(body);
        return exact_halt_oracle(g.program, g.input);
    }

    OmegaResult omega(StepIndex fuel) const {
        if (const auto* t = std::get_if<TmJob>(&body)) {
            return make_p_omega(t->machine, t->input, fuel);
        }
        const auto& g = std::get<GuestJob>(body);
        return make_p_omega(g.program, g.input, fuel);
    }
};

tm::TuringMachine::Input parse_tm_input(const tm::MachineSpec& spec, const std::string& text) {
    tm::TuringMachine::Input input;
    std::string cleaned = text;
    for (char& c : cleaned) {
        if (c == ',') c = ' ';
    }
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
        auto it = std::find(spec.tape_alphabet.begin(), spec.tape_alphabet.end(), tok);
        if (it == spec.tape_alphabet.end()) {
            throw ValidationError("input symbol '" + tok + "' is not in the tape alphabet");
        }
        input.push_back(static_cast<tm::SymbolId>(it - spec.tape_alphabet.begin()));
    }
    return input;
}

Job load_job(const std::string& path, const std::string& input_spec) {
    const std::filesystem::path p(path);
    const std::string ext = p.extension().string();
    const std::string text = read_file(path);

    Job job;
    job.label = p.filename().string();
    if (ext == ".tm") {
        tm::MachineSpec spec = tm::parse_machine(text);
        job.digest = hex64(fnv1a64(tm::encode(spec).bytes));
        tm::TuringMachine::Input input;
        if (input_spec == "self") {
            input = tm::self_input(spec);
            job.input_desc = "self";
        } else if (input_spec == "empty") {
            job.input_desc = "empty";
        } else {
            input = parse_tm_input(spec, input_spec);
            job.input_desc = input_spec;
        }
        job.body.emplace<TmJob>(std::move(spec), std::move(input));
        return job;
    }
    if (ext == ".gasm" || ext == ".ga") {
        guest::Program prog = guest::assemble(text);
        if (prog.uses_self()) prog = guest::quine_transform(prog);
        job.digest = hex64(fnv1a64(guest::encode(prog).bytes));
        guest::Nat input = 0;
        if (input_spec == "self") {
            input = guest::program_nat(prog);
            job.input_desc = "self";
        } else if (input_spec == "empty") {
            job.input_desc = "empty";
        } else {
            try {
                input = guest::Nat(input_spec);
            } catch (const std::runtime_error&) {
                throw ValidationError("guest input must be a decimal natural, 'self' or 'empty'");
            }
            if (input < 0) throw ValidationError("guest input must be non-negative");
            job.input_desc = input_spec;
        }
        job.body.emplace<GuestJob>(std::move(prog), std::move(input));
        return job;
    }
    throw ValidationError("unknown machine file extension '" + ext + "' (expected .tm or .gasm)");
}

json ledger_json(const CostLedger& l) {
    return json{{"simulated_steps", l.simulated_steps},
                {"verdict_ticks", l.verdict_ticks},
                {"total", l.total()}};
}

json machine_json(const Job& job) {
    return json{{"machine", job.label}, {"digest", job.digest}, {"input", job.input_desc}};
}

// ---------------------------------------------------------------------------

int cmd_run(const Job& job, StepIndex bound) {
    const RunResult r = job.run(bound);
    if (r.verdict.halted()) {
        std::cout << "HALTS at " << r.verdict.step() << "; ticks: " << r.ledger.total() << "\n";
        return kExitOk;
    }
    std::cout << "RUNNING at " << r.verdict.step() << "; ticks: " << r.ledger.total() << "\n";
    return kExitNegative;
}

int cmd_chain(const Job& job, StepIndex stages, StepIndex window, const std::string& format) {
    const ChainRecord record = iterate_chain(job.oracle(), stages, FVariant::Standard, window);
    if (format == "csv") {
        std::cout << "stage,index,value\n";
        for (std::size_t i = 0; i < record.stages.size(); ++i) {
            for (const auto& [k, v] : record.stages[i].entries()) {
                std::cout << i << ',' << k << ',' << (v ? 1 : 0) << '\n';
            }
        }
        return kExitOk;
    }
    if (format == "json") {
        json out;
        out["schema_version"] = 1;
        out["machine"] = machine_json(job);
        out["stages"] = json::array();
        out["ledgers"] = json::array();
        for (std::size_t i = 0; i < record.stages.size(); ++i) {
            out["stages"].push_back(record.stages[i].to_text());
            out["ledgers"].push_back(ledger_json(record.ledger_per_stage[i]));
        }
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    }
    std::cout << "machine " << job.label << " (digest " << job.digest << "), input "
              << job.input_desc << "\n";
    for (std::size_t i = 0; i < record.stages.size(); ++i) {
        std::cout << "p" << i << ": " << record.stages[i].to_text() << "  (ticks "
                  << record.ledger_per_stage[i].total() << ")\n";
    }
    return kExitOk;
}

int cmd_overhead(const Job& job, StepIndex from, StepIndex to) {
    std::cout << "T,total,verdict\n";
    bool violated = false;
    for (StepIndex t = from; t <= to && to != StepIndex(-1); ++t) {
        const RunResult r = job.run(t);
        std::cout << t << ',' << r.ledger.total() << ','
                  << (r.verdict.halted() ? "halts" : "running") << '\n';
        if (!r.verdict.halted() && r.ledger.total() < t + 1) violated = true;
        if (t == to) break;
    }
    if (violated) {
        std::cout << "ASSERTION FAILED: a still-running verdict cost fewer than T+1 ticks\n";
        return kExitNegative;
    }
    std::cout << "# verified: every still-running verdict cost at least T+1 ticks\n";
    return kExitOk;
}

int cmd_omega(const Job& job, StepIndex fuel) {
    const OmegaResult r = job.omega(fuel);
    if (const auto* obs = std::get_if<PartialObservation>(&r)) {
        std::cout << obs->to_text() << "\n";
        return kExitOk;
    }
    std::cout << "STILL RUNNING at fuel " << std::get<StillRunning>(r).fuel << "\n";
    return kExitNegative;
}

int cmd_diagonalize(StepIndex bound, const std::string& format) {
    const guest::BoundedDecider decider = guest::make_bounded_decider(bound);
    const guest::Program x = guest::make_diagonalizer(decider);
    const guest::Nat x_nat = guest::program_nat(x);
    const std::string d_digest = hex64(fnv1a64(guest::encode(decider.program).bytes));
    const std::string x_digest = hex64(fnv1a64(guest::encode(x).bytes));

    const guest::RunOutcome d_run = guest::run_collect(decider.program, x_nat, decider.cost_bound);
    const auto verdict = guest::verdict_of(d_run.emitted());
    if (!d_run.result.verdict.halted() || !verdict) {
        std::cout << "decider failed to produce a verdict within its cost bound\n";
        return kExitNegative;
    }
    const bool says_halts = *verdict == guest::GuestVerdict::Halts;

    const StepIndex fuel = 16 * bound + 256;
    std::string behavior;
    bool contradiction = false;
    StepIndex behavior_step = 0;
    if (says_halts) {
        const guest::LoopSearch ls = guest::run_until_loop_or_halt(x, guest::Nat(0), fuel);
        behavior_step = ls.step;
        if (ls.kind == guest::LoopSearch::Kind::ReachedLoop) {
            behavior = "reached LOOP at step " + std::to_string(ls.step) +
                       " (structural non-halting certificate)";
            contradiction = true;
        } else {
            behavior = "did not reach LOOP within fuel " + std::to_string(fuel);
        }
    } else {
        const guest::RunOutcome x_run = guest::run_collect(x, guest::Nat(0), fuel);
        behavior_step = x_run.result.verdict.step();
        if (x_run.result.verdict.halted()) {
            behavior = "halted at step " + std::to_string(behavior_step);
            contradiction = behavior_step >= bound + 1;
        } else {
            behavior = "still running at fuel " + std::to_string(fuel);
        }
    }

    if (format == "json") {
        json out;
        out["schema_version"] = 1;
        out["bound"] = bound;
        out["decider"] = {{"digest", d_digest}, {"cost_bound", decider.cost_bound}};
        out["diagonalizer"] = {{"digest", x_digest}, {"instructions", x.size()}};
        out["verdict"] = says_halts ? "HALTS" : "DOES_NOT_HALT";
        out["verdict_step"] = d_run.result.verdict.step();
        out["observed"] = behavior;
        out["observed_step"] = behavior_step;
        out["contradiction"] = contradiction;
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "bound T = " << bound << "\n";
        std::cout << "decider D_T: digest " << d_digest << ", cost bound " << decider.cost_bound
                  << "\n";
        std::cout << "diagonalizer X: digest " << x_digest << ", " << x.size()
                  << " instructions\n";
        std::cout << "D_T(<X>) = " << (says_halts ? "HALTS" : "DOES_NOT_HALT") << " (decider halted at step "
                  << d_run.result.verdict.step() << ")\n";
        std::cout << "X on input 0: " << behavior << "\n";
        if (contradiction) {
            std::cout << "contradiction: verdict " << (says_halts ? "HALTS" : "DOES_NOT_HALT")
                      << " at bound " << bound << " vs observed " << behavior;
            if (!says_halts) std::cout << " (>= T+1 = " << bound + 1 << ")";
            std::cout << "\n";
        } else {
            std::cout << "NO CONTRADICTION OBSERVED\n";
        }
    }
    return contradiction ? kExitOk : kExitNegative;
}

FVariant parse_variant(const std::string& name) {
    if (name.empty() || name == "standard") return FVariant::Standard;
    if (name == "swap-zero-one") return FVariant::SwapZeroOne;
    if (name == "drop-bottom-propagation") return FVariant::DropBottomPropagation;
    if (name == "base-off-by-one") return FVariant::BaseOffByOne;
    throw CLI::ValidationError("--mutant", "unknown mutant '" + name + "'");
}

int cmd_suite(const suite::Scale& scale, const std::string& format) {
    const suite::SuiteReport report = suite::run_suite(scale);
    if (format == "json") {
        json out;
        out["schema_version"] = 1;
        out["seed"] = report.seed;
        out["variant"] = suite::variant_name(report.variant);
        out["properties"] = json::array();
        for (const auto& r : report.results) {
            out["properties"].push_back({{"name", r.name},
                                         {"passed", r.passed},
                                         {"checks", r.checks},
                                         {"detail", r.detail}});
        }
        out["all_passed"] = report.all_passed();
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "seed: " << report.seed << "\n";
        std::cout << "variant: " << suite::variant_name(report.variant) << "\n";
        for (const auto& r : report.results) {
            std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.checks
                      << " checks";
            if (!r.detail.empty()) std::cout << "; " << r.detail;
            std::cout << ")\n";
        }
        std::cout << "RESULT: " << (report.all_passed() ? "PASS" : "FAIL") << " ("
                  << report.results.size() << " properties)\n";
    }
    return report.all_passed() ? kExitOk : kExitNegative;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"haltlab: bounded halting observation laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file")->envname("HALTLAB_CONFIG");

    std::string machine_file;
    std::string input_spec = "self";
    StepIndex bound = 100;
    StepIndex stages = 8;
    StepIndex max_stages = 256;
    StepIndex window = 64;
    StepIndex fuel = 1024;
    StepIndex from = 0, to = 20;
    std::string format = "text";
    std::string mutant;
    suite::Scale scale;

    auto add_machine_opts = [&](CLI::App* cmd) {
        cmd->add_option("machine", machine_file, "machine file (.tm or .gasm)")->required();
        cmd->add_option("--input", input_spec, "input: 'self', 'empty', symbols, or a natural");
    };

    CLI::App* run = app.add_subcommand("run", "bounded run with tick-exact cost");
    add_machine_opts(run);
    run->add_option("--bound,-T", bound, "step budget");

    CLI::App* chain = app.add_subcommand("chain", "iterate the observation operator from bottom");
    add_machine_opts(chain);
    chain->add_option("-n,--stages", stages, "number of applications");
    chain->add_option("--max-stages", max_stages, "stage cap");
    chain->add_option("--window", window, "evaluation window for tail-carrying observations");
    chain->add_option("--format", format, "text|csv|json");

    CLI::App* overhead = app.add_subcommand("overhead", "ledger totals over a bound range");
    add_machine_opts(overhead);
    overhead->add_option("--from", from, "first bound");
    overhead->add_option("--to", to, "last bound");

    CLI::App* diag = app.add_subcommand("diagonalize", "build D_T and X, replay the contradiction");
    diag->add_option("--bound,-T", bound, "decider budget")->required();
    diag->add_option("--format", format, "text|json");

    CLI::App* omega = app.add_subcommand("omega", "fully-resolved observation for a halting machine");
    add_machine_opts(omega);
    omega->add_option("--fuel", fuel, "simulation fuel");

    CLI::App* suite_cmd = app.add_subcommand("suite", "run every cross-module property");
    suite_cmd->add_option("--seed", scale.seed, "report seed");
    suite_cmd->add_option("--format", format, "text|json");
    suite_cmd->add_option("--mutant", mutant,
                          "inject a documented operator mutant (suite must then fail)");
    suite_cmd->add_option("--stages", scale.chain_stages, "chain stages");
    suite_cmd->add_option("--window", scale.window, "tail evaluation window");
    suite_cmd->add_option("--enum-states", scale.enum_states, "enumeration states");
    suite_cmd->add_option("--enum-symbols", scale.enum_symbols, "enumeration symbols");
    suite_cmd->add_option("--monotonicity-machines", scale.monotonicity_machines,
                          "sampled machines for the monotonicity law");
    suite_cmd->add_option("--continuity-machines", scale.continuity_machines,
                          "sampled machines for the continuity law");
    suite_cmd->add_option("--continuity-sets", scale.continuity_sets,
                          "directed sets per machine");
    suite_cmd->add_option("--diag-max-bound", scale.diag_max_bound, "largest decider budget");
    suite_cmd->add_option("--fuel-schedule", scale.fuel_schedule,
                          "strictly increasing fuel points for the one-sided decision law")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(load_job(machine_file, input_spec), bound);
        }
        if (chain->parsed()) {
            if (stages > max_stages) {
                std::cerr << "requested " << stages << " stages exceeds the cap " << max_stages
                          << " (raise --max-stages)\n";
                return kExitUsage;
            }
            return cmd_chain(load_job(machine_file, input_spec), stages, window, format);
        }
        if (overhead->parsed()) {
            if (to < from) {
                std::cout << "T,total,verdict\n";
                std::cout << "# verified: every still-running verdict cost at least T+1 ticks\n";
                return kExitOk;
            }
            return cmd_overhead(load_job(machine_file, input_spec), from, to);
        }
        if (diag->parsed()) {
            return cmd_diagonalize(bound, format);
        }
        if (omega->parsed()) {
            return cmd_omega(load_job(machine_file, input_spec), fuel);
        }
        if (suite_cmd->parsed()) {
            scale.variant = parse_variant(mutant);
            return cmd_suite(scale, format);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const GuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConflictError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNegative;
    }
    return kExitUsage;
}

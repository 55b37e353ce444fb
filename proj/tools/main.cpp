// Command-line front end: every library operation as a subcommand, with
// corpus aliases accepted wherever a formula, sequent, or proof is expected.
// Exit codes: 0 accept/found/valid-so-far, 1 reject/exhausted/countermodel,
// 2 usage or resource error.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mucyclo/corpus.hpp"
#include "mucyclo/search.hpp"
#include "mucyclo/semantics.hpp"

using namespace mucyclo;
using nlohmann::ordered_json;

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

Sequent resolve_sequent(const std::string& text) {
    if (auto alias = artifact_sequent(text)) return *alias;
    return parse_sequent(text);
}

Formula resolve_formula(const std::string& text) {
    for (const auto& name : artifact_names())
        if (name == text) {
            Artifact a = get_artifact(name);
            if (a.formula) return *a.formula;
            if (a.sequent) {  // a sequent is valid iff its disjunction is
                const auto& fs = a.sequent->formulas();
                Formula g = fs.front();
                for (std::size_t i = 1; i < fs.size(); ++i) g = Formula::disj(g, fs[i]);
                return g;
            }
        }
    return parse_formula(text);
}

Proof resolve_proof(const std::string& text) {
    if (!std::filesystem::exists(text))
        for (const auto& name : artifact_names())
            if (name == text) {
                Artifact a = get_artifact(name);
                if (a.proof) return *a.proof;
            }
    return load_proof_file(text);
}

void emit(bool json, const ordered_json& machine, const std::string& human) {
    if (json)
        std::cout << machine.dump(2) << "\n";
    else
        std::cout << human << "\n";
}

std::string model_str(const PointedModel& pm) {
    return pm.model.str() + " @ state " + std::to_string(pm.state);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toolkit for two cyclic proof systems of the modal mu-calculus"};
    app.require_subcommand(1);
    bool json = false;
    app.add_flag("--json", json, "machine-readable output");

    std::string formula_text, sequent_text, proof_path, out_path, system = "nw";
    bool allow_cut = false, local_only = false;
    SearchBounds bounds;
    std::size_t max_states = 3;

    auto* parse_cmd = app.add_subcommand("parse", "parse a formula and print it");
    parse_cmd->add_option("formula", formula_text)->required();

    auto* check_cmd = app.add_subcommand("check", "check a proof file");
    check_cmd->add_option("--system", system)->check(CLI::IsMember({"nw", "clo"}));
    check_cmd->add_flag("--allow-cut", allow_cut);
    check_cmd->add_flag("--local", local_only, "skip the global trace condition");
    check_cmd->add_option("proof", proof_path)->required();

    auto* translate_cmd =
        app.add_subcommand("translate", "annotated proof -> cyclic proof");
    translate_cmd->add_option("proof", proof_path)->required();
    translate_cmd->add_option("-o,--output", out_path)->required();

    auto* search_cmd = app.add_subcommand("search", "bounded proof search");
    search_cmd->add_option("--system", system)->check(CLI::IsMember({"nw", "clo"}));
    search_cmd->add_option("--max-depth", bounds.max_depth);
    search_cmd->add_option("--max-clo", bounds.max_clo);
    search_cmd->add_option("--max-sequent", bounds.max_sequent);
    search_cmd->add_option("--budget", bounds.node_budget);
    search_cmd->add_option("-o,--output", out_path, "write the found proof here");
    search_cmd->add_option("sequent", sequent_text)->required();

    auto* valid_cmd = app.add_subcommand("valid", "bounded validity check");
    valid_cmd->add_option("--max-states", max_states);
    valid_cmd->add_option("formula", formula_text)->required();

    auto* counter_cmd = app.add_subcommand("countermodel", "search for a countermodel");
    counter_cmd->add_option("--max-states", max_states);
    counter_cmd->add_option("formula", formula_text)->required();

    auto* adisj_cmd = app.add_subcommand("adisjunctive", "adisjunctivity check");
    adisj_cmd->add_option("sequent", sequent_text)->required();

    auto* closure_cmd = app.add_subcommand("closure", "list the closure of a sequent");
    closure_cmd->add_option("sequent", sequent_text)->required();

    auto* paper_cmd = app.add_subcommand("paper", "run the built-in reproduction suite");

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*parse_cmd) {
            Formula f = resolve_formula(formula_text);
            emit(json, {{"formula", f.str()}}, f.str());
            return kExitAccept;
        }

        if (*check_cmd) {
            Proof proof = resolve_proof(proof_path);
            bool accepted;
            std::string summary;
            std::vector<std::string> diagnostics;
            if (system == "nw") {
                NwCheckResult r = local_only ? check_nw_local(proof) : check_nw(proof);
                accepted = r.accepted;
                summary = r.summary();
                diagnostics = r.diagnostics;
            } else {
                CheckOptions o;
                o.allow_cut = allow_cut;
                CloCheckResult r = check_clo(proof, o);
                accepted = r.accepted;
                summary = r.summary();
                diagnostics = r.diagnostics;
            }
            emit(json,
                 {{"system", system},
                  {"accepted", accepted},
                  {"diagnostics", diagnostics}},
                 summary);
            return accepted ? kExitAccept : kExitReject;
        }

        if (*translate_cmd) {
            Proof nw = translate_clo_to_nw(resolve_proof(proof_path));
            save_proof_file(nw, out_path);
            emit(json, {{"output", out_path}, {"nodes", nw.nodes.size()}},
                 "wrote " + out_path + " (" + std::to_string(nw.nodes.size()) + " nodes)");
            return kExitAccept;
        }

        if (*search_cmd) {
            Sequent s = resolve_sequent(sequent_text);
            SearchOutcome out =
                system == "nw" ? search_nw(s, bounds) : search_clo(s, bounds);
            if (out.proof && !out_path.empty()) save_proof_file(*out.proof, out_path);
            ordered_json machine = {
                {"system", system},
                {"status", out.status == SearchStatus::Found ? "Found"
                           : out.status == SearchStatus::ExhaustedWithinBounds
                               ? "ExhaustedWithinBounds"
                               : "BudgetExceeded"},
                {"expansions", out.stats.expansions},
                {"distinct_states", out.stats.distinct_states},
                {"fragment", out.fragment}};
            if (out.proof)
                machine["proof"] = ordered_json::parse(proof_to_json_text(*out.proof));
            emit(json, machine, out.summary());
            switch (out.status) {
                case SearchStatus::Found: return kExitAccept;
                case SearchStatus::ExhaustedWithinBounds: return kExitReject;
                case SearchStatus::BudgetExceeded: return kExitError;
            }
        }

        if (*valid_cmd || *counter_cmd) {
            Formula f = resolve_formula(formula_text);
            CountermodelResult r = search_countermodel(f, max_states);
            ordered_json machine = {
                {"formula", f.str()},
                {"max_states", max_states},
                {"models_checked", r.models_checked},
                {"countermodel", r.status == CountermodelStatus::Found}};
            if (r.witness) {
                machine["model"] = r.witness->model.str();
                machine["state"] = r.witness->state;
            }
            if (r.status == CountermodelStatus::BudgetExceeded) {
                emit(json, machine, "budget exceeded before exhausting the model space");
                return kExitError;
            }
            bool found = r.status == CountermodelStatus::Found;
            emit(json, machine,
                 found ? "countermodel: " + model_str(*r.witness)
                       : "no countermodel with <= " + std::to_string(max_states) +
                             " states (" + std::to_string(r.models_checked) +
                             " models checked)");
            if (*valid_cmd) return found ? kExitReject : kExitAccept;
            return found ? kExitAccept : kExitReject;
        }

        if (*adisj_cmd) {
            AdisjunctivityVerdict v = is_adisjunctive(resolve_sequent(sequent_text));
            ordered_json machine = {{"adisjunctive", v.adisjunctive}};
            if (v.disjunction) machine["witness"] = v.disjunction->str();
            emit(json, machine,
                 v.adisjunctive
                     ? "adisjunctive"
                     : "not adisjunctive; witness disjunction: " + v.disjunction->str());
            return v.adisjunctive ? kExitAccept : kExitReject;
        }

        if (*closure_cmd) {
            ClosureSet c = closure(resolve_sequent(sequent_text));
            ordered_json members = ordered_json::array();
            std::string human;
            for (const auto& f : c.members) {
                members.push_back(f.str());
                human += f.str() + "\n";
            }
            human += std::to_string(c.members.size()) + " members";
            emit(json, {{"size", c.members.size()}, {"members", members}}, human);
            return kExitAccept;
        }

        if (*paper_cmd) {
            SuiteReport report = run_paper_suite();
            ordered_json items = ordered_json::array();
            for (const auto& item : report.items)
                items.push_back({{"name", item.name},
                                 {"passed", item.passed},
                                 {"detail", item.detail}});
            emit(json, {{"all_passed", report.all_passed()}, {"items", items}},
                 report.str());
            return report.all_passed() ? kExitAccept : kExitReject;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

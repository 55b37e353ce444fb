// Thin string/JSON bindings: formulas, sequents, and proofs cross the
// boundary as text in the same formats the CLI uses.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mucyclo/corpus.hpp"
#include "mucyclo/search.hpp"
#include "mucyclo/semantics.hpp"

namespace py = pybind11;
using namespace mucyclo;

namespace {

SearchBounds make_bounds(std::size_t max_depth, std::size_t max_clo,
                         std::size_t max_sequent, std::uint64_t budget) {
    SearchBounds b;
    b.max_depth = max_depth;
    b.max_clo = max_clo;
    b.max_sequent = max_sequent;
    b.node_budget = budget;
    return b;
}

Sequent resolve_sequent(const std::string& text) {
    if (auto alias = artifact_sequent(text)) return *alias;
    return parse_sequent(text);
}

py::dict outcome_dict(const SearchOutcome& out) {
    py::dict d;
    d["status"] = out.status == SearchStatus::Found ? "Found"
                  : out.status == SearchStatus::ExhaustedWithinBounds
                      ? "ExhaustedWithinBounds"
                      : "BudgetExceeded";
    d["proof"] = out.proof ? py::object(py::str(proof_to_json_text(*out.proof)))
                           : py::object(py::none());
    d["expansions"] = out.stats.expansions;
    d["distinct_states"] = out.stats.distinct_states;
    d["fragment"] = out.fragment;
    d["summary"] = out.summary();
    return d;
}

}  // namespace

PYBIND11_MODULE(_mucyclo, m) {
    m.doc() = "two cyclic proof systems for the modal mu-calculus";

    m.def("parse", [](const std::string& text) { return parse_formula(text).str(); },
          py::arg("formula"), "parse a formula and return its canonical form");

    m.def("check",
          [](const std::string& proof_json, const std::string& system, bool allow_cut) {
              Proof proof = proof_from_json_text(proof_json);
              py::dict d;
              if (system == "nw") {
                  NwCheckResult r = check_nw(proof);
                  d["accepted"] = r.accepted;
                  d["diagnostics"] = r.diagnostics;
              } else if (system == "clo") {
                  CheckOptions o;
                  o.allow_cut = allow_cut;
                  CloCheckResult r = check_clo(proof, o);
                  d["accepted"] = r.accepted;
                  d["diagnostics"] = r.diagnostics;
              } else {
                  throw std::invalid_argument("system must be 'nw' or 'clo'");
              }
              return d;
          },
          py::arg("proof_json"), py::arg("system") = "nw", py::arg("allow_cut") = false,
          "check a proof given as JSON text");

    m.def("translate",
          [](const std::string& proof_json) {
              return proof_to_json_text(translate_clo_to_nw(proof_from_json_text(proof_json)));
          },
          py::arg("proof_json"), "annotated proof JSON -> cyclic proof JSON");

    m.def("search",
          [](const std::string& sequent, const std::string& system, std::size_t max_depth,
             std::size_t max_clo, std::size_t max_sequent, std::uint64_t budget) {
              Sequent s = resolve_sequent(sequent);
              SearchBounds b = make_bounds(max_depth, max_clo, max_sequent, budget);
              return outcome_dict(system == "nw" ? search_nw(s, b) : search_clo(s, b));
          },
          py::arg("sequent"), py::arg("system") = "nw", py::arg("max_depth") = 50,
          py::arg("max_clo") = 4, py::arg("max_sequent") = 8,
          py::arg("budget") = 10'000'000, "bounded proof search; accepts corpus aliases");

    m.def("countermodel",
          [](const std::string& formula, std::size_t max_states) {
              Formula f = parse_formula(formula);
              CountermodelResult r = search_countermodel(f, max_states);
              py::dict d;
              d["status"] = r.status == CountermodelStatus::Found ? "Found"
                            : r.status == CountermodelStatus::NoneFound ? "NoneFound"
                                                                        : "BudgetExceeded";
              d["model"] = r.witness ? py::object(py::str(r.witness->model.str()))
                                     : py::object(py::none());
              d["state"] = r.witness ? py::object(py::int_(r.witness->state))
                                     : py::object(py::none());
              d["models_checked"] = r.models_checked;
              return d;
          },
          py::arg("formula"), py::arg("max_states") = 3,
          "search for a falsifying pointed model");

    m.def("adisjunctive",
          [](const std::string& sequent) {
              Sequent s = resolve_sequent(sequent);
              AdisjunctivityVerdict v = is_adisjunctive(s);
              py::dict d;
              d["adisjunctive"] = v.adisjunctive;
              d["witness"] = v.disjunction ? py::object(py::str(v.disjunction->str()))
                                           : py::object(py::none());
              return d;
          },
          py::arg("sequent"));

    m.def("closure",
          [](const std::string& sequent) {
              Sequent s = resolve_sequent(sequent);
              std::vector<std::string> out;
              for (const auto& f : closure(s).members) out.push_back(f.str());
              return out;
          },
          py::arg("sequent"), "closure members in canonical order");

    m.def("artifact_names", [] { return artifact_names(); });

    m.def("artifact",
          [](const std::string& name) {
              Artifact a = get_artifact(name);
              py::dict d;
              d["name"] = a.name;
              d["kind"] = a.kind;
              d["payload"] = a.payload_text();
              d["expected"] = a.expected;
              return d;
          },
          py::arg("name"));

    m.def("paper_suite", [] {
        SuiteReport r = run_paper_suite();
        py::list items;
        for (const auto& item : r.items)
            items.append(py::make_tuple(item.name, item.passed, item.detail));
        py::dict d;
        d["all_passed"] = r.all_passed();
        d["items"] = items;
        return d;
    });
}

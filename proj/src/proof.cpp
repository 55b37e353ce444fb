#include "mucyclo/proof.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mucyclo {

Name Name::parse(const std::string& text) {
    auto hash = text.find('#');
    if (hash == std::string::npos || hash == 0 || hash + 1 >= text.size())
        throw std::invalid_argument("bad name: '" + text + "'");
    Name n;
    n.variable = text.substr(0, hash);
    n.index = static_cast<unsigned>(std::stoul(text.substr(hash + 1)));
    return n;
}

std::string annotation_str(const Annotation& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += " ";
        out += a[i].str();
    }
    return out;
}

bool subword(const Annotation& a, const Annotation& b) {
    std::size_t i = 0;
    for (std::size_t j = 0; i < a.size() && j < b.size(); ++j)
        if (a[i] == b[j]) ++i;
    return i == a.size();
}

std::string AnnotatedFormula::str() const {
    if (annotation.empty()) return formula.str();
    return formula.str() + " ^ [" + annotation_str(annotation) + "]";
}

AnnotatedSequent::AnnotatedSequent(std::vector<AnnotatedFormula> items) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    items_ = std::move(items);
}

bool AnnotatedSequent::contains(const AnnotatedFormula& af) const {
    return std::binary_search(items_.begin(), items_.end(), af);
}

AnnotatedSequent AnnotatedSequent::with(const AnnotatedFormula& af) const {
    auto v = items_;
    v.push_back(af);
    return AnnotatedSequent(std::move(v));
}

AnnotatedSequent AnnotatedSequent::without(const AnnotatedFormula& af) const {
    std::vector<AnnotatedFormula> v;
    for (const auto& g : items_)
        if (!(g == af)) v.push_back(g);
    return AnnotatedSequent(std::move(v));
}

Sequent AnnotatedSequent::bare() const {
    std::vector<Formula> fs;
    for (const auto& af : items_) fs.push_back(af.formula);
    return Sequent(std::move(fs));
}

std::string AnnotatedSequent::str() const {
    std::string out;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ", ";
        out += items_[i].str();
    }
    return out;
}

std::string rule_name(Rule r) {
    switch (r) {
        case Rule::Ax: return "Ax";
        case Rule::Or: return "Or";
        case Rule::And: return "And";
        case Rule::Weak: return "Weak";
        case Rule::Box: return "Box";
        case Rule::Mu: return "Mu";
        case Rule::Nu: return "Nu";
        case Rule::Backedge: return "Backedge";
        case Rule::Exp: return "Exp";
        case Rule::Clo: return "Clo";
        case Rule::Cut: return "Cut";
        case Rule::Discharge: return "Discharge";
        case Rule::Open: return "Open";
    }
    return "?";
}

std::optional<Rule> rule_from_name(const std::string& name) {
    static const std::map<std::string, Rule> table = {
        {"Ax", Rule::Ax},           {"Or", Rule::Or},     {"And", Rule::And},
        {"Weak", Rule::Weak},       {"Box", Rule::Box},   {"Mu", Rule::Mu},
        {"Nu", Rule::Nu},           {"Backedge", Rule::Backedge},
        {"Exp", Rule::Exp},         {"Clo", Rule::Clo},   {"Cut", Rule::Cut},
        {"Discharge", Rule::Discharge},                   {"Open", Rule::Open},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

const AnnotatedFormula& ProofNode::principal_formula() const {
    if (!principal || *principal < 0 || static_cast<std::size_t>(*principal) >= sequent.size())
        throw std::out_of_range("node " + std::to_string(id) + ": bad principal index");
    return sequent.items()[static_cast<std::size_t>(*principal)];
}

const ProofNode& Proof::node(int id) const {
    auto it = nodes.find(id);
    if (it == nodes.end()) throw std::out_of_range("no node with id " + std::to_string(id));
    return it->second;
}

std::map<int, std::optional<int>> Proof::parents() const {
    std::map<int, std::optional<int>> out;
    out[root] = std::nullopt;
    for (const auto& [id, n] : nodes)
        for (int c : n.children) out[c] = id;
    return out;
}

bool Proof::is_strict_ancestor(int ancestor, int descendant) const {
    auto ps = parents();
    std::optional<int> cur = descendant;
    while (true) {
        auto it = ps.find(*cur);
        if (it == ps.end() || !it->second) return false;
        cur = it->second;
        if (*cur == ancestor) return true;
    }
}

std::vector<std::string> validate_tree(const Proof& proof) {
    std::vector<std::string> errors;
    auto err = [&](int id, const std::string& msg) {
        errors.push_back("node " + std::to_string(id) + ": " + msg);
    };
    if (!proof.has_node(proof.root)) {
        errors.push_back("root id " + std::to_string(proof.root) + " has no node");
        return errors;
    }
    std::map<int, int> indegree;
    for (const auto& [id, n] : proof.nodes) {
        if (n.id != id) err(id, "id field mismatch");
        for (int c : n.children) {
            if (!proof.has_node(c)) {
                err(id, "missing child " + std::to_string(c));
                continue;
            }
            indegree[c]++;
        }
        std::size_t expect;
        switch (n.rule) {
            case Rule::Ax:
            case Rule::Backedge:
            case Rule::Discharge:
            case Rule::Open:
                expect = 0;
                break;
            case Rule::And:
            case Rule::Cut:
                expect = 2;
                break;
            default:
                expect = 1;
        }
        if (n.children.size() != expect)
            err(id, rule_name(n.rule) + " expects " + std::to_string(expect) + " children, has " +
                        std::to_string(n.children.size()));
        if (n.principal) {
            if (*n.principal < 0 || static_cast<std::size_t>(*n.principal) >= n.sequent.size())
                err(id, "principal index out of range");
        }
    }
    if (indegree.count(proof.root)) errors.push_back("root has a parent");
    for (const auto& [id, d] : indegree)
        if (d > 1) err(id, "multiple parents");
    // reachability
    std::vector<int> stack{proof.root};
    std::size_t seen = 0;
    std::map<int, bool> visited;
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (visited[id]) continue;
        visited[id] = true;
        ++seen;
        if (!proof.has_node(id)) continue;
        for (int c : proof.node(id).children)
            if (proof.has_node(c)) stack.push_back(c);
    }
    if (errors.empty() && seen != proof.nodes.size())
        errors.push_back("unreachable nodes present");
    return errors;
}

// ---------------------------------------------------------------------------
// JSON

using ordered_json = nlohmann::ordered_json;

Proof proof_from_json_text(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    Proof proof;
    std::string system = j.at("system").get<std::string>();
    if (system == "nw")
        proof.system = ProofSystem::Nw;
    else if (system == "clo")
        proof.system = ProofSystem::Clo;
    else
        throw std::invalid_argument("proof json: unknown system '" + system + "'");
    proof.root = j.at("root").get<int>();
    for (const auto& jn : j.at("nodes")) {
        ProofNode n;
        n.id = jn.at("id").get<int>();
        std::vector<AnnotatedFormula> items;
        for (const auto& jf : jn.at("sequent")) {
            AnnotatedFormula af{parse_formula(jf.at("formula").get<std::string>()), {}};
            if (jf.contains("annotation"))
                for (const auto& ja : jf.at("annotation"))
                    af.annotation.push_back(Name::parse(ja.get<std::string>()));
            items.push_back(std::move(af));
        }
        // The json lists the sequent in canonical order; principal indexes it.
        std::vector<AnnotatedFormula> given = items;
        n.sequent = AnnotatedSequent(std::move(items));
        if (jn.contains("principal")) {
            int idx = jn.at("principal").get<int>();
            if (idx < 0 || static_cast<std::size_t>(idx) >= given.size())
                throw std::invalid_argument("proof json: principal out of range at node " +
                                            std::to_string(n.id));
            const AnnotatedFormula& pf = given[static_cast<std::size_t>(idx)];
            const auto& canon = n.sequent.items();
            n.principal = static_cast<int>(
                std::lower_bound(canon.begin(), canon.end(), pf) - canon.begin());
        }
        if (jn.contains("children"))
            for (const auto& jc : jn.at("children")) n.children.push_back(jc.get<int>());
        if (jn.contains("target")) n.target = jn.at("target").get<int>();
        if (jn.contains("token")) n.token = Name::parse(jn.at("token").get<std::string>());
        auto rule = rule_from_name(jn.at("rule").get<std::string>());
        if (!rule)
            throw std::invalid_argument("proof json: unknown rule '" +
                                        jn.at("rule").get<std::string>() + "'");
        n.rule = *rule;
        if (!proof.nodes.emplace(n.id, std::move(n)).second)
            throw std::invalid_argument("proof json: duplicate node id");
    }
    return proof;
}

std::string proof_to_json_text(const Proof& proof) {
    ordered_json j;
    j["system"] = proof.system == ProofSystem::Nw ? "nw" : "clo";
    j["root"] = proof.root;
    j["nodes"] = ordered_json::array();
    for (const auto& [id, n] : proof.nodes) {
        ordered_json jn;
        jn["id"] = n.id;
        jn["sequent"] = ordered_json::array();
        for (const auto& af : n.sequent.items()) {
            ordered_json jf;
            jf["formula"] = af.formula.str();
            if (proof.system == ProofSystem::Clo) {
                ordered_json ja = ordered_json::array();
                for (const auto& name : af.annotation) ja.push_back(name.str());
                jf["annotation"] = std::move(ja);
            }
            jn["sequent"].push_back(std::move(jf));
        }
        jn["rule"] = rule_name(n.rule);
        if (n.principal) jn["principal"] = *n.principal;
        jn["children"] = n.children;
        if (n.target) jn["target"] = *n.target;
        if (n.token) jn["token"] = n.token->str();
        j["nodes"].push_back(std::move(jn));
    }
    return j.dump(2) + "\n";
}

Proof load_proof_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open proof file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return proof_from_json_text(buf.str());
}

void save_proof_file(const Proof& proof, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write proof file: " + path);
    out << proof_to_json_text(proof);
}

}  // namespace mucyclo

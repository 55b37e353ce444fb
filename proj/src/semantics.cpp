#include "mucyclo/semantics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mucyclo {

std::string KripkeModel::str() const {
    std::ostringstream out;
    out << "states " << num_states << ";";
    out << " edges";
    bool first = true;
    for (std::size_t i = 0; i < num_states; ++i)
        for (std::size_t j = 0; j < num_states; ++j)
            if (successors[i] & (1u << j)) {
                out << (first ? " " : ", ") << i << "->" << j;
                first = false;
            }
    out << ";";
    for (const auto& [p, set] : valuation) {
        out << " val " << p << " = {";
        bool f2 = true;
        for (std::size_t i = 0; i < num_states; ++i)
            if (set & (1u << i)) {
                out << (f2 ? "" : ", ") << i;
                f2 = false;
            }
        out << "};";
    }
    return out.str();
}

KripkeModel parse_model(const std::string& text) {
    KripkeModel m;
    std::istringstream in(text);
    std::string tok;
    auto expect = [&](const std::string& what) {
        if (!(in >> tok) || tok != what)
            throw std::invalid_argument("model: expected '" + what + "'");
    };
    expect("states");
    std::size_t n = 0;
    char c = 0;
    if (!(in >> n) || n == 0 || n > kMaxStates)
        throw std::invalid_argument("model: bad state count");
    in >> c;  // ';'
    m.num_states = n;
    m.successors.assign(n, 0);

    std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < rest.size() && (std::isspace(static_cast<unsigned char>(rest[pos])) ||
                                     rest[pos] == ','))
            ++pos;
    };
    auto read_num = [&]() -> std::size_t {
        skip_ws();
        std::size_t start = pos;
        while (pos < rest.size() && std::isdigit(static_cast<unsigned char>(rest[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("model: expected state index");
        std::size_t v = std::stoul(rest.substr(start, pos - start));
        if (v >= n) throw std::invalid_argument("model: state index out of range");
        return v;
    };
    auto read_word = [&]() -> std::string {
        skip_ws();
        std::size_t start = pos;
        while (pos < rest.size() && (std::isalnum(static_cast<unsigned char>(rest[pos])) ||
                                     rest[pos] == '_'))
            ++pos;
        return rest.substr(start, pos - start);
    };

    skip_ws();
    while (pos < rest.size()) {
        std::string word = read_word();
        if (word == "edges") {
            skip_ws();
            while (pos < rest.size() && rest[pos] != ';') {
                std::size_t i = read_num();
                skip_ws();
                if (rest.compare(pos, 2, "->") != 0)
                    throw std::invalid_argument("model: expected '->'");
                pos += 2;
                std::size_t j = read_num();
                m.successors[i] |= (1u << j);
                skip_ws();
            }
            ++pos;  // ';'
        } else if (word == "val") {
            std::string p = read_word();
            skip_ws();
            if (pos >= rest.size() || rest[pos] != '=')
                throw std::invalid_argument("model: expected '='");
            ++pos;
            skip_ws();
            if (pos >= rest.size() || rest[pos] != '{')
                throw std::invalid_argument("model: expected '{'");
            ++pos;
            StateSet set = 0;
            skip_ws();
            while (pos < rest.size() && rest[pos] != '}') {
                set |= (1u << read_num());
                skip_ws();
            }
            ++pos;  // '}'
            skip_ws();
            if (pos < rest.size() && rest[pos] == ';') ++pos;
            m.valuation[p] = set;
        } else if (word.empty()) {
            break;
        } else {
            throw std::invalid_argument("model: unexpected token '" + word + "'");
        }
        skip_ws();
    }
    return m;
}

namespace {

StateSet preimage_dia(const KripkeModel& m, StateSet target) {
    StateSet out = 0;
    for (std::size_t i = 0; i < m.num_states; ++i)
        if (m.successors[i] & target) out |= (1u << i);
    return out;
}

StateSet preimage_box(const KripkeModel& m, StateSet target) {
    StateSet out = 0;
    for (std::size_t i = 0; i < m.num_states; ++i)
        if ((m.successors[i] & ~target & m.all_states()) == 0) out |= (1u << i);
    return out;
}

}  // namespace

StateSet eval(const Formula& f, const KripkeModel& model, const Environment& env) {
    switch (f.kind()) {
        case FormulaKind::Lit: {
            auto it = model.valuation.find(f.name());
            StateSet val = it == model.valuation.end() ? 0 : it->second;
            return f.negated() ? (model.all_states() & ~val) : val;
        }
        case FormulaKind::Var: {
            auto it = env.find(f.name());
            if (it == env.end())
                throw std::invalid_argument("eval: unbound variable '" + f.name() + "'");
            return it->second;
        }
        case FormulaKind::Or:
            return eval(f.left(), model, env) | eval(f.right(), model, env);
        case FormulaKind::And:
            return eval(f.left(), model, env) & eval(f.right(), model, env);
        case FormulaKind::Dia:
            return preimage_dia(model, eval(f.sub(), model, env));
        case FormulaKind::Box:
            return preimage_box(model, eval(f.sub(), model, env));
        case FormulaKind::Mu:
        case FormulaKind::Nu: {
            StateSet cur = f.kind() == FormulaKind::Mu ? 0 : model.all_states();
            Environment inner = env;
            while (true) {
                inner[f.name()] = cur;
                StateSet next = eval(f.body(), model, inner);
                if (next == cur) return cur;
                cur = next;
            }
        }
    }
    return 0;
}

bool holds_everywhere(const Formula& f, const KripkeModel& model) {
    return eval(f, model) == model.all_states();
}

namespace {

// Canonical-form pruning: keep a candidate only if its (transition, valuation)
// encoding is minimal among all relabelings fixing the distinguished state 0.
struct Encoding {
    std::vector<StateSet> succ;
    std::vector<StateSet> vals;  // one mask per proposition, fixed order

    auto operator<=>(const Encoding&) const = default;
};

Encoding relabel(const Encoding& e, const std::vector<std::size_t>& perm) {
    std::size_t n = e.succ.size();
    Encoding out;
    out.succ.assign(n, 0);
    out.vals.assign(e.vals.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (e.succ[i] & (1u << j)) out.succ[perm[i]] |= (1u << perm[j]);
        for (std::size_t k = 0; k < e.vals.size(); ++k)
            if (e.vals[k] & (1u << i)) out.vals[k] |= (1u << perm[i]);
    }
    return out;
}

bool is_canonical(const Encoding& e) {
    std::size_t n = e.succ.size();
    if (n <= 2) return true;  // no nontrivial permutation fixes state 0
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    // permute states 1..n-1 only
    while (std::next_permutation(perm.begin() + 1, perm.end())) {
        if (relabel(e, perm) < e) return false;
    }
    return true;
}

std::vector<std::string> proposition_letters(const Formula& f) {
    std::set<std::string> props;
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
        switch (g.kind()) {
            case FormulaKind::Lit:
                props.insert(g.name());
                break;
            case FormulaKind::Var:
                break;
            case FormulaKind::Or:
            case FormulaKind::And:
                walk(g.left());
                walk(g.right());
                break;
            case FormulaKind::Dia:
            case FormulaKind::Box:
                walk(g.sub());
                break;
            case FormulaKind::Mu:
            case FormulaKind::Nu:
                walk(g.body());
                break;
        }
    };
    walk(f);
    return {props.begin(), props.end()};
}

}  // namespace

CountermodelResult search_countermodel(const Formula& f, std::size_t max_states,
                                       std::uint64_t budget) {
    if (max_states == 0 || max_states > kMaxStates)
        throw std::invalid_argument("search_countermodel: max_states out of range");
    auto props = proposition_letters(f);
    CountermodelResult result;
    for (std::size_t n = 1; n <= max_states; ++n) {
        std::uint64_t trans_bits = n * n;
        std::uint64_t val_bits = props.size() * n;
        if (trans_bits + val_bits > 60)
            throw std::invalid_argument("search_countermodel: state space too large");
        std::uint64_t trans_count = 1ull << trans_bits;
        std::uint64_t val_count = 1ull << val_bits;
        for (std::uint64_t t = 0; t < trans_count; ++t) {
            for (std::uint64_t v = 0; v < val_count; ++v) {
                if (result.models_checked++ >= budget) {
                    result.status = CountermodelStatus::BudgetExceeded;
                    return result;
                }
                Encoding enc;
                enc.succ.assign(n, 0);
                for (std::size_t i = 0; i < n; ++i)
                    enc.succ[i] = static_cast<StateSet>((t >> (i * n)) & ((1u << n) - 1));
                enc.vals.assign(props.size(), 0);
                for (std::size_t k = 0; k < props.size(); ++k)
                    enc.vals[k] = static_cast<StateSet>((v >> (k * n)) & ((1u << n) - 1));
                if (!is_canonical(enc)) continue;

                KripkeModel m;
                m.num_states = n;
                m.successors = enc.succ;
                for (std::size_t k = 0; k < props.size(); ++k) m.valuation[props[k]] = enc.vals[k];
                StateSet denote = eval(f, m);
                if (!(denote & 1u)) {
                    result.status = CountermodelStatus::Found;
                    result.witness = PointedModel{std::move(m), 0};
                    return result;
                }
            }
        }
    }
    result.status = CountermodelStatus::NoneFound;
    return result;
}

}  // namespace mucyclo

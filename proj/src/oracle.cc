// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/oracle.hh>

#include <algorithm>
#include <functional>
#include <map>

namespace tmeta::oracle {

namespace {

auto leaf_symbol(TheoryExpression const &expr) -> Symbol {
    auto sym = expr.leaf->to_symbol();
    if (!sym) {
        throw GroundingError{"non-ground or arithmetic term in " + format_expression(expr), expr.loc};
    }
    return *sym;
}

auto leaf_number(TheoryExpression const &expr) -> int {
    if (!expr.leaf) {
        throw TypeError{"expected a number in " + format_expression(expr), expr.loc};
    }
    auto sym = leaf_symbol(expr);
    if (!sym.is_number()) {
        throw TypeError{"expected a number in " + format_expression(expr), expr.loc};
    }
    return static_cast<int>(sym.num());
}

auto unary(Formula::Kind kind, Formula arg) -> Formula {
    Formula out;
    out.kind = kind;
    out.args.push_back(std::move(arg));
    return out;
}

auto nullary(Formula::Kind kind) -> Formula {
    Formula out;
    out.kind = kind;
    return out;
}

auto is_interval(TheoryExpression const &expr) -> bool { return !expr.leaf && expr.op == "i" && expr.arity() == 2; }

void read_interval(TheoryExpression const &expr, Formula &out) {
    out.lower = leaf_number(expr.args[0]);
    auto const &ub = expr.args[1];
    if (ub.leaf && leaf_symbol(ub) == Symbol::supremum()) {
        out.upper.reset();
    } else {
        out.upper = leaf_number(ub);
    }
}

} // namespace

auto to_formula(TheoryExpression const &expr) -> Formula {
    using K = Formula::Kind;
    if (expr.leaf) {
        auto sym = leaf_symbol(expr);
        if (!sym.is_atom()) {
            throw TypeError{"expected an atom, got " + sym.to_string(), expr.loc};
        }
        Formula out;
        out.kind = K::Atom;
        out.atom = sym;
        return out;
    }
    auto const &op = expr.op;
    auto arity = expr.arity();
    if (op == "true" && arity == 0) {
        return nullary(K::Top);
    }
    if (op == "false" && arity == 0) {
        return nullary(K::Bottom);
    }
    if (op == "initial" && arity == 0) {
        return nullary(K::Initial);
    }
    if (op == "final" && arity == 0) {
        return unary(K::Not, unary(K::Next, nullary(K::Top)));
    }
    if (op == "not" && arity == 1) {
        return unary(K::Not, to_formula(expr.args[0]));
    }
    if ((op == "and" || op == "or") && arity > 0) {
        Formula out;
        out.kind = op == "and" ? K::And : K::Or;
        for (auto const &arg : expr.args) {
            out.args.push_back(to_formula(arg));
        }
        return out;
    }
    if (op == "next" && arity == 1) {
        return unary(K::Next, to_formula(expr.args[0]));
    }
    if (op == "eventually" && arity == 1) {
        return unary(K::Eventually, to_formula(expr.args[0]));
    }
    if ((op == "next" || op == "eventually") && arity == 2 && is_interval(expr.args[0])) {
        auto out = unary(op == "next" ? K::MetricNext : K::MetricEventually, to_formula(expr.args[1]));
        read_interval(expr.args[0], out);
        return out;
    }
    if ((op == "eventually" || op == "always") && arity == 2) {
        auto out = unary(op == "eventually" ? K::Diamond : K::Box, to_formula(expr.args[1]));
        out.path = std::make_shared<Path>(to_path(expr.args[0]));
        return out;
    }
    throw TypeError{"unsupported operator &" + op + "/" + std::to_string(arity), expr.loc};
}

auto to_path(TheoryExpression const &expr) -> Path {
    using K = Path::Kind;
    Path out;
    if (expr.leaf) {
        // An atom a abbreviates a?;step.
        Path test;
        test.kind = K::Test;
        test.test = to_formula(expr);
        Path step;
        step.kind = K::Step;
        out.kind = K::Seq;
        out.args = {std::move(test), std::move(step)};
        return out;
    }
    auto const &op = expr.op;
    auto arity = expr.arity();
    if (op == "step" && arity == 0) {
        out.kind = K::Step;
    } else if (op == "test" && arity == 1) {
        out.kind = K::Test;
        out.test = to_formula(expr.args[0]);
    } else if ((op == "seq" || op == "choice") && arity == 2) {
        out.kind = op == "seq" ? K::Seq : K::Choice;
        out.args = {to_path(expr.args[0]), to_path(expr.args[1])};
    } else if (op == "star" && arity == 1) {
        out.kind = K::Star;
        out.args = {to_path(expr.args[0])};
    } else {
        throw TypeError{"unsupported path operator &" + op + "/" + std::to_string(arity), expr.loc};
    }
    return out;
}

namespace {

// {{{1 evaluation in here-and-there

using Mask = std::uint64_t;
using Rows = std::vector<Mask>;

struct Model {
    int n = 0;
    std::map<Symbol, int> const *atoms = nullptr;
    //! Atoms true in the there-world.
    Mask there = 0;
    std::vector<int> const *tau = nullptr;

    [[nodiscard]] auto bit(Symbol atom, int t) const -> Mask {
        auto it = atoms->find(atom);
        if (it == atoms->end()) {
            return 0;
        }
        return Mask{1} << (it->second * (n + 1) + t);
    }
};

auto eval(Model const &m, Formula const &f, int t, Mask w) -> bool;

auto relation(Model const &m, Path const &p, Mask w) -> Rows {
    using K = Path::Kind;
    auto n = m.n;
    Rows rows(n + 1, 0);
    switch (p.kind) {
        case K::Step:
            for (int i = 0; i < n; ++i) {
                rows[i] = Mask{1} << (i + 1);
            }
            break;
        case K::Test:
            for (int i = 0; i <= n; ++i) {
                if (eval(m, *p.test, i, w)) {
                    rows[i] = Mask{1} << i;
                }
            }
            break;
        case K::Seq: {
            auto a = relation(m, p.args[0], w);
            auto b = relation(m, p.args[1], w);
            for (int i = 0; i <= n; ++i) {
                for (int k = 0; k <= n; ++k) {
                    if ((a[i] >> k) & 1U) {
                        rows[i] |= b[k];
                    }
                }
            }
            break;
        }
        case K::Choice: {
            auto a = relation(m, p.args[0], w);
            auto b = relation(m, p.args[1], w);
            for (int i = 0; i <= n; ++i) {
                rows[i] = a[i] | b[i];
            }
            break;
        }
        case K::Star: {
            auto a = relation(m, p.args[0], w);
            for (int i = 0; i <= n; ++i) {
                rows[i] = Mask{1} << i;
            }
            bool changed = true;
            while (changed) {
                changed = false;
                for (int i = 0; i <= n; ++i) {
                    auto row = rows[i];
                    for (int k = 0; k <= n; ++k) {
                        if ((rows[i] >> k) & 1U) {
                            row |= a[k];
                        }
                    }
                    if (row != rows[i]) {
                        rows[i] = row;
                        changed = true;
                    }
                }
            }
            break;
        }
    }
    return rows;
}

auto in_interval(Formula const &f, int d) -> bool { return f.lower <= d && (!f.upper || d < *f.upper); }

auto eval(Model const &m, Formula const &f, int t, Mask w) -> bool {
    using K = Formula::Kind;
    auto n = m.n;
    switch (f.kind) {
        case K::Atom: return (w & m.bit(f.atom, t)) != 0;
        case K::Top: return true;
        case K::Bottom: return false;
        case K::Not: return !eval(m, f.args[0], t, m.there);
        case K::And:
            return std::all_of(f.args.begin(), f.args.end(), [&](Formula const &g) { return eval(m, g, t, w); });
        case K::Or:
            return std::any_of(f.args.begin(), f.args.end(), [&](Formula const &g) { return eval(m, g, t, w); });
        case K::Implies: {
            for (auto v : {w, m.there}) {
                if (eval(m, f.args[0], t, v) && !eval(m, f.args[1], t, v)) {
                    return false;
                }
            }
            return true;
        }
        case K::Initial: return t == 0;
        case K::Next: return t < n && eval(m, f.args[0], t + 1, w);
        case K::Eventually:
            for (int j = t; j <= n; ++j) {
                if (eval(m, f.args[0], j, w)) {
                    return true;
                }
            }
            return false;
        case K::MetricNext: {
            if (m.tau == nullptr) {
                throw Error{"metric operator evaluated without a timing function"};
            }
            return t < n && in_interval(f, (*m.tau)[t + 1] - (*m.tau)[t]) && eval(m, f.args[0], t + 1, w);
        }
        case K::MetricEventually: {
            if (m.tau == nullptr) {
                throw Error{"metric operator evaluated without a timing function"};
            }
            for (int j = t; j <= n; ++j) {
                if (in_interval(f, (*m.tau)[j] - (*m.tau)[t]) && eval(m, f.args[0], j, w)) {
                    return true;
                }
            }
            return false;
        }
        case K::Diamond: {
            auto rows = relation(m, *f.path, w);
            for (int j = 0; j <= n; ++j) {
                if (((rows[t] >> j) & 1U) && eval(m, f.args[0], j, w)) {
                    return true;
                }
            }
            return false;
        }
        case K::Box: {
            for (auto v : {w, m.there}) {
                auto rows = relation(m, *f.path, v);
                for (int j = 0; j <= n; ++j) {
                    if (((rows[t] >> j) & 1U) && !eval(m, f.args[0], j, v)) {
                        return false;
                    }
                }
            }
            return true;
        }
    }
    return false;
}

void formula_atoms(Formula const &f, std::set<Symbol> &out);

void path_atoms(Path const &p, std::set<Symbol> &out) {
    if (p.test) {
        formula_atoms(*p.test, out);
    }
    for (auto const &arg : p.args) {
        path_atoms(arg, out);
    }
}

void formula_atoms(Formula const &f, std::set<Symbol> &out) {
    if (f.kind == Formula::Kind::Atom) {
        out.insert(f.atom);
    }
    for (auto const &arg : f.args) {
        formula_atoms(arg, out);
    }
    if (f.path) {
        path_atoms(*f.path, out);
    }
}

void box_atoms(Formula const &f, std::set<Symbol> &out);

void box_atoms(Path const &p, std::set<Symbol> &out) {
    if (p.test) {
        box_atoms(*p.test, out);
    }
    for (auto const &arg : p.args) {
        box_atoms(arg, out);
    }
}

// Atoms under a box may be derived through the implication of a test.
void box_atoms(Formula const &f, std::set<Symbol> &out) {
    if (f.kind == Formula::Kind::Box) {
        formula_atoms(f, out);
        return;
    }
    for (auto const &arg : f.args) {
        box_atoms(arg, out);
    }
    if (f.path) {
        box_atoms(*f.path, out);
    }
}

// A total trace as a here-and-there model with equal worlds.
struct TotalModel {
    std::map<Symbol, int> atoms;
    Model model;
};

auto total(Trace const &trace, std::set<Symbol> extra) -> TotalModel {
    for (auto const &state : trace.states) {
        extra.insert(state.begin(), state.end());
    }
    TotalModel out;
    int idx = 0;
    for (auto sym : extra) {
        out.atoms.emplace(sym, idx++);
    }
    out.model.n = trace.horizon();
    if (idx * (out.model.n + 1) > 64) {
        throw ResourceError{"trace too large for evaluation"};
    }
    out.model.atoms = &out.atoms;
    out.model.tau = trace.tau ? &*trace.tau : nullptr;
    for (int t = 0; t <= out.model.n; ++t) {
        for (auto sym : trace.states[t]) {
            out.model.there |= out.model.bit(sym, t);
        }
    }
    return out;
}

// {{{1 instantiation

struct GroundRule {
    Formula body;
    Formula head;
};

void collect_terms(Term const &term, std::set<Symbol> &out) {
    if (auto sym = term.to_symbol()) {
        out.insert(*sym);
    }
    for (auto const &arg : term.args) {
        collect_terms(arg, out);
    }
}

void collect_universe(TheoryExpression const &expr, std::set<Symbol> &out) {
    if (expr.leaf) {
        for (auto const &arg : expr.leaf->args) {
            collect_terms(arg, out);
        }
    }
    for (auto const &arg : expr.args) {
        collect_universe(arg, out);
    }
}

void collect_universe(Literal const &lit, std::set<Symbol> &out) {
    if (lit.is_atom()) {
        for (auto const &arg : lit.atom().args) {
            collect_terms(arg, out);
        }
    } else if (lit.is_theory()) {
        collect_universe(lit.theory(), out);
    }
}

using Binding = std::map<std::string, Symbol>;

auto substitute(Term const &term, Binding const &binding) -> Term {
    if (term.kind == Term::Kind::Variable) {
        return Term::make_symbol(binding.at(term.name), term.loc);
    }
    auto out = term;
    for (auto &arg : out.args) {
        arg = substitute(arg, binding);
    }
    return out;
}

auto substitute(TheoryExpression const &expr, Binding const &binding) -> TheoryExpression {
    auto out = expr;
    if (out.leaf) {
        out.leaf = substitute(*out.leaf, binding);
    }
    for (auto &arg : out.args) {
        arg = substitute(arg, binding);
    }
    return out;
}

auto ground_symbol(Term const &term) -> Symbol {
    auto sym = term.to_symbol();
    if (!sym) {
        throw GroundingError{"arithmetic is not supported by the oracle: " + format_term(term), term.loc};
    }
    return *sym;
}

auto compare(Relation rel, Symbol a, Symbol b) -> bool {
    switch (rel) {
        case Relation::Eq: return a == b;
        case Relation::Neq: return a != b;
        case Relation::Lt: return a < b;
        case Relation::Leq: return a <= b;
        case Relation::Gt: return a > b;
        case Relation::Geq: return a >= b;
    }
    return false;
}

// Converts a ground literal; std::nullopt for a true comparison and
// Bottom for a false one.
auto literal_formula(Literal const &lit, Binding const &binding) -> std::optional<Formula> {
    if (lit.is_comparison()) {
        auto const &cmp = lit.comparison();
        auto holds = compare(cmp.relation, ground_symbol(substitute(cmp.lhs, binding)),
                             ground_symbol(substitute(cmp.rhs, binding)));
        if (lit.sign == Sign::Negative) {
            holds = !holds;
        }
        if (holds) {
            return std::nullopt;
        }
        return nullary(Formula::Kind::Bottom);
    }
    Formula f;
    if (lit.is_atom()) {
        f.kind = Formula::Kind::Atom;
        f.atom = ground_symbol(substitute(lit.atom(), binding));
    } else {
        f = to_formula(substitute(lit.theory(), binding));
    }
    if (lit.sign == Sign::Negative) {
        return unary(Formula::Kind::Not, std::move(f));
    }
    return f;
}

void variables(Literal const &lit, std::vector<std::string> &out) {
    if (lit.is_comparison()) {
        lit.comparison().lhs.collect_variables(out);
        lit.comparison().rhs.collect_variables(out);
    } else if (lit.is_atom()) {
        lit.atom().collect_variables(out);
    } else {
        lit.theory().collect_variables(out);
    }
}

auto instantiate(Program const &prg, std::set<Symbol> &head_atoms) -> std::vector<GroundRule> {
    std::set<Symbol> universe;
    std::vector<Rule> rules;
    for (auto const &stm : prg.statements) {
        if (std::holds_alternative<Const>(stm)) {
            throw GroundingError{"constant definitions are not supported by the oracle",
                                 std::get<Const>(stm).loc};
        }
        if (auto const *rule = std::get_if<Rule>(&stm)) {
            if (rule->internal) {
                continue;
            }
            for (auto const *elems : {&rule->head, &rule->body}) {
                for (auto const &elem : *elems) {
                    if (elem.conditional()) {
                        throw GroundingError{"conditional literals are not supported by the oracle", rule->loc};
                    }
                    collect_universe(elem.literal, universe);
                }
            }
            rules.push_back(*rule);
        }
    }
    std::vector<Symbol> values(universe.begin(), universe.end());
    std::vector<GroundRule> out;
    for (auto const &rule : rules) {
        std::vector<std::string> vars;
        for (auto const *elems : {&rule.head, &rule.body}) {
            for (auto const &elem : *elems) {
                variables(elem.literal, vars);
            }
        }
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        if (!vars.empty() && values.empty()) {
            continue;
        }
        double combos = 1;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            combos *= static_cast<double>(values.size());
        }
        if (combos > 1e6) {
            throw ResourceError{"too many rule instances for the oracle", rule.loc};
        }
        Binding binding;
        std::function<void(std::size_t)> expand = [&](std::size_t i) {
            if (i < vars.size()) {
                for (auto value : values) {
                    binding[vars[i]] = value;
                    expand(i + 1);
                }
                return;
            }
            Formula body;
            body.kind = Formula::Kind::And;
            for (auto const &elem : rule.body) {
                auto f = literal_formula(elem.literal, binding);
                if (f) {
                    box_atoms(*f, head_atoms);
                    body.args.push_back(std::move(*f));
                }
            }
            std::vector<Formula> heads;
            for (auto const &elem : rule.head) {
                if (elem.literal.sign != Sign::Positive || elem.literal.is_comparison()) {
                    throw GroundingError{"head literals must be positive atoms or theory expressions", rule.loc};
                }
                auto f = literal_formula(elem.literal, binding);
                formula_atoms(*f, head_atoms);
                heads.push_back(std::move(*f));
            }
            if (rule.kind == HeadKind::Choice) {
                for (auto &h : heads) {
                    Formula head;
                    head.kind = Formula::Kind::Or;
                    head.args = {h, unary(Formula::Kind::Not, h)};
                    out.push_back({body, std::move(head)});
                }
                return;
            }
            Formula head;
            head.kind = Formula::Kind::Or;
            head.args = std::move(heads);
            out.push_back({std::move(body), std::move(head)});
        };
        expand(0);
    }
    return out;
}

auto holds_everywhere(Model const &m, std::vector<GroundRule> const &rules, Mask here) -> bool {
    for (auto const &rule : rules) {
        for (int t = 0; t <= m.n; ++t) {
            for (auto w : {here, m.there}) {
                if (eval(m, rule.body, t, w) && !eval(m, rule.head, t, w)) {
                    return false;
                }
                if (here == m.there) {
                    break;
                }
            }
        }
    }
    return true;
}

void enumerate_tau(int n, int max_time, std::vector<int> &tau, std::vector<std::vector<int>> &out) {
    auto t = static_cast<int>(tau.size());
    if (t == n + 1) {
        out.push_back(tau);
        return;
    }
    for (int d = 1; tau.back() + d <= max_time; ++d) {
        tau.push_back(tau.back() + d);
        enumerate_tau(n, max_time, tau, out);
        tau.pop_back();
    }
}

} // namespace

auto eval_formula(Trace const &trace, int t, Formula const &formula) -> bool {
    std::set<Symbol> atoms;
    formula_atoms(formula, atoms);
    auto tm = total(trace, atoms);
    if (t < 0 || t > tm.model.n) {
        throw Error{"step out of range"};
    }
    return eval(tm.model, formula, t, tm.model.there);
}

auto eval_path(Trace const &trace, Path const &path) -> std::set<std::pair<int, int>> {
    std::set<Symbol> atoms;
    path_atoms(path, atoms);
    auto tm = total(trace, atoms);
    auto rows = relation(tm.model, path, tm.model.there);
    std::set<std::pair<int, int>> out;
    for (int i = 0; i <= tm.model.n; ++i) {
        for (int j = 0; j <= tm.model.n; ++j) {
            if ((rows[i] >> j) & 1U) {
                out.emplace(i, j);
            }
        }
    }
    return out;
}

auto temporal_models(Program const &prg, TheoryGrammar const &grammar, OracleOptions const &options)
    -> std::vector<Trace> {
    auto n = options.horizon;
    if (n < 0) {
        throw Error{"horizon must be non-negative"};
    }
    std::set<Symbol> head_atoms;
    auto rules = instantiate(grammar.typecheck_program(prg), head_atoms);
    std::map<Symbol, int> atoms;
    std::vector<Symbol> names(head_atoms.begin(), head_atoms.end());
    for (std::size_t i = 0; i < names.size(); ++i) {
        atoms.emplace(names[i], static_cast<int>(i));
    }
    auto bits = static_cast<int>(names.size()) * (n + 1);
    if (bits > options.max_bits || bits > 63) {
        throw ResourceError{"state space of " + std::to_string(bits) + " atom/state pairs exceeds the oracle bound of " +
                            std::to_string(options.max_bits)};
    }
    std::vector<std::vector<int>> timings;
    if (options.timed) {
        if (options.max_time < n) {
            throw Error{"maximal time is smaller than the horizon"};
        }
        std::vector<int> tau{0};
        enumerate_tau(n, options.max_time, tau, timings);
    } else {
        timings.emplace_back();
    }
    std::vector<Trace> out;
    for (auto const &tau : timings) {
        Model m;
        m.n = n;
        m.atoms = &atoms;
        m.tau = options.timed ? &tau : nullptr;
        for (Mask there = 0; there < (Mask{1} << bits); ++there) {
            m.there = there;
            if (!holds_everywhere(m, rules, there)) {
                continue;
            }
            bool equilibrium = true;
            // Proper subsets of the there-world, largest first.
            for (Mask here = (there - 1) & there; equilibrium; here = (here - 1) & there) {
                if (here != there && holds_everywhere(m, rules, here)) {
                    equilibrium = false;
                }
                if (here == 0) {
                    break;
                }
            }
            if (there == 0) {
                equilibrium = true;
            }
            if (!equilibrium) {
                continue;
            }
            Trace trace;
            trace.states.resize(n + 1);
            for (std::size_t a = 0; a < names.size(); ++a) {
                for (int t = 0; t <= n; ++t) {
                    if ((there >> (a * (n + 1) + t)) & 1U) {
                        trace.states[t].insert(names[a]);
                    }
                }
            }
            if (options.timed) {
                trace.tau = tau;
            }
            out.push_back(std::move(trace));
        }
    }
    return out;
}

} // namespace tmeta::oracle

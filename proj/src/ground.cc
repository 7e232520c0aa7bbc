// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/ground.hh>
#include <tmeta/transform.hh>

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace tmeta {

// {{{1 constants

namespace {

void rewrite_term(Term &term, std::function<void(Term &)> const &fun) {
    for (auto &arg : term.args) {
        rewrite_term(arg, fun);
    }
    fun(term);
}

void rewrite_expression(TheoryExpression &expr, std::function<void(Term &)> const &fun) {
    if (expr.leaf) {
        rewrite_term(*expr.leaf, fun);
    }
    for (auto &arg : expr.args) {
        rewrite_expression(arg, fun);
    }
}

void rewrite_literal(Literal &lit, std::function<void(Term &)> const &fun) {
    if (auto *atom = std::get_if<Term>(&lit.payload)) {
        rewrite_term(*atom, fun);
    } else if (auto *expr = std::get_if<TheoryExpression>(&lit.payload)) {
        rewrite_expression(*expr, fun);
    } else {
        auto &cmp = std::get<Comparison>(lit.payload);
        rewrite_term(cmp.lhs, fun);
        rewrite_term(cmp.rhs, fun);
    }
}

void rewrite_elements(std::vector<ConditionalLiteral> &elems, std::function<void(Term &)> const &fun) {
    for (auto &elem : elems) {
        rewrite_literal(elem.literal, fun);
        for (auto &lit : elem.condition) {
            rewrite_literal(lit, fun);
        }
    }
}

void rewrite_program(Program &prg, std::function<void(Term &)> const &fun) {
    for (auto &stm : prg.statements) {
        if (auto *rule = std::get_if<Rule>(&stm)) {
            rewrite_elements(rule->head, fun);
            rewrite_elements(rule->body, fun);
        } else if (auto *ext = std::get_if<External>(&stm)) {
            rewrite_literal(ext->atom, fun);
            rewrite_elements(ext->condition, fun);
        } else if (auto *show = std::get_if<Show>(&stm)) {
            if (show->term) {
                rewrite_term(*show->term, fun);
            }
            rewrite_elements(show->condition, fun);
        }
    }
}

} // namespace

auto parse_constant(std::string_view text) -> std::pair<std::string, Symbol> {
    auto pos = text.find('=');
    if (pos == std::string_view::npos || pos == 0) {
        throw SyntaxError{"expected name=value, got '" + std::string{text} + "'"};
    }
    auto name = std::string{text.substr(0, pos)};
    auto name_term = parse_term(name);
    if (name_term.kind != Term::Kind::Symbol || !name_term.symbol.is_atom() || !name_term.symbol.args().empty()) {
        throw SyntaxError{"invalid constant name '" + name + "'"};
    }
    auto value = parse_term(text.substr(pos + 1));
    auto sym = value.to_symbol();
    if (!sym) {
        throw SyntaxError{"constant value must be a ground term: '" + std::string{text.substr(pos + 1)} + "'"};
    }
    return {name, *sym};
}

namespace {

auto eval_const_term(Term const &term) -> Symbol;

} // namespace

auto substitute_constants(Program const &prg, std::vector<std::pair<std::string, Symbol>> const &overrides)
    -> Program {
    std::map<std::string, Symbol> values;
    auto replace = [&](Term &term) {
        if (term.kind == Term::Kind::Symbol && term.symbol.is_atom() && term.symbol.args().empty()) {
            if (auto it = values.find(std::string{term.symbol.name()}); it != values.end()) {
                term.symbol = it->second;
            }
        }
    };
    for (auto const &[name, value] : overrides) {
        values[name] = value;
    }
    for (auto const &stm : prg.statements) {
        if (auto const *def = std::get_if<Const>(&stm)) {
            if (std::any_of(overrides.begin(), overrides.end(), [&](auto const &o) { return o.first == def->name; })) {
                continue;
            }
            auto value = def->value;
            rewrite_term(value, replace);
            values[def->name] = eval_const_term(value);
        }
    }
    auto out = prg;
    if (!values.empty()) {
        rewrite_program(out, replace);
    }
    return out;
}

// {{{1 compiled terms

namespace {

struct CTerm {
    Term::Kind kind = Term::Kind::Symbol;
    Symbol sym;
    int var = -1;
    std::string name;
    bool theory = false;
    BinaryOp bop = BinaryOp::Add;
    UnaryOp uop = UnaryOp::Minus;
    std::vector<CTerm> args;
    //! Variables occurring inside arithmetic subterms.
    std::vector<int> arith_vars;
    std::vector<int> vars;
};

using VarMap = std::map<std::string, int>;

void add_var(std::vector<int> &vars, int var) {
    if (std::find(vars.begin(), vars.end(), var) == vars.end()) {
        vars.push_back(var);
    }
}

auto compile(Term const &term, VarMap &vars) -> CTerm {
    CTerm out;
    out.kind = term.kind;
    switch (term.kind) {
        case Term::Kind::Symbol: out.sym = term.symbol; break;
        case Term::Kind::Variable: {
            auto [it, inserted] = vars.emplace(term.name, static_cast<int>(vars.size()));
            out.var = it->second;
            out.vars.push_back(out.var);
            break;
        }
        default: {
            out.name = term.name;
            out.theory = term.theory;
            out.bop = term.binary_op;
            out.uop = term.unary_op;
            bool arith = term.kind != Term::Kind::Function;
            bool ground = true;
            for (auto const &arg : term.args) {
                auto c = compile(arg, vars);
                for (auto v : c.vars) {
                    add_var(out.vars, v);
                    if (arith) {
                        add_var(out.arith_vars, v);
                    }
                }
                for (auto v : c.arith_vars) {
                    add_var(out.arith_vars, v);
                }
                ground = ground && c.kind == Term::Kind::Symbol;
                out.args.push_back(std::move(c));
            }
            if (term.kind == Term::Kind::Function && ground) {
                SymbolVector syms;
                for (auto const &arg : out.args) {
                    syms.push_back(arg.sym);
                }
                out.kind = Term::Kind::Symbol;
                out.sym = Symbol::function(out.name, syms, out.theory);
                out.args.clear();
            }
            break;
        }
    }
    return out;
}

struct Env {
    std::vector<Symbol> values;
    std::vector<char> bound;
    std::vector<int> trail;

    explicit Env(std::size_t n = 0) : values(n), bound(n, 0) {}
    void bind(int var, Symbol sym) {
        values[var] = sym;
        bound[var] = 1;
        trail.push_back(var);
    }
    [[nodiscard]] auto mark() const -> std::size_t { return trail.size(); }
    void undo(std::size_t mark) {
        while (trail.size() > mark) {
            bound[trail.back()] = 0;
            trail.pop_back();
        }
    }
};

constexpr std::int64_t interval_limit = 10'000'000;

// Evaluates a term under a binding; intervals yield several values. Returns
// false if an arithmetic operation is undefined.
auto eval(CTerm const &term, Env const &env, std::vector<Symbol> &out) -> bool {
    switch (term.kind) {
        case Term::Kind::Symbol: out.push_back(term.sym); return true;
        case Term::Kind::Variable:
            if (!env.bound[term.var]) {
                throw GroundingError{"unbound variable during instantiation"};
            }
            out.push_back(env.values[term.var]);
            return true;
        case Term::Kind::Function: {
            std::vector<std::vector<Symbol>> vals(term.args.size());
            for (std::size_t i = 0; i < term.args.size(); ++i) {
                if (!eval(term.args[i], env, vals[i])) {
                    return false;
                }
            }
            SymbolVector cur(term.args.size());
            std::function<void(std::size_t)> rec = [&](std::size_t i) {
                if (i == term.args.size()) {
                    out.push_back(Symbol::function(term.name, cur, term.theory));
                    return;
                }
                for (auto sym : vals[i]) {
                    cur[i] = sym;
                    rec(i + 1);
                }
            };
            rec(0);
            return true;
        }
        case Term::Kind::Unary: {
            std::vector<Symbol> vals;
            if (!eval(term.args[0], env, vals)) {
                return false;
            }
            for (auto sym : vals) {
                if (!sym.is_number()) {
                    return false;
                }
                out.push_back(Symbol::number(term.uop == UnaryOp::Minus ? -sym.num() : std::abs(sym.num())));
            }
            return true;
        }
        case Term::Kind::Binary: {
            std::vector<Symbol> lhs;
            std::vector<Symbol> rhs;
            if (!eval(term.args[0], env, lhs) || !eval(term.args[1], env, rhs)) {
                return false;
            }
            for (auto a : lhs) {
                for (auto b : rhs) {
                    if (!a.is_number() || !b.is_number()) {
                        return false;
                    }
                    auto x = a.num();
                    auto y = b.num();
                    std::int64_t r = 0;
                    switch (term.bop) {
                        case BinaryOp::Add: r = x + y; break;
                        case BinaryOp::Sub: r = x - y; break;
                        case BinaryOp::Mul: r = x * y; break;
                        case BinaryOp::Div:
                            if (y == 0) {
                                return false;
                            }
                            r = x / y;
                            break;
                        case BinaryOp::Mod:
                            if (y == 0) {
                                return false;
                            }
                            r = x % y;
                            break;
                    }
                    out.push_back(Symbol::number(r));
                }
            }
            return true;
        }
        case Term::Kind::Interval: {
            std::vector<Symbol> lhs;
            std::vector<Symbol> rhs;
            if (!eval(term.args[0], env, lhs) || !eval(term.args[1], env, rhs)) {
                return false;
            }
            for (auto a : lhs) {
                for (auto b : rhs) {
                    if (!a.is_number() || !b.is_number()) {
                        return false;
                    }
                    if (b.num() - a.num() > interval_limit) {
                        throw ResourceError{"interval too large"};
                    }
                    for (auto i = a.num(); i <= b.num(); ++i) {
                        out.push_back(Symbol::number(i));
                    }
                }
            }
            return true;
        }
    }
    return false;
}

auto match(CTerm const &pat, Symbol sym, Env &env) -> bool {
    switch (pat.kind) {
        case Term::Kind::Symbol: return pat.sym == sym;
        case Term::Kind::Variable:
            if (env.bound[pat.var]) {
                return env.values[pat.var] == sym;
            }
            env.bind(pat.var, sym);
            return true;
        case Term::Kind::Function: {
            if (!sym.is_function() || sym.theory() != pat.theory || sym.name() != pat.name ||
                sym.args().size() != pat.args.size()) {
                return false;
            }
            auto args = sym.args();
            for (std::size_t i = 0; i < pat.args.size(); ++i) {
                if (!match(pat.args[i], args[i], env)) {
                    return false;
                }
            }
            return true;
        }
        default: {
            std::vector<Symbol> vals;
            if (!eval(pat, env, vals)) {
                return false;
            }
            return std::find(vals.begin(), vals.end(), sym) != vals.end();
        }
    }
}

auto compare(Relation rel, Symbol a, Symbol b) -> bool {
    auto cmp = a <=> b;
    switch (rel) {
        case Relation::Eq: return cmp == 0;
        case Relation::Neq: return cmp != 0;
        case Relation::Lt: return cmp < 0;
        case Relation::Leq: return cmp <= 0;
        case Relation::Gt: return cmp > 0;
        case Relation::Geq: return cmp >= 0;
    }
    return false;
}

auto negate(Relation rel) -> Relation {
    switch (rel) {
        case Relation::Eq: return Relation::Neq;
        case Relation::Neq: return Relation::Eq;
        case Relation::Lt: return Relation::Geq;
        case Relation::Leq: return Relation::Gt;
        case Relation::Gt: return Relation::Leq;
        case Relation::Geq: return Relation::Lt;
    }
    return rel;
}

auto eval_const_term(Term const &term) -> Symbol {
    VarMap vars;
    auto c = compile(term, vars);
    Env env{vars.size()};
    std::vector<Symbol> vals;
    if (!eval(c, env, vals) || vals.size() != 1) {
        throw GroundingError{"invalid constant definition " + format_term(term), term.loc};
    }
    return vals.front();
}

// {{{1 compiled rules

struct PredKey {
    std::string name;
    std::size_t arity = 0;
    bool theory = false;

    auto operator<=>(PredKey const &other) const = default;
};

auto pred_of(Term const &term) -> PredKey {
    if (term.kind == Term::Kind::Symbol) {
        return {std::string{term.symbol.name()}, term.symbol.args().size(), term.symbol.theory()};
    }
    return {term.name, term.args.size(), term.theory};
}

auto pred_of(Symbol sym) -> PredKey { return {std::string{sym.name()}, sym.args().size(), sym.theory()}; }

enum class LitType { Atom, Compare };

struct CLit {
    LitType type = LitType::Atom;
    bool positive = true;
    CTerm atom;
    int pred = -1;
    TheoryExpression const *expr = nullptr;
    Relation rel = Relation::Eq;
    CTerm lhs;
    CTerm rhs;
    std::vector<int> vars;
    Location loc;
};

struct CElem {
    CLit lit;
    std::vector<CLit> cond;
    bool conditional = false;
};

enum class Origin { Rule, External, ShowAtom, ShowTerm };

enum class StepKind { Atom, Compare, NegFilter };

struct Step {
    StepKind kind = StepKind::Atom;
    //! Index into the literal list the plan was built for.
    int lit = 0;
    //! Position among the positive atoms (for round ranges); -1 otherwise.
    int pos = -1;
};

struct CRule {
    Origin origin = Origin::Rule;
    HeadKind kind = HeadKind::Disjunction;
    std::vector<CElem> head;
    std::vector<CElem> body;
    //! Unconditional body literals used for joining.
    std::vector<CLit> join;
    int positives = 0;
    std::size_t nvars = 0;
    Location loc;
    bool domain = false;
    std::vector<std::vector<Step>> plans;
    std::string text;
};

struct PredStore {
    PredKey key;
    std::vector<Symbol> atoms;
    std::vector<std::uint32_t> rounds;
    std::unordered_map<Symbol, std::uint32_t> index;
    std::vector<std::unordered_map<Symbol, std::vector<std::uint32_t>>> by_arg;
    bool domain = true;
    bool defined = false;
};

struct Range {
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;
};

class Grounder {
public:
    Grounder(Program const &prg, GroundOptions const &options, std::span<Symbol const> facts)
        : prg_{prg}, options_{options} {
        for (auto sym : facts) {
            seed_.push_back(sym);
        }
    }

    auto run() -> GroundProgram {
        compile_program();
        classify_domains();
        for (auto &rule : rules_) {
            plan(rule);
        }
        for (auto sym : seed_) {
            auto pred = pred_id(pred_of(sym));
            insert(pred, sym, 0);
            fact_rules_.push_back(sym);
        }
        round_ = 1;
        // Domain predicates first: their extension is complete afterwards and
        // can be used to expand conditions.
        fixpoint(true);
        fixpoint(false);
        GroundProgram out;
        out.show_all = shows_all(prg_);
        finish(out);
        return out;
    }

private:
    // {{{2 compilation

    auto pred_id(PredKey const &key) -> int {
        auto [it, inserted] = pred_ids_.emplace(key, static_cast<int>(preds_.size()));
        if (inserted) {
            PredStore store;
            store.key = key;
            store.by_arg.resize(key.arity);
            preds_.push_back(std::move(store));
        }
        return it->second;
    }

    auto compile_literal(Literal const &lit, VarMap &vars) -> CLit {
        CLit out;
        out.positive = lit.sign == Sign::Positive;
        out.loc = lit.loc;
        if (lit.is_comparison()) {
            out.type = LitType::Compare;
            out.rel = out.positive ? lit.comparison().relation : negate(lit.comparison().relation);
            out.positive = true;
            out.lhs = compile(lit.comparison().lhs, vars);
            out.rhs = compile(lit.comparison().rhs, vars);
            out.vars = out.lhs.vars;
            for (auto v : out.rhs.vars) {
                add_var(out.vars, v);
            }
            return out;
        }
        auto term = lit.as_term();
        for (auto const &arg : term.args) {
            if (arg.kind == Term::Kind::Interval && !out.positive) {
                throw GroundingError{"interval in negative literal", lit.loc};
            }
        }
        out.atom = compile(term, vars);
        out.pred = pred_id(pred_of(term));
        out.vars = out.atom.vars;
        if (lit.is_theory()) {
            out.expr = &lit.theory();
        }
        return out;
    }

    auto compile_elements(std::vector<ConditionalLiteral> const &elems, VarMap &vars) -> std::vector<CElem> {
        std::vector<CElem> out;
        for (auto const &elem : elems) {
            CElem c;
            c.lit = compile_literal(elem.literal, vars);
            for (auto const &lit : elem.condition) {
                c.cond.push_back(compile_literal(lit, vars));
            }
            c.conditional = elem.conditional();
            out.push_back(std::move(c));
        }
        return out;
    }

    void compile_program() {
        for (auto const &stm : prg_.statements) {
            VarMap vars;
            CRule rule;
            if (auto const *r = std::get_if<Rule>(&stm)) {
                rule.kind = r->kind;
                rule.loc = r->loc;
                rule.text = format_statement(stm);
                rule.head = compile_elements(r->head, vars);
                rule.body = compile_elements(r->body, vars);
                if (r->kind == HeadKind::Disjunction && r->head.size() == 1 && r->head.front().literal.is_atom()) {
                    auto const &atom = r->head.front().literal.atom();
                    auto name = atom.kind == Term::Kind::Symbol ? std::string{atom.symbol.name()} : atom.name;
                    if (name == show_atom_predicate) {
                        rule.origin = Origin::ShowAtom;
                    } else if (name == show_term_predicate) {
                        rule.origin = Origin::ShowTerm;
                    }
                }
            } else if (auto const *ext = std::get_if<External>(&stm)) {
                rule.origin = Origin::External;
                rule.loc = ext->loc;
                rule.text = format_statement(stm);
                CElem head;
                head.lit = compile_literal(ext->atom, vars);
                rule.head.push_back(std::move(head));
                rule.body = compile_elements(ext->condition, vars);
            } else {
                continue;
            }
            rule.nvars = vars.size();
            for (auto const &elem : rule.body) {
                if (elem.conditional) {
                    continue;
                }
                rule.join.push_back(elem.lit);
                if (elem.lit.type == LitType::Atom && elem.lit.positive) {
                    ++rule.positives;
                }
            }
            rules_.push_back(std::move(rule));
        }
    }

    // A predicate is a domain predicate if all its defining rules are
    // normal rules whose bodies only use domain predicates positively.
    void classify_domains() {
        for (auto &rule : rules_) {
            if (rule.origin == Origin::ShowAtom || rule.origin == Origin::ShowTerm) {
                continue;
            }
            for (auto const &elem : rule.head) {
                auto &store = preds_[elem.lit.pred];
                store.defined = true;
                bool simple = rule.origin == Origin::Rule && rule.kind == HeadKind::Disjunction &&
                              rule.head.size() == 1 && !elem.conditional && elem.lit.positive &&
                              elem.lit.expr == nullptr;
                for (auto const &b : rule.body) {
                    if (b.conditional || (b.lit.type == LitType::Atom && (!b.lit.positive || b.lit.expr != nullptr))) {
                        simple = false;
                    }
                }
                if (!simple) {
                    store.domain = false;
                }
            }
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto &rule : rules_) {
                if (rule.origin != Origin::Rule || rule.head.size() != 1) {
                    continue;
                }
                auto &store = preds_[rule.head.front().lit.pred];
                if (!store.domain) {
                    continue;
                }
                for (auto const &b : rule.body) {
                    if (b.lit.type == LitType::Atom && !preds_[b.lit.pred].domain) {
                        store.domain = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
        for (auto &rule : rules_) {
            rule.domain = rule.origin == Origin::Rule && rule.head.size() == 1 && rule.kind == HeadKind::Disjunction &&
                          preds_[rule.head.front().lit.pred].domain;
            auto check_condition = [&](CElem const &elem, bool in_head) {
                for (auto const &lit : elem.cond) {
                    if (lit.type != LitType::Atom || preds_[lit.pred].domain) {
                        continue;
                    }
                    if (in_head && !lit.positive) {
                        continue;
                    }
                    throw GroundingError{"condition uses non-domain predicate " + preds_[lit.pred].key.name + "/" +
                                             std::to_string(preds_[lit.pred].key.arity) + " in: " + rule.text,
                                         rule.loc};
                }
            };
            for (auto const &elem : rule.body) {
                check_condition(elem, false);
            }
            for (auto const &elem : rule.head) {
                check_condition(elem, true);
            }
        }
    }

    // Orders the join literals so that every comparison and arithmetic
    // argument is evaluated only when its variables are bound.
    auto make_plan(std::vector<CLit> const &lits, std::vector<char> bound, int delta, Location const &loc,
                   std::string const &text, bool negative_filters) -> std::vector<Step> {
        std::vector<Step> plan;
        std::vector<char> used(lits.size(), 0);
        std::vector<int> pos(lits.size(), -1);
        int count = 0;
        for (std::size_t i = 0; i < lits.size(); ++i) {
            if (lits[i].type == LitType::Atom && lits[i].positive) {
                pos[i] = count++;
            }
        }
        auto all_bound = [&](std::vector<int> const &vars) {
            return std::all_of(vars.begin(), vars.end(), [&](int v) { return bound[v] != 0; });
        };
        std::size_t placed = 0;
        std::size_t total = 0;
        for (auto const &lit : lits) {
            if (lit.type == LitType::Compare || lit.positive || negative_filters) {
                ++total;
            }
        }
        while (placed < total) {
            bool progress = false;
            for (std::size_t i = 0; i < lits.size() && !progress; ++i) {
                auto const &lit = lits[i];
                if (used[i] != 0) {
                    continue;
                }
                if (lit.type == LitType::Compare) {
                    bool ready = all_bound(lit.vars);
                    int assign = -1;
                    if (!ready && lit.rel == Relation::Eq) {
                        if (lit.lhs.kind == Term::Kind::Variable && !bound[lit.lhs.var] && all_bound(lit.rhs.vars)) {
                            assign = lit.lhs.var;
                        } else if (lit.rhs.kind == Term::Kind::Variable && !bound[lit.rhs.var] &&
                                   all_bound(lit.lhs.vars)) {
                            assign = lit.rhs.var;
                        }
                    }
                    if (ready || assign >= 0) {
                        plan.push_back({StepKind::Compare, static_cast<int>(i), -1});
                        if (assign >= 0) {
                            bound[assign] = 1;
                        }
                        used[i] = 1;
                        ++placed;
                        progress = true;
                    }
                } else if (!lit.positive && negative_filters && all_bound(lit.vars)) {
                    plan.push_back({StepKind::NegFilter, static_cast<int>(i), -1});
                    used[i] = 1;
                    ++placed;
                    progress = true;
                }
            }
            if (progress) {
                continue;
            }
            int best = -1;
            int best_score = -1;
            for (std::size_t i = 0; i < lits.size(); ++i) {
                auto const &lit = lits[i];
                if (used[i] != 0 || lit.type != LitType::Atom || !lit.positive || !all_bound(lit.atom.arith_vars)) {
                    continue;
                }
                int score = 0;
                for (auto v : lit.vars) {
                    score += bound[v] != 0 ? 2 : 0;
                }
                if (pos[i] == delta) {
                    score += 1000;
                }
                if (score > best_score) {
                    best = static_cast<int>(i);
                    best_score = score;
                }
            }
            if (best < 0) {
                throw GroundingError{"cannot instantiate unsafe rule: " + text, loc};
            }
            plan.push_back({StepKind::Atom, best, pos[best]});
            used[best] = 1;
            ++placed;
            for (auto v : lits[best].vars) {
                bound[v] = 1;
            }
        }
        return plan;
    }

    void plan(CRule &rule) {
        std::vector<char> bound(rule.nvars, 0);
        auto deltas = std::max(rule.positives, 1);
        for (int d = 0; d < deltas; ++d) {
            rule.plans.push_back(make_plan(rule.join, bound, rule.positives == 0 ? -1 : d, rule.loc, rule.text, false));
        }
        // Everything outside conditions must be bound by the join.
        std::vector<char> after(rule.nvars, 0);
        for (auto const &step : rule.plans.front()) {
            auto const &lit = rule.join[step.lit];
            for (auto v : lit.vars) {
                after[v] = 1;
            }
        }
        auto check = [&](CLit const &lit) {
            for (auto v : lit.vars) {
                if (after[v] == 0) {
                    throw GroundingError{"unsafe variable in: " + rule.text, rule.loc};
                }
            }
        };
        for (auto const &elem : rule.body) {
            if (!elem.conditional) {
                check(elem.lit);
            }
        }
        for (auto const &elem : rule.head) {
            if (!elem.conditional) {
                check(elem.lit);
            }
        }
        for (auto &elem : rule.head) {
            prepare_condition(elem, after, rule, true);
        }
        for (auto &elem : rule.body) {
            prepare_condition(elem, after, rule, false);
        }
    }

    struct ConditionPlan {
        std::vector<CLit> lits;
        std::vector<Step> steps;
        std::vector<CLit> guards;
    };

    std::map<CElem const *, ConditionPlan> condition_plans_;

    void prepare_condition(CElem const &elem, std::vector<char> const &bound, CRule const &rule, bool in_head) {
        if (!elem.conditional) {
            return;
        }
        ConditionPlan cp;
        for (auto const &lit : elem.cond) {
            if (in_head && lit.type == LitType::Atom && !lit.positive && !preds_[lit.pred].domain) {
                cp.guards.push_back(lit);
            } else {
                cp.lits.push_back(lit);
            }
        }
        if (cp.guards.size() > 1) {
            throw GroundingError{"at most one non-domain negative literal per head condition: " + rule.text, rule.loc};
        }
        cp.steps = make_plan(cp.lits, bound, -1, rule.loc, rule.text, true);
        std::vector<char> after = bound;
        for (auto const &lit : cp.lits) {
            for (auto v : lit.vars) {
                after[v] = 1;
            }
        }
        for (auto const *lit : {&elem.lit}) {
            for (auto v : lit->vars) {
                if (after[v] == 0) {
                    throw GroundingError{"unsafe variable in conditional literal: " + rule.text, rule.loc};
                }
            }
        }
        for (auto const &g : cp.guards) {
            for (auto v : g.vars) {
                if (after[v] == 0) {
                    throw GroundingError{"unsafe variable in conditional literal: " + rule.text, rule.loc};
                }
            }
        }
        condition_plans_.emplace(&elem, std::move(cp));
    }

    // {{{2 atom store

    auto insert(int pred, Symbol sym, std::uint32_t round) -> bool {
        auto &store = preds_[pred];
        auto [pos, inserted] = store.index.emplace(sym, static_cast<std::uint32_t>(store.atoms.size()));
        if (!inserted) {
            return false;
        }
        if (sym.depth() - 1 > options_.depth_limit) {
            throw GroundingError{"term nesting depth limit of " + std::to_string(options_.depth_limit) +
                                 " exceeded by " + sym.to_string()};
        }
        auto idx = static_cast<std::uint32_t>(store.atoms.size());
        store.atoms.push_back(sym);
        store.rounds.push_back(round);
        auto args = sym.args();
        for (std::size_t i = 0; i < args.size() && i < store.by_arg.size(); ++i) {
            store.by_arg[i][args[i]].push_back(idx);
        }
        return true;
    }

    [[nodiscard]] auto contains(int pred, Symbol sym) const -> bool { return preds_[pred].index.count(sym) > 0; }

    // {{{2 joins

    template <class F>
    void join_atom(CLit const &lit, Range range, Env &env, F &&next) {
        auto const &store = preds_[lit.pred];
        if (lit.atom.kind == Term::Kind::Symbol) {
            auto it = store.index.find(lit.atom.sym);
            if (it == store.index.end()) {
                return;
            }
            auto round = store.rounds[it->second];
            if (round >= range.lo && round <= range.hi) {
                next();
            }
            return;
        }
        std::vector<std::uint32_t> const *candidates = nullptr;
        std::vector<Symbol> key;
        for (std::size_t i = 0; i < lit.atom.args.size(); ++i) {
            auto const &arg = lit.atom.args[i];
            bool ground = std::all_of(arg.vars.begin(), arg.vars.end(), [&](int v) { return env.bound[v] != 0; });
            if (!ground || arg.kind == Term::Kind::Interval) {
                continue;
            }
            key.clear();
            if (!eval(arg, env, key) || key.size() != 1) {
                continue;
            }
            auto it = store.by_arg[i].find(key.front());
            if (it == store.by_arg[i].end()) {
                return;
            }
            if (candidates == nullptr || it->second.size() < candidates->size()) {
                candidates = &it->second;
            }
        }
        auto visit = [&](std::uint32_t idx) {
            auto round = store.rounds[idx];
            if (round < range.lo || round > range.hi) {
                return;
            }
            auto mark = env.mark();
            if (match(lit.atom, store.atoms[idx], env)) {
                next();
            }
            env.undo(mark);
        };
        if (candidates != nullptr) {
            for (auto idx : *candidates) {
                visit(idx);
            }
        } else {
            for (std::uint32_t idx = 0; idx < store.atoms.size(); ++idx) {
                visit(idx);
            }
        }
    }

    template <class F> void join_compare(CLit const &lit, Env &env, F &&next) {
        auto lhs_free = lit.lhs.kind == Term::Kind::Variable && !env.bound[lit.lhs.var];
        auto rhs_free = lit.rhs.kind == Term::Kind::Variable && !env.bound[lit.rhs.var];
        if (lhs_free || rhs_free) {
            auto const &var = lhs_free ? lit.lhs : lit.rhs;
            auto const &other = lhs_free ? lit.rhs : lit.lhs;
            std::vector<Symbol> vals;
            if (!eval(other, env, vals)) {
                ++dropped_;
                return;
            }
            for (auto sym : vals) {
                auto mark = env.mark();
                env.bind(var.var, sym);
                next();
                env.undo(mark);
            }
            return;
        }
        std::vector<Symbol> lhs;
        std::vector<Symbol> rhs;
        if (!eval(lit.lhs, env, lhs) || !eval(lit.rhs, env, rhs)) {
            ++dropped_;
            return;
        }
        for (auto a : lhs) {
            for (auto b : rhs) {
                if (compare(lit.rel, a, b)) {
                    next();
                    return;
                }
            }
        }
    }

    // Runs the steps of a plan; `ranges` gives the admissible rounds for
    // positive atom positions.
    template <class F>
    void run_plan(std::vector<CLit> const &lits, std::vector<Step> const &steps, std::size_t i,
                  std::function<Range(int)> const &range, Env &env, F &fun) {
        if (i == steps.size()) {
            fun();
            return;
        }
        auto const &step = steps[i];
        auto const &lit = lits[step.lit];
        auto next = [&]() { run_plan(lits, steps, i + 1, range, env, fun); };
        switch (step.kind) {
            case StepKind::Atom: join_atom(lit, range(step.pos), env, next); break;
            case StepKind::Compare: join_compare(lit, env, next); break;
            case StepKind::NegFilter: {
                std::vector<Symbol> vals;
                if (!eval(lit.atom, env, vals)) {
                    ++dropped_;
                    return;
                }
                if (std::none_of(vals.begin(), vals.end(), [&](Symbol s) { return contains(lit.pred, s); })) {
                    next();
                }
                break;
            }
        }
    }

    // {{{2 fixpoint

    void fixpoint(bool domain) {
        bool first = true;
        std::uint32_t delta_lo = 0;
        while (true) {
            auto delta_hi = round_ - 1;
            for (auto &rule : rules_) {
                if (rule.domain != domain) {
                    continue;
                }
                if (rule.positives == 0) {
                    if (first) {
                        Env env{rule.nvars};
                        auto all = [&](int) { return Range{0, delta_hi}; };
                        auto fun = [&]() { instance(rule, env); };
                        run_plan(rule.join, rule.plans.front(), 0, all, env, fun);
                    }
                    continue;
                }
                for (int d = 0; d < rule.positives; ++d) {
                    Env env{rule.nvars};
                    auto range = [&](int pos) -> Range {
                        if (pos < d) {
                            return delta_lo == 0 ? Range{1, 0} : Range{0, delta_lo - 1};
                        }
                        if (pos == d) {
                            return Range{delta_lo, delta_hi};
                        }
                        return Range{0, delta_hi};
                    };
                    auto fun = [&]() { instance(rule, env); };
                    run_plan(rule.join, rule.plans[d], 0, range, env, fun);
                }
            }
            first = false;
            bool added = false;
            for (auto const &[pred, sym] : pending_) {
                added = insert(pred, sym, round_) || added;
            }
            pending_.clear();
            if (!added) {
                break;
            }
            delta_lo = round_;
            ++round_;
        }
    }

    // Enumerates the instances of a condition under the current binding.
    template <class F> void expand_condition(CElem const &elem, Env &env, F &&fun) {
        auto const &cp = condition_plans_.at(&elem);
        auto all = [&](int) { return Range{0, round_}; };
        auto inner = [&]() { fun(); };
        run_plan(cp.lits, cp.steps, 0, all, env, inner);
    }

    auto eval_atom(CLit const &lit, Env const &env, std::vector<Symbol> &out) -> bool {
        if (!eval(lit.atom, env, out)) {
            ++dropped_;
            return false;
        }
        return true;
    }

    void record_expression(CLit const &lit, Symbol sym) {
        if (lit.expr != nullptr && expressions_.find(sym) == expressions_.end()) {
            expressions_.emplace(sym, attach(*lit.expr, sym));
        }
    }

    static auto attach(TheoryExpression const &expr, Symbol sym) -> TheoryExpression {
        auto out = expr;
        if (expr.leaf) {
            out.leaf = Term::make_symbol(sym, expr.leaf->loc);
            return out;
        }
        auto args = sym.args();
        for (std::size_t i = 0; i < out.args.size() && i < args.size(); ++i) {
            out.args[i] = attach(expr.args[i], args[i]);
        }
        return out;
    }

    struct HeadAtom {
        Symbol atom;
        std::optional<Symbol> guard;
    };

    void instance(CRule const &rule, Env &env) {
        // Heads (with conditions expanded over the domain).
        std::vector<HeadAtom> heads;
        std::vector<Symbol> vals;
        for (auto const &elem : rule.head) {
            if (!elem.conditional) {
                vals.clear();
                if (!eval_atom(elem.lit, env, vals)) {
                    return;
                }
                for (auto sym : vals) {
                    heads.push_back({sym, std::nullopt});
                    record_expression(elem.lit, sym);
                }
                continue;
            }
            auto const &cp = condition_plans_.at(&elem);
            bool ok = true;
            expand_condition(elem, env, [&]() {
                std::vector<Symbol> hv;
                if (!eval_atom(elem.lit, env, hv)) {
                    return;
                }
                std::optional<Symbol> guard;
                if (!cp.guards.empty()) {
                    std::vector<Symbol> gv;
                    if (!eval_atom(cp.guards.front(), env, gv) || gv.size() != 1) {
                        ok = false;
                        return;
                    }
                    guard = gv.front();
                }
                for (auto sym : hv) {
                    heads.push_back({sym, guard});
                    record_expression(elem.lit, sym);
                }
            });
            if (!ok) {
                return;
            }
        }
        if (rule.origin == Origin::Rule || rule.origin == Origin::External) {
            for (auto const &h : heads) {
                pending_.emplace_back(pred_id(pred_of(h.atom)), h.atom);
            }
        }
        if (rule.domain) {
            for (auto const &h : heads) {
                fact_rules_.push_back(h.atom);
            }
            return;
        }
        if (rule.origin == Origin::External) {
            for (auto const &h : heads) {
                externals_.insert(h.atom);
            }
            return;
        }
        // Body.
        std::vector<GroundLiteral> body;
        for (auto const &elem : rule.body) {
            if (!elem.conditional) {
                if (elem.lit.type == LitType::Compare) {
                    continue;
                }
                vals.clear();
                if (!eval_atom(elem.lit, env, vals)) {
                    return;
                }
                if (vals.size() != 1) {
                    throw GroundingError{"interval in rule body: " + rule.text, rule.loc};
                }
                body.push_back({vals.front(), elem.lit.positive});
                record_expression(elem.lit, vals.front());
                continue;
            }
            if (elem.lit.type == LitType::Compare) {
                throw GroundingError{"comparison as conditional literal: " + rule.text, rule.loc};
            }
            bool ok = true;
            expand_condition(elem, env, [&]() {
                std::vector<Symbol> bv;
                if (!eval_atom(elem.lit, env, bv) || bv.size() != 1) {
                    ok = false;
                    return;
                }
                body.push_back({bv.front(), elem.lit.positive});
                record_expression(elem.lit, bv.front());
            });
            if (!ok) {
                return;
            }
        }
        std::sort(body.begin(), body.end());
        body.erase(std::unique(body.begin(), body.end()), body.end());
        if (rule.origin == Origin::ShowAtom || rule.origin == Origin::ShowTerm) {
            for (auto const &h : heads) {
                GroundShow show;
                show.term = h.atom.args().front();
                show.atom = rule.origin == Origin::ShowAtom;
                show.condition = body;
                shows_.push_back(std::move(show));
            }
            return;
        }
        emit(rule, heads, std::move(body));
    }

    void emit(CRule const &rule, std::vector<HeadAtom> const &heads, std::vector<GroundLiteral> body) {
        std::vector<Symbol> plain;
        std::vector<HeadAtom> guarded;
        for (auto const &h : heads) {
            if (h.guard) {
                guarded.push_back(h);
            } else {
                plain.push_back(h.atom);
            }
        }
        if (rule.kind == HeadKind::Choice) {
            if (!plain.empty()) {
                add_rule(GroundRule{true, plain, body});
            }
            for (auto const &h : guarded) {
                auto b = body;
                b.push_back({*h.guard, false});
                add_rule(GroundRule{true, {h.atom}, std::move(b)});
            }
            return;
        }
        if (guarded.empty()) {
            if (rule.kind == HeadKind::Disjunction && rule.head.size() == 1 && !rule.head.front().conditional &&
                plain.size() > 1) {
                // An interval in a single head atom yields one rule per value.
                for (auto sym : plain) {
                    add_rule(GroundRule{false, {sym}, body});
                }
                return;
            }
            add_rule(GroundRule{false, plain, std::move(body)});
            return;
        }
        if (guarded.size() > 16) {
            throw GroundingError{"too many guarded head elements in: " + rule.text, rule.loc};
        }
        // B -> OR{h_j : not g_j} becomes one rule per subset S of guarded
        // elements: head U + {h_j : j in S}, body B + {g_j : j not in S}.
        auto count = std::size_t{1} << guarded.size();
        for (std::size_t mask = 0; mask < count; ++mask) {
            auto head = plain;
            auto b = body;
            for (std::size_t j = 0; j < guarded.size(); ++j) {
                if ((mask >> j) & 1U) {
                    head.push_back(guarded[j].atom);
                } else {
                    b.push_back({*guarded[j].guard, true});
                }
            }
            add_rule(GroundRule{false, std::move(head), std::move(b)});
        }
    }

    void add_rule(GroundRule rule) {
        std::sort(rule.head.begin(), rule.head.end());
        rule.head.erase(std::unique(rule.head.begin(), rule.head.end()), rule.head.end());
        std::sort(rule.body.begin(), rule.body.end());
        rule.body.erase(std::unique(rule.body.begin(), rule.body.end()), rule.body.end());
        ground_rules_.push_back(std::move(rule));
    }

    // {{{2 simplification

    void finish(GroundProgram &out) {
        for (auto sym : fact_rules_) {
            ground_rules_.push_back(GroundRule{false, {sym}, {}});
        }
        std::sort(ground_rules_.begin(), ground_rules_.end());
        ground_rules_.erase(std::unique(ground_rules_.begin(), ground_rules_.end()), ground_rules_.end());
        std::unordered_set<Symbol> possible;
        std::unordered_set<Symbol> facts;
        if (options_.simplify) {
            simplify(possible, facts);
        } else {
            for (auto const &rule : ground_rules_) {
                if (!rule.choice && rule.head.size() == 1 && rule.body.empty()) {
                    facts.insert(rule.head.front());
                }
                for (auto sym : rule.head) {
                    possible.insert(sym);
                }
            }
            possible.insert(externals_.begin(), externals_.end());
        }
        std::set<Symbol> table;
        for (auto const &rule : ground_rules_) {
            table.insert(rule.head.begin(), rule.head.end());
            for (auto const &lit : rule.body) {
                table.insert(lit.atom);
            }
        }
        table.insert(externals_.begin(), externals_.end());
        out.rules = std::move(ground_rules_);
        out.facts.assign(facts.begin(), facts.end());
        std::sort(out.facts.begin(), out.facts.end());
        out.externals.assign(externals_.begin(), externals_.end());
        std::sort(out.externals.begin(), out.externals.end());
        out.atoms.assign(table.begin(), table.end());
        for (auto sym : out.atoms) {
            if (auto it = expressions_.find(sym); it != expressions_.end()) {
                out.expressions.emplace(sym, it->second);
            }
        }
        for (auto &show : shows_) {
            if (options_.simplify && !simplify_body(show.condition, possible, facts)) {
                continue;
            }
            out.shows.push_back(std::move(show));
        }
        std::sort(out.shows.begin(), out.shows.end());
        out.shows.erase(std::unique(out.shows.begin(), out.shows.end()), out.shows.end());
        out.dropped_instances = dropped_;
    }

    // Returns false if the body can never hold.
    static auto simplify_body(std::vector<GroundLiteral> &body, std::unordered_set<Symbol> const &possible,
                              std::unordered_set<Symbol> const &facts) -> bool {
        std::vector<GroundLiteral> kept;
        for (auto const &lit : body) {
            if (lit.positive) {
                if (possible.count(lit.atom) == 0) {
                    return false;
                }
                if (facts.count(lit.atom) > 0) {
                    continue;
                }
            } else {
                if (facts.count(lit.atom) > 0) {
                    return false;
                }
                if (possible.count(lit.atom) == 0) {
                    continue;
                }
            }
            kept.push_back(lit);
        }
        body = std::move(kept);
        return true;
    }

    void simplify(std::unordered_set<Symbol> &possible, std::unordered_set<Symbol> &facts) {
        std::vector<char> alive(ground_rules_.size(), 1);
        bool changed = true;
        while (changed) {
            changed = false;
            possible.clear();
            possible.insert(externals_.begin(), externals_.end());
            for (std::size_t i = 0; i < ground_rules_.size(); ++i) {
                if (alive[i] != 0) {
                    possible.insert(ground_rules_[i].head.begin(), ground_rules_[i].head.end());
                }
            }
            compute_facts(alive, possible, facts);
            for (std::size_t i = 0; i < ground_rules_.size(); ++i) {
                if (alive[i] == 0) {
                    continue;
                }
                auto &rule = ground_rules_[i];
                auto size = rule.body.size();
                if (!simplify_body(rule.body, possible, facts)) {
                    alive[i] = 0;
                    changed = true;
                    continue;
                }
                if (rule.body.size() != size) {
                    changed = true;
                }
                bool is_fact_rule = !rule.choice && rule.head.size() == 1 && rule.body.empty();
                if (rule.choice) {
                    auto before = rule.head.size();
                    rule.head.erase(std::remove_if(rule.head.begin(), rule.head.end(),
                                                   [&](Symbol s) { return facts.count(s) > 0; }),
                                    rule.head.end());
                    if (rule.head.size() != before) {
                        changed = true;
                    }
                    if (rule.head.empty()) {
                        alive[i] = 0;
                        changed = true;
                    }
                } else if (!is_fact_rule &&
                           std::any_of(rule.head.begin(), rule.head.end(), [&](Symbol s) { return facts.count(s) > 0; })) {
                    alive[i] = 0;
                    changed = true;
                }
            }
        }
        std::vector<GroundRule> kept;
        for (std::size_t i = 0; i < ground_rules_.size(); ++i) {
            if (alive[i] != 0) {
                kept.push_back(std::move(ground_rules_[i]));
            }
        }
        std::sort(kept.begin(), kept.end());
        kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
        ground_rules_ = std::move(kept);
    }

    void compute_facts(std::vector<char> const &alive, std::unordered_set<Symbol> const &possible,
                       std::unordered_set<Symbol> &facts) {
        // Facts only grow; they are sound consequences of the original program.
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < ground_rules_.size(); ++i) {
                auto const &rule = ground_rules_[i];
                if (alive[i] == 0 || rule.choice || rule.head.size() != 1 || facts.count(rule.head.front()) > 0) {
                    continue;
                }
                bool ok = std::all_of(rule.body.begin(), rule.body.end(), [&](GroundLiteral const &lit) {
                    return lit.positive ? facts.count(lit.atom) > 0 : possible.count(lit.atom) == 0;
                });
                if (ok) {
                    facts.insert(rule.head.front());
                    changed = true;
                }
            }
        }
    }

    // }}}2

    Program const &prg_;
    GroundOptions const &options_;
    std::vector<Symbol> seed_;
    std::vector<CRule> rules_;
    std::map<PredKey, int> pred_ids_;
    std::vector<PredStore> preds_;
    std::vector<std::pair<int, Symbol>> pending_;
    std::uint32_t round_ = 0;
    std::vector<GroundRule> ground_rules_;
    std::vector<Symbol> fact_rules_;
    std::unordered_set<Symbol> externals_;
    std::map<Symbol, TheoryExpression> expressions_;
    std::vector<GroundShow> shows_;
    std::size_t dropped_ = 0;
};

} // namespace

auto ground(Program const &prg, GroundOptions const &options, std::span<Symbol const> facts) -> GroundProgram {
    auto substituted = substitute_constants(prg, options.constants);
    Grounder grounder{substituted, options, facts};
    return grounder.run();
}

auto format_ground(GroundProgram const &gp) -> std::string {
    std::string out;
    auto lit_text = [](GroundLiteral const &lit) { return (lit.positive ? "" : "not ") + lit.atom.to_string(); };
    for (auto const &rule : gp.rules) {
        std::string head;
        for (std::size_t i = 0; i < rule.head.size(); ++i) {
            if (i > 0) {
                head += "; ";
            }
            head += rule.head[i].to_string();
        }
        if (rule.choice) {
            head = "{" + head + "}";
        }
        out += head;
        if (!rule.body.empty()) {
            out += head.empty() ? ":- " : " :- ";
            for (std::size_t i = 0; i < rule.body.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                out += lit_text(rule.body[i]);
            }
        } else if (head.empty()) {
            out += ":-";
        }
        out += ".\n";
    }
    for (auto sym : gp.externals) {
        out += "#external " + sym.to_string() + ".\n";
    }
    return out;
}

} // namespace tmeta

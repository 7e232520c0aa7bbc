// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/transform.hh>

#include <algorithm>

namespace tmeta {

namespace {

void add_unique(std::vector<Term> &out, Term const &term) {
    if (std::find(out.begin(), out.end(), term) == out.end()) {
        out.push_back(term);
    }
}

void add_unique(std::vector<std::string> &out, std::string const &name) {
    if (std::find(out.begin(), out.end(), name) == out.end()) {
        out.push_back(name);
    }
}

auto contains(std::vector<std::string> const &vars, std::string const &name) -> bool {
    return std::find(vars.begin(), vars.end(), name) != vars.end();
}

auto variables_of(Literal const &lit) -> std::vector<std::string> {
    std::vector<std::string> vars;
    if (lit.is_comparison()) {
        lit.comparison().lhs.collect_variables(vars);
        lit.comparison().rhs.collect_variables(vars);
    } else if (lit.is_theory()) {
        lit.theory().collect_variables(vars);
    } else {
        lit.atom().collect_variables(vars);
    }
    return vars;
}

auto variables_of(ConditionalLiteral const &elem) -> std::vector<std::string> {
    auto vars = variables_of(elem.literal);
    for (auto const &lit : elem.condition) {
        for (auto const &var : variables_of(lit)) {
            add_unique(vars, var);
        }
    }
    return vars;
}

// Safe atom occurrences contributed by a single (unconditional) literal.
void literal_safe_atoms(Literal const &lit, TheoryGrammar const &grammar, std::vector<Term> &out) {
    if (lit.sign != Sign::Positive) {
        return;
    }
    if (lit.is_atom()) {
        add_unique(out, lit.atom());
    } else if (lit.is_theory()) {
        collect_safe_atoms(lit.theory(), grammar, out);
    }
}

// Extends `bound` with variables fixed by the given atoms and by equations
// whose other side is already bound.
void close_bindings(std::vector<Term> const &atoms, std::vector<Literal> const &literals, std::vector<std::string> &bound) {
    for (auto const &atom : atoms) {
        atom.collect_variables(bound);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto const &lit : literals) {
            if (!lit.is_comparison() || lit.sign != Sign::Positive || lit.comparison().relation != Relation::Eq) {
                continue;
            }
            auto const &cmp = lit.comparison();
            for (auto const *side : {&cmp.lhs, &cmp.rhs}) {
                auto const *other = side == &cmp.lhs ? &cmp.rhs : &cmp.lhs;
                if (side->kind != Term::Kind::Variable || contains(bound, side->name)) {
                    continue;
                }
                std::vector<std::string> vars;
                other->collect_variables(vars);
                if (std::all_of(vars.begin(), vars.end(), [&](auto const &v) { return contains(bound, v); })) {
                    bound.push_back(side->name);
                    changed = true;
                }
            }
        }
    }
}

// Positive atoms of a condition (which bind the local variables of a
// conditional literal).
auto condition_atoms(std::vector<Literal> const &condition, TheoryGrammar const &grammar) -> std::vector<Term> {
    std::vector<Term> atoms;
    for (auto const &lit : condition) {
        literal_safe_atoms(lit, grammar, atoms);
    }
    return atoms;
}

void check_element(ConditionalLiteral const &elem, TheoryGrammar const &grammar, std::vector<std::string> const &bound,
                   std::vector<std::string> &unbound) {
    auto local = bound;
    close_bindings(condition_atoms(elem.condition, grammar), elem.condition, local);
    for (auto const &var : variables_of(elem)) {
        if (!contains(local, var)) {
            add_unique(unbound, var);
        }
    }
}

auto describe_unsafe(Rule const &rule, SafetyReport const &report) -> std::string {
    std::string vars;
    for (auto const &var : report.unbound) {
        if (!vars.empty()) {
            vars += ", ";
        }
        vars += var;
    }
    auto text = format_statement(rule);
    return "unsafe variables " + vars + " in: " + text;
}

auto elements_to_literals(std::vector<Term> const &atoms) -> std::vector<ConditionalLiteral> {
    std::vector<ConditionalLiteral> out;
    out.reserve(atoms.size());
    for (auto const &atom : atoms) {
        ConditionalLiteral elem;
        elem.literal.payload = atom;
        elem.literal.loc = atom.loc;
        out.push_back(std::move(elem));
    }
    return out;
}

void collect_atoms(TheoryExpression const &expr, std::vector<Term> &out) {
    if (expr.leaf) {
        if (expr.leaf->is_atom()) {
            add_unique(out, *expr.leaf);
        }
        return;
    }
    for (auto const &arg : expr.args) {
        collect_atoms(arg, out);
    }
}

void add_external(Program &prg, std::vector<External> &seen, External ext) {
    auto same = [&](External const &other) { return other == ext; };
    if (std::find_if(seen.begin(), seen.end(), same) != seen.end()) {
        return;
    }
    seen.push_back(ext);
    prg.statements.emplace_back(std::move(ext));
}

} // namespace

void collect_safe_atoms(TheoryExpression const &expr, TheoryGrammar const &grammar, std::vector<Term> &out) {
    if (expr.leaf) {
        if (expr.leaf->is_atom()) {
            add_unique(out, *expr.leaf);
        }
        return;
    }
    ExpressionSpec const *spec = nullptr;
    if (expr.assigned_type) {
        spec = grammar.find_spec(*expr.assigned_type, expr.op, expr.arity());
    }
    if (spec == nullptr) {
        return;
    }
    for (std::size_t i = 0; i < expr.args.size(); ++i) {
        if (spec->args[i].safe) {
            collect_safe_atoms(expr.args[i], grammar, out);
        }
    }
}

auto classify_safety(Rule const &rule, TheoryGrammar const &grammar) -> SafetyReport {
    SafetyReport report;
    std::vector<Literal> plain;
    for (auto const &elem : rule.body) {
        if (!elem.conditional()) {
            literal_safe_atoms(elem.literal, grammar, report.safe_atoms);
            plain.push_back(elem.literal);
        }
    }
    close_bindings(report.safe_atoms, plain, report.bound);
    for (auto const &elem : rule.body) {
        check_element(elem, grammar, report.bound, report.unbound);
    }
    for (auto const &elem : rule.head) {
        check_element(elem, grammar, report.bound, report.unbound);
    }
    return report;
}

auto inject_externals(Program const &prg, TheoryGrammar const &grammar) -> Program {
    Program out = prg;
    std::vector<External> seen;
    for (auto const &stm : prg.statements) {
        if (auto const *ext = std::get_if<External>(&stm)) {
            seen.push_back(*ext);
        }
    }
    for (auto const &stm : prg.statements) {
        auto const *rule = std::get_if<Rule>(&stm);
        if (rule == nullptr) {
            continue;
        }
        auto report = classify_safety(*rule, grammar);
        if (!report.safe()) {
            throw SafetyError{describe_unsafe(*rule, report), rule->loc};
        }
        auto condition_for = [&](ConditionalLiteral const &elem) {
            auto atoms = report.safe_atoms;
            for (auto const &atom : condition_atoms(elem.condition, grammar)) {
                add_unique(atoms, atom);
            }
            return elements_to_literals(atoms);
        };
        // Kind 1: every theory expression occurring in the body.
        for (auto const &elem : rule->body) {
            auto protect = [&](Literal const &lit) {
                if (!lit.is_theory()) {
                    return;
                }
                External ext;
                ext.atom.payload = lit.theory();
                ext.atom.loc = lit.loc;
                ext.condition = condition_for(elem);
                ext.loc = lit.loc;
                add_external(out, seen, std::move(ext));
            };
            protect(elem.literal);
            for (auto const &lit : elem.condition) {
                protect(lit);
            }
        }
        // Kind 2: atoms nested in head expressions.
        for (auto const &elem : rule->head) {
            if (!elem.literal.is_theory() || elem.literal.sign != Sign::Positive) {
                continue;
            }
            std::vector<Term> atoms;
            collect_atoms(elem.literal.theory(), atoms);
            for (auto const &atom : atoms) {
                External ext;
                ext.atom.payload = atom;
                ext.atom.loc = atom.loc;
                ext.condition = condition_for(elem);
                ext.loc = elem.literal.loc;
                add_external(out, seen, std::move(ext));
            }
        }
    }
    return out;
}

auto rewrite_shows(Program const &prg) -> Program {
    Program out;
    bool any = false;
    for (auto const &stm : prg.statements) {
        auto const *show = std::get_if<Show>(&stm);
        if (show == nullptr) {
            out.statements.push_back(stm);
            continue;
        }
        any = true;
        if (show->signature && show->signature->name.empty()) {
            continue;
        }
        Rule rule;
        rule.kind = HeadKind::Disjunction;
        rule.loc = show->loc;
        rule.internal = true;
        Term shown;
        if (show->signature) {
            std::vector<Term> args;
            for (int i = 0; i < show->signature->arity; ++i) {
                args.push_back(Term::make_variable("X" + std::to_string(i), show->loc));
            }
            shown = args.empty() ? Term::make_symbol(Symbol::function(show->signature->name), show->loc)
                                 : Term::make_function(show->signature->name, std::move(args), false, show->loc);
            ConditionalLiteral body;
            body.literal.payload = shown;
            body.literal.loc = show->loc;
            rule.body.push_back(std::move(body));
            ConditionalLiteral head;
            head.literal.payload = Term::make_function(show_atom_predicate, {shown}, false, show->loc);
            head.literal.loc = show->loc;
            rule.head.push_back(std::move(head));
        } else {
            ConditionalLiteral head;
            head.literal.payload = Term::make_function(show_term_predicate, {*show->term}, false, show->loc);
            head.literal.loc = show->loc;
            rule.head.push_back(std::move(head));
            rule.body = show->condition;
        }
        out.statements.emplace_back(std::move(rule));
    }
    if (any) {
        Show marker;
        marker.signature = Signature{"", 0};
        out.statements.emplace_back(std::move(marker));
    }
    return out;
}

auto shows_all(Program const &prg) -> bool {
    for (auto const &stm : prg.statements) {
        if (std::holds_alternative<Show>(stm)) {
            return false;
        }
    }
    return true;
}

auto transform(Program const &prg, TheoryGrammar const &grammar) -> Program {
    auto typed = grammar.typecheck_program(prg);
    auto diags = grammar.check_occurrence(typed);
    if (!diags.empty()) {
        throw TypeError{diags.front().message, diags.front().loc};
    }
    return inject_externals(rewrite_shows(typed), grammar);
}

} // namespace tmeta

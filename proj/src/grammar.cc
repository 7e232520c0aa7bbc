// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/grammar.hh>

#include <algorithm>
#include <functional>
#include <set>

namespace tmeta {

namespace {

using detail::Reader;
using detail::TokenKind;

constexpr std::string_view tel_grammar = R"(#type tel {
    subtypes: atom.
    expressions: &true; &not(tel); &initial; &next(tel : safe); &eventually(tel : safe).
    occurrence: any.
    macros: &final => &not(&next(&true)).
}
)";

constexpr std::string_view mel_grammar = R"(#type mel {
    subtypes: atom.
    expressions: &true; &not(mel); &initial; &next(interval, mel : safe); &eventually(interval, mel : safe).
    occurrence: any.
    macros: &next(f) => &next(&i(0,#sup),f) where f: mel;
            &eventually(f) => &eventually(&i(0,#sup),f) where f: mel;
            &final => &not(&next(&true)).
}
#type interval {
    expressions: &i(number, ub).
}
#type ub {
    subtypes: number, supremum.
}
)";

constexpr std::string_view del_grammar = R"(#type tel {
    subtypes: atom.
    expressions: &true; &not(tel); &initial; &next(tel : safe); &eventually(tel : safe).
    occurrence: any.
    macros: &final => &not(&next(&true)).
}
#type del {
    subtypes: tel.
    expressions: &eventually(path, del : safe); &always(path, del).
    occurrence: any.
}
#type path {
    expressions: &test(del); &step; &seq(path, path); &choice(path, path); &star(path).
    macros: a => &seq(&test(a),&step) where a: atom.
}
)";

auto predefined_types() -> std::vector<std::string> { return {"atom", "number", "string", "infimum", "supremum"}; }

auto parse_occurrence(std::string const &name, Location const &loc) -> Occurrence {
    if (name == "any") {
        return Occurrence::Any;
    }
    if (name == "head") {
        return Occurrence::Head;
    }
    if (name == "body") {
        return Occurrence::Body;
    }
    if (name == "directive") {
        return Occurrence::Directive;
    }
    if (name == "argument_only") {
        return Occurrence::ArgumentOnly;
    }
    throw TypeError{"unknown occurrence '" + name + "'", loc};
}

// Reads one `#type name { ... }` block.
class TypeBlockParser : public Reader {
public:
    using Reader::Reader;

    auto parse() -> std::pair<TypeSpec, Location> {
        auto loc = peek().loc;
        auto const &dir = expect(TokenKind::Directive, "'#type'");
        if (dir.text != "type") {
            throw TypeError{"expected '#type'", loc};
        }
        TypeSpec spec;
        spec.name = expect(TokenKind::Identifier, "type name").text;
        expect(TokenKind::LBrace, "'{'");
        while (!accept(TokenKind::RBrace)) {
            auto field_loc = peek().loc;
            auto field = expect(TokenKind::Identifier, "field name").text;
            expect(TokenKind::Colon, "':'");
            if (field == "subtypes") {
                do {
                    spec.subtypes.push_back(expect(TokenKind::Identifier, "type name").text);
                } while (accept(TokenKind::Comma));
            } else if (field == "expressions") {
                do {
                    spec.expressions.push_back(expression_spec());
                } while (accept(TokenKind::Semicolon));
            } else if (field == "occurrence") {
                spec.occurrence = parse_occurrence(expect(TokenKind::Identifier, "occurrence").text, field_loc);
                spec.occurrence_given = true;
            } else if (field == "macros") {
                do {
                    spec.macros.push_back(macro(spec.name));
                } while (accept(TokenKind::Semicolon));
            } else {
                throw TypeError{"unknown field '" + field + "' in type " + spec.name, field_loc};
            }
            expect(TokenKind::Dot, "'.' after field");
        }
        if (!at(TokenKind::End)) {
            fail("unexpected input after type block");
        }
        return {std::move(spec), loc};
    }

private:
    auto expression_spec() -> ExpressionSpec {
        ExpressionSpec spec;
        expect(TokenKind::Amp, "'&'");
        spec.op = expect(TokenKind::Identifier, "operator name").text;
        if (accept(TokenKind::LParen)) {
            do {
                ArgumentSpec arg;
                arg.type = expect(TokenKind::Identifier, "argument type").text;
                if (accept(TokenKind::Colon)) {
                    auto safety = expect(TokenKind::Identifier, "safety").text;
                    if (safety == "safe") {
                        arg.safe = true;
                    } else if (safety != "unsafe") {
                        fail("expected 'safe' or 'unsafe'");
                    }
                }
                spec.args.push_back(std::move(arg));
            } while (accept(TokenKind::Comma));
            expect(TokenKind::RParen, "')'");
        }
        return spec;
    }

    auto macro(std::string const &owner) -> MacroSpec {
        MacroSpec mac;
        mac.owner = owner;
        mac.pattern = TheoryExpression::from_term(term());
        expect(TokenKind::Arrow, "'=>'");
        mac.expansion = TheoryExpression::from_term(term());
        if (at(TokenKind::Identifier) && peek().text == "where") {
            next();
            do {
                auto loc = peek().loc;
                auto name = expect(TokenKind::Identifier, "placeholder").text;
                expect(TokenKind::Colon, "':'");
                auto type = expect(TokenKind::Identifier, "placeholder type").text;
                if (!mac.placeholders.emplace(name, type).second) {
                    throw TypeError{"placeholder '" + name + "' declared twice", loc};
                }
            } while (accept(TokenKind::Comma));
        }
        return mac;
    }
};

void collect_leaves(TheoryExpression const &expr, std::vector<Term> &out) {
    if (expr.leaf) {
        out.push_back(*expr.leaf);
    }
    for (auto const &arg : expr.args) {
        collect_leaves(arg, out);
    }
}

auto placeholder_name(Term const &leaf) -> std::optional<std::string> {
    if (leaf.kind == Term::Kind::Symbol && leaf.symbol.is_function() && !leaf.symbol.theory() &&
        leaf.symbol.args().empty() && !leaf.symbol.name().empty()) {
        return std::string{leaf.symbol.name()};
    }
    return std::nullopt;
}

auto same_shape(TheoryExpression const &a, TheoryExpression const &b) -> bool { return a == b; }

using Bindings = std::map<std::string, TheoryExpression>;

auto match(TheoryExpression const &pattern, TheoryExpression const &expr, MacroSpec const &mac, Bindings &bind)
    -> bool {
    if (pattern.leaf) {
        auto name = placeholder_name(*pattern.leaf);
        if (name && mac.placeholders.count(*name) > 0) {
            auto [it, inserted] = bind.emplace(*name, expr);
            return inserted || same_shape(it->second, expr);
        }
        return expr.leaf && *expr.leaf == *pattern.leaf;
    }
    if (expr.leaf || expr.op != pattern.op || expr.args.size() != pattern.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < pattern.args.size(); ++i) {
        if (!match(pattern.args[i], expr.args[i], mac, bind)) {
            return false;
        }
    }
    return true;
}

auto substitute(TheoryExpression const &expansion, MacroSpec const &mac, Bindings const &bind, Location const &loc)
    -> TheoryExpression {
    if (expansion.leaf) {
        auto name = placeholder_name(*expansion.leaf);
        if (name && mac.placeholders.count(*name) > 0) {
            return bind.at(*name);
        }
        auto out = expansion;
        out.leaf->loc = loc;
        out.loc = loc;
        return out;
    }
    std::vector<TheoryExpression> args;
    args.reserve(expansion.args.size());
    for (auto const &arg : expansion.args) {
        args.push_back(substitute(arg, mac, bind, loc));
    }
    return TheoryExpression::make(expansion.op, std::move(args), loc);
}

auto describe(TheoryExpression const &expr) -> std::string { return format_expression(expr); }

} // namespace

auto to_string(Occurrence occ) -> std::string_view {
    switch (occ) {
        case Occurrence::Any: return "any";
        case Occurrence::Head: return "head";
        case Occurrence::Body: return "body";
        case Occurrence::Directive: return "directive";
        case Occurrence::ArgumentOnly: return "argument_only";
    }
    return "argument_only";
}

struct TheoryGrammar::Failure {
    std::string message;
    Location loc;
    int weight = -1;

    void note(std::string msg, Location where, int w) {
        if (w > weight) {
            message = std::move(msg);
            loc = std::move(where);
            weight = w;
        }
    }
};

TheoryGrammar::TheoryGrammar() {
    for (auto const &name : predefined_types()) {
        TypeSpec spec;
        spec.name = name;
        spec.predefined = true;
        types_.emplace(name, std::move(spec));
    }
}

void TheoryGrammar::add(std::string_view text, std::string_view file) {
    auto prg = parse_program(text, file);
    std::vector<TypeDecl> decls;
    for (auto const &stm : prg.statements) {
        if (auto const *decl = std::get_if<TypeDecl>(&stm)) {
            decls.push_back(*decl);
        }
    }
    add(decls);
}

void TheoryGrammar::add(std::vector<TypeDecl> const &decls) {
    for (auto const &decl : decls) {
        TypeBlockParser parser{detail::tokenize(decl.text, decl.loc.file), decl.text};
        auto [spec, loc] = parser.parse();
        // Locations inside the block are relative to the block itself.
        loc = decl.loc;
        add_type(std::move(spec), loc);
    }
    validate();
}

void TheoryGrammar::add_type(TypeSpec spec, Location const &loc) {
    if (auto it = types_.find(spec.name); it != types_.end()) {
        auto &old = it->second;
        if (old.predefined) {
            throw TypeError{"cannot redefine predefined type '" + spec.name + "'", loc};
        }
        for (auto &sub : spec.subtypes) {
            if (std::find(old.subtypes.begin(), old.subtypes.end(), sub) == old.subtypes.end()) {
                old.subtypes.push_back(std::move(sub));
            }
        }
        for (auto &expr : spec.expressions) {
            old.expressions.push_back(std::move(expr));
        }
        for (auto &mac : spec.macros) {
            old.macros.push_back(std::move(mac));
        }
        if (spec.occurrence_given) {
            if (old.occurrence_given && old.occurrence != spec.occurrence) {
                throw TypeError{"conflicting occurrence for type '" + spec.name + "'", loc};
            }
            old.occurrence = spec.occurrence;
            old.occurrence_given = true;
        }
        spec = old;
        types_.erase(it);
    } else {
        order_.push_back(spec.name);
    }
    // Duplicate operator declarations and macro redefinitions.
    std::set<std::pair<std::string, std::size_t>> seen;
    for (auto const &expr : spec.expressions) {
        if (!seen.emplace(expr.op, expr.arity()).second) {
            throw TypeError{"duplicate operator &" + expr.op + "/" + std::to_string(expr.arity()) + " in type '" +
                                spec.name + "'",
                            loc};
        }
    }
    std::vector<MacroSpec> macros;
    for (auto &mac : spec.macros) {
        auto it = std::find_if(macros.begin(), macros.end(), [&](MacroSpec const &other) {
            return other.pattern.op == mac.pattern.op && other.pattern.arity() == mac.pattern.arity() &&
                   other.pattern.is_leaf() == mac.pattern.is_leaf();
        });
        if (it != macros.end()) {
            warnings_.push_back("macro " + describe(mac.pattern) + " redefined in type '" + spec.name + "'");
            *it = std::move(mac);
        } else {
            macros.push_back(std::move(mac));
        }
    }
    spec.macros = std::move(macros);
    for (auto const &mac : spec.macros) {
        std::vector<Term> leaves;
        collect_leaves(mac.pattern, leaves);
        std::set<std::string> used;
        for (auto const &leaf : leaves) {
            auto name = placeholder_name(leaf);
            if (!name || mac.placeholders.count(*name) == 0) {
                throw TypeError{"macro pattern " + describe(mac.pattern) + " uses '" + format_term(leaf) +
                                    "' which is not declared in its where clause",
                                loc};
            }
            used.insert(*name);
        }
        for (auto const &[name, type] : mac.placeholders) {
            if (used.count(name) == 0) {
                throw TypeError{"placeholder '" + name + "' does not occur in macro pattern " + describe(mac.pattern),
                                loc};
            }
        }
    }
    types_.emplace(spec.name, std::move(spec));
}

void TheoryGrammar::validate() const {
    auto known = [&](std::string const &name, std::string const &ctx) {
        if (types_.find(name) == types_.end()) {
            throw TypeError{"unknown type '" + name + "' referenced in " + ctx};
        }
    };
    for (auto const &[name, spec] : types_) {
        for (auto const &sub : spec.subtypes) {
            known(sub, "subtypes of '" + name + "'");
        }
        for (auto const &expr : spec.expressions) {
            for (auto const &arg : expr.args) {
                known(arg.type, "&" + expr.op + " of '" + name + "'");
            }
        }
        for (auto const &mac : spec.macros) {
            for (auto const &[ph, type] : mac.placeholders) {
                known(type, "macro where clause of '" + name + "'");
            }
        }
    }
    // Cycle detection over subtype edges.
    std::map<std::string, int> state;
    std::function<void(std::string const &)> visit = [&](std::string const &name) {
        auto &st = state[name];
        if (st == 2) {
            return;
        }
        if (st == 1) {
            throw TypeError{"cyclic subtypes involving type '" + name + "'"};
        }
        st = 1;
        for (auto const &sub : types_.find(name)->second.subtypes) {
            visit(sub);
        }
        state[name] = 2;
    };
    for (auto const &[name, spec] : types_) {
        visit(name);
    }
}

auto TheoryGrammar::has_type(std::string_view name) const -> bool { return types_.find(name) != types_.end(); }

auto TheoryGrammar::type(std::string_view name) const -> TypeSpec const & {
    auto it = types_.find(name);
    if (it == types_.end()) {
        throw TypeError{"unknown type '" + std::string{name} + "'"};
    }
    return it->second;
}

auto TheoryGrammar::find_spec(std::string_view type, std::string_view op, std::size_t arity) const
    -> ExpressionSpec const * {
    auto it = types_.find(type);
    if (it == types_.end()) {
        return nullptr;
    }
    for (auto const &spec : it->second.expressions) {
        if (spec.op == op && spec.arity() == arity) {
            return &spec;
        }
    }
    return nullptr;
}

auto TheoryGrammar::is_subtype(std::string_view sub, std::string_view super) const -> bool {
    if (sub == super) {
        return true;
    }
    auto it = types_.find(super);
    if (it == types_.end()) {
        return false;
    }
    return std::any_of(it->second.subtypes.begin(), it->second.subtypes.end(),
                       [&](std::string const &s) { return is_subtype(sub, s); });
}

auto TheoryGrammar::check_predefined(TheoryExpression const &expr, std::string const &expected) const
    -> std::optional<TheoryExpression> {
    if (!expr.leaf) {
        return std::nullopt;
    }
    auto const &term = *expr.leaf;
    bool ok = false;
    bool var = term.kind == Term::Kind::Variable;
    if (expected == "atom") {
        ok = term.is_atom();
    } else if (expected == "number") {
        ok = var || term.kind == Term::Kind::Unary || term.kind == Term::Kind::Binary ||
             (term.kind == Term::Kind::Symbol && term.symbol.is_number());
    } else if (expected == "string") {
        ok = var || (term.kind == Term::Kind::Symbol && term.symbol.type() == SymbolType::String);
    } else if (expected == "supremum") {
        ok = term.kind == Term::Kind::Symbol && term.symbol.type() == SymbolType::Supremum;
    } else if (expected == "infimum") {
        ok = term.kind == Term::Kind::Symbol && term.symbol.type() == SymbolType::Infimum;
    }
    if (!ok) {
        return std::nullopt;
    }
    auto out = expr;
    out.assigned_type = expected;
    out.memberships = {expected};
    return out;
}

auto TheoryGrammar::apply_macro(MacroSpec const &mac, TheoryExpression const &expr, int depth, Failure &fail) const
    -> std::optional<TheoryExpression> {
    Bindings bind;
    if (!match(mac.pattern, expr, mac, bind)) {
        return std::nullopt;
    }
    for (auto const &[name, type] : mac.placeholders) {
        Failure inner;
        if (!check(bind.at(name), type, depth + 1, inner)) {
            fail.note("macro argument " + describe(bind.at(name)) + " is not of type '" + type + "'", expr.loc, 1);
            return std::nullopt;
        }
    }
    auto expanded = substitute(mac.expansion, mac, bind, expr.loc);
    return check(expanded, mac.owner, depth + 1, fail);
}

auto TheoryGrammar::check(TheoryExpression const &expr, std::string const &expected, int depth, Failure &fail) const
    -> std::optional<TheoryExpression> {
    if (depth > macro_depth_limit) {
        throw TypeError{"macro expansion depth exceeded while checking " + describe(expr), expr.loc};
    }
    auto const &spec = type(expected);
    if (spec.predefined) {
        auto res = check_predefined(expr, expected);
        if (!res) {
            fail.note(describe(expr) + " is not of type '" + expected + "'", expr.loc, 0);
        }
        return res;
    }
    if (!expr.leaf) {
        if (auto const *es = find_spec(expected, expr.op, expr.arity())) {
            TheoryExpression out = TheoryExpression::make(expr.op, {}, expr.loc);
            bool ok = true;
            for (std::size_t i = 0; i < es->args.size() && ok; ++i) {
                auto arg = check(expr.args[i], es->args[i].type, depth, fail);
                if (!arg) {
                    fail.note("argument " + std::to_string(i + 1) + " of &" + expr.op + " must be of type '" +
                                  es->args[i].type + "', got " + describe(expr.args[i]),
                              expr.args[i].loc, 2 + depth);
                    ok = false;
                } else {
                    out.args.push_back(std::move(*arg));
                }
            }
            if (ok) {
                out.assigned_type = expected;
                out.memberships = {expected};
                return out;
            }
        }
    }
    for (auto const &mac : spec.macros) {
        if (auto res = apply_macro(mac, expr, depth, fail)) {
            return res;
        }
    }
    for (auto const &sub : spec.subtypes) {
        if (auto res = check(expr, sub, depth, fail)) {
            if (std::find(res->memberships.begin(), res->memberships.end(), expected) == res->memberships.end()) {
                res->memberships.push_back(expected);
            }
            return res;
        }
    }
    if (expr.leaf) {
        fail.note(describe(expr) + " is not of type '" + expected + "'", expr.loc, 0);
    } else {
        fail.note("no operator &" + expr.op + "/" + std::to_string(expr.arity()) + " in type '" + expected + "'",
                  expr.loc, 1);
    }
    return std::nullopt;
}

auto TheoryGrammar::typecheck(TheoryExpression const &expr, std::string_view expected) const -> TheoryExpression {
    Failure fail;
    auto res = check(expr, std::string{expected}, 0, fail);
    if (!res) {
        throw TypeError{fail.message.empty() ? describe(expr) + " does not have type '" + std::string{expected} + "'"
                                             : fail.message,
                        fail.loc.line > 0 ? fail.loc : expr.loc};
    }
    return *res;
}

auto TheoryGrammar::top_candidates() const -> std::vector<std::string> {
    std::map<std::string, int> height;
    std::function<int(std::string const &)> measure = [&](std::string const &name) -> int {
        if (auto it = height.find(name); it != height.end()) {
            return it->second;
        }
        int h = 0;
        for (auto const &sub : type(name).subtypes) {
            h = std::max(h, measure(sub) + 1);
        }
        height[name] = h;
        return h;
    };
    auto out = order_;
    std::stable_sort(out.begin(), out.end(), [&](std::string const &a, std::string const &b) {
        bool arg_a = type(a).occurrence == Occurrence::ArgumentOnly;
        bool arg_b = type(b).occurrence == Occurrence::ArgumentOnly;
        if (arg_a != arg_b) {
            return !arg_a;
        }
        return measure(a) > measure(b);
    });
    return out;
}

auto TheoryGrammar::classify_top(TheoryExpression const &expr) const -> std::pair<TheoryExpression, std::string> {
    Failure fail;
    for (auto const &name : top_candidates()) {
        if (auto res = check(expr, name, 0, fail)) {
            return {std::move(*res), name};
        }
    }
    if (fail.message.empty()) {
        throw TypeError{"no theory type accepts " + describe(expr), expr.loc};
    }
    throw TypeError{fail.message + " (in " + describe(expr) + ")", fail.loc.line > 0 ? fail.loc : expr.loc};
}

auto TheoryGrammar::typecheck_top(TheoryExpression const &expr) const -> TheoryExpression {
    return classify_top(expr).first;
}

auto TheoryGrammar::expand_macros(TheoryExpression const &expr) const -> TheoryExpression {
    auto typed = typecheck_top(expr);
    std::function<void(TheoryExpression &)> strip = [&](TheoryExpression &e) {
        e.assigned_type.reset();
        e.memberships.clear();
        for (auto &arg : e.args) {
            strip(arg);
        }
    };
    strip(typed);
    return typed;
}

auto TheoryGrammar::typecheck_program(Program const &prg) const -> Program {
    auto out = prg;
    for_each_expression(out, [&](TheoryExpression &expr, Position, Location const &loc) {
        try {
            expr = typecheck_top(expr);
        } catch (TypeError const &err) {
            if (err.location().line > 0) {
                throw;
            }
            throw TypeError{err.message(), loc};
        }
    });
    return out;
}

auto TheoryGrammar::check_occurrence(Program const &prg) const -> std::vector<Diagnostic> {
    std::vector<Diagnostic> diags;
    auto copy = prg;
    for_each_expression(copy, [&](TheoryExpression &expr, Position pos, Location const &loc) {
        std::string top;
        try {
            top = classify_top(expr).second;
        } catch (TypeError const &err) {
            diags.push_back({err.message(), loc});
            return;
        }
        auto occ = type(top).occurrence;
        auto where = pos == Position::Head ? "head" : pos == Position::Body ? "body" : "directive";
        bool ok = occ == Occurrence::Any || (occ == Occurrence::Head && pos == Position::Head) ||
                  (occ == Occurrence::Body && pos == Position::Body) ||
                  (occ == Occurrence::Directive && pos == Position::Directive);
        if (!ok) {
            std::string msg = occ == Occurrence::ArgumentOnly
                                  ? "expression " + describe(expr) + " of type '" + top +
                                        "' may only occur as an argument, not standalone in a " + where
                                  : "expression " + describe(expr) + " of type '" + top + "' is not allowed in a " +
                                        where + " (occurrence: " + std::string{to_string(occ)} + ")";
            diags.push_back({std::move(msg), loc});
        }
    });
    return diags;
}

auto load_grammar(std::string_view text, std::string_view file) -> TheoryGrammar {
    TheoryGrammar grammar;
    grammar.add(text, file);
    return grammar;
}

auto builtin_grammar(std::string_view name) -> std::string_view {
    if (name == "tel") {
        return tel_grammar;
    }
    if (name == "mel") {
        return mel_grammar;
    }
    if (name == "del") {
        return del_grammar;
    }
    throw Error{"unknown built-in grammar '" + std::string{name} + "'"};
}

} // namespace tmeta

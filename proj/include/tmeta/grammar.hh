// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/ast.hh>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tmeta {

enum class Occurrence { Any, Head, Body, Directive, ArgumentOnly };

[[nodiscard]] auto to_string(Occurrence occ) -> std::string_view;

struct ArgumentSpec {
    std::string type;
    bool safe = false;
};

struct ExpressionSpec {
    std::string op;
    std::vector<ArgumentSpec> args;

    [[nodiscard]] auto arity() const -> std::size_t { return args.size(); }
};

//! A rewrite `pattern => expansion where placeholder: type, ...`.
//!
//! Placeholders are constants occurring as leaves of the pattern. A macro
//! belongs to the type block it is declared in and only fires where an
//! expression of that type is expected.
struct MacroSpec {
    TheoryExpression pattern;
    TheoryExpression expansion;
    std::map<std::string, std::string> placeholders;
    std::string owner;
};

struct TypeSpec {
    std::string name;
    std::vector<std::string> subtypes;
    std::vector<ExpressionSpec> expressions;
    Occurrence occurrence = Occurrence::ArgumentOnly;
    bool occurrence_given = false;
    std::vector<MacroSpec> macros;
    bool predefined = false;
};

//! Where a theory expression occurs at the top level of a statement.
enum class Position { Head, Body, Directive };

struct Diagnostic {
    std::string message;
    Location loc;
};

//! A set of `#type` declarations together with the predefined base types.
class TheoryGrammar {
public:
    static constexpr int macro_depth_limit = 64;

    TheoryGrammar();

    //! Parses the `#type` blocks in `text` and merges them into this grammar.
    void add(std::string_view text, std::string_view file = {});
    //! Adds already extracted type blocks.
    void add(std::vector<TypeDecl> const &decls);

    [[nodiscard]] auto has_type(std::string_view name) const -> bool;
    [[nodiscard]] auto type(std::string_view name) const -> TypeSpec const &;
    //! Declared types in declaration order (predefined ones excluded).
    [[nodiscard]] auto declared() const -> std::vector<std::string> const & { return order_; }
    [[nodiscard]] auto find_spec(std::string_view type, std::string_view op, std::size_t arity) const
        -> ExpressionSpec const *;
    //! Reflexive-transitive subtype check: `sub` is reachable from `super`.
    [[nodiscard]] auto is_subtype(std::string_view sub, std::string_view super) const -> bool;
    //! Non-fatal notes collected while loading (for example macro redefinitions).
    [[nodiscard]] auto warnings() const -> std::vector<std::string> const & { return warnings_; }

    //! Type checks `expr` against `expected`, expanding macros on the way.
    [[nodiscard]] auto typecheck(TheoryExpression const &expr, std::string_view expected) const -> TheoryExpression;
    //! Type checks a top-level expression, choosing the first type that accepts it.
    //! Types allowed at the top level are tried before argument-only ones;
    //! supertypes are tried before their subtypes.
    [[nodiscard]] auto typecheck_top(TheoryExpression const &expr) const -> TheoryExpression;
    //! Like typecheck_top but also reports the type the expression was accepted at.
    [[nodiscard]] auto classify_top(TheoryExpression const &expr) const -> std::pair<TheoryExpression, std::string>;
    [[nodiscard]] auto expand_macros(TheoryExpression const &expr) const -> TheoryExpression;

    //! Types every theory expression of the program (macros expanded).
    [[nodiscard]] auto typecheck_program(Program const &prg) const -> Program;
    [[nodiscard]] auto check_occurrence(Program const &prg) const -> std::vector<Diagnostic>;

private:
    struct Failure;

    void add_type(TypeSpec spec, Location const &loc);
    void validate() const;
    auto check(TheoryExpression const &expr, std::string const &expected, int depth, Failure &fail) const
        -> std::optional<TheoryExpression>;
    auto check_predefined(TheoryExpression const &expr, std::string const &expected) const
        -> std::optional<TheoryExpression>;
    auto apply_macro(MacroSpec const &macro, TheoryExpression const &expr, int depth, Failure &fail) const
        -> std::optional<TheoryExpression>;
    auto top_candidates() const -> std::vector<std::string>;

    std::map<std::string, TypeSpec, std::less<>> types_;
    std::vector<std::string> order_;
    std::vector<std::string> warnings_;
};

//! Parses and validates grammar text.
[[nodiscard]] auto load_grammar(std::string_view text, std::string_view file = {}) -> TheoryGrammar;

//! Text of a built-in grammar: "tel", "mel", or "del".
[[nodiscard]] auto builtin_grammar(std::string_view name) -> std::string_view;

//! Applies `fun` to every top-level theory expression of a program.
template <class F> void for_each_expression(Program &prg, F &&fun) {
    auto visit_elems = [&](std::vector<ConditionalLiteral> &elems, Position pos) {
        for (auto &elem : elems) {
            if (elem.literal.is_theory()) {
                fun(elem.literal.theory(), pos, elem.literal.loc);
            }
            for (auto &lit : elem.condition) {
                if (lit.is_theory()) {
                    fun(lit.theory(), Position::Body, lit.loc);
                }
            }
        }
    };
    for (auto &stm : prg.statements) {
        if (auto *rule = std::get_if<Rule>(&stm)) {
            visit_elems(rule->head, Position::Head);
            visit_elems(rule->body, Position::Body);
        } else if (auto *ext = std::get_if<External>(&stm)) {
            if (ext->atom.is_theory()) {
                fun(ext->atom.theory(), Position::Directive, ext->loc);
            }
            visit_elems(ext->condition, Position::Body);
        } else if (auto *show = std::get_if<Show>(&stm)) {
            visit_elems(show->condition, Position::Body);
        }
    }
}

} // namespace tmeta

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/error.hh>
#include <tmeta/symbol.hh>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tmeta {

enum class BinaryOp { Add, Sub, Mul, Div, Mod };
enum class UnaryOp { Minus, Abs };
enum class Relation { Eq, Neq, Lt, Leq, Gt, Geq };

//! A non-ground term.
//!
//! Ground leaves (numbers, strings, constants, `#sup`, `#inf`) are stored as
//! symbols. Function terms prefixed with `&` set `theory`; they represent
//! theory expressions occurring in term position, for example inside the
//! arguments of meta-encoding atoms.
struct Term {
    enum class Kind { Symbol, Variable, Function, Unary, Binary, Interval };

    Kind kind = Kind::Symbol;
    tmeta::Symbol symbol;
    std::string name;
    bool theory = false;
    BinaryOp binary_op = BinaryOp::Add;
    UnaryOp unary_op = UnaryOp::Minus;
    std::vector<Term> args;
    Location loc;

    [[nodiscard]] static auto make_symbol(tmeta::Symbol sym, Location loc = {}) -> Term;
    [[nodiscard]] static auto make_variable(std::string name, Location loc = {}) -> Term;
    [[nodiscard]] static auto make_function(std::string name, std::vector<Term> args, bool theory = false,
                                            Location loc = {}) -> Term;

    [[nodiscard]] auto is_ground() const -> bool;
    //! Constant or compound term usable as a classical atom.
    [[nodiscard]] auto is_atom() const -> bool;
    //! Converts a ground term without arithmetic into a symbol.
    [[nodiscard]] auto to_symbol() const -> std::optional<tmeta::Symbol>;
    void collect_variables(std::vector<std::string> &out) const;

    //! Structural equality, ignoring locations.
    friend auto operator==(Term const &a, Term const &b) -> bool;
};

//! A (possibly nested) `&`-prefixed theory expression.
//!
//! Inner nodes carry an operator; leaves carry the plain term found in an
//! argument position (an atom, a number, `#sup`, ...). Type checking fills
//! in `assigned_type` (the most specific match) and `memberships` (every type
//! the node was accepted at, from the most specific one outwards).
struct TheoryExpression {
    std::string op;
    std::vector<TheoryExpression> args;
    std::optional<Term> leaf;
    std::optional<std::string> assigned_type;
    std::vector<std::string> memberships;
    Location loc;

    [[nodiscard]] static auto make_leaf(Term term) -> TheoryExpression;
    [[nodiscard]] static auto make(std::string op, std::vector<TheoryExpression> args, Location loc = {})
        -> TheoryExpression;
    //! Reads a term whose outermost function is theory-marked.
    [[nodiscard]] static auto from_term(Term const &term) -> TheoryExpression;

    [[nodiscard]] auto is_leaf() const -> bool { return leaf.has_value(); }
    [[nodiscard]] auto arity() const -> std::size_t { return args.size(); }
    [[nodiscard]] auto to_term() const -> Term;
    void collect_variables(std::vector<std::string> &out) const;

    //! Structural equality of the expression tree; types are ignored.
    friend auto operator==(TheoryExpression const &a, TheoryExpression const &b) -> bool;
};

struct Comparison {
    Relation relation = Relation::Eq;
    Term lhs;
    Term rhs;

    friend auto operator==(Comparison const &a, Comparison const &b) -> bool = default;
};

enum class Sign { Positive, Negative };

//! A possibly default-negated atom, theory expression, or comparison.
struct Literal {
    Sign sign = Sign::Positive;
    std::variant<Term, TheoryExpression, Comparison> payload;
    Location loc;

    [[nodiscard]] auto is_atom() const -> bool { return std::holds_alternative<Term>(payload); }
    [[nodiscard]] auto is_theory() const -> bool { return std::holds_alternative<TheoryExpression>(payload); }
    [[nodiscard]] auto is_comparison() const -> bool { return std::holds_alternative<Comparison>(payload); }
    [[nodiscard]] auto atom() const -> Term const & { return std::get<Term>(payload); }
    [[nodiscard]] auto theory() const -> TheoryExpression const & { return std::get<TheoryExpression>(payload); }
    [[nodiscard]] auto theory() -> TheoryExpression & { return std::get<TheoryExpression>(payload); }
    [[nodiscard]] auto comparison() const -> Comparison const & { return std::get<Comparison>(payload); }
    //! The atom or theory expression as a term.
    [[nodiscard]] auto as_term() const -> Term;

    friend auto operator==(Literal const &a, Literal const &b) -> bool;
};

//! A literal with an optional condition (`literal : condition`).
//! Conditions hold plain literals only, so conditional literals never nest.
struct ConditionalLiteral {
    Literal literal;
    std::vector<Literal> condition;

    [[nodiscard]] auto conditional() const -> bool { return !condition.empty(); }
    friend auto operator==(ConditionalLiteral const &a, ConditionalLiteral const &b) -> bool = default;
};

enum class HeadKind { Disjunction, Choice, Empty };

struct Rule {
    HeadKind kind = HeadKind::Empty;
    std::vector<ConditionalLiteral> head;
    std::vector<ConditionalLiteral> body;
    Location loc;
    //! Rules generated by the toolchain itself (for example from `#show`).
    bool internal = false;

    friend auto operator==(Rule const &a, Rule const &b) -> bool;
};

struct External {
    Literal atom;
    std::vector<ConditionalLiteral> condition;
    Location loc;

    friend auto operator==(External const &a, External const &b) -> bool;
};

struct Signature {
    std::string name;
    int arity = 0;
    friend auto operator==(Signature const &a, Signature const &b) -> bool = default;
};

struct Show {
    std::optional<Term> term;
    std::optional<Signature> signature;
    std::vector<ConditionalLiteral> condition;
    Location loc;

    friend auto operator==(Show const &a, Show const &b) -> bool;
};

struct Const {
    std::string name;
    Term value;
    Location loc;

    friend auto operator==(Const const &a, Const const &b) -> bool;
};

//! A `#type` block kept verbatim; the grammar module interprets it.
struct TypeDecl {
    std::string text;
    Location loc;

    friend auto operator==(TypeDecl const &a, TypeDecl const &b) -> bool { return a.text == b.text; }
};

using Statement = std::variant<Rule, External, Show, Const, TypeDecl>;

struct Program {
    std::vector<Statement> statements;

    [[nodiscard]] auto rules() const -> std::vector<Rule>;
    [[nodiscard]] auto type_declarations() const -> std::string;

    friend auto operator==(Program const &a, Program const &b) -> bool = default;
};

//! Parses the clingo-style surface language.
[[nodiscard]] auto parse_program(std::string_view text, std::string_view file = {}) -> Program;
//! Parses a single term (used for `-c name=value` and tests).
[[nodiscard]] auto parse_term(std::string_view text) -> Term;
//! Parses a single theory expression such as `&next(&true)`.
[[nodiscard]] auto parse_expression(std::string_view text) -> TheoryExpression;

[[nodiscard]] auto format_term(Term const &term) -> std::string;
[[nodiscard]] auto format_expression(TheoryExpression const &expr) -> std::string;
[[nodiscard]] auto format_literal(Literal const &lit) -> std::string;
[[nodiscard]] auto format_statement(Statement const &stm) -> std::string;
[[nodiscard]] auto format_program(Program const &prg) -> std::string;

namespace detail {

enum class TokenKind {
    Identifier,  // lowercase-initial name
    Variable,    // uppercase-initial name or `_`
    Number,
    String,
    Directive,   // `#name`
    Amp,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Colon,
    If,          // `:-`
    Dot,
    DotDot,
    Bar,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Eq,
    Neq,
    Lt,
    Leq,
    Gt,
    Geq,
    Arrow,       // `=>`
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::int64_t number = 0;
    Location loc;
    std::size_t offset = 0;
};

//! Splits text into tokens; `%` starts a line comment.
[[nodiscard]] auto tokenize(std::string_view text, std::string_view file = {}) -> std::vector<Token>;

//! Recursive-descent reader shared by the program and grammar parsers.
class Reader {
public:
    Reader(std::vector<Token> tokens, std::string_view text);

    [[nodiscard]] auto peek(std::size_t ahead = 0) const -> Token const &;
    auto next() -> Token const &;
    [[nodiscard]] auto at(TokenKind kind) const -> bool { return peek().kind == kind; }
    auto accept(TokenKind kind) -> bool;
    auto expect(TokenKind kind, char const *what) -> Token const &;
    [[noreturn]] void fail(std::string const &message) const;
    [[nodiscard]] auto text() const -> std::string_view { return text_; }

    auto term() -> Term;
    auto literal() -> Literal;
    auto conditional_literal(bool in_head) -> ConditionalLiteral;
    auto body() -> std::vector<ConditionalLiteral>;

private:
    auto interval_term() -> Term;
    auto additive_term() -> Term;
    auto multiplicative_term() -> Term;
    auto unary_term() -> Term;
    auto primary_term() -> Term;
    auto arguments() -> std::vector<Term>;

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::string_view text_;
};

} // namespace detail

} // namespace tmeta

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/ast.hh>

#include <algorithm>
#include <cctype>
#include <limits>

namespace tmeta {

// {{{1 terms and expressions

auto Term::make_symbol(tmeta::Symbol sym, Location loc) -> Term {
    Term term;
    term.kind = Kind::Symbol;
    term.symbol = sym;
    term.loc = std::move(loc);
    return term;
}

auto Term::make_variable(std::string name, Location loc) -> Term {
    Term term;
    term.kind = Kind::Variable;
    term.name = std::move(name);
    term.loc = std::move(loc);
    return term;
}

auto Term::make_function(std::string name, std::vector<Term> args, bool theory, Location loc) -> Term {
    Term term;
    term.kind = Kind::Function;
    term.name = std::move(name);
    term.args = std::move(args);
    term.theory = theory;
    term.loc = std::move(loc);
    return term;
}

auto Term::is_ground() const -> bool {
    if (kind == Kind::Variable) {
        return false;
    }
    return std::all_of(args.begin(), args.end(), [](Term const &arg) { return arg.is_ground(); });
}

auto Term::is_atom() const -> bool {
    if (kind == Kind::Symbol) {
        return symbol.is_atom();
    }
    return kind == Kind::Function && !theory && !name.empty();
}

auto Term::to_symbol() const -> std::optional<tmeta::Symbol> {
    switch (kind) {
        case Kind::Symbol: return symbol;
        case Kind::Function: {
            SymbolVector syms;
            syms.reserve(args.size());
            for (auto const &arg : args) {
                auto sym = arg.to_symbol();
                if (!sym) {
                    return std::nullopt;
                }
                syms.push_back(*sym);
            }
            return tmeta::Symbol::function(name, syms, theory);
        }
        default: return std::nullopt;
    }
}

void Term::collect_variables(std::vector<std::string> &out) const {
    if (kind == Kind::Variable) {
        if (std::find(out.begin(), out.end(), name) == out.end()) {
            out.push_back(name);
        }
        return;
    }
    for (auto const &arg : args) {
        arg.collect_variables(out);
    }
}

auto operator==(Term const &a, Term const &b) -> bool {
    if (a.kind != b.kind) {
        return false;
    }
    switch (a.kind) {
        case Term::Kind::Symbol: return a.symbol == b.symbol;
        case Term::Kind::Variable: return a.name == b.name;
        case Term::Kind::Function:
            if (a.name != b.name || a.theory != b.theory) {
                return false;
            }
            break;
        case Term::Kind::Unary:
            if (a.unary_op != b.unary_op) {
                return false;
            }
            break;
        case Term::Kind::Binary:
            if (a.binary_op != b.binary_op) {
                return false;
            }
            break;
        case Term::Kind::Interval: break;
    }
    return a.args == b.args;
}

auto TheoryExpression::make_leaf(Term term) -> TheoryExpression {
    TheoryExpression expr;
    expr.loc = term.loc;
    expr.leaf = std::move(term);
    return expr;
}

auto TheoryExpression::make(std::string op, std::vector<TheoryExpression> args, Location loc) -> TheoryExpression {
    TheoryExpression expr;
    expr.op = std::move(op);
    expr.args = std::move(args);
    expr.loc = std::move(loc);
    return expr;
}

auto TheoryExpression::from_term(Term const &term) -> TheoryExpression {
    bool theory = term.theory;
    if (term.kind == Term::Kind::Symbol && term.symbol.is_function() && term.symbol.theory()) {
        theory = true;
    }
    if (!theory) {
        return make_leaf(term);
    }
    std::vector<TheoryExpression> args;
    if (term.kind == Term::Kind::Symbol) {
        for (auto arg : term.symbol.args()) {
            args.push_back(from_term(Term::make_symbol(arg, term.loc)));
        }
        return make(std::string{term.symbol.name()}, std::move(args), term.loc);
    }
    for (auto const &arg : term.args) {
        args.push_back(from_term(arg));
    }
    return make(term.name, std::move(args), term.loc);
}

auto TheoryExpression::to_term() const -> Term {
    if (leaf) {
        return *leaf;
    }
    std::vector<Term> terms;
    terms.reserve(args.size());
    for (auto const &arg : args) {
        terms.push_back(arg.to_term());
    }
    return Term::make_function(op, std::move(terms), true, loc);
}

void TheoryExpression::collect_variables(std::vector<std::string> &out) const {
    if (leaf) {
        leaf->collect_variables(out);
    }
    for (auto const &arg : args) {
        arg.collect_variables(out);
    }
}

auto operator==(TheoryExpression const &a, TheoryExpression const &b) -> bool {
    return a.op == b.op && a.leaf == b.leaf && a.args == b.args;
}

auto Literal::as_term() const -> Term {
    if (is_atom()) {
        return atom();
    }
    if (is_theory()) {
        return theory().to_term();
    }
    throw Error{"comparison used as atom", loc};
}

auto operator==(Literal const &a, Literal const &b) -> bool { return a.sign == b.sign && a.payload == b.payload; }

auto operator==(Rule const &a, Rule const &b) -> bool {
    return a.kind == b.kind && a.head == b.head && a.body == b.body && a.internal == b.internal;
}

auto operator==(External const &a, External const &b) -> bool {
    return a.atom == b.atom && a.condition == b.condition;
}

auto operator==(Show const &a, Show const &b) -> bool {
    return a.term == b.term && a.signature == b.signature && a.condition == b.condition;
}

auto operator==(Const const &a, Const const &b) -> bool { return a.name == b.name && a.value == b.value; }

auto Program::rules() const -> std::vector<Rule> {
    std::vector<Rule> out;
    for (auto const &stm : statements) {
        if (auto const *rule = std::get_if<Rule>(&stm)) {
            out.push_back(*rule);
        }
    }
    return out;
}

auto Program::type_declarations() const -> std::string {
    std::string out;
    for (auto const &stm : statements) {
        if (auto const *decl = std::get_if<TypeDecl>(&stm)) {
            out += decl->text;
            out += '\n';
        }
    }
    return out;
}

// {{{1 tokenizer

namespace detail {

namespace {

auto is_ident(char c) -> bool { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\''; }

} // namespace

auto tokenize(std::string_view text, std::string_view file) -> std::vector<Token> {
    std::vector<Token> tokens;
    int line = 1;
    int column = 1;
    std::size_t pos = 0;
    auto advance = [&](std::size_t count) {
        for (std::size_t i = 0; i < count && pos < text.size(); ++i, ++pos) {
            if (text[pos] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    auto here = [&]() { return Location{std::string{file}, line, column}; };
    while (true) {
        while (pos < text.size()) {
            char c = text[pos];
            if (std::isspace(static_cast<unsigned char>(c)) != 0) {
                advance(1);
            } else if (c == '%') {
                if (pos + 1 < text.size() && text[pos + 1] == '*') {
                    auto end = text.find("*%", pos + 2);
                    if (end == std::string_view::npos) {
                        throw SyntaxError{"unterminated block comment", here()};
                    }
                    advance(end + 2 - pos);
                } else {
                    while (pos < text.size() && text[pos] != '\n') {
                        advance(1);
                    }
                }
            } else {
                break;
            }
        }
        Token tok;
        tok.loc = here();
        tok.offset = pos;
        if (pos >= text.size()) {
            tok.kind = TokenKind::End;
            tokens.push_back(std::move(tok));
            return tokens;
        }
        char c = text[pos];
        auto next = pos + 1 < text.size() ? text[pos + 1] : '\0';
        auto simple = [&](TokenKind kind, std::size_t len) {
            tok.kind = kind;
            tok.text = std::string{text.substr(pos, len)};
            advance(len);
        };
        if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            auto end = pos;
            while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end])) != 0) {
                ++end;
            }
            tok.kind = TokenKind::Number;
            tok.text = std::string{text.substr(pos, end - pos)};
            try {
                tok.number = std::stoll(tok.text);
            } catch (std::out_of_range const &) {
                throw SyntaxError{"integer literal out of range", tok.loc};
            }
            advance(end - pos);
        } else if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            auto end = pos;
            while (end < text.size() && is_ident(text[end])) {
                ++end;
            }
            tok.text = std::string{text.substr(pos, end - pos)};
            tok.kind = std::isupper(static_cast<unsigned char>(c)) != 0 || c == '_' ? TokenKind::Variable
                                                                                      : TokenKind::Identifier;
            advance(end - pos);
        } else if (c == '#') {
            auto end = pos + 1;
            while (end < text.size() && is_ident(text[end])) {
                ++end;
            }
            if (end == pos + 1) {
                throw SyntaxError{"expected directive name after '#'", tok.loc};
            }
            tok.kind = TokenKind::Directive;
            tok.text = std::string{text.substr(pos + 1, end - pos - 1)};
            advance(end - pos);
        } else if (c == '"') {
            std::string value;
            auto end = pos + 1;
            while (true) {
                if (end >= text.size() || text[end] == '\n') {
                    throw SyntaxError{"unterminated string", tok.loc};
                }
                if (text[end] == '"') {
                    break;
                }
                if (text[end] == '\\' && end + 1 < text.size()) {
                    ++end;
                    value += text[end] == 'n' ? '\n' : text[end];
                } else {
                    value += text[end];
                }
                ++end;
            }
            tok.kind = TokenKind::String;
            tok.text = std::move(value);
            advance(end + 1 - pos);
        } else {
            switch (c) {
                case '&': simple(TokenKind::Amp, 1); break;
                case '(': simple(TokenKind::LParen, 1); break;
                case ')': simple(TokenKind::RParen, 1); break;
                case '{': simple(TokenKind::LBrace, 1); break;
                case '}': simple(TokenKind::RBrace, 1); break;
                case ',': simple(TokenKind::Comma, 1); break;
                case ';': simple(TokenKind::Semicolon, 1); break;
                case '|': simple(TokenKind::Bar, 1); break;
                case '+': simple(TokenKind::Plus, 1); break;
                case '-': simple(TokenKind::Minus, 1); break;
                case '*': simple(TokenKind::Star, 1); break;
                case '/': simple(TokenKind::Slash, 1); break;
                case '\\': simple(TokenKind::Backslash, 1); break;
                case ':': next == '-' ? simple(TokenKind::If, 2) : simple(TokenKind::Colon, 1); break;
                case '.': next == '.' ? simple(TokenKind::DotDot, 2) : simple(TokenKind::Dot, 1); break;
                case '=':
                    if (next == '>') {
                        simple(TokenKind::Arrow, 2);
                    } else if (next == '=') {
                        simple(TokenKind::Eq, 2);
                    } else {
                        simple(TokenKind::Eq, 1);
                    }
                    break;
                case '!':
                    if (next != '=') {
                        throw SyntaxError{"unexpected character '!'", tok.loc};
                    }
                    simple(TokenKind::Neq, 2);
                    break;
                case '<':
                    if (next == '=') {
                        simple(TokenKind::Leq, 2);
                    } else if (next == '>') {
                        simple(TokenKind::Neq, 2);
                    } else {
                        simple(TokenKind::Lt, 1);
                    }
                    break;
                case '>': next == '=' ? simple(TokenKind::Geq, 2) : simple(TokenKind::Gt, 1); break;
                default: throw SyntaxError{std::string{"unexpected character '"} + c + "'", tok.loc};
            }
        }
        tokens.push_back(std::move(tok));
    }
}

// {{{1 reader

Reader::Reader(std::vector<Token> tokens, std::string_view text) : tokens_{std::move(tokens)}, text_{text} {}

auto Reader::peek(std::size_t ahead) const -> Token const & {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

auto Reader::next() -> Token const & {
    auto const &tok = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) {
        ++pos_;
    }
    return tok;
}

auto Reader::accept(TokenKind kind) -> bool {
    if (at(kind)) {
        next();
        return true;
    }
    return false;
}

auto Reader::expect(TokenKind kind, char const *what) -> Token const & {
    if (!at(kind)) {
        fail(std::string{"expected "} + what);
    }
    return next();
}

void Reader::fail(std::string const &message) const {
    auto const &tok = peek();
    auto found = tok.kind == TokenKind::End ? std::string{"end of input"} : "'" + tok.text + "'";
    throw SyntaxError{message + ", found " + found, tok.loc};
}

namespace {

int fresh_counter = 0;

auto fresh_anonymous() -> std::string { return "_Anon" + std::to_string(fresh_counter++); }

} // namespace

auto Reader::term() -> Term { return interval_term(); }

auto Reader::interval_term() -> Term {
    auto lhs = additive_term();
    if (at(TokenKind::DotDot)) {
        auto loc = next().loc;
        auto rhs = additive_term();
        Term term;
        term.kind = Term::Kind::Interval;
        term.args = {std::move(lhs), std::move(rhs)};
        term.loc = loc;
        return term;
    }
    return lhs;
}

auto Reader::additive_term() -> Term {
    auto lhs = multiplicative_term();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
        auto const &tok = next();
        Term term;
        term.kind = Term::Kind::Binary;
        term.binary_op = tok.kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
        term.loc = tok.loc;
        term.args = {std::move(lhs), multiplicative_term()};
        lhs = std::move(term);
    }
    return lhs;
}

auto Reader::multiplicative_term() -> Term {
    auto lhs = unary_term();
    while (at(TokenKind::Star) || at(TokenKind::Slash) || at(TokenKind::Backslash)) {
        auto const &tok = next();
        Term term;
        term.kind = Term::Kind::Binary;
        term.binary_op = tok.kind == TokenKind::Star    ? BinaryOp::Mul
                         : tok.kind == TokenKind::Slash ? BinaryOp::Div
                                                        : BinaryOp::Mod;
        term.loc = tok.loc;
        term.args = {std::move(lhs), unary_term()};
        lhs = std::move(term);
    }
    return lhs;
}

auto Reader::unary_term() -> Term {
    if (at(TokenKind::Minus)) {
        auto loc = next().loc;
        if (at(TokenKind::Number)) {
            auto const &tok = next();
            return Term::make_symbol(tmeta::Symbol::number(-tok.number), loc);
        }
        Term term;
        term.kind = Term::Kind::Unary;
        term.unary_op = UnaryOp::Minus;
        term.loc = loc;
        term.args = {unary_term()};
        return term;
    }
    return primary_term();
}

auto Reader::arguments() -> std::vector<Term> {
    std::vector<Term> args;
    expect(TokenKind::LParen, "'('");
    if (!accept(TokenKind::RParen)) {
        do {
            args.push_back(term());
        } while (accept(TokenKind::Comma));
        expect(TokenKind::RParen, "')'");
    }
    return args;
}

auto Reader::primary_term() -> Term {
    auto const &tok = peek();
    auto loc = tok.loc;
    switch (tok.kind) {
        case TokenKind::Number: {
            auto value = next().number;
            return Term::make_symbol(tmeta::Symbol::number(value), loc);
        }
        case TokenKind::String: {
            auto value = next().text;
            return Term::make_symbol(tmeta::Symbol::string(value), loc);
        }
        case TokenKind::Variable: {
            auto name = next().text;
            if (name == "_") {
                name = fresh_anonymous();
            }
            return Term::make_variable(std::move(name), loc);
        }
        case TokenKind::Directive: {
            if (tok.text == "sup") {
                next();
                return Term::make_symbol(tmeta::Symbol::supremum(), loc);
            }
            if (tok.text == "inf") {
                next();
                return Term::make_symbol(tmeta::Symbol::infimum(), loc);
            }
            fail("expected term");
        }
        case TokenKind::Amp: {
            next();
            if (!at(TokenKind::Identifier)) {
                fail("expected theory operator after '&'");
            }
            auto name = next().text;
            std::vector<Term> args;
            if (at(TokenKind::LParen)) {
                args = arguments();
            }
            return Term::make_function(std::move(name), std::move(args), true, loc);
        }
        case TokenKind::Identifier: {
            auto name = next().text;
            if (!at(TokenKind::LParen)) {
                return Term::make_symbol(tmeta::Symbol::function(name), loc);
            }
            return Term::make_function(std::move(name), arguments(), false, loc);
        }
        case TokenKind::LParen: {
            next();
            if (accept(TokenKind::RParen)) {
                return Term::make_function("", {}, false, loc);
            }
            std::vector<Term> args{term()};
            bool tuple = false;
            while (accept(TokenKind::Comma)) {
                tuple = true;
                if (at(TokenKind::RParen)) {
                    break;
                }
                args.push_back(term());
            }
            expect(TokenKind::RParen, "')'");
            if (!tuple) {
                return std::move(args.front());
            }
            return Term::make_function("", std::move(args), false, loc);
        }
        case TokenKind::Bar: {
            next();
            Term term;
            term.kind = Term::Kind::Unary;
            term.unary_op = UnaryOp::Abs;
            term.loc = loc;
            term.args = {additive_term()};
            expect(TokenKind::Bar, "'|'");
            return term;
        }
        default: fail("expected term");
    }
}

namespace {

auto relation_of(TokenKind kind) -> std::optional<Relation> {
    switch (kind) {
        case TokenKind::Eq: return Relation::Eq;
        case TokenKind::Neq: return Relation::Neq;
        case TokenKind::Lt: return Relation::Lt;
        case TokenKind::Leq: return Relation::Leq;
        case TokenKind::Gt: return Relation::Gt;
        case TokenKind::Geq: return Relation::Geq;
        default: return std::nullopt;
    }
}

auto is_theory_term(Term const &term) -> bool { return term.kind == Term::Kind::Function && term.theory; }

} // namespace

auto Reader::literal() -> Literal {
    Literal lit;
    lit.loc = peek().loc;
    if (at(TokenKind::Identifier) && peek().text == "not") {
        // `not` followed by something term-like is negation; alone it is the constant.
        auto kind = peek(1).kind;
        if (kind == TokenKind::Identifier || kind == TokenKind::Amp || kind == TokenKind::Variable ||
            kind == TokenKind::Number || kind == TokenKind::Minus || kind == TokenKind::LParen) {
            next();
            lit.sign = Sign::Negative;
        }
    }
    auto lhs = term();
    if (auto rel = relation_of(peek().kind)) {
        next();
        lit.payload = Comparison{*rel, std::move(lhs), term()};
        return lit;
    }
    if (is_theory_term(lhs)) {
        lit.payload = TheoryExpression::from_term(lhs);
    } else if (lhs.is_atom()) {
        lit.payload = std::move(lhs);
    } else {
        throw SyntaxError{"expected atom, theory expression, or comparison", lit.loc};
    }
    return lit;
}

auto Reader::conditional_literal(bool in_head) -> ConditionalLiteral {
    ConditionalLiteral elem;
    elem.literal = literal();
    if (accept(TokenKind::Colon)) {
        // An empty condition is allowed and means true.
        auto stop = [&]() {
            return at(TokenKind::Semicolon) || at(TokenKind::Dot) || at(TokenKind::RBrace) || at(TokenKind::If) ||
                   (in_head && at(TokenKind::Bar));
        };
        if (!stop()) {
            elem.condition.push_back(literal());
            while (accept(TokenKind::Comma)) {
                elem.condition.push_back(literal());
            }
        }
    }
    return elem;
}

auto Reader::body() -> std::vector<ConditionalLiteral> {
    std::vector<ConditionalLiteral> elems;
    if (at(TokenKind::Dot)) {
        return elems;
    }
    elems.push_back(conditional_literal(false));
    while (accept(TokenKind::Comma) || accept(TokenKind::Semicolon)) {
        elems.push_back(conditional_literal(false));
    }
    return elems;
}

// {{{1 program parser

namespace {

class ProgramParser : public Reader {
public:
    using Reader::Reader;

    auto parse() -> Program {
        Program prg;
        while (!at(TokenKind::End)) {
            prg.statements.push_back(statement());
        }
        return prg;
    }

    auto statement() -> Statement {
        auto loc = peek().loc;
        if (at(TokenKind::Directive)) {
            auto const &name = peek().text;
            if (name == "external") {
                return external(loc);
            }
            if (name == "show") {
                return show(loc);
            }
            if (name == "const") {
                return constant(loc);
            }
            if (name == "type") {
                return type_decl(loc);
            }
            fail("unknown directive");
        }
        return rule(loc);
    }

private:
    auto rule(Location loc) -> Rule {
        Rule rule;
        rule.loc = loc;
        if (accept(TokenKind::If)) {
            rule.kind = HeadKind::Empty;
            rule.body = body();
            if (rule.body.empty()) {
                throw SyntaxError{"integrity constraint with empty body", loc};
            }
        } else if (accept(TokenKind::LBrace)) {
            rule.kind = HeadKind::Choice;
            if (!at(TokenKind::RBrace)) {
                rule.head.push_back(conditional_literal(true));
                while (accept(TokenKind::Semicolon)) {
                    rule.head.push_back(conditional_literal(true));
                }
            }
            expect(TokenKind::RBrace, "'}'");
            if (accept(TokenKind::If)) {
                rule.body = body();
            }
        } else {
            rule.kind = HeadKind::Disjunction;
            rule.head.push_back(conditional_literal(true));
            while (accept(TokenKind::Semicolon) || accept(TokenKind::Bar)) {
                rule.head.push_back(conditional_literal(true));
            }
            if (accept(TokenKind::If)) {
                rule.body = body();
            }
        }
        for (auto const &elem : rule.head) {
            if (elem.literal.is_comparison()) {
                throw SyntaxError{"comparison in rule head", elem.literal.loc};
            }
        }
        if (!at(TokenKind::Dot)) {
            fail("expected '.' at end of rule");
        }
        next();
        return rule;
    }

    auto condition() -> std::vector<ConditionalLiteral> {
        std::vector<ConditionalLiteral> cond;
        if (accept(TokenKind::Colon)) {
            cond = body();
        }
        return cond;
    }

    auto external(Location loc) -> External {
        next();
        External ext;
        ext.loc = loc;
        ext.atom = literal();
        if (ext.atom.sign != Sign::Positive || ext.atom.is_comparison()) {
            throw SyntaxError{"external directive requires an atom or theory expression", loc};
        }
        ext.condition = condition();
        expect(TokenKind::Dot, "'.'");
        return ext;
    }

    auto show(Location loc) -> Show {
        next();
        Show show;
        show.loc = loc;
        if (accept(TokenKind::Dot)) {
            show.signature = Signature{"", 0};
            return show;
        }
        if (at(TokenKind::Identifier) && peek(1).kind == TokenKind::Slash && peek(2).kind == TokenKind::Number) {
            auto name = next().text;
            next();
            show.signature = Signature{name, static_cast<int>(next().number)};
        } else if (at(TokenKind::Minus) && peek(1).kind == TokenKind::Identifier && peek(2).kind == TokenKind::Slash) {
            fail("classical negation is not supported");
        } else {
            show.term = term();
            show.condition = condition();
        }
        expect(TokenKind::Dot, "'.'");
        return show;
    }

    auto constant(Location loc) -> Const {
        next();
        Const def;
        def.loc = loc;
        def.name = expect(TokenKind::Identifier, "constant name").text;
        expect(TokenKind::Eq, "'='");
        def.value = term();
        if (!def.value.is_ground()) {
            throw SyntaxError{"constant definition must be ground", loc};
        }
        expect(TokenKind::Dot, "'.'");
        return def;
    }

    auto type_decl(Location loc) -> TypeDecl {
        auto begin = peek().offset;
        next();
        expect(TokenKind::Identifier, "type name");
        expect(TokenKind::LBrace, "'{'");
        int depth = 1;
        while (depth > 0) {
            if (at(TokenKind::End)) {
                fail("unbalanced braces in type declaration");
            }
            if (at(TokenKind::LBrace)) {
                ++depth;
            } else if (at(TokenKind::RBrace)) {
                --depth;
            }
            next();
        }
        auto end = peek().offset;
        auto raw = text().substr(begin, end - begin);
        while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back())) != 0) {
            raw.remove_suffix(1);
        }
        return TypeDecl{std::string{raw}, loc};
    }
};

} // namespace

} // namespace detail

auto parse_program(std::string_view text, std::string_view file) -> Program {
    detail::ProgramParser parser{detail::tokenize(text, file), text};
    return parser.parse();
}

auto parse_term(std::string_view text) -> Term {
    detail::Reader reader{detail::tokenize(text), text};
    auto term = reader.term();
    if (!reader.at(detail::TokenKind::End)) {
        reader.fail("unexpected trailing input");
    }
    return term;
}

auto parse_expression(std::string_view text) -> TheoryExpression {
    auto term = parse_term(text);
    if (term.kind != Term::Kind::Function || !term.theory) {
        throw SyntaxError{"expected theory expression", term.loc};
    }
    return TheoryExpression::from_term(term);
}

// {{{1 formatting

namespace {

void format_into(std::string &out, Term const &term);

auto precedence(Term const &term) -> int {
    switch (term.kind) {
        case Term::Kind::Interval: return 0;
        case Term::Kind::Binary:
            return term.binary_op == BinaryOp::Add || term.binary_op == BinaryOp::Sub ? 1 : 2;
        case Term::Kind::Unary: return term.unary_op == UnaryOp::Minus ? 3 : 4;
        case Term::Kind::Symbol: return term.symbol.is_number() && term.symbol.num() < 0 ? 3 : 4;
        default: return 4;
    }
}

void format_operand(std::string &out, Term const &term, int min_prec) {
    if (precedence(term) < min_prec) {
        out += '(';
        format_into(out, term);
        out += ')';
    } else {
        format_into(out, term);
    }
}

void format_into(std::string &out, Term const &term) {
    switch (term.kind) {
        case Term::Kind::Symbol: out += term.symbol.to_string(); break;
        case Term::Kind::Variable: out += term.name; break;
        case Term::Kind::Function: {
            if (term.theory) {
                out += '&';
            }
            out += term.name;
            if (!term.args.empty() || term.name.empty()) {
                out += '(';
                for (std::size_t i = 0; i < term.args.size(); ++i) {
                    if (i > 0) {
                        out += ',';
                    }
                    format_into(out, term.args[i]);
                }
                if (term.name.empty() && term.args.size() == 1) {
                    out += ',';
                }
                out += ')';
            }
            break;
        }
        case Term::Kind::Unary:
            if (term.unary_op == UnaryOp::Abs) {
                out += '|';
                format_into(out, term.args[0]);
                out += '|';
            } else {
                out += '-';
                format_operand(out, term.args[0], 4);
            }
            break;
        case Term::Kind::Binary: {
            auto prec = precedence(term);
            format_operand(out, term.args[0], prec);
            switch (term.binary_op) {
                case BinaryOp::Add: out += '+'; break;
                case BinaryOp::Sub: out += '-'; break;
                case BinaryOp::Mul: out += '*'; break;
                case BinaryOp::Div: out += '/'; break;
                case BinaryOp::Mod: out += '\\'; break;
            }
            format_operand(out, term.args[1], prec + 1);
            break;
        }
        case Term::Kind::Interval:
            format_operand(out, term.args[0], 1);
            out += "..";
            format_operand(out, term.args[1], 1);
            break;
    }
}

auto relation_text(Relation rel) -> char const * {
    switch (rel) {
        case Relation::Eq: return "=";
        case Relation::Neq: return "!=";
        case Relation::Lt: return "<";
        case Relation::Leq: return "<=";
        case Relation::Gt: return ">";
        case Relation::Geq: return ">=";
    }
    return "=";
}

auto format_conditional(ConditionalLiteral const &elem) -> std::string {
    auto out = format_literal(elem.literal);
    if (elem.conditional()) {
        out += " : ";
        for (std::size_t i = 0; i < elem.condition.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            out += format_literal(elem.condition[i]);
        }
    }
    return out;
}

auto format_body(std::vector<ConditionalLiteral> const &body) -> std::string {
    bool conditional = std::any_of(body.begin(), body.end(), [](auto const &e) { return e.conditional(); });
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i > 0) {
            out += conditional ? "; " : ", ";
        }
        out += format_conditional(body[i]);
    }
    return out;
}

} // namespace

auto format_term(Term const &term) -> std::string {
    std::string out;
    format_into(out, term);
    return out;
}

auto format_expression(TheoryExpression const &expr) -> std::string { return format_term(expr.to_term()); }

auto format_literal(Literal const &lit) -> std::string {
    std::string out = lit.sign == Sign::Negative ? "not " : "";
    if (lit.is_comparison()) {
        auto const &cmp = lit.comparison();
        out += format_term(cmp.lhs);
        out += relation_text(cmp.relation);
        out += format_term(cmp.rhs);
    } else {
        out += format_term(lit.as_term());
    }
    return out;
}

auto format_statement(Statement const &stm) -> std::string {
    struct Visitor {
        auto operator()(Rule const &rule) const -> std::string {
            std::string out;
            if (rule.kind == HeadKind::Choice) {
                out += '{';
                for (std::size_t i = 0; i < rule.head.size(); ++i) {
                    if (i > 0) {
                        out += "; ";
                    }
                    out += format_conditional(rule.head[i]);
                }
                out += '}';
            } else if (rule.kind == HeadKind::Disjunction) {
                for (std::size_t i = 0; i < rule.head.size(); ++i) {
                    if (i > 0) {
                        out += "; ";
                    }
                    out += format_conditional(rule.head[i]);
                }
            }
            if (!rule.body.empty()) {
                out += rule.kind == HeadKind::Empty ? ":- " : " :- ";
                out += format_body(rule.body);
            }
            out += '.';
            return out;
        }
        auto operator()(External const &ext) const -> std::string {
            std::string out = "#external " + format_literal(ext.atom);
            if (!ext.condition.empty()) {
                out += " : " + format_body(ext.condition);
            }
            return out + ".";
        }
        auto operator()(Show const &show) const -> std::string {
            if (show.signature) {
                if (show.signature->name.empty()) {
                    return "#show.";
                }
                return "#show " + show.signature->name + "/" + std::to_string(show.signature->arity) + ".";
            }
            std::string out = "#show " + format_term(*show.term);
            if (!show.condition.empty()) {
                out += " : " + format_body(show.condition);
            }
            return out + ".";
        }
        auto operator()(Const const &def) const -> std::string {
            return "#const " + def.name + " = " + format_term(def.value) + ".";
        }
        auto operator()(TypeDecl const &decl) const -> std::string { return decl.text; }
    };
    return std::visit(Visitor{}, stm);
}

auto format_program(Program const &prg) -> std::string {
    std::string out;
    for (auto const &stm : prg.statements) {
        out += format_statement(stm);
        out += '\n';
    }
    return out;
}

} // namespace tmeta

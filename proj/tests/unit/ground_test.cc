// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include "support.hh"

#include <tmeta/transform.hh>

#include <catch_amalgamated.hpp>

#include <map>

using namespace tmeta;

namespace {

auto ground_text(std::string_view text) -> std::string { return format_ground(ground(parse_program(text))); }

// Random non-ground programs over p/1, q/1, r/2 and the domain d/1.

struct GenAtom {
    std::string pred;
    std::vector<std::string> args;

    [[nodiscard]] auto text(std::map<std::string, std::string> const &sub = {}) const -> std::string {
        if (args.empty()) {
            return pred;
        }
        std::string out = pred + "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            auto it = sub.find(args[i]);
            out += (i == 0 ? "" : ",") + (it == sub.end() ? args[i] : it->second);
        }
        return out + ")";
    }
};

struct GenRule {
    enum class Kind { Normal, Disjunction, Choice, Constraint } kind = Kind::Normal;
    std::vector<GenAtom> head;
    std::vector<std::pair<bool, GenAtom>> body;

    [[nodiscard]] auto text(std::map<std::string, std::string> const &sub = {}) const -> std::string {
        std::string out;
        for (std::size_t i = 0; i < head.size(); ++i) {
            out += (i == 0 ? "" : "; ") + head[i].text(sub);
        }
        if (kind == Kind::Choice) {
            out = "{ " + out + " }";
        }
        for (std::size_t i = 0; i < body.size(); ++i) {
            out += (i == 0 ? (head.empty() ? ":- " : " :- ") : ", ");
            out += (body[i].first ? "" : "not ") + body[i].second.text(sub);
        }
        return out + ".";
    }
};

class NonGroundGenerator {
public:
    explicit NonGroundGenerator(std::uint64_t seed) : rng_{seed} {}

    auto program() -> std::vector<GenRule> {
        std::vector<GenRule> out;
        for (auto const *c : {"1", "2"}) {
            GenRule fact;
            fact.head.push_back({"d", {c}});
            out.push_back(fact);
        }
        auto rules = pick(1, 5);
        for (int i = 0; i < rules; ++i) {
            out.push_back(rule());
        }
        return out;
    }

private:
    auto pick(int lo, int hi) -> int { return std::uniform_int_distribution<int>{lo, hi}(rng_); }

    auto term() -> std::string {
        static constexpr std::array<char const *, 4> terms{"X", "Y", "1", "2"};
        return terms[pick(0, 3)];
    }

    auto atom() -> GenAtom {
        switch (pick(0, 3)) {
            case 0:
                return {"p", {term()}};
            case 1:
                return {"q", {term()}};
            case 2:
                return {"r", {term(), term()}};
            default:
                return {"s", {}};
        }
    }

    auto rule() -> GenRule {
        GenRule out;
        auto kind = pick(0, 9);
        out.kind = kind < 5   ? GenRule::Kind::Normal
                   : kind < 7 ? GenRule::Kind::Disjunction
                   : kind < 9 ? GenRule::Kind::Choice
                              : GenRule::Kind::Constraint;
        auto heads = out.kind == GenRule::Kind::Normal       ? 1
                     : out.kind == GenRule::Kind::Constraint ? 0
                                                             : pick(1, 2);
        for (int i = 0; i < heads; ++i) {
            out.head.push_back(atom());
        }
        auto size = pick(heads == 0 ? 1 : 0, 3);
        for (int i = 0; i < size; ++i) {
            out.body.emplace_back(pick(0, 2) != 0, atom());
        }
        std::set<std::string> bound;
        std::set<std::string> used;
        auto vars = [](GenAtom const &a, std::set<std::string> &into) {
            for (auto const &arg : a.args) {
                if (std::isupper(static_cast<unsigned char>(arg[0])) != 0) {
                    into.insert(arg);
                }
            }
        };
        for (auto const &[positive, a] : out.body) {
            vars(a, positive ? bound : used);
        }
        for (auto const &a : out.head) {
            vars(a, used);
        }
        for (auto const &var : used) {
            if (!bound.contains(var)) {
                out.body.emplace_back(true, GenAtom{"d", {var}});
            }
        }
        return out;
    }

    std::mt19937_64 rng_;
};

auto render(std::vector<GenRule> const &rules) -> std::string {
    std::string out;
    for (auto const &rule : rules) {
        out += rule.text() + "\n";
    }
    return out;
}

//! Instantiates every rule with every substitution over {1, 2}.
auto naive_ground(std::vector<GenRule> const &rules) -> PropProgram {
    PropProgram out;
    std::map<std::string, int> index;
    auto id = [&](std::string const &name) {
        auto [it, inserted] = index.emplace(name, out.atom_count);
        if (inserted) {
            out.names.push_back(*parse_term(name).to_symbol());
            ++out.atom_count;
        }
        return it->second;
    };
    for (auto const &rule : rules) {
        for (auto const *x : {"1", "2"}) {
            for (auto const *y : {"1", "2"}) {
                std::map<std::string, std::string> sub{{"X", x}, {"Y", y}};
                PRule r;
                r.choice = rule.kind == GenRule::Kind::Choice;
                for (auto const &a : rule.head) {
                    r.head.push_back(id(a.text(sub)));
                }
                for (auto const &[positive, a] : rule.body) {
                    r.body.push_back({id(a.text(sub)), positive});
                }
                out.rules.push_back(std::move(r));
            }
        }
    }
    return out;
}

auto model_names(PropProgram const &prg, std::vector<PModel> const &models) -> std::set<std::set<std::string>> {
    std::set<std::set<std::string>> out;
    for (auto const &model : models) {
        std::set<std::string> names;
        for (auto atom : model) {
            names.insert(prg.names[atom].to_string());
        }
        out.insert(std::move(names));
    }
    return out;
}

} // namespace

TEST_CASE("facts are derived and negation is simplified", "[ground]") {
    CHECK(ground_text("light(l1). red(L) :- not green(L), light(L).") == "light(l1).\nred(l1).\n");
    CHECK(ground_text("p :- q.").empty());
    CHECK(ground_text("a. b :- a, not c. c :- not b.").find("c :- not b.") != std::string::npos);
}

TEST_CASE("externals survive simplification", "[ground]") {
    auto gp = ground(parse_program("#external e. p :- e."));
    CHECK(gp.externals == std::vector<Symbol>{Symbol::function("e")});
    CHECK(format_ground(gp) == "p :- e.\n#external e.\n");
    auto program = PropProgram::from_ground(gp);
    auto models = model_names(program, solve(program));
    CHECK(models == std::set<std::set<std::string>>{{}});
}

TEST_CASE("conditional heads expand over their condition", "[ground]") {
    auto tel = test::grammar_for(Logic::Tel);
    auto gp = ground(transform(parse_program("light(l1). light(l2). &eventually(green(L)) : light(L) :- &initial."), tel));
    auto text = format_ground(gp);
    CHECK(text.find("&eventually(green(l1)); &eventually(green(l2)) :- &initial.") != std::string::npos);
}

TEST_CASE("constants are replaced before grounding", "[ground]") {
    auto prg = parse_program("#const k = 2. p(k). q(X) :- p(X).");
    CHECK(format_ground(ground(prg)) == "p(2).\nq(2).\n");
    GroundOptions options;
    options.constants = {parse_constant("k=5")};
    CHECK(format_ground(ground(prg, options)) == "p(5).\nq(5).\n");
    CHECK_THROWS(parse_constant("k"));
}

TEST_CASE("grounding is deterministic", "[ground][property]") {
    NonGroundGenerator gen{31};
    for (int i = 0; i < 100; ++i) {
        auto text = render(gen.program());
        auto a = ground(parse_program(text));
        auto b = ground(parse_program(text));
        CHECK(format_ground(a) == format_ground(b));
        CHECK(a.atoms == b.atoms);
        CHECK(std::is_sorted(a.atoms.begin(), a.atoms.end()));
    }
}

TEST_CASE("grounding preserves the stable models of naive instantiation", "[ground][property]") {
    NonGroundGenerator gen{32};
    for (int i = 0; i < 300; ++i) {
        auto rules = gen.program();
        auto text = render(rules);
        INFO(text);
        auto naive = naive_ground(rules);
        REQUIRE(naive.atom_count <= 16);
        auto expected = model_names(naive, test::brute_force_stable(naive));
        auto program = PropProgram::from_ground(ground(parse_program(text)));
        auto actual = model_names(program, solve(program));
        CHECK(actual == expected);
    }
}

TEST_CASE("unsimplified grounding agrees with simplified grounding", "[ground][property]") {
    NonGroundGenerator gen{33};
    GroundOptions raw;
    raw.simplify = false;
    for (int i = 0; i < 100; ++i) {
        auto text = render(gen.program());
        INFO(text);
        auto simple = PropProgram::from_ground(ground(parse_program(text)));
        auto full = PropProgram::from_ground(ground(parse_program(text), raw));
        CHECK(model_names(simple, solve(simple)) == model_names(full, solve(full)));
    }
}

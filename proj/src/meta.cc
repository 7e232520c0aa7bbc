// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/meta.hh>

#include <algorithm>

namespace tmeta {

namespace {

constexpr std::string_view core_text = R"(
time(0..n).
conjunction(B,T) :- literal_tuple(B), time(T);
    hold(L,T) : literal_tuple(B,L), L > 0;
    not hold(A,T) : literal_tuple(B,L), L < 0, A = -L.
body(normal(B),T) :- rule(_,normal(B)), conjunction(B,T).
hold(A,T) : atom_tuple(H,A) :- rule(disjunction(H),normal(B)), body(normal(B),T).
{ hold(A,T) : atom_tuple(H,A) } :- rule(choice(H),normal(B)), body(normal(B),T).
)";

constexpr std::string_view bridge_text = R"(
true(O,T) :- output(O,B), time(T); hold(L,T) : literal_tuple(B,L).
hold(L,T) :- output(O,B), literal_tuple(B,L), true(O,T).
)";

// Shared by every linear-time type; `$` stands for the type name.
constexpr std::string_view base_text = R"(
true(&true,T) :- formula($,&true), time(T).

true(&initial,0) :- formula($,&initial).
:- formula($,&initial), true(&initial,T), T > 0.

true(&not(F),T) :- formula($,&not(F)), time(T), not true(F,T).
:- formula($,&not(F)), true(&not(F),T), true(F,T).
)";

constexpr std::string_view tel_text = R"(
true(&next(F),T) :- formula(tel,&next(F)), time(T), T < n, true(F,T+1).
true(F,T+1) :- formula(tel,&next(F)), true(&next(F),T), T < n.
:- formula(tel,&next(F)), true(&next(F),n).

true(&eventually(F),T) :- formula(tel,&eventually(F)), time(T), time(J), T <= J, true(F,J).
true(F,J) : time(J), T <= J :- formula(tel,&eventually(F)), true(&eventually(F),T).
)";

constexpr std::string_view mel_text = R"(
delay(1..m).
{ tau_diff(T,D) : delay(D) } :- time(T), T > 0.
:- tau_diff(T,D), tau_diff(T,E), D < E.
tau_set(T) :- tau_diff(T,D).
:- time(T), T > 0, not tau_set(T).
tau(0,0).
tau(T,W) :- tau_diff(T,D), tau(S,V), S = T-1, W = V+D, W <= m.
tau_ok(T) :- tau(T,V).
:- time(T), not tau_ok(T).

true(&next(&i(L,U),F),T) :- formula(mel,&next(&i(L,U),F)), time(T), T < n,
    true(F,T+1), tau_diff(T+1,D), L <= D, D < U.
true(F,T+1) :- formula(mel,&next(&i(L,U),F)), true(&next(&i(L,U),F),T), T < n.
:- formula(mel,&next(&i(L,U),F)), true(&next(&i(L,U),F),n).
:- formula(mel,&next(&i(L,U),F)), true(&next(&i(L,U),F),T), tau_diff(T+1,D), D < L.
:- formula(mel,&next(&i(L,U),F)), true(&next(&i(L,U),F),T), tau_diff(T+1,D), D >= U.

out_of(&eventually(&i(L,U),F),T,J) :- formula(mel,&eventually(&i(L,U),F)),
    tau(T,V), tau(J,W), T <= J, W-V < L.
out_of(&eventually(&i(L,U),F),T,J) :- formula(mel,&eventually(&i(L,U),F)),
    tau(T,V), tau(J,W), T <= J, W-V >= U.
true(&eventually(&i(L,U),F),T) :- formula(mel,&eventually(&i(L,U),F)),
    tau(T,V), tau(J,W), T <= J, L <= W-V, W-V < U, true(F,J).
true(F,J) : time(J), T <= J, not out_of(&eventually(&i(L,U),F),T,J) :-
    formula(mel,&eventually(&i(L,U),F)), true(&eventually(&i(L,U),F),T).
)";

constexpr std::string_view del_text = R"(
formula(del,&eventually(A,&eventually(B,F))) :- formula(del,&eventually(&seq(A,B),F)).
formula(del,&eventually(A,F)) :- formula(del,&eventually(&choice(A,B),F)).
formula(del,&eventually(B,F)) :- formula(del,&eventually(&choice(A,B),F)).
formula(del,&eventually(A,&eventually(&star(A),F))) :- formula(del,&eventually(&star(A),F)).
formula(del,&eventually(&upto(A,n),F)) :- formula(del,&eventually(&star(A),F)).
formula(del,&eventually(A,&eventually(&upto(A,K-1),F))) :- formula(del,&eventually(&upto(A,K),F)), K > 0.
formula(del,G) :- formula(del,&eventually(&test(G),F)).
formula(del,F) :- formula(del,&eventually(P,F)).

formula(del,&always(A,&always(B,F))) :- formula(del,&always(&seq(A,B),F)).
formula(del,&always(A,F)) :- formula(del,&always(&choice(A,B),F)).
formula(del,&always(B,F)) :- formula(del,&always(&choice(A,B),F)).
formula(del,&always(A,&always(&star(A),F))) :- formula(del,&always(&star(A),F)).
formula(del,&always(&upto(A,n),F)) :- formula(del,&always(&star(A),F)).
formula(del,&always(A,&always(&upto(A,K-1),F))) :- formula(del,&always(&upto(A,K),F)), K > 0.
formula(del,G) :- formula(del,&always(&test(G),F)).
formula(del,F) :- formula(del,&always(P,F)).

true(&eventually(&step,F),T) :- formula(del,&eventually(&step,F)), time(T), T < n, true(F,T+1).
true(F,T+1) :- formula(del,&eventually(&step,F)), true(&eventually(&step,F),T), T < n.
:- formula(del,&eventually(&step,F)), true(&eventually(&step,F),n).

true(&eventually(&test(G),F),T) :- formula(del,&eventually(&test(G),F)), true(G,T), true(F,T).
true(G,T) :- formula(del,&eventually(&test(G),F)), true(&eventually(&test(G),F),T).
true(F,T) :- formula(del,&eventually(&test(G),F)), true(&eventually(&test(G),F),T).

true(&eventually(&seq(A,B),F),T) :-
    formula(del,&eventually(&seq(A,B),F)), true(&eventually(A,&eventually(B,F)),T).
true(&eventually(A,&eventually(B,F)),T) :-
    formula(del,&eventually(&seq(A,B),F)), true(&eventually(&seq(A,B),F),T).

true(&eventually(&choice(A,B),F),T) :- formula(del,&eventually(&choice(A,B),F)), true(&eventually(A,F),T).
true(&eventually(&choice(A,B),F),T) :- formula(del,&eventually(&choice(A,B),F)), true(&eventually(B,F),T).
true(&eventually(A,F),T); true(&eventually(B,F),T) :-
    formula(del,&eventually(&choice(A,B),F)), true(&eventually(&choice(A,B),F),T).

true(&eventually(&star(A),F),T) :- formula(del,&eventually(&star(A),F)), true(&eventually(&upto(A,n),F),T).
true(&eventually(&upto(A,n),F),T) :- formula(del,&eventually(&star(A),F)), true(&eventually(&star(A),F),T).

true(&eventually(&upto(A,K),F),T) :- formula(del,&eventually(&upto(A,K),F)), true(F,T).
true(&eventually(&upto(A,K),F),T) :-
    formula(del,&eventually(&upto(A,K),F)), K > 0, true(&eventually(A,&eventually(&upto(A,K-1),F)),T).
true(F,T) :- formula(del,&eventually(&upto(A,0),F)), true(&eventually(&upto(A,0),F),T).
true(F,T); true(&eventually(A,&eventually(&upto(A,K-1),F)),T) :-
    formula(del,&eventually(&upto(A,K),F)), K > 0, true(&eventually(&upto(A,K),F),T).

true(&always(&step,F),T) :- formula(del,&always(&step,F)), time(T), T < n, true(F,T+1).
true(&always(&step,F),n) :- formula(del,&always(&step,F)).
true(F,T+1) :- formula(del,&always(&step,F)), true(&always(&step,F),T), T < n.

true(&always(&test(G),F),T) :- formula(del,&always(&test(G),F)), true(F,T).
true(&always(&test(G),F),T) :- formula(del,&always(&test(G),F)), time(T), not true(G,T).
true(G,T); true(&always(&test(G),F),T) :- formula(del,&always(&test(G),F)), time(T), not refuted(F,T).
refuted(F,T) :- formula(del,&always(&test(G),F)), time(T), not true(F,T).
true(F,T) :- formula(del,&always(&test(G),F)), true(&always(&test(G),F),T), true(G,T).

true(&always(&seq(A,B),F),T) :- formula(del,&always(&seq(A,B),F)), true(&always(A,&always(B,F)),T).
true(&always(A,&always(B,F)),T) :- formula(del,&always(&seq(A,B),F)), true(&always(&seq(A,B),F),T).

true(&always(&choice(A,B),F),T) :-
    formula(del,&always(&choice(A,B),F)), true(&always(A,F),T), true(&always(B,F),T).
true(&always(A,F),T) :- formula(del,&always(&choice(A,B),F)), true(&always(&choice(A,B),F),T).
true(&always(B,F),T) :- formula(del,&always(&choice(A,B),F)), true(&always(&choice(A,B),F),T).

true(&always(&star(A),F),T) :- formula(del,&always(&star(A),F)), true(&always(&upto(A,n),F),T).
true(&always(&upto(A,n),F),T) :- formula(del,&always(&star(A),F)), true(&always(&star(A),F),T).

true(&always(&upto(A,0),F),T) :- formula(del,&always(&upto(A,0),F)), true(F,T).
true(&always(&upto(A,K),F),T) :-
    formula(del,&always(&upto(A,K),F)), K > 0, true(F,T), true(&always(A,&always(&upto(A,K-1),F)),T).
true(F,T) :- formula(del,&always(&upto(A,K),F)), true(&always(&upto(A,K),F),T).
true(&always(A,&always(&upto(A,K-1),F)),T) :-
    formula(del,&always(&upto(A,K),F)), K > 0, true(&always(&upto(A,K),F),T).
)";

auto replace_all(std::string_view text, char from, std::string_view to) -> std::string {
    std::string out;
    for (auto c : text) {
        if (c == from) {
            out += to;
        } else {
            out += c;
        }
    }
    return out;
}

void check_outputs(ReifiedDB const &db) {
    for (auto const &[sym, tuple] : db.outputs) {
        auto it = db.literal_tuples.find(tuple);
        if (it == db.literal_tuples.end()) {
            throw ReifyError{"output " + sym.to_string() + " refers to missing literal tuple " + std::to_string(tuple)};
        }
        if (it->second.size() > 1 || (it->second.size() == 1 && it->second.front() < 0)) {
            throw ReifyError{"output " + sym.to_string() + " is not a single positive literal"};
        }
    }
}

auto fun(std::string_view name, std::initializer_list<Symbol> args, bool theory = false) -> Symbol {
    return Symbol::function(name, args, theory);
}

auto is_op(Symbol sym, std::string_view name, std::size_t arity) -> bool {
    return sym.is_function() && sym.theory() && sym.name() == name && sym.args().size() == arity;
}

void close_one(Symbol formula, std::set<Symbol> &out, std::vector<Symbol> &todo) {
    auto add = [&](Symbol sym) {
        if (out.insert(sym).second) {
            todo.push_back(sym);
        }
    };
    for (auto const *op : {"eventually", "always"}) {
        if (!is_op(formula, op, 2)) {
            continue;
        }
        auto path = formula.args()[0];
        auto body = formula.args()[1];
        auto modal = [&](Symbol p, Symbol f) { return fun(op, {p, f}, true); };
        add(body);
        if (is_op(path, "seq", 2)) {
            add(modal(path.args()[0], modal(path.args()[1], body)));
        } else if (is_op(path, "choice", 2)) {
            add(modal(path.args()[0], body));
            add(modal(path.args()[1], body));
        } else if (is_op(path, "star", 1)) {
            add(modal(path.args()[0], modal(path, body)));
        } else if (is_op(path, "test", 1)) {
            add(path.args()[0]);
        }
    }
}

} // namespace

auto parse_logic(std::string_view name) -> Logic {
    if (name == "tel") {
        return Logic::Tel;
    }
    if (name == "mel") {
        return Logic::Mel;
    }
    if (name == "del") {
        return Logic::Del;
    }
    throw Error{"unknown logic '" + std::string{name} + "' (expected tel, mel, or del)"};
}

auto to_string(Logic logic) -> std::string_view {
    switch (logic) {
        case Logic::Tel: return "tel";
        case Logic::Mel: return "mel";
        case Logic::Del: return "del";
    }
    return "tel";
}

auto MetaOptions::effective_max_time() const -> int { return max_time.value_or(4 * (horizon + 1)); }

auto layers(Logic logic) -> std::vector<Layer> {
    switch (logic) {
        case Logic::Tel: return {Layer::Core, Layer::Bridge, Layer::Tel};
        case Logic::Mel: return {Layer::Core, Layer::Bridge, Layer::Mel};
        case Logic::Del: return {Layer::Core, Layer::Bridge, Layer::Tel, Layer::Del};
    }
    return {};
}

auto layer_text(Layer layer) -> std::string {
    switch (layer) {
        case Layer::Core: return std::string{core_text};
        case Layer::Bridge: return std::string{bridge_text};
        case Layer::Tel: return replace_all(base_text, '$', "tel") + std::string{tel_text};
        case Layer::Mel: return replace_all(base_text, '$', "mel") + std::string{mel_text};
        case Layer::Del: return std::string{del_text};
    }
    return {};
}

auto instantiate(ReifiedDB const &db, std::vector<Layer> const &layers, MetaOptions const &options) -> GroundProgram {
    if (options.horizon < 0) {
        throw Error{"horizon must be non-negative"};
    }
    auto max_time = options.effective_max_time();
    bool metric = std::find(layers.begin(), layers.end(), Layer::Mel) != layers.end();
    if (metric && max_time < options.horizon) {
        throw Error{"maximal time " + std::to_string(max_time) + " is smaller than the horizon " +
                    std::to_string(options.horizon)};
    }
    validate(db);
    check_outputs(db);
    std::string text;
    for (auto layer : layers) {
        text += layer_text(layer);
    }
    auto prg = parse_program(text, "<meta>");
    GroundOptions gopts;
    gopts.constants = {{"n", Symbol::number(options.horizon)}, {"m", Symbol::number(max_time)}};
    gopts.depth_limit = options.depth_limit;
    auto facts = reified_facts(db);
    return ground(substitute_constants(prg, gopts.constants), gopts, facts);
}

auto build_timed_core(ReifiedDB const &db, int horizon) -> GroundProgram {
    MetaOptions options;
    options.horizon = horizon;
    return instantiate(db, {Layer::Core}, options);
}

auto build_meta_program(ReifiedDB const &db, Logic logic, MetaOptions const &options) -> GroundProgram {
    return instantiate(db, layers(logic), options);
}

auto fl_close(std::set<Symbol> const &formulas) -> std::set<Symbol> {
    std::set<Symbol> out = formulas;
    std::vector<Symbol> todo(formulas.begin(), formulas.end());
    while (!todo.empty()) {
        auto sym = todo.back();
        todo.pop_back();
        close_one(sym, out, todo);
    }
    return out;
}

namespace meta_atom {

auto truth(Symbol formula, int step) -> Symbol { return fun("true", {formula, Symbol::number(step)}); }
auto hold(AtomId atom, int step) -> Symbol { return fun("hold", {Symbol::number(atom), Symbol::number(step)}); }
auto conjunction(TupleId tuple, int step) -> Symbol {
    return fun("conjunction", {Symbol::number(tuple), Symbol::number(step)});
}
auto tau(int step, int value) -> Symbol { return fun("tau", {Symbol::number(step), Symbol::number(value)}); }

} // namespace meta_atom

} // namespace tmeta

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/reify.hh>

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

namespace tmeta {

namespace {

class Builder {
public:
    explicit Builder(GroundProgram const &gp) : gp_{gp} {
        AtomId id = 1;
        for (auto sym : gp.atoms) {
            ids_.emplace(sym, id++);
        }
    }

    auto build() -> ReifiedDB {
        for (auto const &rule : gp_.rules) {
            std::vector<AtomId> head;
            for (auto sym : rule.head) {
                head.push_back(ids_.at(sym));
            }
            auto h = atom_tuple(std::move(head));
            std::vector<std::int64_t> body;
            for (auto const &lit : rule.body) {
                auto id = static_cast<std::int64_t>(ids_.at(lit.atom));
                body.push_back(lit.positive ? id : -id);
            }
            auto b = literal_tuple(std::move(body));
            db_.rules.push_back({rule.choice, h, b});
        }
        std::set<Symbol> facts(gp_.facts.begin(), gp_.facts.end());
        std::map<Symbol, TupleId> output_tuple;
        for (auto sym : gp_.atoms) {
            auto tuple = facts.count(sym) > 0 ? literal_tuple({})
                                              : literal_tuple({static_cast<std::int64_t>(ids_.at(sym))});
            db_.outputs.emplace_back(sym, tuple);
            output_tuple.emplace(sym, tuple);
        }
        std::set<std::pair<Symbol, Symbol>> formulas;
        for (auto const &[sym, expr] : gp_.expressions) {
            collect_formulas(expr, formulas);
        }
        db_.formulas.assign(formulas.begin(), formulas.end());
        for (auto sym : gp_.externals) {
            db_.externals.emplace_back(ids_.at(sym), false);
        }
        if (gp_.show_all) {
            for (auto sym : gp_.atoms) {
                if (!sym.theory() && !sym.name().starts_with("__")) {
                    db_.show_atoms.emplace_back(sym, output_tuple.at(sym));
                }
            }
        }
        for (auto const &show : gp_.shows) {
            std::vector<std::int64_t> cond;
            for (auto const &lit : show.condition) {
                auto id = static_cast<std::int64_t>(ids_.at(lit.atom));
                cond.push_back(lit.positive ? id : -id);
            }
            auto tuple = literal_tuple(std::move(cond));
            (show.atom ? db_.show_atoms : db_.show_terms).emplace_back(show.term, tuple);
        }
        return std::move(db_);
    }

private:
    static auto node_symbol(TheoryExpression const &expr) -> Symbol {
        if (expr.leaf) {
            auto sym = expr.leaf->to_symbol();
            if (!sym) {
                throw ReifyError{"non-ground theory expression leaf " + format_term(*expr.leaf)};
            }
            return *sym;
        }
        SymbolVector args;
        for (auto const &arg : expr.args) {
            args.push_back(node_symbol(arg));
        }
        return Symbol::function(expr.op, args, true);
    }

    static void collect_formulas(TheoryExpression const &expr, std::set<std::pair<Symbol, Symbol>> &out) {
        auto sym = node_symbol(expr);
        for (auto const &type : expr.memberships) {
            out.emplace(Symbol::function(type), sym);
        }
        for (auto const &arg : expr.args) {
            collect_formulas(arg, out);
        }
    }

    auto atom_tuple(std::vector<AtomId> atoms) -> TupleId {
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
        auto [it, inserted] = atom_ids_.emplace(atoms, static_cast<TupleId>(atom_ids_.size()));
        if (inserted) {
            db_.atom_tuples.emplace(it->second, atoms);
        }
        return it->second;
    }

    auto literal_tuple(std::vector<std::int64_t> lits) -> TupleId {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
        auto [it, inserted] = literal_ids_.emplace(lits, static_cast<TupleId>(literal_ids_.size()));
        if (inserted) {
            db_.literal_tuples.emplace(it->second, lits);
        }
        return it->second;
    }

    GroundProgram const &gp_;
    ReifiedDB db_;
    std::unordered_map<Symbol, AtomId> ids_;
    std::map<std::vector<AtomId>, TupleId> atom_ids_;
    std::map<std::vector<std::int64_t>, TupleId> literal_ids_;
};

auto num(std::int64_t value) -> Symbol { return Symbol::number(value); }

auto fun(std::string_view name, std::initializer_list<Symbol> args) -> Symbol { return Symbol::function(name, args); }

auto as_id(Symbol sym, char const *what) -> std::int64_t {
    if (!sym.is_number()) {
        throw ReifyError{std::string{"expected integer for "} + what + ", got " + sym.to_string()};
    }
    return sym.num();
}

auto as_tuple_id(Symbol sym, char const *what) -> TupleId {
    auto value = as_id(sym, what);
    if (value < 0) {
        throw ReifyError{std::string{"negative tuple id for "} + what};
    }
    return static_cast<TupleId>(value);
}

} // namespace

auto ReifiedDB::empty() const -> bool {
    return rules.empty() && atom_tuples.empty() && literal_tuples.empty() && outputs.empty() && formulas.empty() &&
           externals.empty() && show_atoms.empty() && show_terms.empty();
}

auto reify(GroundProgram const &gp) -> ReifiedDB { return Builder{gp}.build(); }

auto reified_facts(ReifiedDB const &db) -> std::vector<Symbol> {
    std::vector<Symbol> out;
    for (auto const &rule : db.rules) {
        out.push_back(fun("rule", {fun(rule.choice ? "choice" : "disjunction", {num(rule.head)}),
                                   fun("normal", {num(rule.body)})}));
    }
    for (auto const &[id, atoms] : db.atom_tuples) {
        out.push_back(fun("atom_tuple", {num(id)}));
        for (auto atom : atoms) {
            out.push_back(fun("atom_tuple", {num(id), num(atom)}));
        }
    }
    for (auto const &[id, lits] : db.literal_tuples) {
        out.push_back(fun("literal_tuple", {num(id)}));
        for (auto lit : lits) {
            out.push_back(fun("literal_tuple", {num(id), num(lit)}));
        }
    }
    for (auto const &[sym, tuple] : db.outputs) {
        out.push_back(fun("output", {sym, num(tuple)}));
    }
    for (auto const &[type, expr] : db.formulas) {
        out.push_back(fun("formula", {type, expr}));
    }
    for (auto const &[atom, value] : db.externals) {
        out.push_back(fun("external", {num(atom), Symbol::function(value ? "true" : "false")}));
    }
    for (auto const &[sym, tuple] : db.show_atoms) {
        out.push_back(fun("show_atom", {sym, num(tuple)}));
    }
    for (auto const &[sym, tuple] : db.show_terms) {
        out.push_back(fun("show_term", {sym, num(tuple)}));
    }
    return out;
}

auto emit_reified_text(ReifiedDB const &db) -> std::string {
    std::string out;
    for (auto sym : reified_facts(db)) {
        out += sym.to_string();
        out += ".\n";
    }
    return out;
}

void validate(ReifiedDB const &db) {
    auto need_atoms = [&](TupleId id) {
        if (db.atom_tuples.count(id) == 0) {
            throw ReifyError{"dangling atom_tuple " + std::to_string(id)};
        }
    };
    auto need_lits = [&](TupleId id) {
        if (db.literal_tuples.count(id) == 0) {
            throw ReifyError{"dangling literal_tuple " + std::to_string(id)};
        }
    };
    for (auto const &rule : db.rules) {
        need_atoms(rule.head);
        need_lits(rule.body);
    }
    for (auto const &[sym, tuple] : db.outputs) {
        need_lits(tuple);
    }
    for (auto const &[sym, tuple] : db.show_atoms) {
        need_lits(tuple);
    }
    for (auto const &[sym, tuple] : db.show_terms) {
        need_lits(tuple);
    }
    for (auto const &[id, lits] : db.literal_tuples) {
        for (auto lit : lits) {
            if (lit == 0) {
                throw ReifyError{"literal 0 in literal_tuple " + std::to_string(id)};
            }
        }
    }
    for (auto const &[id, atoms] : db.atom_tuples) {
        for (auto atom : atoms) {
            if (atom == 0) {
                throw ReifyError{"atom id 0 in atom_tuple " + std::to_string(id)};
            }
        }
    }
}

auto parse_reified(std::string_view text) -> ReifiedDB {
    auto prg = parse_program(text);
    ReifiedDB db;
    // Tuples are declared by their unary fact; members may appear first.
    for (auto const &stm : prg.statements) {
        auto const *rule = std::get_if<Rule>(&stm);
        if (rule == nullptr || rule->kind != HeadKind::Disjunction || rule->head.size() != 1 || !rule->body.empty() ||
            rule->head.front().conditional() || !rule->head.front().literal.is_atom() ||
            rule->head.front().literal.sign != Sign::Positive) {
            throw ReifyError{"malformed reified fact: " + format_statement(stm)};
        }
        auto sym = rule->head.front().literal.atom().to_symbol();
        if (!sym) {
            throw ReifyError{"non-ground reified fact: " + format_statement(stm)};
        }
        auto name = sym->name();
        auto args = sym->args();
        auto loc = rule->loc;
        try {
            if (name == "rule" && args.size() == 2) {
                auto head = args[0];
                auto body = args[1];
                if (!head.is_function() || head.args().size() != 1 ||
                    (head.name() != "disjunction" && head.name() != "choice") || !body.is_function() ||
                    body.name() != "normal" || body.args().size() != 1) {
                    throw ReifyError{"unsupported rule form " + sym->to_string()};
                }
                db.rules.push_back({head.name() == "choice", as_tuple_id(head.args()[0], "head"),
                                    as_tuple_id(body.args()[0], "body")});
            } else if (name == "atom_tuple" && args.size() == 1) {
                db.atom_tuples[as_tuple_id(args[0], "atom_tuple")];
            } else if (name == "atom_tuple" && args.size() == 2) {
                auto atom = as_id(args[1], "atom");
                if (atom <= 0) {
                    throw ReifyError{"atom ids must be positive"};
                }
                db.atom_tuples[as_tuple_id(args[0], "atom_tuple")].push_back(static_cast<AtomId>(atom));
            } else if (name == "literal_tuple" && args.size() == 1) {
                db.literal_tuples[as_tuple_id(args[0], "literal_tuple")];
            } else if (name == "literal_tuple" && args.size() == 2) {
                db.literal_tuples[as_tuple_id(args[0], "literal_tuple")].push_back(as_id(args[1], "literal"));
            } else if (name == "output" && args.size() == 2) {
                db.outputs.emplace_back(args[0], as_tuple_id(args[1], "output"));
            } else if (name == "formula" && args.size() == 2) {
                db.formulas.emplace_back(args[0], args[1]);
            } else if (name == "external" && args.size() == 2) {
                auto atom = as_id(args[0], "external");
                if (atom <= 0) {
                    throw ReifyError{"atom ids must be positive"};
                }
                db.externals.emplace_back(static_cast<AtomId>(atom), args[1] == Symbol::function("true"));
            } else if (name == "show_atom" && args.size() == 2) {
                db.show_atoms.emplace_back(args[0], as_tuple_id(args[1], "show_atom"));
            } else if (name == "show_term" && args.size() == 2) {
                db.show_terms.emplace_back(args[0], as_tuple_id(args[1], "show_term"));
            } else {
                throw ReifyError{"unknown reified fact " + sym->to_string()};
            }
        } catch (ReifyError const &err) {
            throw ReifyError{err.message(), loc};
        }
    }
    // Undeclared tuples referenced by member facts are accepted; references
    // from rules and outputs must resolve.
    validate(db);
    for (auto &[id, atoms] : db.atom_tuples) {
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    }
    for (auto &[id, lits] : db.literal_tuples) {
        std::sort(lits.begin(), lits.end());
        lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    }
    return db;
}

namespace {

// A database with atom ids replaced by names and tuple ids by their contents.
using Canonical = std::multiset<std::string>;

auto canonical(ReifiedDB const &db, std::map<AtomId, std::string> const &names) -> Canonical {
    auto atom_name = [&](AtomId id) {
        auto it = names.find(id);
        return it == names.end() ? "#" + std::to_string(id) : it->second;
    };
    auto atoms_of = [&](TupleId id) {
        std::set<std::string> out;
        if (auto it = db.atom_tuples.find(id); it != db.atom_tuples.end()) {
            for (auto atom : it->second) {
                out.insert(atom_name(atom));
            }
        }
        std::string text = "{";
        for (auto const &s : out) {
            text += s + ";";
        }
        return text + "}";
    };
    auto lits_of = [&](TupleId id) {
        std::set<std::string> out;
        if (auto it = db.literal_tuples.find(id); it != db.literal_tuples.end()) {
            for (auto lit : it->second) {
                out.insert((lit < 0 ? "-" : "+") + atom_name(static_cast<AtomId>(lit < 0 ? -lit : lit)));
            }
        }
        std::string text = "{";
        for (auto const &s : out) {
            text += s + ";";
        }
        return text + "}";
    };
    Canonical out;
    for (auto const &rule : db.rules) {
        out.insert(std::string{rule.choice ? "choice" : "disjunction"} + atoms_of(rule.head) + lits_of(rule.body));
    }
    for (auto const &[sym, tuple] : db.outputs) {
        out.insert("output " + sym.to_string() + lits_of(tuple));
    }
    for (auto const &[type, expr] : db.formulas) {
        out.insert("formula " + type.to_string() + " " + expr.to_string());
    }
    for (auto const &[atom, value] : db.externals) {
        out.insert("external " + atom_name(atom) + (value ? " true" : " false"));
    }
    for (auto const &[sym, tuple] : db.show_atoms) {
        out.insert("show_atom " + sym.to_string() + lits_of(tuple));
    }
    for (auto const &[sym, tuple] : db.show_terms) {
        out.insert("show_term " + sym.to_string() + lits_of(tuple));
    }
    return out;
}

// Atoms named by a singleton output tuple; the rest are left anonymous.
auto named_atoms(ReifiedDB const &db, std::vector<AtomId> &anonymous) -> std::map<AtomId, std::string> {
    std::map<AtomId, std::string> names;
    for (auto const &[sym, tuple] : db.outputs) {
        auto it = db.literal_tuples.find(tuple);
        if (it != db.literal_tuples.end() && it->second.size() == 1 && it->second.front() > 0) {
            names.emplace(static_cast<AtomId>(it->second.front()), sym.to_string());
        }
    }
    std::set<AtomId> all;
    for (auto const &[id, atoms] : db.atom_tuples) {
        all.insert(atoms.begin(), atoms.end());
    }
    for (auto const &[id, lits] : db.literal_tuples) {
        for (auto lit : lits) {
            all.insert(static_cast<AtomId>(lit < 0 ? -lit : lit));
        }
    }
    for (auto const &[atom, value] : db.externals) {
        all.insert(atom);
    }
    for (auto atom : all) {
        if (names.count(atom) == 0) {
            anonymous.push_back(atom);
        }
    }
    return names;
}

} // namespace

auto isomorphic(ReifiedDB const &a, ReifiedDB const &b) -> bool {
    std::vector<AtomId> anon_a;
    std::vector<AtomId> anon_b;
    auto names_a = named_atoms(a, anon_a);
    auto names_b = named_atoms(b, anon_b);
    if (anon_a.size() != anon_b.size()) {
        return false;
    }
    if (anon_a.size() > 8) {
        throw ResourceError{"too many unnamed atoms for isomorphism check"};
    }
    for (std::size_t i = 0; i < anon_a.size(); ++i) {
        names_a.emplace(anon_a[i], "?" + std::to_string(i));
    }
    auto target = canonical(a, names_a);
    std::sort(anon_b.begin(), anon_b.end());
    do {
        auto names = names_b;
        for (std::size_t i = 0; i < anon_b.size(); ++i) {
            names.emplace(anon_b[i], "?" + std::to_string(i));
        }
        if (canonical(b, names) == target) {
            return true;
        }
    } while (std::next_permutation(anon_b.begin(), anon_b.end()));
    return false;
}

} // namespace tmeta

// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/solver.hh>

#include <algorithm>
#include <unordered_map>

namespace tmeta {

auto PropProgram::from_ground(GroundProgram const &gp) -> PropProgram {
    PropProgram out;
    std::unordered_map<Symbol, int> index;
    auto id = [&](Symbol sym) {
        auto [it, inserted] = index.emplace(sym, out.atom_count);
        if (inserted) {
            out.names.push_back(sym);
            ++out.atom_count;
        }
        return it->second;
    };
    for (auto sym : gp.atoms) {
        id(sym);
    }
    for (auto sym : gp.facts) {
        out.rules.push_back({false, {id(sym)}, {}});
    }
    for (auto const &rule : gp.rules) {
        PRule r;
        r.choice = rule.choice;
        for (auto sym : rule.head) {
            r.head.push_back(id(sym));
        }
        for (auto const &lit : rule.body) {
            r.body.push_back({id(lit.atom), lit.positive});
        }
        out.rules.push_back(std::move(r));
    }
    return out;
}

namespace {

// {{{1 stability

// Tiny DPLL used to search for a smaller model of a positive reduct.
class ClauseSearch {
public:
    ClauseSearch(int vars, std::vector<std::vector<int>> clauses) : clauses_{std::move(clauses)}, value_(vars, 0) {}

    auto satisfiable() -> bool { return search(); }

private:
    // Literal encoding: +(v+1) true, -(v+1) false.
    [[nodiscard]] auto lit_value(int lit) const -> int {
        auto v = value_[std::abs(lit) - 1];
        return lit > 0 ? v : -v;
    }

    auto search() -> bool {
        std::vector<int> assigned;
        auto undo = [&]() {
            for (auto v : assigned) {
                value_[v] = 0;
            }
        };
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto const &clause : clauses_) {
                int free = 0;
                int last = 0;
                bool sat = false;
                for (auto lit : clause) {
                    auto v = lit_value(lit);
                    if (v > 0) {
                        sat = true;
                        break;
                    }
                    if (v == 0) {
                        ++free;
                        last = lit;
                    }
                }
                if (sat) {
                    continue;
                }
                if (free == 0) {
                    undo();
                    return false;
                }
                if (free == 1) {
                    value_[std::abs(last) - 1] = last > 0 ? 1 : -1;
                    assigned.push_back(std::abs(last) - 1);
                    changed = true;
                }
            }
        }
        auto it = std::find(value_.begin(), value_.end(), 0);
        if (it == value_.end()) {
            return true;
        }
        auto var = static_cast<int>(it - value_.begin());
        for (int v : {-1, 1}) {
            value_[var] = v;
            if (search()) {
                return true;
            }
        }
        value_[var] = 0;
        undo();
        return false;
    }

    std::vector<std::vector<int>> clauses_;
    std::vector<int> value_;
};

} // namespace

auto check_stable(PropProgram const &prg, PModel const &candidate) -> bool {
    std::vector<char> in(prg.atom_count, 0);
    for (auto a : candidate) {
        in[a] = 1;
    }
    // Reduct rules with heads restricted to the candidate.
    struct Reduced {
        std::vector<int> head;
        std::vector<int> body;
    };
    std::vector<Reduced> reduct;
    for (auto const &rule : prg.rules) {
        bool blocked = false;
        std::vector<int> pos;
        for (auto const &lit : rule.body) {
            if (!lit.positive && in[lit.atom] != 0) {
                blocked = true;
                break;
            }
            if (lit.positive) {
                pos.push_back(lit.atom);
            }
        }
        if (blocked) {
            continue;
        }
        bool body_in = std::all_of(pos.begin(), pos.end(), [&](int a) { return in[a] != 0; });
        if (!body_in) {
            continue;
        }
        std::vector<int> head;
        for (auto h : rule.head) {
            if (in[h] != 0) {
                head.push_back(h);
            }
        }
        if (rule.choice) {
            for (auto h : head) {
                reduct.push_back({{h}, pos});
            }
            continue;
        }
        if (head.empty()) {
            return false;
        }
        reduct.push_back({std::move(head), std::move(pos)});
    }
    // Atoms derived by rules with a single remaining head belong to every
    // model of the reduct below the candidate.
    std::vector<char> least(prg.atom_count, 0);
    std::vector<int> missing(reduct.size(), 0);
    std::vector<std::vector<int>> watch(prg.atom_count);
    std::vector<int> queue;
    auto derive = [&](std::size_t r) {
        if (reduct[r].head.size() == 1 && least[reduct[r].head.front()] == 0) {
            least[reduct[r].head.front()] = 1;
            queue.push_back(reduct[r].head.front());
        }
    };
    for (std::size_t r = 0; r < reduct.size(); ++r) {
        auto body = reduct[r].body;
        std::sort(body.begin(), body.end());
        body.erase(std::unique(body.begin(), body.end()), body.end());
        missing[r] = static_cast<int>(body.size());
        for (auto a : body) {
            watch[a].push_back(static_cast<int>(r));
        }
        if (missing[r] == 0) {
            derive(r);
        }
    }
    while (!queue.empty()) {
        auto a = queue.back();
        queue.pop_back();
        for (auto r : watch[a]) {
            if (--missing[r] == 0) {
                derive(static_cast<std::size_t>(r));
            }
        }
    }
    std::vector<int> rest;
    for (auto a : candidate) {
        if (least[a] == 0) {
            rest.push_back(a);
        }
    }
    if (rest.empty()) {
        return true;
    }
    bool definite = std::all_of(reduct.begin(), reduct.end(), [](Reduced const &r) { return r.head.size() <= 1; });
    if (definite) {
        return false;
    }
    // Search for a model N with least <= N < candidate.
    std::vector<int> var(prg.atom_count, -1);
    for (std::size_t i = 0; i < rest.size(); ++i) {
        var[rest[i]] = static_cast<int>(i);
    }
    std::vector<std::vector<int>> clauses;
    for (auto const &r : reduct) {
        std::vector<int> clause;
        bool sat = false;
        for (auto h : r.head) {
            if (least[h] != 0) {
                sat = true;
                break;
            }
            clause.push_back(var[h] + 1);
        }
        if (sat) {
            continue;
        }
        for (auto b : r.body) {
            if (least[b] == 0) {
                clause.push_back(-(var[b] + 1));
            }
        }
        std::sort(clause.begin(), clause.end());
        clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
        clauses.push_back(std::move(clause));
    }
    std::vector<int> smaller;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        smaller.push_back(-static_cast<int>(i + 1));
    }
    clauses.push_back(std::move(smaller));
    return !ClauseSearch{static_cast<int>(rest.size()), std::move(clauses)}.satisfiable();
}

namespace {

// {{{1 search

class Engine {
public:
    explicit Engine(PropProgram const &prg) : prg_{prg}, value_(prg.atom_count, Value::Free) {
        body_occ_.resize(prg.atom_count);
        head_occ_.resize(prg.atom_count);
        pos_occ_.resize(prg.atom_count);
        for (std::size_t r = 0; r < prg.rules.size(); ++r) {
            auto const &rule = prg.rules[r];
            for (auto const &lit : rule.body) {
                add_unique(body_occ_[lit.atom], static_cast<int>(r));
                if (lit.positive) {
                    add_unique(pos_occ_[lit.atom], static_cast<int>(r));
                }
            }
            for (auto h : rule.head) {
                add_unique(head_occ_[h], static_cast<int>(r));
            }
        }
    }

    auto assignment() -> std::vector<Value> & { return value_; }

    // Propagates everything assigned since the last call.
    auto propagate() -> bool {
        if (first_) {
            first_ = false;
            for (std::size_t r = 0; r < prg_.rules.size(); ++r) {
                if (!check_rule(static_cast<int>(r))) {
                    return false;
                }
            }
            for (int a = 0; a < prg_.atom_count; ++a) {
                if (!check_support(a)) {
                    return false;
                }
            }
        }
        while (true) {
            while (head_ < trail_.size()) {
                auto a = trail_[head_++];
                if (!check_support(a)) {
                    return false;
                }
                for (auto const *occ : {&body_occ_[a], &head_occ_[a]}) {
                    for (auto r : *occ) {
                        if (!check_rule(r)) {
                            return false;
                        }
                        for (auto h : prg_.rules[r].head) {
                            if (!check_support(h)) {
                                return false;
                            }
                        }
                    }
                }
            }
            auto before = trail_.size();
            if (!unfounded()) {
                return false;
            }
            if (trail_.size() == before) {
                return true;
            }
        }
    }

    auto assign(int atom, Value val) -> bool {
        if (value_[atom] == val) {
            return true;
        }
        if (value_[atom] != Value::Free) {
            return false;
        }
        value_[atom] = val;
        trail_.push_back(atom);
        return true;
    }

    void seed(std::vector<Value> const &values) {
        for (int a = 0; a < prg_.atom_count; ++a) {
            if (values[a] != Value::Free) {
                value_[a] = values[a];
                trail_.push_back(a);
            }
        }
    }

    auto enumerate(SolveOptions const &options, std::function<bool(PModel const &)> const &on_model, SolveStats &stats)
        -> std::size_t {
        struct Decision {
            std::size_t trail;
            int atom;
            bool flipped;
        };
        std::vector<Decision> decisions;
        std::size_t found = 0;
        int next_free = 0;
        auto backtrack = [&]() -> bool {
            while (!decisions.empty()) {
                auto d = decisions.back();
                decisions.pop_back();
                undo(d.trail);
                next_free = std::min(next_free, d.atom);
                if (!d.flipped) {
                    decisions.push_back({d.trail, d.atom, true});
                    assign(d.atom, Value::True);
                    return true;
                }
            }
            return false;
        };
        bool ok = propagate();
        while (true) {
            if (!ok) {
                ++stats.conflicts;
                if (!backtrack()) {
                    return found;
                }
                ok = propagate();
                continue;
            }
            while (next_free < prg_.atom_count && value_[next_free] != Value::Free) {
                ++next_free;
            }
            if (next_free == prg_.atom_count) {
                PModel model;
                for (int a = 0; a < prg_.atom_count; ++a) {
                    if (value_[a] == Value::True) {
                        model.push_back(a);
                    }
                }
                ++stats.stability_checks;
                if (check_stable(prg_, model)) {
                    ++found;
                    if (!on_model(model) || (options.limit != 0 && found >= options.limit)) {
                        return found;
                    }
                }
                ok = false;
                --stats.conflicts;
                continue;
            }
            ++stats.decisions;
            if (options.decision_limit != 0 && stats.decisions > options.decision_limit) {
                throw ResourceError{"decision limit of " + std::to_string(options.decision_limit) + " exceeded"};
            }
            decisions.push_back({trail_.size(), next_free, false});
            assign(next_free, Value::False);
            ok = propagate();
        }
    }

private:
    static void add_unique(std::vector<int> &vec, int value) {
        if (vec.empty() || vec.back() != value) {
            vec.push_back(value);
        }
    }

    void undo(std::size_t size) {
        while (trail_.size() > size) {
            value_[trail_.back()] = Value::Free;
            trail_.pop_back();
        }
        head_ = std::min(head_, size);
    }

    [[nodiscard]] auto lit_value(PLiteral lit) const -> Value {
        auto v = value_[lit.atom];
        if (v == Value::Free || lit.positive) {
            return v;
        }
        return v == Value::True ? Value::False : Value::True;
    }

    auto make_lit(PLiteral lit, bool truth) -> bool {
        bool atom_true = lit.positive == truth;
        return assign(lit.atom, atom_true ? Value::True : Value::False);
    }

    // Body is false if some literal is false.
    [[nodiscard]] auto body_false(PRule const &rule) const -> bool {
        return std::any_of(rule.body.begin(), rule.body.end(),
                           [&](PLiteral lit) { return lit_value(lit) == Value::False; });
    }

    auto check_rule(int r) -> bool {
        auto const &rule = prg_.rules[r];
        if (rule.choice) {
            return true;
        }
        int free_heads = 0;
        int free_head = -1;
        for (auto h : rule.head) {
            auto v = value_[h];
            if (v == Value::True) {
                return true;
            }
            if (v == Value::Free) {
                ++free_heads;
                free_head = h;
            }
        }
        int free_body = 0;
        PLiteral free_lit;
        for (auto lit : rule.body) {
            auto v = lit_value(lit);
            if (v == Value::False) {
                return true;
            }
            if (v == Value::Free) {
                ++free_body;
                free_lit = lit;
            }
        }
        if (free_body == 0) {
            if (free_heads == 0) {
                return false;
            }
            if (free_heads == 1) {
                return assign(free_head, Value::True);
            }
            return true;
        }
        if (free_heads == 0 && free_body == 1) {
            return make_lit(free_lit, false);
        }
        return true;
    }

    // Whether the rule can still support atom `a`.
    [[nodiscard]] auto can_support(PRule const &rule, int a) const -> bool {
        if (body_false(rule)) {
            return false;
        }
        if (!rule.choice) {
            for (auto h : rule.head) {
                if (h != a && value_[h] == Value::True) {
                    return false;
                }
            }
        }
        return true;
    }

    auto check_support(int a) -> bool {
        if (value_[a] == Value::False) {
            return true;
        }
        int count = 0;
        int last = -1;
        for (auto r : head_occ_[a]) {
            if (can_support(prg_.rules[r], a)) {
                ++count;
                last = r;
                if (count > 1) {
                    break;
                }
            }
        }
        if (count == 0) {
            return assign(a, Value::False);
        }
        if (count == 1 && value_[a] == Value::True) {
            auto const &rule = prg_.rules[last];
            for (auto lit : rule.body) {
                if (!make_lit(lit, true)) {
                    return false;
                }
            }
            if (!rule.choice) {
                for (auto h : rule.head) {
                    if (h != a && !assign(h, Value::False)) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    // Falsifies atoms that cannot be derived without circular support.
    auto unfounded() -> bool {
        auto const &rules = prg_.rules;
        std::vector<char> founded(prg_.atom_count, 0);
        std::vector<int> missing(rules.size(), -1);
        std::vector<int> queue;
        auto fire = [&](int r) {
            auto const &rule = rules[r];
            for (auto h : rule.head) {
                if (founded[h] == 0 && value_[h] != Value::False) {
                    founded[h] = 1;
                    queue.push_back(h);
                }
            }
        };
        for (std::size_t r = 0; r < rules.size(); ++r) {
            auto const &rule = rules[r];
            if (rule.head.empty() || body_false(rule)) {
                continue;
            }
            int count = 0;
            for (auto lit : rule.body) {
                if (lit.positive) {
                    ++count;
                }
            }
            missing[r] = count;
            if (count == 0) {
                fire(static_cast<int>(r));
            }
        }
        while (!queue.empty()) {
            auto a = queue.back();
            queue.pop_back();
            for (auto r : pos_occ_[a]) {
                if (missing[r] < 0) {
                    continue;
                }
                for (auto lit : rules[r].body) {
                    if (lit.positive && lit.atom == a) {
                        --missing[r];
                    }
                }
                if (missing[r] == 0) {
                    fire(r);
                }
            }
        }
        for (int a = 0; a < prg_.atom_count; ++a) {
            if (founded[a] == 0 && !assign(a, Value::False)) {
                return false;
            }
        }
        return true;
    }

    PropProgram const &prg_;
    std::vector<Value> value_;
    std::vector<int> trail_;
    std::size_t head_ = 0;
    bool first_ = true;
    std::vector<std::vector<int>> body_occ_;
    std::vector<std::vector<int>> head_occ_;
    std::vector<std::vector<int>> pos_occ_;
};

} // namespace

auto solve(PropProgram const &prg, SolveOptions const &options, std::function<bool(PModel const &)> const &on_model,
           SolveStats *stats) -> std::size_t {
    SolveStats local;
    Engine engine{prg};
    auto found = engine.enumerate(options, on_model, stats != nullptr ? *stats : local);
    return found;
}

auto solve(PropProgram const &prg, SolveOptions const &options) -> std::vector<PModel> {
    std::vector<PModel> models;
    solve(prg, options, [&](PModel const &model) {
        models.push_back(model);
        return true;
    });
    return models;
}

auto propagate(PropProgram const &prg, std::vector<Value> assignment) -> std::optional<std::vector<Value>> {
    if (static_cast<int>(assignment.size()) != prg.atom_count) {
        throw Error{"assignment size does not match the program"};
    }
    Engine engine{prg};
    engine.seed(assignment);
    if (!engine.propagate()) {
        return std::nullopt;
    }
    return engine.assignment();
}

} // namespace tmeta

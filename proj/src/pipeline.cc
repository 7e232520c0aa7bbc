// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/pipeline.hh>

#include <algorithm>
#include <map>

namespace tmeta {

auto horizon_of(PipelineConfig const &config) -> int {
    int horizon = 0;
    for (auto const &[name, value] : config.constants) {
        if (name != "n") {
            continue;
        }
        if (!value.is_number() || value.num() < 0) {
            throw Error{"the horizon n must be a non-negative integer"};
        }
        horizon = static_cast<int>(value.num());
    }
    return horizon;
}

auto pipeline_grammar(PipelineConfig const &config, Program const &prg) -> TheoryGrammar {
    TheoryGrammar grammar;
    grammar.add(builtin_grammar(to_string(config.logic)), "<builtin>");
    for (auto const &src : config.grammars) {
        grammar.add(src.text, src.name);
    }
    std::vector<TypeDecl> decls;
    for (auto const &stm : prg.statements) {
        if (auto const *decl = std::get_if<TypeDecl>(&stm)) {
            decls.push_back(*decl);
        }
    }
    if (!decls.empty()) {
        grammar.add(decls);
    }
    return grammar;
}

auto parse_sources(std::vector<Source> const &sources) -> Program {
    Program out;
    for (auto const &src : sources) {
        auto prg = parse_program(src.text, src.name);
        for (auto &stm : prg.statements) {
            out.statements.push_back(std::move(stm));
        }
    }
    return out;
}

auto compile(Program const &prg, PipelineConfig const &config) -> Compiled {
    Compiled out;
    out.grammar = pipeline_grammar(config, prg);
    out.transformed = transform(prg, out.grammar);
    GroundOptions options;
    options.constants = config.constants;
    out.ground = ground(out.transformed, options);
    out.db = reify(out.ground);
    return out;
}

namespace {

auto symbol_index(PropProgram const &meta) -> std::map<Symbol, int> {
    std::map<Symbol, int> out;
    for (int i = 0; i < static_cast<int>(meta.names.size()); ++i) {
        out.emplace(meta.names[i], i);
    }
    return out;
}

} // namespace

auto decode(PropProgram const &meta, PModel const &model, ReifiedDB const &db, int horizon, bool metric)
    -> TemporalModel {
    std::vector<char> truth(meta.atom_count, 0);
    for (auto a : model) {
        truth[a] = 1;
    }
    auto index = symbol_index(meta);
    auto holds = [&](Symbol sym) {
        auto it = index.find(sym);
        return it != index.end() && truth[it->second] != 0;
    };
    TemporalModel out;
    out.states.resize(horizon + 1);
    for (auto const *shows : {&db.show_atoms, &db.show_terms}) {
        for (auto const &[sym, tuple] : *shows) {
            for (int t = 0; t <= horizon; ++t) {
                if (holds(meta_atom::conjunction(tuple, t))) {
                    out.states[t].push_back(sym);
                }
            }
        }
    }
    for (auto &state : out.states) {
        std::sort(state.begin(), state.end());
        state.erase(std::unique(state.begin(), state.end()), state.end());
    }
    if (metric) {
        std::vector<int> tau(horizon + 1, 0);
        for (auto a : model) {
            auto sym = meta.names[a];
            if (sym.name() == "tau" && sym.args().size() == 2 && sym.args()[0].is_number()) {
                auto t = sym.args()[0].num();
                if (t >= 0 && t <= horizon) {
                    tau[t] = static_cast<int>(sym.args()[1].num());
                }
            }
        }
        out.tau = std::move(tau);
    }
    return out;
}

auto decode_truth(PropProgram const &meta, PModel const &model, int horizon) -> std::vector<std::vector<Symbol>> {
    std::vector<std::vector<Symbol>> out(horizon + 1);
    for (auto a : model) {
        auto sym = meta.names[a];
        if (sym.name() != "true" || sym.args().size() != 2) {
            continue;
        }
        auto formula = sym.args()[0];
        auto step = sym.args()[1];
        if (!formula.is_atom() || !step.is_number() || step.num() < 0 || step.num() > horizon) {
            continue;
        }
        out[step.num()].push_back(formula);
    }
    for (auto &state : out) {
        std::sort(state.begin(), state.end());
    }
    return out;
}

auto format_temporal(TemporalModel const &model) -> std::string {
    std::string out;
    for (std::size_t t = 0; t < model.states.size(); ++t) {
        out += " State " + std::to_string(t);
        if (model.tau) {
            out += " (time " + std::to_string((*model.tau)[t]) + ")";
        }
        out += ":\n";
        std::string line;
        for (auto sym : model.states[t]) {
            line += line.empty() ? "  " : " ";
            line += sym.to_string();
        }
        if (!line.empty()) {
            out += line + "\n";
        }
    }
    return out;
}

auto format_flat(TemporalModel const &model) -> std::string {
    std::string out;
    for (std::size_t t = 0; t < model.states.size(); ++t) {
        for (auto sym : model.states[t]) {
            if (!out.empty()) {
                out += " ";
            }
            out += sym.to_string() + "@" + std::to_string(t);
        }
    }
    if (model.tau) {
        for (std::size_t t = 0; t < model.tau->size(); ++t) {
            if (!out.empty()) {
                out += " ";
            }
            out += "tau(" + std::to_string(t) + "," + std::to_string((*model.tau)[t]) + ")";
        }
    }
    return out + "\n";
}

auto solve_temporal(Program const &prg, PipelineConfig const &config,
                    std::function<void(TemporalModel const &)> const &on_model) -> SolveResult {
    auto compiled = compile(prg, config);
    MetaOptions options;
    options.horizon = horizon_of(config);
    options.max_time = config.max_time;
    auto meta = build_meta_program(compiled.db, config.logic, options);
    auto prop = PropProgram::from_ground(meta);
    SolveResult result;
    result.meta_rules = prop.rules.size();
    result.meta_atoms = static_cast<std::size_t>(prop.atom_count);
    bool metric = config.logic == Logic::Mel;
    result.models = solve(
        prop, config.solve,
        [&](PModel const &model) {
            on_model(decode(prop, model, compiled.db, options.horizon, metric));
            return true;
        },
        &result.stats);
    return result;
}

} // namespace tmeta

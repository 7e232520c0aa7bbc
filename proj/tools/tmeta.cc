// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/oracle.hh>
#include <tmeta/pipeline.hh>
#include <tmeta/reify.hh>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

constexpr int exit_usage = 1;
constexpr int exit_sat = 10;
constexpr int exit_unsat = 20;
constexpr int exit_input = 65;

struct RunConfig {
    std::vector<std::string> files;
    std::vector<std::string> grammars;
    std::vector<std::string> constants;
    std::string semantics = "tel";
    std::string printer = "default";
    std::size_t models = 0;
    std::optional<int> max_time;
    std::string log_level = "warn";
};

auto read_file(std::string const &path) -> std::string {
    std::ifstream in{path};
    if (!in) {
        throw tmeta::Error{"cannot open file '" + path + "'"};
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

auto read_inputs(RunConfig const &cfg) -> std::vector<tmeta::Source> {
    std::vector<tmeta::Source> out;
    if (cfg.files.empty() || (cfg.files.size() == 1 && cfg.files.front() == "-")) {
        out.push_back({std::string{std::istreambuf_iterator<char>{std::cin}, {}}, "<stdin>"});
        return out;
    }
    for (auto const &file : cfg.files) {
        out.push_back({read_file(file), file});
    }
    return out;
}

auto pipeline_config(RunConfig const &cfg) -> tmeta::PipelineConfig {
    tmeta::PipelineConfig out;
    out.logic = tmeta::parse_logic(cfg.semantics);
    for (auto const &file : cfg.grammars) {
        out.grammars.push_back({read_file(file), file});
    }
    for (auto const &def : cfg.constants) {
        out.constants.push_back(tmeta::parse_constant(def));
    }
    out.max_time = cfg.max_time;
    out.solve.limit = cfg.models;
    return out;
}

void log_warnings(tmeta::TheoryGrammar const &grammar) {
    for (auto const &msg : grammar.warnings()) {
        spdlog::warn("{}", msg);
    }
}

auto run_transform(RunConfig const &cfg) -> int {
    auto config = pipeline_config(cfg);
    auto prg = tmeta::parse_sources(read_inputs(cfg));
    auto grammar = tmeta::pipeline_grammar(config, prg);
    log_warnings(grammar);
    std::cout << tmeta::format_program(tmeta::transform(prg, grammar));
    return 0;
}

auto run_reify(RunConfig const &cfg) -> int {
    auto config = pipeline_config(cfg);
    auto compiled = tmeta::compile(tmeta::parse_sources(read_inputs(cfg)), config);
    log_warnings(compiled.grammar);
    spdlog::debug("ground program has {} rules and {} atoms", compiled.ground.rules.size(),
                  compiled.ground.atoms.size());
    std::cout << tmeta::emit_reified_text(compiled.db);
    return 0;
}

auto print_model(RunConfig const &cfg, std::size_t index, tmeta::TemporalModel const &model) {
    std::cout << "Answer: " << index << "\n";
    if (cfg.printer == "temporal") {
        std::cout << tmeta::format_temporal(model);
    } else {
        std::cout << tmeta::format_flat(model);
    }
    std::cout.flush();
}

void print_footer(std::size_t models, bool exhausted, double seconds) {
    std::cout << (models > 0 ? "SATISFIABLE" : "UNSATISFIABLE") << "\n\n";
    std::cout << "Models       : " << models << (models > 0 && !exhausted ? "+" : "") << "\n";
    std::printf("Time         : %.3fs\n", seconds);
    std::fflush(stdout);
}

auto run_solve(RunConfig const &cfg) -> int {
    auto start = std::chrono::steady_clock::now();
    auto config = pipeline_config(cfg);
    auto sources = read_inputs(cfg);
    std::cout << "tmeta version " << TMETA_VERSION << "\n";
    for (auto const &src : sources) {
        std::cout << "Reading from " << src.name << "\n";
    }
    auto prg = tmeta::parse_sources(sources);
    log_warnings(tmeta::pipeline_grammar(config, prg));
    std::cout << "Solving...\n";
    std::size_t index = 0;
    auto result = tmeta::solve_temporal(prg, config, [&](tmeta::TemporalModel const &model) {
        print_model(cfg, ++index, model);
    });
    spdlog::info("meta program: {} rules, {} atoms", result.meta_rules, result.meta_atoms);
    spdlog::info("search: {} decisions, {} conflicts", result.stats.decisions, result.stats.conflicts);
    bool exhausted = cfg.models == 0 || result.models < cfg.models;
    print_footer(result.models, exhausted,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return result.models > 0 ? exit_sat : exit_unsat;
}

auto run_oracle(RunConfig const &cfg) -> int {
    auto start = std::chrono::steady_clock::now();
    auto config = pipeline_config(cfg);
    auto prg = tmeta::parse_sources(read_inputs(cfg));
    auto grammar = tmeta::pipeline_grammar(config, prg);
    log_warnings(grammar);
    tmeta::MetaOptions meta;
    meta.horizon = tmeta::horizon_of(config);
    meta.max_time = config.max_time;
    tmeta::oracle::OracleOptions options;
    options.horizon = meta.horizon;
    options.timed = config.logic == tmeta::Logic::Mel;
    options.max_time = meta.effective_max_time();
    if (options.timed && options.max_time < options.horizon) {
        throw tmeta::Error{"the maximal time point must not be smaller than the horizon"};
    }
    auto traces = tmeta::oracle::temporal_models(tmeta::substitute_constants(prg, config.constants), grammar, options);
    std::size_t index = 0;
    for (auto const &trace : traces) {
        if (cfg.models != 0 && index >= cfg.models) {
            break;
        }
        tmeta::TemporalModel model;
        for (auto const &state : trace.states) {
            model.states.emplace_back(state.begin(), state.end());
        }
        model.tau = trace.tau;
        print_model(cfg, ++index, model);
    }
    bool exhausted = cfg.models == 0 || traces.size() <= cfg.models;
    print_footer(index, exhausted, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return index > 0 ? exit_sat : exit_unsat;
}

} // namespace

auto main(int argc, char **argv) -> int {
    CLI::App app{"Temporal answer set programming via reification and meta-encodings", "tmeta"};
    app.set_version_flag("--version", std::string{TMETA_VERSION});
    app.set_config("--config", "", "Read options from a key=value file");
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    app.add_option("-c,--const", cfg.constants, "Define a constant (name=value)")->take_all();
    app.add_option("--semantics", cfg.semantics, "Temporal logic")
        ->check(CLI::IsMember({"tel", "mel", "del"}))
        ->capture_default_str();
    app.add_option("--grammar", cfg.grammars, "Additional theory grammar file")->check(CLI::ExistingFile);
    app.add_option("--printer", cfg.printer, "Model printer")
        ->check(CLI::IsMember({"default", "temporal"}))
        ->capture_default_str();
    app.add_option("--models", cfg.models, "Maximal number of models (0 for all)")->capture_default_str();
    app.add_option("--max-time", cfg.max_time, "Maximal time point for metric semantics");
    app.add_option("--log-level", cfg.log_level, "Logging verbosity")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
        ->capture_default_str();

    auto *solve = app.add_subcommand("solve", "Compute temporal models");
    auto *trans = app.add_subcommand("transform", "Print the program after the first-order transformation");
    auto *reify = app.add_subcommand("reify", "Print the reified ground program");
    auto *oracle = app.add_subcommand("oracle", "Enumerate temporal models by brute force");
    for (auto *sub : {solve, trans, reify, oracle}) {
        sub->add_option("files", cfg.files, "Input files (standard input if omitted)");
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::Success const &e) {
        return app.exit(e);
    } catch (CLI::ParseError const &e) {
        app.exit(e);
        return exit_usage;
    }

    auto logger = spdlog::stderr_color_st("tmeta");
    logger->set_pattern("%^%l%$: %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::from_str(cfg.log_level));

    try {
        if (*solve) {
            return run_solve(cfg);
        }
        if (*trans) {
            return run_transform(cfg);
        }
        if (*reify) {
            return run_reify(cfg);
        }
        return run_oracle(cfg);
    } catch (tmeta::Error const &e) {
        auto const &loc = e.location();
        if (!loc.file.empty() || loc.line > 0) {
            spdlog::error("{}: {}", loc.to_string(), e.message());
        } else {
            spdlog::error("{}", e.message());
        }
        return exit_input;
    }
}

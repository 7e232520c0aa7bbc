// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <tmeta/ground.hh>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace tmeta {

//! A propositional literal over atom indices: `atom` or `not atom`.
struct PLiteral {
    int atom = 0;
    bool positive = true;

    friend auto operator==(PLiteral const &a, PLiteral const &b) -> bool = default;
    friend auto operator<=>(PLiteral const &a, PLiteral const &b) = default;
};

struct PRule {
    bool choice = false;
    std::vector<int> head;
    std::vector<PLiteral> body;
};

//! Propositional program over atoms `0..atom_count-1`.
struct PropProgram {
    int atom_count = 0;
    std::vector<PRule> rules;
    //! Optional names, used when converting from ground programs.
    std::vector<Symbol> names;

    //! Converts a ground program; facts become rules with empty bodies.
    //! Externals that are not defined by a rule stay false.
    [[nodiscard]] static auto from_ground(GroundProgram const &gp) -> PropProgram;
};

//! A set of true atoms, as a sorted list of indices.
using PModel = std::vector<int>;

struct SolveOptions {
    //! Number of models to compute; 0 enumerates all.
    std::size_t limit = 0;
    //! Maximal number of decisions before giving up; 0 for no bound.
    std::uint64_t decision_limit = 0;
};

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t stability_checks = 0;
};

//! Enumerates stable models in lexicographic order (false before true,
//! lower atom indices first). The callback may return false to stop.
//! Throws ResourceError if the decision limit is exceeded.
auto solve(PropProgram const &prg, SolveOptions const &options, std::function<bool(PModel const &)> const &on_model,
           SolveStats *stats = nullptr) -> std::size_t;

//! Collects all stable models (up to the limit).
[[nodiscard]] auto solve(PropProgram const &prg, SolveOptions const &options = {}) -> std::vector<PModel>;

//! True if the candidate is a minimal model of the program's reduct.
[[nodiscard]] auto check_stable(PropProgram const &prg, PModel const &candidate) -> bool;

enum class Value : std::uint8_t { Free, True, False };

//! Propagates a partial assignment (indexed by atom) to a fixpoint.
//! Returns std::nullopt on conflict. Never removes a stable model that
//! extends the input.
[[nodiscard]] auto propagate(PropProgram const &prg, std::vector<Value> assignment)
    -> std::optional<std::vector<Value>>;

} // namespace tmeta

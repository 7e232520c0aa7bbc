// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tmeta {

enum class SymbolType : std::uint8_t { Infimum, Number, Function, String, Supremum };

//! An interned ground term.
//!
//! Symbols are small handles into a process-wide store; equal terms share
//! one handle, so equality and hashing are constant time. The store only
//! grows, which makes handles valid for the lifetime of the process and
//! safe to share between threads.
class Symbol {
public:
    //! The number zero.
    Symbol();

    [[nodiscard]] static auto number(std::int64_t value) -> Symbol;
    [[nodiscard]] static auto string(std::string_view value) -> Symbol;
    //! A function term; `theory` marks `&`-prefixed operator terms.
    [[nodiscard]] static auto function(std::string_view name, std::span<Symbol const> args = {}, bool theory = false)
        -> Symbol;
    [[nodiscard]] static auto function(std::string_view name, std::initializer_list<Symbol> args, bool theory = false)
        -> Symbol;
    [[nodiscard]] static auto supremum() -> Symbol;
    [[nodiscard]] static auto infimum() -> Symbol;

    [[nodiscard]] auto type() const -> SymbolType;
    [[nodiscard]] auto num() const -> std::int64_t;
    [[nodiscard]] auto name() const -> std::string_view;
    [[nodiscard]] auto str() const -> std::string_view;
    [[nodiscard]] auto args() const -> std::span<Symbol const>;
    [[nodiscard]] auto theory() const -> bool;
    //! Nesting depth: 1 for constants and numbers.
    [[nodiscard]] auto depth() const -> int;
    [[nodiscard]] auto id() const -> std::uint32_t { return id_; }
    [[nodiscard]] auto is_number() const -> bool { return type() == SymbolType::Number; }
    [[nodiscard]] auto is_function() const -> bool { return type() == SymbolType::Function; }
    //! Constant or compound term that can serve as a classical atom.
    [[nodiscard]] auto is_atom() const -> bool { return is_function() && !theory() && !name().empty(); }

    [[nodiscard]] auto to_string() const -> std::string;

    friend auto operator==(Symbol a, Symbol b) -> bool { return a.id_ == b.id_; }
    //! Total order: #inf < numbers < functions < strings < #sup.
    friend auto operator<=>(Symbol a, Symbol b) -> std::strong_ordering;

private:
    explicit Symbol(std::uint32_t id) : id_{id} {}
    std::uint32_t id_;
};

auto operator<<(std::ostream &out, Symbol sym) -> std::ostream &;

using SymbolVector = std::vector<Symbol>;

} // namespace tmeta

template <> struct std::hash<tmeta::Symbol> {
    auto operator()(tmeta::Symbol sym) const noexcept -> std::size_t { return std::hash<std::uint32_t>{}(sym.id()); }
};

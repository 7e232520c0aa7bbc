// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The tmeta Authors

#include <tmeta/error.hh>
#include <tmeta/symbol.hh>

#include <array>
#include <atomic>
#include <memory>
#include <mutex>
#include <ostream>
#include <unordered_map>

namespace tmeta {

auto Location::to_string() const -> std::string {
    std::string out = file.empty() ? std::string{"<string>"} : file;
    if (line > 0) {
        out += ":" + std::to_string(line) + ":" + std::to_string(column);
    }
    return out;
}

Error::Error(std::string const &message, Location loc)
    : std::runtime_error{loc.line > 0 ? loc.to_string() + ": " + message : message}
    , loc_{std::move(loc)}
    , message_{message} {}

namespace {

struct Node {
    SymbolType type = SymbolType::Number;
    bool theory = false;
    int depth = 1;
    std::int64_t num = 0;
    std::string name;
    std::vector<Symbol> args;
};

struct Key {
    SymbolType type;
    bool theory;
    std::int64_t num;
    std::string name;
    std::vector<std::uint32_t> args;

    auto operator==(Key const &other) const -> bool = default;
};

struct KeyHash {
    auto operator()(Key const &key) const noexcept -> std::size_t {
        std::size_t seed = std::hash<std::string>{}(key.name);
        auto mix = [&seed](std::size_t value) { seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6U) + (seed >> 2U); };
        mix(static_cast<std::size_t>(key.type));
        mix(static_cast<std::size_t>(key.theory));
        mix(std::hash<std::int64_t>{}(key.num));
        for (auto arg : key.args) {
            mix(arg);
        }
        return seed;
    }
};

// Nodes live in fixed-size chunks that are never moved, so readers can
// dereference a handle without taking the lock.
class Store {
public:
    static constexpr std::size_t chunk_bits = 12;
    static constexpr std::size_t chunk_size = std::size_t{1} << chunk_bits;
    static constexpr std::size_t max_chunks = std::size_t{1} << 18;

    static auto instance() -> Store & {
        static Store store;
        return store;
    }

    auto node(std::uint32_t id) const -> Node const & {
        return chunks_[id >> chunk_bits].load(std::memory_order_acquire)[id & (chunk_size - 1)];
    }

    auto intern(Key key, Node node) -> std::uint32_t {
        std::lock_guard lock{mutex_};
        if (auto it = index_.find(key); it != index_.end()) {
            return it->second;
        }
        auto id = size_;
        auto chunk = id >> chunk_bits;
        if (chunk >= max_chunks) {
            throw ResourceError{"symbol store exhausted"};
        }
        if ((id & (chunk_size - 1)) == 0) {
            owned_.emplace_back(std::make_unique<Node[]>(chunk_size));
            chunks_[chunk].store(owned_.back().get(), std::memory_order_release);
        }
        chunks_[chunk].load(std::memory_order_relaxed)[id & (chunk_size - 1)] = std::move(node);
        ++size_;
        index_.emplace(std::move(key), id);
        return id;
    }

private:
    Store() : chunks_{std::make_unique<std::atomic<Node *>[]>(max_chunks)} {}

    std::mutex mutex_;
    std::unique_ptr<std::atomic<Node *>[]> chunks_;
    std::vector<std::unique_ptr<Node[]>> owned_;
    std::unordered_map<Key, std::uint32_t, KeyHash> index_;
    std::uint32_t size_ = 0;
};

auto node_of(std::uint32_t id) -> Node const & { return Store::instance().node(id); }

auto compare_nodes(std::uint32_t a, std::uint32_t b) -> std::strong_ordering {
    if (a == b) {
        return std::strong_ordering::equal;
    }
    auto const &x = node_of(a);
    auto const &y = node_of(b);
    if (auto cmp = x.type <=> y.type; cmp != 0) {
        return cmp;
    }
    switch (x.type) {
        case SymbolType::Number: return x.num <=> y.num;
        case SymbolType::String: return x.name <=> y.name;
        case SymbolType::Function: {
            if (auto cmp = x.theory <=> y.theory; cmp != 0) {
                return cmp;
            }
            if (auto cmp = x.args.size() <=> y.args.size(); cmp != 0) {
                return cmp;
            }
            if (auto cmp = x.name <=> y.name; cmp != 0) {
                return cmp;
            }
            for (std::size_t i = 0; i < x.args.size(); ++i) {
                if (auto cmp = x.args[i] <=> y.args[i]; cmp != 0) {
                    return cmp;
                }
            }
            return std::strong_ordering::equal;
        }
        default: return std::strong_ordering::equal;
    }
}

auto escape(std::string_view text) -> std::string {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += c;
        }
    }
    return out;
}

void print(std::string &out, Symbol sym) {
    switch (sym.type()) {
        case SymbolType::Infimum: out += "#inf"; break;
        case SymbolType::Supremum: out += "#sup"; break;
        case SymbolType::Number: out += std::to_string(sym.num()); break;
        case SymbolType::String:
            out += '"';
            out += escape(sym.str());
            out += '"';
            break;
        case SymbolType::Function: {
            if (sym.theory()) {
                out += '&';
            }
            out += sym.name();
            auto args = sym.args();
            if (!args.empty() || sym.name().empty()) {
                out += '(';
                bool first = true;
                for (auto arg : args) {
                    if (!first) {
                        out += ',';
                    }
                    first = false;
                    print(out, arg);
                }
                if (sym.name().empty() && args.size() == 1) {
                    out += ',';
                }
                out += ')';
            }
            break;
        }
    }
}

} // namespace

Symbol::Symbol() : Symbol{number(0)} {}

auto Symbol::number(std::int64_t value) -> Symbol {
    Node node;
    node.type = SymbolType::Number;
    node.num = value;
    return Symbol{Store::instance().intern(Key{SymbolType::Number, false, value, {}, {}}, std::move(node))};
}

auto Symbol::string(std::string_view value) -> Symbol {
    Node node;
    node.type = SymbolType::String;
    node.name = value;
    return Symbol{
        Store::instance().intern(Key{SymbolType::String, false, 0, std::string{value}, {}}, std::move(node))};
}

auto Symbol::function(std::string_view name, std::span<Symbol const> args, bool theory) -> Symbol {
    Key key{SymbolType::Function, theory, 0, std::string{name}, {}};
    key.args.reserve(args.size());
    int depth = 0;
    for (auto arg : args) {
        key.args.push_back(arg.id());
        depth = std::max(depth, arg.depth());
    }
    Node node;
    node.type = SymbolType::Function;
    node.theory = theory;
    node.name = name;
    node.args.assign(args.begin(), args.end());
    node.depth = depth + 1;
    return Symbol{Store::instance().intern(std::move(key), std::move(node))};
}

auto Symbol::function(std::string_view name, std::initializer_list<Symbol> args, bool theory) -> Symbol {
    return function(name, std::span<Symbol const>{args.begin(), args.size()}, theory);
}

auto Symbol::supremum() -> Symbol {
    Node node;
    node.type = SymbolType::Supremum;
    return Symbol{Store::instance().intern(Key{SymbolType::Supremum, false, 0, {}, {}}, std::move(node))};
}

auto Symbol::infimum() -> Symbol {
    Node node;
    node.type = SymbolType::Infimum;
    return Symbol{Store::instance().intern(Key{SymbolType::Infimum, false, 0, {}, {}}, std::move(node))};
}

auto Symbol::type() const -> SymbolType { return node_of(id_).type; }
auto Symbol::num() const -> std::int64_t { return node_of(id_).num; }
auto Symbol::name() const -> std::string_view { return node_of(id_).name; }
auto Symbol::str() const -> std::string_view { return node_of(id_).name; }
auto Symbol::args() const -> std::span<Symbol const> { return node_of(id_).args; }
auto Symbol::theory() const -> bool { return node_of(id_).theory; }
auto Symbol::depth() const -> int { return node_of(id_).depth; }

auto Symbol::to_string() const -> std::string {
    std::string out;
    print(out, *this);
    return out;
}

auto operator<=>(Symbol a, Symbol b) -> std::strong_ordering { return compare_nodes(a.id_, b.id_); }

auto operator<<(std::ostream &out, Symbol sym) -> std::ostream & { return out << sym.to_string(); }

} // namespace tmeta

#ifndef MTSA_CONFIG_HPP
#define MTSA_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mtsa/core.hpp"

namespace mtsa {
namespace toml {

// Minimal TOML subset: bare keys, strings, numbers, booleans, flat arrays,
// [table] and [[array-of-tables]] headers, # comments. Enough for the
// solver configuration schema; serialization is canonical (sorted keys).

struct Value {
    enum class Kind { string, number, boolean, array };
    Kind kind = Kind::number;
    std::string str;
    double num = 0.0;
    bool b = false;
    std::vector<Value> arr;

    static Value make_string(std::string s) {
        Value v;
        v.kind = Kind::string;
        v.str = std::move(s);
        return v;
    }
    static Value make_number(double d) {
        Value v;
        v.kind = Kind::number;
        v.num = d;
        return v;
    }
    static Value make_bool(bool x) {
        Value v;
        v.kind = Kind::boolean;
        v.b = x;
        return v;
    }
};

using Table = std::map<std::string, Value>;

struct Document {
    Table root;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> arrays;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline Value parse_scalar(const std::string& raw, int lineno) {
    const std::string t = trim(raw);
    if (t.empty()) throw Error("config line " + std::to_string(lineno) + ": missing value");
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"')
            throw Error("config line " + std::to_string(lineno) + ": unterminated string");
        return Value::make_string(t.substr(1, t.size() - 2));
    }
    if (t == "true") return Value::make_bool(true);
    if (t == "false") return Value::make_bool(false);
    try {
        std::size_t pos = 0;
        const double d = std::stod(t, &pos);
        if (pos == t.size()) return Value::make_number(d);
    } catch (...) {
    }
    throw Error("config line " + std::to_string(lineno) + ": cannot parse value '" + t + "'");
}

inline Value parse_value(const std::string& raw, int lineno) {
    const std::string t = trim(raw);
    if (!t.empty() && t.front() == '[') {
        if (t.back() != ']')
            throw Error("config line " + std::to_string(lineno) + ": unterminated array");
        Value v;
        v.kind = Value::Kind::array;
        const std::string inner = t.substr(1, t.size() - 2);
        std::string item;
        int depth = 0;
        bool in_str = false;
        for (char c : inner) {
            if (c == '"') in_str = !in_str;
            if (c == '[' && !in_str) ++depth;
            if (c == ']' && !in_str) --depth;
            if (c == ',' && depth == 0 && !in_str) {
                if (!trim(item).empty()) v.arr.push_back(parse_scalar(item, lineno));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim(item).empty()) v.arr.push_back(parse_scalar(item, lineno));
        return v;
    }
    return parse_scalar(raw, lineno);
}

}  // namespace detail

inline Document parse(std::istream& in) {
    Document doc;
    Table* current = &doc.root;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments outside strings.
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                line.erase(i);
                break;
            }
        }
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t.rfind("[[", 0) == 0) {
            if (t.size() < 5 || t.substr(t.size() - 2) != "]]")
                throw Error("config line " + std::to_string(lineno) + ": malformed table array");
            const std::string name = detail::trim(t.substr(2, t.size() - 4));
            doc.arrays[name].push_back({});
            current = &doc.arrays[name].back();
        } else if (t.front() == '[') {
            if (t.back() != ']')
                throw Error("config line " + std::to_string(lineno) + ": malformed table header");
            const std::string name = detail::trim(t.substr(1, t.size() - 2));
            current = &doc.tables[name];
        } else {
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw Error("config line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = detail::trim(t.substr(0, eq));
            if (key.empty())
                throw Error("config line " + std::to_string(lineno) + ": empty key");
            (*current)[key] = detail::parse_value(t.substr(eq + 1), lineno);
        }
    }
    return doc;
}

inline Document parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

inline Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    return parse(in);
}

namespace detail {

inline void write_value(std::ostream& out, const Value& v) {
    switch (v.kind) {
        case Value::Kind::string:
            out << '"' << v.str << '"';
            break;
        case Value::Kind::boolean:
            out << (v.b ? "true" : "false");
            break;
        case Value::Kind::number: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v.num);
            out << buf;
            break;
        }
        case Value::Kind::array: {
            out << '[';
            for (std::size_t i = 0; i < v.arr.size(); ++i) {
                if (i) out << ", ";
                write_value(out, v.arr[i]);
            }
            out << ']';
            break;
        }
    }
}

inline void write_table(std::ostream& out, const Table& t) {
    for (const auto& [k, v] : t) {
        out << k << " = ";
        write_value(out, v);
        out << "\n";
    }
}

}  // namespace detail

inline std::string serialize(const Document& doc) {
    std::ostringstream out;
    detail::write_table(out, doc.root);
    for (const auto& [name, t] : doc.tables) {
        out << "\n[" << name << "]\n";
        detail::write_table(out, t);
    }
    for (const auto& [name, arr] : doc.arrays)
        for (const auto& t : arr) {
            out << "\n[[" << name << "]]\n";
            detail::write_table(out, t);
        }
    return out.str();
}

/// Dotted-path override, e.g. "solver.dt=0.005" or "tsa.0.layers=4".
inline void apply_override(Document& doc, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw Error("override must be key=value: " + spec);
    const std::string path = spec.substr(0, eq);
    const Value val = detail::parse_value(spec.substr(eq + 1), 0);

    std::vector<std::string> parts;
    std::string part;
    std::istringstream ps(path);
    while (std::getline(ps, part, '.')) parts.push_back(part);
    if (parts.empty()) throw Error("empty override path: " + spec);

    if (parts.size() == 1) {
        doc.root[parts[0]] = val;
        return;
    }
    if (parts.size() == 2) {
        // Either table.key or array-of-tables with index omitted.
        doc.tables[parts[0]][parts[1]] = val;
        return;
    }
    if (parts.size() == 3) {
        auto it = doc.arrays.find(parts[0]);
        if (it == doc.arrays.end()) throw Error("override path names unknown array: " + parts[0]);
        const int idx = std::stoi(parts[1]);
        if (idx < 0 || idx >= static_cast<int>(it->second.size()))
            throw Error("override array index out of range: " + spec);
        it->second[idx][parts[2]] = val;
        return;
    }
    throw Error("override path too deep: " + spec);
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t hash(const Document& doc) { return fnv1a(serialize(doc)); }

// Typed accessors with key-naming errors.

inline const Value* find(const Table& t, const std::string& key) {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
}

inline double get_number(const Table& t, const std::string& section, const std::string& key,
                         double fallback) {
    const Value* v = find(t, key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::number)
        throw Error("config key " + section + "." + key + " must be a number");
    return v->num;
}

inline double require_number(const Table& t, const std::string& section, const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw Error("missing config key " + section + "." + key);
    if (v->kind != Value::Kind::number)
        throw Error("config key " + section + "." + key + " must be a number");
    return v->num;
}

inline std::string get_string(const Table& t, const std::string& section, const std::string& key,
                              const std::string& fallback) {
    const Value* v = find(t, key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::string)
        throw Error("config key " + section + "." + key + " must be a string");
    return v->str;
}

inline std::string require_string(const Table& t, const std::string& section,
                                  const std::string& key) {
    const Value* v = find(t, key);
    if (!v) throw Error("missing config key " + section + "." + key);
    if (v->kind != Value::Kind::string)
        throw Error("config key " + section + "." + key + " must be a string");
    return v->str;
}

inline bool get_bool(const Table& t, const std::string& section, const std::string& key,
                     bool fallback) {
    const Value* v = find(t, key);
    if (!v) return fallback;
    if (v->kind != Value::Kind::boolean)
        throw Error("config key " + section + "." + key + " must be a boolean");
    return v->b;
}

inline std::vector<double> get_numbers(const Table& t, const std::string& section,
                                       const std::string& key) {
    const Value* v = find(t, key);
    if (!v) return {};
    if (v->kind != Value::Kind::array)
        throw Error("config key " + section + "." + key + " must be an array");
    std::vector<double> out;
    for (const auto& e : v->arr) {
        if (e.kind != Value::Kind::number)
            throw Error("config key " + section + "." + key + " must hold numbers");
        out.push_back(e.num);
    }
    return out;
}

inline std::vector<std::string> get_strings(const Table& t, const std::string& section,
                                            const std::string& key) {
    const Value* v = find(t, key);
    if (!v) return {};
    if (v->kind != Value::Kind::array)
        throw Error("config key " + section + "." + key + " must be an array");
    std::vector<std::string> out;
    for (const auto& e : v->arr) {
        if (e.kind != Value::Kind::string)
            throw Error("config key " + section + "." + key + " must hold strings");
        out.push_back(e.str);
    }
    return out;
}

}  // namespace toml
}  // namespace mtsa

#endif

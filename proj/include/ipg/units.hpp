#pragma once

// SI dimension vectors and the unit-string parser.
//
// A dimension is a 7-vector of integer exponents over the SI base quantities
// (m, kg, s, A, K, mol, cd). Units are compatible exactly when their vectors
// are equal; angles are dimensionless by design, so "rad" carries the zero
// vector and trigonometric arguments type-check as plain numbers.

#include <array>
#include <cctype>
#include <cstdlib>
#include <map>
#include <string>

#include "ipg/errors.hpp"

namespace ipg {

struct Dim {
    // exponents: m, kg, s, A, K, mol, cd
    std::array<int, 7> e{0, 0, 0, 0, 0, 0, 0};

    friend bool operator==(const Dim&, const Dim&) = default;

    Dim operator+(const Dim& o) const {
        Dim r;
        for (int i = 0; i < 7; ++i) r.e[i] = e[i] + o.e[i];
        return r;
    }
    Dim operator-(const Dim& o) const {
        Dim r;
        for (int i = 0; i < 7; ++i) r.e[i] = e[i] - o.e[i];
        return r;
    }
    Dim operator*(int k) const {
        Dim r;
        for (int i = 0; i < 7; ++i) r.e[i] = e[i] * k;
        return r;
    }

    bool is_dimensionless() const { return *this == Dim{}; }
    bool all_even() const {
        for (int x : e)
            if (x % 2 != 0) return false;
        return true;
    }
    Dim halved() const {
        Dim r;
        for (int i = 0; i < 7; ++i) r.e[i] = e[i] / 2;
        return r;
    }
};

namespace detail {

inline const std::map<std::string, Dim>& base_unit_table() {
    auto dim = [](int m, int kg, int s) {
        Dim d;
        d.e[0] = m;
        d.e[1] = kg;
        d.e[2] = s;
        return d;
    };
    static const std::map<std::string, Dim> table = {
        {"m", dim(1, 0, 0)},
        {"kg", dim(0, 1, 0)},
        {"s", dim(0, 0, 1)},
        {"A", Dim{{0, 0, 0, 1, 0, 0, 0}}},
        {"K", Dim{{0, 0, 0, 0, 1, 0, 0}}},
        {"mol", Dim{{0, 0, 0, 0, 0, 1, 0}}},
        {"cd", Dim{{0, 0, 0, 0, 0, 0, 1}}},
        // Accepted derived names.
        {"N", dim(1, 1, -2)},
        {"J", dim(2, 1, -2)},
        {"W", dim(2, 1, -3)},
        {"Pa", dim(-1, 1, -2)},
        {"Hz", dim(0, 0, -1)},
        // Angles are dimensionless.
        {"rad", Dim{}},
        {"deg", Dim{}},
        {"dimensionless", Dim{}},
        {"1", Dim{}},
    };
    return table;
}

} // namespace detail

// Parses a unit expression: base units combined with '*' and '/', each with an
// optional integer exponent introduced by '^' (e.g. "kg*m^2/s", "m/s^2").
// Throws UnknownUnitError for unknown base names, ParseError for bad syntax.
inline Dim parse_unit(const std::string& text) {
    size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    };
    auto parse_factor = [&]() -> Dim {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (start == pos) throw ParseError("expected unit name in \"" + text + "\"");
        std::string name = text.substr(start, pos - start);
        const auto& table = detail::base_unit_table();
        auto it = table.find(name);
        if (it == table.end()) throw UnknownUnitError(name);
        Dim d = it->second;
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            skip_ws();
            bool neg = false;
            if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
                neg = text[pos] == '-';
                ++pos;
            }
            size_t dstart = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (dstart == pos) throw ParseError("expected exponent after '^' in \"" + text + "\"");
            int k = std::atoi(text.substr(dstart, pos - dstart).c_str());
            d = d * (neg ? -k : k);
        }
        return d;
    };

    Dim result = parse_factor();
    skip_ws();
    while (pos < text.size()) {
        char op = text[pos];
        if (op != '*' && op != '/')
            throw ParseError("unexpected character '" + std::string(1, op) + "' in unit \"" +
                             text + "\"");
        ++pos;
        Dim rhs = parse_factor();
        result = (op == '*') ? result + rhs : result - rhs;
        skip_ws();
    }
    return result;
}

// Canonical ASCII rendering of a dimension vector, for diagnostics.
inline std::string to_string(const Dim& d) {
    static const char* names[7] = {"m", "kg", "s", "A", "K", "mol", "cd"};
    std::string out;
    for (int i = 0; i < 7; ++i) {
        if (d.e[i] == 0) continue;
        if (!out.empty()) out += "*";
        out += names[i];
        if (d.e[i] != 1) out += "^" + std::to_string(d.e[i]);
    }
    return out.empty() ? "dimensionless" : out;
}

} // namespace ipg

#pragma once

// Physical sanity rules: name-pattern-matched predicates over the values a
// problem binds and the answer it produces.
//
// Rules are scanned in declaration order. A rule participates only when its
// pattern matches the variable name; the first matching rule whose predicate
// FAILS decides the finding for that variable (a passing rule does not
// shadow later rules, so every value still reaches the trailing magnitude
// filter). Severity `invalid` fails verification; `unrealistic` flags the
// value for the audit without invalidating the record.
//
// Pattern forms: exact name, "prefix*", "*suffix", "*contains*", and the
// catch-all "*".

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipg/errors.hpp"

namespace ipg {

enum class Severity { Invalid, Unrealistic };

inline std::string to_string(Severity s) {
    return s == Severity::Invalid ? "invalid" : "unrealistic";
}

struct SanityRule {
    std::string pattern;
    std::string check; // "positive" | "nonnegative" | "within" | "magnitude"
    double lo = 0.0;   // within: lower bound; magnitude: smallest nonzero magnitude
    double hi = 0.0;   // within: upper bound; magnitude: largest magnitude
    Severity severity = Severity::Invalid;
    std::string message;
};

struct SanityFinding {
    std::string variable;
    double value = 0.0;
    std::string rule_pattern;
    Severity severity = Severity::Invalid;
    std::string message;
};

namespace detail {

inline bool pattern_matches(const std::string& pattern, const std::string& name) {
    if (pattern == "*") return true;
    bool star_front = pattern.front() == '*';
    bool star_back = pattern.back() == '*';
    if (star_front && star_back) {
        std::string needle = pattern.substr(1, pattern.size() - 2);
        return needle.empty() || name.find(needle) != std::string::npos;
    }
    if (star_front) {
        std::string suffix = pattern.substr(1);
        return name.size() >= suffix.size() &&
               name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
    if (star_back) {
        std::string prefix = pattern.substr(0, pattern.size() - 1);
        return name.compare(0, prefix.size(), prefix) == 0;
    }
    return name == pattern;
}

inline bool predicate_holds(const SanityRule& rule, double v) {
    if (rule.check == "positive") return v > 0.0;
    if (rule.check == "nonnegative") return v >= 0.0;
    if (rule.check == "within") return v >= rule.lo && v <= rule.hi;
    if (rule.check == "magnitude") {
        double m = std::fabs(v);
        return m <= rule.hi && (m == 0.0 || m >= rule.lo);
    }
    throw PreconditionError("unknown sanity check \"" + rule.check + "\"");
}

} // namespace detail

// The shipped defaults: strictly positive times and masses, friction
// coefficients within [0, 1], and a catch-all magnitude window flagging
// |v| > 1e15 or 0 < |v| < 1e-15 as unrealistic.
inline std::vector<SanityRule> default_sanity_rules() {
    return {
        {"*time*", "positive", 0, 0, Severity::Invalid, "time must be positive"},
        {"*mass*", "positive", 0, 0, Severity::Invalid, "mass must be positive"},
        {"*friction_coefficient*", "within", 0.0, 1.0, Severity::Invalid,
         "friction coefficient must lie within [0, 1]"},
        {"mu", "within", 0.0, 1.0, Severity::Invalid,
         "friction coefficient must lie within [0, 1]"},
        {"*", "magnitude", 1e-15, 1e15, Severity::Unrealistic,
         "magnitude is outside the realistic window"},
    };
}

// Applies `rules` to each (name, value) pair, in input order.
inline std::vector<SanityFinding>
check_sanity(const std::vector<std::pair<std::string, double>>& values,
             const std::vector<SanityRule>& rules) {
    std::vector<SanityFinding> findings;
    for (const auto& [name, value] : values) {
        for (const auto& rule : rules) {
            if (!detail::pattern_matches(rule.pattern, name)) continue;
            if (detail::predicate_holds(rule, value)) continue;
            findings.push_back({name, value, rule.pattern, rule.severity, rule.message});
            break; // first failing rule decides this variable
        }
    }
    return findings;
}

inline std::vector<SanityRule> load_sanity_rules(const nlohmann::json& doc) {
    std::vector<SanityRule> rules;
    for (const auto& rj : doc.at("rules")) {
        SanityRule r;
        r.pattern = rj.at("pattern").get<std::string>();
        r.check = rj.at("check").get<std::string>();
        r.lo = rj.value("lo", 0.0);
        r.hi = rj.value("hi", 0.0);
        std::string sev = rj.at("severity").get<std::string>();
        if (sev == "invalid") r.severity = Severity::Invalid;
        else if (sev == "unrealistic") r.severity = Severity::Unrealistic;
        else throw ParseError("unknown severity \"" + sev + "\"");
        r.message = rj.value("message", std::string{});
        if (r.pattern.empty()) throw ParseError("empty sanity pattern");
        rules.push_back(std::move(r));
    }
    return rules;
}

} // namespace ipg

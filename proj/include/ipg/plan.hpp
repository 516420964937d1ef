#pragma once

// The solution-plan DSL: the executable form of a generated problem's
// solution code.
//
// A plan is a line-oriented program; '#' starts a comment, blank lines are
// ignored:
//
//   bind <name> = <number>
//   invoke <name> = <formula_id>(<arg>, ...)     # args: prior names or numbers
//   compute <name> = <expression>                # full expression DSL
//   return <name>
//
// Static rules, enforced at parse time: every name is defined before use,
// no name is ever rebound, and the single `return` is the last line.
// Execution is sandboxed: the only callable things are library formulas, and
// the result of a run is the returned value plus the set of formula ids that
// were actually invoked (the ground truth for the problem signature).

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ipg/axiom.hpp"
#include "ipg/errors.hpp"
#include "ipg/expr.hpp"
#include "ipg/format.hpp"

namespace ipg {

struct InvokeArg {
    bool is_name = false;
    std::string name;
    double value = 0.0;
};

struct PlanStep {
    enum class Kind { Bind, Invoke, Compute, Return };
    Kind kind;
    std::string name;            // defined name (Bind/Invoke/Compute) or returned name
    double value = 0.0;          // Bind
    std::string formula_id;      // Invoke
    std::vector<InvokeArg> args; // Invoke
    ExprPtr expr;                // Compute
    std::string expr_source;     // Compute, as written
};

struct SolutionPlan {
    std::vector<PlanStep> steps;
    std::string source;

    // Formula ids named by invoke steps, in first-appearance order.
    std::vector<std::string> declared_formula_ids() const {
        std::vector<std::string> ids;
        for (const auto& s : steps)
            if (s.kind == PlanStep::Kind::Invoke &&
                std::find(ids.begin(), ids.end(), s.formula_id) == ids.end())
                ids.push_back(s.formula_id);
        return ids;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

// Formula ids look like "10_I": digits, underscore, letters.
inline bool is_formula_id(const std::string& s) {
    auto us = s.find('_');
    if (us == std::string::npos || us == 0 || us + 1 >= s.size()) return false;
    for (size_t i = 0; i < us; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    for (size_t i = us + 1; i < s.size(); ++i)
        if (!std::isupper(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

} // namespace detail

// Parses and statically checks a plan. Throws ParseError with a line number
// on malformed lines, rebinding, use before definition, or return problems.
inline SolutionPlan parse_plan(const std::string& source) {
    SolutionPlan plan;
    plan.source = source;

    std::set<std::string> defined;
    bool returned = false;

    auto fail = [](size_t line_no, const std::string& what) -> void {
        throw ParseError("plan line " + std::to_string(line_no) + ": " + what);
    };
    auto require_new_name = [&](size_t line_no, const std::string& name) {
        if (!detail::is_identifier(name))
            fail(line_no, "\"" + name + "\" is not a valid name");
        if (defined.count(name)) fail(line_no, "name \"" + name + "\" is already bound");
        defined.insert(name);
    };
    auto require_defined = [&](size_t line_no, const std::string& name) {
        if (!defined.count(name))
            fail(line_no, "name \"" + name + "\" used before definition");
    };

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= source.size()) {
        size_t eol = source.find('\n', pos);
        std::string raw = source.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? source.size() + 1 : eol + 1;
        ++line_no;

        auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        std::string line = detail::trim(raw);
        if (line.empty()) continue;
        if (returned) fail(line_no, "statement after return");

        auto space = line.find_first_of(" \t");
        std::string keyword = space == std::string::npos ? line : line.substr(0, space);
        std::string rest = space == std::string::npos ? "" : detail::trim(line.substr(space));

        PlanStep step;
        if (keyword == "return") {
            step.kind = PlanStep::Kind::Return;
            step.name = rest;
            if (!detail::is_identifier(step.name))
                fail(line_no, "return expects a name, got \"" + rest + "\"");
            require_defined(line_no, step.name);
            returned = true;
            plan.steps.push_back(std::move(step));
            continue;
        }

        auto eq = rest.find('=');
        if (eq == std::string::npos) fail(line_no, "expected '=' in " + keyword + " statement");
        std::string name = detail::trim(rest.substr(0, eq));
        std::string rhs = detail::trim(rest.substr(eq + 1));
        if (rhs.empty()) fail(line_no, "missing right-hand side");

        if (keyword == "bind") {
            step.kind = PlanStep::Kind::Bind;
            step.name = name;
            try {
                step.value = detail::parse_double(rhs);
            } catch (const ParseError&) {
                fail(line_no, "bind expects a numeric literal, got \"" + rhs + "\"");
            }
            require_new_name(line_no, name);
        } else if (keyword == "invoke") {
            step.kind = PlanStep::Kind::Invoke;
            step.name = name;
            auto open = rhs.find('(');
            if (open == std::string::npos || rhs.back() != ')')
                fail(line_no, "invoke expects <formula_id>(<args>)");
            step.formula_id = detail::trim(rhs.substr(0, open));
            if (!detail::is_formula_id(step.formula_id))
                fail(line_no, "\"" + step.formula_id + "\" is not a formula id");
            std::string arglist = rhs.substr(open + 1, rhs.size() - open - 2);
            if (!detail::trim(arglist).empty()) {
                size_t start = 0;
                while (true) {
                    size_t comma = arglist.find(',', start);
                    std::string tok = detail::trim(
                        arglist.substr(start, comma == std::string::npos ? comma : comma - start));
                    if (tok.empty()) fail(line_no, "empty invoke argument");
                    InvokeArg arg;
                    if (detail::is_identifier(tok)) {
                        arg.is_name = true;
                        arg.name = tok;
                        require_defined(line_no, tok);
                    } else {
                        try {
                            arg.value = detail::parse_double(tok);
                        } catch (const ParseError&) {
                            fail(line_no, "invoke argument \"" + tok +
                                              "\" is neither a name nor a number");
                        }
                    }
                    step.args.push_back(std::move(arg));
                    if (comma == std::string::npos) break;
                    start = comma + 1;
                }
            }
            require_new_name(line_no, name);
        } else if (keyword == "compute") {
            step.kind = PlanStep::Kind::Compute;
            step.name = name;
            step.expr_source = rhs;
            try {
                step.expr = parse_expr(rhs);
            } catch (const ParseError& e) {
                fail(line_no, std::string("bad expression: ") + e.what());
            }
            std::vector<std::string> used;
            collect_vars(step.expr, used);
            for (const auto& v : used) require_defined(line_no, v);
            require_new_name(line_no, name);
        } else {
            fail(line_no, "unknown keyword \"" + keyword + "\"");
        }
        plan.steps.push_back(std::move(step));
    }

    if (plan.steps.empty()) throw ParseError("plan is empty");
    if (!returned) throw ParseError("plan has no return statement");
    return plan;
}

// Shallow format sniff: does the first meaningful line open with a plan
// keyword? Distinguishes "this is plan text (possibly broken)" from opaque
// source in some other language, which the corpus keeps verbatim.
inline bool plan_formatted(const std::string& code) {
    std::istringstream in(code);
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        for (const char* kw : {"bind ", "invoke ", "compute ", "return "})
            if (line.rfind(kw, 0) == 0) return true;
        return false;
    }
    return false;
}

// Full check: the code is a well-formed plan.
inline bool looks_like_plan(const std::string& code) {
    try {
        parse_plan(code);
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

struct PlanRun {
    double value = 0.0;
    std::set<std::string> invoked;           // formula ids actually executed
    std::map<std::string, double> bindings;  // every defined name
};

// Executes a parsed plan against a library. Propagates evaluation errors
// (DivisionByZeroError, DomainError, NonFiniteError, ...) and
// UnknownFormulaIdError / ArityError from invocations.
inline PlanRun run_plan(const SolutionPlan& plan, const FormulaLibrary& library) {
    PlanRun run;
    Env env;
    for (const auto& step : plan.steps) {
        switch (step.kind) {
        case PlanStep::Kind::Bind:
            env[step.name] = step.value;
            break;
        case PlanStep::Kind::Invoke: {
            std::vector<double> args;
            args.reserve(step.args.size());
            for (const auto& a : step.args) args.push_back(a.is_name ? env.at(a.name) : a.value);
            env[step.name] = library.invoke(step.formula_id, args);
            run.invoked.insert(step.formula_id);
            break;
        }
        case PlanStep::Kind::Compute:
            env[step.name] = evaluate(step.expr, env);
            break;
        case PlanStep::Kind::Return:
            run.value = env.at(step.name);
            if (!std::isfinite(run.value)) throw NonFiniteError();
            run.bindings.insert(env.begin(), env.end());
            return run;
        }
    }
    throw ParseError("plan has no return statement");
}

// Renders a plan as self-contained Python-style source (presentation only).
inline std::string render_plan_python(const SolutionPlan& plan, const FormulaLibrary& library) {
    std::string out;
    std::set<std::string> emitted;
    for (const auto& step : plan.steps) {
        if (step.kind != PlanStep::Kind::Invoke || emitted.count(step.formula_id)) continue;
        emitted.insert(step.formula_id);
        const Formula& f = library.lookup(step.formula_id);
        out += "def calculate_" + f.name + "(";
        for (size_t i = 0; i < f.params.size(); ++i) {
            if (i) out += ", ";
            out += f.params[i].name;
        }
        out += "):\n    \"\"\"" + f.docstring + "\"\"\"\n    return " +
               to_string(f.body) + "\n\n";
    }
    out += "def solve():\n";
    for (const auto& step : plan.steps) {
        switch (step.kind) {
        case PlanStep::Kind::Bind:
            out += "    " + step.name + " = " + detail::format_double(step.value) + "\n";
            break;
        case PlanStep::Kind::Invoke: {
            const Formula& f = library.lookup(step.formula_id);
            out += "    " + step.name + " = calculate_" + f.name + "(";
            for (size_t i = 0; i < step.args.size(); ++i) {
                if (i) out += ", ";
                out += step.args[i].is_name ? step.args[i].name
                                            : detail::format_double(step.args[i].value);
            }
            out += ")\n";
            break;
        }
        case PlanStep::Kind::Compute:
            out += "    " + step.name + " = " + step.expr_source + "\n";
            break;
        case PlanStep::Kind::Return:
            out += "    return " + step.name + "\n";
            break;
        }
    }
    return out;
}

} // namespace ipg

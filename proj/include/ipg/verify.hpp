#pragma once

// Phase III: verification of a drafted problem against three criteria plus
// signature integrity.
//
//   1. Syntactic validity   — the code parses as a plan and references only
//                             formulas the library knows.
//   2. Numerical solvability — the plan executes to a finite value.
//   3. Physical sanity       — the given values and the answer violate no
//                             sanity rule (an `unrealistic` finding blocks
//                             acceptance just like `invalid`; the severity
//                             distinction matters to the audit, which counts
//                             unrealistic values without invalidating
//                             records).
//
// Signature integrity — the declared formula-id set must equal the set the
// plan actually invoked — is checked last; it is what makes stored
// signatures trustworthy for deduplication.
//
// verify() never throws on bad drafts: every failure mode is a report.

#include <set>
#include <string>
#include <vector>

#include "ipg/axiom.hpp"
#include "ipg/plan.hpp"
#include "ipg/sanity.hpp"

namespace ipg {

struct ProblemDraft {
    std::string word_problem;
    std::string code; // plan source
    std::vector<std::string> formula_ids;
    std::string unknown_var;
    std::vector<std::pair<std::string, double>> given_values;
};

struct VerificationReport {
    bool syntactic_valid = false;
    std::string syntactic_message;

    bool numerically_solvable = false;
    std::string numeric_message;
    bool has_value = false;
    double value = 0.0;

    bool physically_sane = false;
    std::vector<SanityFinding> findings;

    bool signature_consistent = false;
    std::string signature_message;
    std::set<std::string> invoked;

    bool passed = false;
    std::string failure_stage; // "", "syntactic", "numeric", "sanity", "signature"
};

inline VerificationReport verify(const ProblemDraft& draft, const FormulaLibrary& library,
                                 const std::vector<SanityRule>& rules) {
    VerificationReport report;

    // Stage 1: syntactic validity.
    SolutionPlan plan;
    try {
        if (draft.unknown_var.empty()) throw ParseError("draft has no unknown variable");
        if (draft.word_problem.empty()) throw ParseError("draft has no problem text");
        plan = parse_plan(draft.code);
        for (const auto& id : plan.declared_formula_ids()) {
            if (!library.has(id)) throw UnknownFormulaIdError(id);
        }
        report.syntactic_valid = true;
    } catch (const Error& e) {
        report.syntactic_message = e.what();
        report.failure_stage = "syntactic";
        return report;
    }

    // Stage 2: numerical solvability.
    PlanRun run;
    try {
        run = run_plan(plan, library);
        report.numerically_solvable = true;
        report.has_value = true;
        report.value = run.value;
        report.invoked = run.invoked;
    } catch (const Error& e) {
        report.numeric_message = e.what();
        report.failure_stage = "numeric";
        return report;
    }

    // Stage 3: physical sanity over the given values plus the answer.
    std::vector<std::pair<std::string, double>> values = draft.given_values;
    values.emplace_back(draft.unknown_var, run.value);
    report.findings = check_sanity(values, rules);
    if (!report.findings.empty()) {
        report.failure_stage = "sanity";
        return report;
    }
    report.physically_sane = true;

    // Signature integrity: declared ids == executed ids.
    std::set<std::string> declared(draft.formula_ids.begin(), draft.formula_ids.end());
    if (declared != run.invoked) {
        std::string msg = "declared {";
        for (const auto& id : declared) msg += id + ",";
        msg += "} but executed {";
        for (const auto& id : run.invoked) msg += id + ",";
        msg += "}";
        report.signature_message = msg;
        report.failure_stage = "signature";
        return report;
    }
    report.signature_consistent = true;

    report.passed = true;
    return report;
}

} // namespace ipg

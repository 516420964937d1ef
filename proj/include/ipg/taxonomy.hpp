#pragma once

// Automatable failure taxonomy and tier stratification.
//
// Each record is screened against the machine-checkable failure categories;
// an empty category set means the record is clean under every automated
// probe. Category numbers are part of the reporting interface:
//
//   1  execution/validation failure (invalid flag or null result)
//   2  missing required fields (raw-JSON screen)
//   3  formatting inconsistencies (raw-JSON screen)
//   4  insufficient formulas (fewer than two)
//   5  syntax errors (plan-formatted code that does not parse)
//   6  null or unrealistic results (null, non-finite, or magnitude window)
//   7  wrong formula ids (absent from the registry)
//   8  signature mismatch (stored string vs declared ids/unknown, or vs the
//      plan's invoked set when the code is a plan)
//   9  variable issues (declared given unused by the plan, or a plan bind
//      not declared in the variable dictionary)
//   13 low uniqueness (exact word-problem duplicate within the file)
//
// Categories needing a human judge (physical plausibility of the narrative,
// pedagogic value, and so on) are out of scope by construction.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/metrics.hpp"
#include "ipg/plan.hpp"
#include "ipg/records.hpp"
#include "ipg/signature.hpp"

namespace ipg {

struct FailureRecord {
    size_t index = 0;                    // position in the file, 0-based
    std::set<int> categories;            // empty = clean
    std::map<int, std::string> details;  // category -> short diagnosis
    bool clean() const { return categories.empty(); }
};

namespace detail {

// The magnitude window of the default sanity rules, applied to the answer.
inline bool unrealistic_magnitude(double v) {
    double m = std::fabs(v);
    return !(m <= 1e15 && (m == 0.0 || m >= 1e-15));
}

} // namespace detail

// Screens one parsed record. `library` may be null to skip the registry
// check (category 7); `duplicate_texts` may be null to skip the uniqueness
// check (category 13), which only makes sense against a whole file.
inline FailureRecord classify_record(const DatasetRecord& r, size_t index,
                                     const FormulaLibrary* library,
                                     const std::set<std::string>* duplicate_texts) {
    FailureRecord out;
    out.index = index;
    auto flag = [&](int category, const std::string& detail) {
        out.categories.insert(category);
        auto it = out.details.find(category);
        if (it == out.details.end()) out.details[category] = detail;
    };

    // 1: the record itself confesses failure.
    if (!r.validation_result.valid) flag(1, "validation_result.valid is false");
    if (!r.execution_result.has_value()) flag(1, "execution_result is null");

    // 4: not enough deductive material.
    if (r.formula_ids.size() < 2)
        flag(4, "only " + std::to_string(r.formula_ids.size()) + " formula id(s)");

    // 6: null, non-finite, or absurd-magnitude answer.
    if (!r.execution_result.has_value()) {
        flag(6, "execution_result is null");
    } else {
        try {
            double v = detail::parse_double(*r.execution_result);
            if (!std::isfinite(v)) flag(6, "execution_result is not finite");
            else if (detail::unrealistic_magnitude(v))
                flag(6, "execution_result magnitude outside the realistic window");
        } catch (const Error&) {
            flag(6, "execution_result does not parse as a number");
        }
    }

    // 7: ids the registry has never heard of.
    if (library) {
        for (const auto& id : r.formula_ids)
            if (!library->has(id)) {
                flag(7, "formula id \"" + id + "\" not in the registry");
                break;
            }
    }

    // 8 (static half): stored signature vs its canonical rendering.
    std::string canonical = compute_signature(r.formula_ids, r.unknown_var);
    if (r.signature != canonical)
        flag(8, "stored signature differs from canonical rendering");

    // Plan-dependent categories fire only for plan-formatted code; opaque
    // source in another language is not probed.
    if (plan_formatted(r.code)) {
        try {
            SolutionPlan plan = parse_plan(r.code);

            // 8 (dynamic half): declared ids vs what the plan invokes.
            std::set<std::string> declared(r.formula_ids.begin(), r.formula_ids.end());
            auto invoked_list = plan.declared_formula_ids();
            std::set<std::string> invoked(invoked_list.begin(), invoked_list.end());
            if (declared != invoked)
                flag(8, "plan invokes a different formula set than declared");

            // 9: the variable dictionary and the plan must agree.
            std::set<std::string> bind_names;
            for (const auto& s : plan.steps)
                if (s.kind == PlanStep::Kind::Bind) bind_names.insert(s.name);
            for (const auto& [name, entry] : r.variables) {
                if (!entry.value.has_value()) continue; // the unknown is computed, not bound
                if (!bind_names.count(name))
                    flag(9, "declared variable \"" + name + "\" is never bound by the plan");
            }
            for (const auto& name : bind_names)
                if (!r.find_variable(name))
                    flag(9, "plan binds \"" + name + "\" which the record does not declare");
        } catch (const ParseError& e) {
            flag(5, e.what());
        }
    }

    // 13: textual duplicate within the file.
    if (duplicate_texts && duplicate_texts->count(r.word_problem))
        flag(13, "word_problem text appears more than once in the file");

    return out;
}

// Whole-file screening; computes the duplicate-text set, then classifies
// every record against it.
inline std::vector<FailureRecord> classify_corpus(const std::vector<DatasetRecord>& records,
                                                  const FormulaLibrary* library) {
    std::map<std::string, size_t> text_counts;
    for (const auto& r : records) ++text_counts[r.word_problem];
    std::set<std::string> duplicates;
    for (const auto& [text, n] : text_counts)
        if (n > 1) duplicates.insert(text);

    std::vector<FailureRecord> out;
    out.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i)
        out.push_back(classify_record(records[i], i, library, &duplicates));
    return out;
}

// Raw-JSON screen for categories 2 and 3, applied before strict parsing.
// Returns the categories that apply to this document (empty = parseable).
inline std::set<int> schema_screen(const ordered_json& doc) {
    std::set<int> out;
    if (!doc.is_object()) {
        out.insert(3);
        return out;
    }
    static const char* required[] = {"chapter",     "word_problem", "execution_result",
                                     "signature",   "formula_ids",  "unknown_var",
                                     "variables",   "code",         "validation_result"};
    for (const char* key : required)
        if (!doc.contains(key)) out.insert(2);
    if (!out.empty()) return out;
    try {
        record_from_json(doc);
    } catch (const Error&) {
        out.insert(3); // fields present but shaped wrong
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tier stratification

struct TierBucket {
    std::string label;    // "0-1", "2-3", "4-6", "7+"
    size_t count = 0;
    size_t clean = 0;
    double clean_pct = 0.0;
    std::map<int, size_t> incidence; // category -> records exhibiting it
};

struct TierReport {
    std::vector<TierBucket> tiers; // fixed order; "7+" present only if occupied
};

inline size_t tier_index(size_t formula_count) {
    if (formula_count <= 1) return 0;
    if (formula_count <= 3) return 1;
    if (formula_count <= 6) return 2;
    return 3;
}

// Partitions records into the formula-count tiers and aggregates the
// failure screen per tier. `failures` must be index-aligned with `records`
// (as produced by classify_corpus).
inline TierReport stratify_tiers(const std::vector<DatasetRecord>& records,
                                 const std::vector<FailureRecord>& failures) {
    if (failures.size() != records.size())
        throw PreconditionError("failure list must align with the record list");
    TierReport report;
    report.tiers = {{"0-1"}, {"2-3"}, {"4-6"}, {"7+"}};
    for (size_t i = 0; i < records.size(); ++i) {
        TierBucket& tier = report.tiers[tier_index(records[i].formula_ids.size())];
        ++tier.count;
        if (failures[i].clean()) ++tier.clean;
        for (int cat : failures[i].categories) ++tier.incidence[cat];
    }
    for (auto& tier : report.tiers)
        tier.clean_pct = tier.count == 0 ? 0.0
                                         : 100.0 * static_cast<double>(tier.clean) /
                                               static_cast<double>(tier.count);
    if (report.tiers.back().count == 0) report.tiers.pop_back(); // overflow tier optional
    return report;
}

} // namespace ipg

#pragma once

// Seed problems and the Phase I analysis model.
//
// A seed is one textbook problem (question + worked solution). Analysis
// turns it into the structured inputs generation needs: relevant chapters,
// scenario surface forms for the round-robin, a variable dictionary with
// sampling ranges, and the formula ids its solution maps onto. Seeds may
// carry that analysis as a hand-authored sidecar so the pipeline can run
// offline; the gateway path produces the same AnalysisResult type.
//
// The sufficiency loop lives here too: a solution mappable only onto
// formulas outside the currently selected chapters triggers chapter
// expansion and a re-query, until the selected library covers the solution.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipg/axiom.hpp"
#include "ipg/errors.hpp"
#include "ipg/sampling.hpp"
#include "ipg/sanity.hpp"

namespace ipg {

class ChapterAlreadyPresentError : public Error {
public:
    explicit ChapterAlreadyPresentError(const std::string& chapter)
        : Error("chapter_already_present",
                "chapter \"" + chapter + "\" is already in the analysis") {}
};

class EmptyScenarioListError : public Error {
public:
    EmptyScenarioListError() : Error("empty_scenario_list", "scenario list is empty") {}
};

struct AnalysisResult {
    std::vector<std::string> chapters;  // chapter names, e.g. "Centre of Mass"
    std::vector<std::string> scenarios; // surface settings for the round-robin
    std::vector<VariableSpec> variables;
    std::vector<std::string> solution_formula_ids;
    int requery_count = 0; // sufficiency re-queries performed
};

struct Seed {
    std::string id;
    std::string chapter; // "<number>.<Name>" label of the source chapter
    std::string question;
    std::string solution;
    std::optional<AnalysisResult> analysis; // sidecar, if authored
};

// ---------------------------------------------------------------------------
// Sufficiency

struct SufficiencyVerdict {
    bool sufficient = false;
    std::string missing_formula_id; // first id not in the available set
    std::string missing_chapter;    // name of the chapter owning it
};

namespace detail {

inline int chapter_prefix(const std::string& formula_id) {
    auto us = formula_id.find('_');
    if (us == std::string::npos || us == 0) throw UnknownFormulaIdError(formula_id);
    for (size_t i = 0; i < us; ++i)
        if (!std::isdigit(static_cast<unsigned char>(formula_id[i])))
            throw UnknownFormulaIdError(formula_id);
    return std::stoi(formula_id.substr(0, us));
}

} // namespace detail

// The formula ids offered by a set of chapter names, in library order.
inline std::set<std::string> available_formula_ids(const std::vector<std::string>& chapter_names,
                                                   const FormulaLibrary& library) {
    std::set<std::string> out;
    for (const auto& [num, info] : library.chapters()) {
        if (std::find(chapter_names.begin(), chapter_names.end(), info.name) ==
            chapter_names.end())
            continue;
        out.insert(info.formula_ids.begin(), info.formula_ids.end());
    }
    return out;
}

// Checks whether every required id is offered by the available set. The
// first missing id (in input order) names the chapter to pull in, resolved
// through the id's numeric prefix against the full library. An id whose
// prefix is no chapter at all is a contract error.
inline SufficiencyVerdict check_formula_sufficiency(const std::vector<std::string>& required_ids,
                                                    const std::set<std::string>& available,
                                                    const FormulaLibrary& full_library) {
    for (const auto& id : required_ids) {
        if (available.count(id)) continue;
        int chapter = detail::chapter_prefix(id);
        const ChapterInfo* info = full_library.chapter(chapter);
        if (!info || !full_library.has(id)) throw UnknownFormulaIdError(id);
        return {false, id, info->name};
    }
    return {true, "", ""};
}

// Adds the verdict's missing chapter to the analysis. Requires an
// Insufficient verdict; pulling in a chapter that is already selected is a
// contract violation (the re-query loop would not terminate).
inline void expand_chapters(AnalysisResult& analysis, const SufficiencyVerdict& verdict) {
    if (verdict.sufficient)
        throw PreconditionError("expand_chapters requires an Insufficient verdict");
    if (std::find(analysis.chapters.begin(), analysis.chapters.end(), verdict.missing_chapter) !=
        analysis.chapters.end())
        throw ChapterAlreadyPresentError(verdict.missing_chapter);
    analysis.chapters.push_back(verdict.missing_chapter);
    ++analysis.requery_count;
}

// Runs the sufficiency loop to a fixpoint. Termination is structural: each
// pass adds one chapter, and there are finitely many.
inline void ensure_sufficient(AnalysisResult& analysis, const FormulaLibrary& library) {
    for (;;) {
        auto verdict = check_formula_sufficiency(
            analysis.solution_formula_ids, available_formula_ids(analysis.chapters, library),
            library);
        if (verdict.sufficient) return;
        expand_chapters(analysis, verdict);
    }
}

// ---------------------------------------------------------------------------
// Scenario round-robin

class ScenarioRotation {
public:
    explicit ScenarioRotation(std::vector<std::string> scenarios)
        : scenarios_(std::move(scenarios)) {
        if (scenarios_.empty()) throw EmptyScenarioListError();
    }

    // Cycles deterministically: s0, s1, ..., sn-1, s0, ...
    const std::string& next() {
        const std::string& s = scenarios_[index_];
        index_ = (index_ + 1) % scenarios_.size();
        return s;
    }

    size_t size() const { return scenarios_.size(); }

private:
    std::vector<std::string> scenarios_;
    size_t index_ = 0;
};

// ---------------------------------------------------------------------------
// Variable dictionary validation

struct DictionaryViolation {
    std::string variable;
    std::string reason;
};

// Flags inverted ranges, unknown units, and ranges that can emit values the
// invalid-severity sanity rules would reject (e.g. a mass range touching
// zero, a friction coefficient range leaving [0, 1]).
inline std::vector<DictionaryViolation>
validate_variable_dictionary(const std::vector<VariableSpec>& specs,
                             const std::vector<SanityRule>& rules) {
    std::vector<DictionaryViolation> violations;
    for (const auto& spec : specs) {
        if (spec.min > spec.max) {
            violations.push_back({spec.name, "range minimum exceeds maximum"});
            continue;
        }
        try {
            parse_unit(spec.unit);
        } catch (const Error& e) {
            violations.push_back({spec.name, e.what()});
            continue;
        }
        for (const auto& rule : rules) {
            if (rule.severity != Severity::Invalid) continue;
            if (!ipg::detail::pattern_matches(rule.pattern, spec.name)) continue;
            bool ok = true;
            std::string reason;
            if (rule.check == "positive" && spec.min <= 0.0) {
                ok = false;
                reason = "range admits non-positive values but " + rule.message;
            } else if (rule.check == "nonnegative" && spec.min < 0.0) {
                ok = false;
                reason = "range admits negative values but " + rule.message;
            } else if (rule.check == "within" && (spec.min < rule.lo || spec.max > rule.hi)) {
                ok = false;
                reason = "range leaves the hard bounds: " + rule.message;
            }
            if (!ok) {
                violations.push_back({spec.name, reason});
                break;
            }
        }
    }
    return violations;
}

// ---------------------------------------------------------------------------
// Seed file I/O (JSONL; analysis sidecar optional)

inline Seed seed_from_json(const nlohmann::json& j) {
    Seed s;
    s.id = j.at("id").get<std::string>();
    s.chapter = j.at("chapter").get<std::string>();
    s.question = j.at("question").get<std::string>();
    s.solution = j.at("solution").get<std::string>();
    if (j.contains("analysis")) {
        const auto& aj = j["analysis"];
        AnalysisResult a;
        for (const auto& c : aj.at("chapters")) a.chapters.push_back(c.get<std::string>());
        for (const auto& sc : aj.at("scenarios")) a.scenarios.push_back(sc.get<std::string>());
        for (const auto& [name, vj] : aj.at("variables").items()) {
            VariableSpec spec;
            spec.name = name;
            spec.unit = vj.at("unit").get<std::string>();
            spec.min = vj.at("range").at(0).get<double>();
            spec.max = vj.at("range").at(1).get<double>();
            a.variables.push_back(std::move(spec));
        }
        for (const auto& f : aj.at("solution_formula_ids"))
            a.solution_formula_ids.push_back(f.get<std::string>());
        s.analysis = std::move(a);
    }
    return s;
}

inline std::vector<Seed> read_seeds_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open seed file " + path);
    std::vector<Seed> seeds;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            seeds.push_back(seed_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return seeds;
}

} // namespace ipg

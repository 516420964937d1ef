#pragma once

// Phase II driver: turns analyzed seeds into verified dataset records by
// looping generate -> validate -> dedup -> plan -> verify against a backend,
// with generate_fix / code_fix retries carrying execution feedback.

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ipg/axiom.hpp"
#include "ipg/backend.hpp"
#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/hash.hpp"
#include "ipg/prompts.hpp"
#include "ipg/records.hpp"
#include "ipg/sanity.hpp"
#include "ipg/seeds.hpp"
#include "ipg/signature.hpp"
#include "ipg/strict_json.hpp"
#include "ipg/verify.hpp"

namespace ipg {

struct GenerationConfig {
    std::size_t variations_per_seed = 10; // N
    std::size_t min_formulas = 3;         // advertised difficulty band
    std::size_t max_formulas = 5;
    std::size_t retry_budget = 6;      // generation attempts per problem slot
    std::size_t code_retry_budget = 2; // code_fix attempts per generation attempt
    std::uint64_t rng_seed = 0;
    std::size_t per_scenario_quota = 0; // 0 = unlimited
    std::size_t max_calls = 0;          // 0 = unlimited
    std::size_t jobs = 1;

    void validate() const {
        if (variations_per_seed < 1) throw ConfigError("variations per seed must be >= 1");
        if (min_formulas < 1 || min_formulas > max_formulas)
            throw ConfigError("formula count bounds must satisfy 1 <= min <= max");
        if (retry_budget < 1) throw ConfigError("retry budget must be >= 1");
        if (jobs < 1) throw ConfigError("jobs must be >= 1");
    }
};

inline nlohmann::ordered_json config_to_json(const GenerationConfig& cfg) {
    nlohmann::ordered_json j;
    j["variations_per_seed"] = cfg.variations_per_seed;
    j["min_formulas"] = cfg.min_formulas;
    j["max_formulas"] = cfg.max_formulas;
    j["retry_budget"] = cfg.retry_budget;
    j["code_retry_budget"] = cfg.code_retry_budget;
    j["rng_seed"] = cfg.rng_seed;
    j["per_scenario_quota"] = cfg.per_scenario_quota;
    j["max_calls"] = cfg.max_calls;
    j["jobs"] = cfg.jobs;
    return j;
}

struct GenerationFailure {
    std::string seed_id;
    std::size_t slot = 0;
    std::string reason;             // terminal classification
    std::vector<std::string> trace; // one note per failed attempt
};

struct ProblemOutcome {
    std::optional<DatasetRecord> record;
    GenerationFailure failure; // meaningful only when !record
    bool accepted() const { return record.has_value(); }
};

struct SeedReport {
    std::string seed_id;
    std::size_t accepted = 0;
    std::vector<GenerationFailure> failures;
    int requery_count = 0;
    std::string error; // non-empty when Phase I failed; no slots were attempted
};

struct SessionResult {
    std::vector<DatasetRecord> records; // seed order, then slot order
    std::vector<SeedReport> seeds;      // aligned with the input seed list
    nlohmann::ordered_json call_stats = nlohmann::ordered_json::object();
    std::size_t collisions = 0;
    std::size_t registry_size = 0;
};

// ---------------------------------------------------------------------------
// Prompt payload builders

// {chapter name: description}, ascending chapter number.
inline nlohmann::ordered_json chapter_dictionary_json(const FormulaLibrary& library) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [num, info] : library.chapters()) j[info.name] = info.description;
    return j;
}

// {chapter name: {"formula_ids": [...]}}, ascending chapter number.
inline nlohmann::ordered_json chapter_formulas_json(const FormulaLibrary& library) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [num, info] : library.chapters())
        j[info.name] = nlohmann::ordered_json{{"formula_ids", info.formula_ids}};
    return j;
}

// {variable: {"range": [min, max], "unit": u}}, spec order.
inline nlohmann::ordered_json variable_ranges_json(const std::vector<VariableSpec>& specs) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& s : specs)
        j[s.name] = nlohmann::ordered_json{{"range", {s.min, s.max}}, {"unit", s.unit}};
    return j;
}

// {variable: {"value": v | "NaN", "unit": u}}, record order.
inline nlohmann::ordered_json
draft_variables_json(const std::vector<std::pair<std::string, VariableEntry>>& variables) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [name, entry] : variables) {
        nlohmann::ordered_json vj;
        if (entry.value) vj["value"] = *entry.value;
        else vj["value"] = "NaN";
        vj["unit"] = entry.unit;
        j[name] = vj;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Generation-response validation

struct ParsedGeneration {
    std::string word_problem;
    std::vector<std::string> formula_ids;
    std::vector<std::pair<std::string, VariableEntry>> variables; // response order
    std::string unknown_var;
    std::string unknown_unit;
};

// Enforces the draft contract on a generate/generate_fix completion: strict
// JSON shape, formula ids drawn from the available set, every given numeric
// and inside its dictionary range, and exactly one "NaN" unknown. The unknown
// itself may be a derived quantity absent from the dictionary.
inline ParsedGeneration parse_generation_response(const std::string& completion,
                                                  const std::set<std::string>& available,
                                                  const std::vector<VariableSpec>& specs) {
    auto parsed = parse_strict_json(completion); // ParseError on non-JSON
    const auto& doc = parsed.doc;

    ParsedGeneration out;
    if (!doc.contains("word_problem") || !doc["word_problem"].is_string())
        throw ValidationError("response lacks a word_problem string");
    out.word_problem = doc["word_problem"].get<std::string>();
    if (out.word_problem.empty()) throw ValidationError("word_problem is empty");

    if (!doc.contains("formula_ids") || !doc["formula_ids"].is_array())
        throw ValidationError("response lacks a formula_ids array");
    for (const auto& fid : doc["formula_ids"]) {
        if (!fid.is_string()) throw ValidationError("formula_ids must contain strings");
        std::string id = fid.get<std::string>();
        if (!available.count(id))
            throw ValidationError("formula id " + id + " is not in the available set");
        out.formula_ids.push_back(std::move(id));
    }

    if (!doc.contains("variables") || !doc["variables"].is_object() || doc["variables"].empty())
        throw ValidationError("response lacks a variables object");
    for (const auto& [name, entry] : doc["variables"].items()) {
        if (!entry.is_object() || !entry.contains("value") || !entry.contains("unit") ||
            !entry["unit"].is_string())
            throw ValidationError("variable " + name + " must carry {value, unit}");
        std::string unit = entry["unit"].get<std::string>();
        const auto& value = entry["value"];
        if (value.is_string()) {
            if (value.get<std::string>() != "NaN")
                throw ValidationError("variable " + name +
                                      " has a non-numeric value (only \"NaN\" marks the unknown)");
            if (!out.unknown_var.empty())
                throw ValidationError("more than one variable is marked \"NaN\"");
            out.unknown_var = name;
            out.unknown_unit = unit;
            out.variables.emplace_back(name, VariableEntry{std::nullopt, unit});
            continue;
        }
        if (!value.is_number())
            throw ValidationError("variable " + name + " has a non-numeric value");
        double v = value.get<double>();
        const VariableSpec* spec = nullptr;
        for (const auto& s : specs)
            if (s.name == name) { spec = &s; break; }
        if (!spec)
            throw ValidationError("variable " + name + " is not in the variable dictionary");
        if (v < spec->min || v > spec->max)
            throw ValidationError("variable " + name + " = " + detail::format_double(v) +
                                  " falls outside its range [" + detail::format_double(spec->min) +
                                  ", " + detail::format_double(spec->max) + "]");
        out.variables.emplace_back(name, VariableEntry{v, unit});
    }
    if (out.unknown_var.empty())
        throw ValidationError("exactly one variable must be marked \"NaN\"");
    return out;
}

// ---------------------------------------------------------------------------
// Session driver

class GenerationSession {
public:
    GenerationSession(const FormulaLibrary& library, const PromptLibrary& prompts,
                      std::vector<SanityRule> rules, GenerationConfig config, Backend& backend)
        : library_(library),
          prompts_(prompts),
          rules_(std::move(rules)),
          config_(config),
          backend_(backend) {
        config_.validate();
    }

    // Phase I: reuse an authored analysis, or ask the backend and then close
    // the chapter set under sufficiency (deterministically when the analysis
    // names its solution formulas, otherwise through the sufficiency stage).
    AnalysisResult analyze_seed(const Seed& seed) {
        AnalysisResult analysis;
        if (seed.analysis) {
            analysis = *seed.analysis;
        } else {
            std::string completion =
                complete("analysis", prompts_.render("analysis", {
                    {"chapters_json", chapter_dictionary_json(library_).dump()},
                    {"question", seed.question},
                    {"solution", seed.solution}}));
            const auto doc = parse_strict_json(completion).doc;
            if (!doc.contains("relevant_chapters") || !doc["relevant_chapters"].is_array())
                throw ValidationError("analysis lacks relevant_chapters");
            for (const auto& c : doc["relevant_chapters"])
                analysis.chapters.push_back(c.get<std::string>());
            if (!doc.contains("variables") || !doc["variables"].is_object())
                throw ValidationError("analysis lacks a variables object");
            for (const auto& [name, spec] : doc["variables"].items()) {
                if (!spec.contains("range") || !spec["range"].is_array() ||
                    spec["range"].size() != 2 || !spec.contains("unit"))
                    throw ValidationError("analysis variable " + name +
                                          " must carry {range: [min, max], unit}");
                analysis.variables.push_back({name, spec["unit"].get<std::string>(),
                                              spec["range"][0].get<double>(),
                                              spec["range"][1].get<double>()});
            }
            if (!doc.contains("alternate_scenarios") || !doc["alternate_scenarios"].is_array())
                throw ValidationError("analysis lacks alternate_scenarios");
            for (const auto& s : doc["alternate_scenarios"])
                analysis.scenarios.push_back(s.get<std::string>());
        }

        if (analysis.chapters.empty()) throw ValidationError("analysis names no chapters");
        for (const auto& name : analysis.chapters) require_chapter(name);
        if (analysis.scenarios.empty()) throw ValidationError("analysis names no scenarios");
        if (analysis.variables.empty()) throw ValidationError("analysis names no variables");

        auto violations = validate_variable_dictionary(analysis.variables, rules_);
        if (!violations.empty())
            throw ValidationError("variable dictionary rejected: " + violations[0].variable +
                                  ": " + violations[0].reason);

        if (!analysis.solution_formula_ids.empty()) {
            ensure_sufficient(analysis, library_); // deterministic fixpoint
        } else {
            sufficiency_requery(seed, analysis);
        }
        return analysis;
    }

    // One problem slot: generate (then generate_fix) until a fresh-signature
    // draft survives plan verification or the retry budget runs out.
    ProblemOutcome generate_problem(const Seed& seed, const AnalysisResult& analysis,
                                    const std::string& scenario,
                                    std::vector<std::string>& previous_context,
                                    std::size_t slot) {
        ProblemOutcome outcome;
        outcome.failure.seed_id = seed.id;
        outcome.failure.slot = slot;

        auto available = available_formula_ids(analysis.chapters, library_);
        std::vector<std::string> available_list(available.begin(), available.end());
        std::string docs = formula_docs_json(library_, available_list).dump();
        std::string ranges = variable_ranges_json(analysis.variables).dump();

        std::string last_error;
        for (std::size_t attempt = 1; attempt <= config_.retry_budget; ++attempt) {
            std::string stage = attempt == 1 ? "generate" : "generate_fix";
            std::map<std::string, std::string> subs{
                {"available_formulas", docs},
                {"alternate_scenarios", scenario},
                {"variables", ranges},
                {"previous_problems", nlohmann::ordered_json(previous_context).dump()}};
            if (stage == "generate_fix")
                subs["error_message"] =
                    "attempt " + std::to_string(attempt) + ": " + last_error;

            std::string completion;
            try {
                completion = complete(stage, prompts_.render(stage, subs));
            } catch (const BudgetExhaustedError& e) {
                last_error = e.what();
                outcome.failure.trace.push_back(note(attempt, stage, last_error));
                break;
            }

            ParsedGeneration parsed;
            try {
                parsed = parse_generation_response(completion, available, analysis.variables);
            } catch (const Error& e) {
                last_error = e.what();
                outcome.failure.trace.push_back(note(attempt, stage, last_error));
                continue;
            }

            std::string canonical = compute_signature(parsed.formula_ids, parsed.unknown_var);
            if (registry_.contains(canonical)) {
                record_collision(canonical, previous_context);
                last_error = "duplicate signature: " + canonical;
                outcome.failure.trace.push_back(note(attempt, stage, last_error));
                continue;
            }

            CodeOutcome code;
            try {
                code = run_code_stage(parsed, docs);
            } catch (const BudgetExhaustedError& e) {
                last_error = e.what();
                outcome.failure.trace.push_back(note(attempt, stage, last_error));
                break;
            }
            if (!code.ok) {
                last_error = "solution plan failed verification: " + code.failure_reason;
                outcome.failure.trace.push_back(note(attempt, stage, last_error));
                continue;
            }

            // Claim the signature atomically; losing a race to another worker
            // counts as a collision and regenerates like any other.
            if (registry_.test_and_insert(canonical) == InsertOutcome::Collision) {
                record_collision(canonical, previous_context);
                last_error = "duplicate signature: " + canonical;
                outcome.failure.trace.push_back(note(attempt, stage, last_error));
                continue;
            }

            DatasetRecord record;
            record.chapter = seed.chapter;
            record.word_problem = parsed.word_problem;
            record.execution_result = detail::format_double(code.report.value);
            record.signature = canonical;
            record.formula_ids = parsed.formula_ids;
            record.unknown_var = parsed.unknown_var;
            record.variables = parsed.variables;
            record.code = code.plan_text;
            record.validation_result = {true, parsed.unknown_var};
            previous_context.push_back(parsed.word_problem);
            outcome.record = std::move(record);
            return outcome;
        }
        outcome.failure.reason = "budget exhausted after " +
                                 std::to_string(outcome.failure.trace.size()) +
                                 " attempt(s); last error: " + last_error;
        return outcome;
    }

    // Full session over a seed list. Per-seed tasks may run in parallel; the
    // output record order (seed order, slot order) is schedule-independent.
    SessionResult run(const std::vector<Seed>& seeds) {
        SessionResult result;
        result.seeds.resize(seeds.size());
        std::vector<std::vector<DatasetRecord>> per_seed(seeds.size());

        std::atomic<std::size_t> cursor{0};
        std::exception_ptr first_error;
        std::mutex error_mu;
        auto worker = [&] {
            for (std::size_t i = cursor.fetch_add(1); i < seeds.size();
                 i = cursor.fetch_add(1)) {
                try {
                    process_seed(seeds[i], per_seed[i], result.seeds[i]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };

        if (config_.jobs <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            std::size_t n = std::min(config_.jobs, seeds.size() ? seeds.size() : std::size_t{1});
            for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);

        for (auto& chunk : per_seed)
            for (auto& r : chunk) result.records.push_back(std::move(r));
        result.call_stats = stats_.to_json();
        result.collisions = collisions_.load();
        result.registry_size = registry_.size();
        return result;
    }

    const CallStats& stats() const { return stats_; }
    const SignatureRegistry& registry() const { return registry_; }

private:
    struct CodeOutcome {
        bool ok = false;
        std::string plan_text;
        VerificationReport report;
        std::string failure_reason;
    };

    static std::string note(std::size_t attempt, const std::string& stage,
                            const std::string& message) {
        return "attempt " + std::to_string(attempt) + " (" + stage + "): " + message;
    }

    void require_chapter(const std::string& name) const {
        for (const auto& [num, info] : library_.chapters())
            if (info.name == name) return;
        throw UnknownChapterLabelError(name);
    }

    void record_collision(const std::string& canonical,
                          std::vector<std::string>& previous_context) {
        collisions_.fetch_add(1);
        previous_context.push_back("signature already used: " + canonical);
    }

    std::string complete(const std::string& stage, const std::string& prompt) {
        if (config_.max_calls) budget_.consume(stage); // throws when spent
        stats_.record(stage);
        return backend_.complete({stage, prompt, default_temperature(stage)});
    }

    // LLM sufficiency loop, bounded by the chapter count. A persistent NO is
    // advisory only: generation proceeds with the accumulated chapters.
    void sufficiency_requery(const Seed& seed, AnalysisResult& analysis) {
        std::string all_chapters = chapter_formulas_json(library_).dump();
        for (std::size_t round = 0; round < library_.chapters().size(); ++round) {
            std::string completion = complete(
                "sufficiency",
                prompts_.render("sufficiency",
                                {{"solution", seed.solution},
                                 {"identified_chapters",
                                  nlohmann::ordered_json(analysis.chapters).dump()},
                                 {"all_chapters_json", all_chapters}}));
            const auto doc = parse_strict_json(completion).doc;
            if (!doc.contains("status") || !doc["status"].is_string())
                throw ValidationError("sufficiency response lacks a status");
            std::string status = doc["status"].get<std::string>();
            if (status == "YES") return;
            if (status != "NO")
                throw ValidationError("sufficiency status must be YES or NO, got " + status);
            if (!doc.contains("missing_chapter") || !doc["missing_chapter"].is_string())
                throw ValidationError("sufficiency NO must name a missing_chapter");
            std::string missing = doc["missing_chapter"].get<std::string>();
            require_chapter(missing);
            expand_chapters(analysis, {false, "", missing});
        }
    }

    CodeOutcome run_code_stage(const ParsedGeneration& parsed, const std::string& docs) {
        CodeOutcome out;
        std::string fids = nlohmann::ordered_json(parsed.formula_ids).dump();
        std::string vars = draft_variables_json(parsed.variables).dump();

        ProblemDraft draft;
        draft.word_problem = parsed.word_problem;
        draft.formula_ids = parsed.formula_ids;
        draft.unknown_var = parsed.unknown_var;
        for (const auto& [name, entry] : parsed.variables)
            if (entry.value) draft.given_values.emplace_back(name, *entry.value);

        for (std::size_t attempt = 0; attempt <= config_.code_retry_budget; ++attempt) {
            std::string stage = attempt == 0 ? "code" : "code_fix";
            std::map<std::string, std::string> subs{{"word_problem", parsed.word_problem},
                                                    {"formula_ids", fids},
                                                    {"variables_dict", vars},
                                                    {"available_formulas", docs}};
            if (stage == "code_fix")
                subs["error_message"] =
                    "attempt " + std::to_string(attempt) + ": " + out.failure_reason;

            draft.code = complete(stage, prompts_.render(stage, subs));
            VerificationReport report = verify(draft, library_, rules_);
            if (report.passed) {
                out.ok = true;
                out.plan_text = draft.code;
                out.report = report;
                return out;
            }
            out.failure_reason = describe_failure(report);
        }
        return out;
    }

    static std::string describe_failure(const VerificationReport& report) {
        if (report.failure_stage == "syntactic") return report.syntactic_message;
        if (report.failure_stage == "numeric") return report.numeric_message;
        if (report.failure_stage == "sanity") {
            std::string msg = "sanity check failed:";
            for (const auto& f : report.findings)
                msg += " " + f.variable + " = " + detail::format_double(f.value) + " (" + f.message + ")";
            return msg;
        }
        if (report.failure_stage == "signature")
            return "signature mismatch: " + report.signature_message;
        return "verification failed";
    }

    void process_seed(const Seed& seed, std::vector<DatasetRecord>& out, SeedReport& report) {
        report.seed_id = seed.id;
        AnalysisResult analysis;
        try {
            analysis = analyze_seed(seed);
        } catch (const BackendError&) {
            throw; // transport failures abort the session
        } catch (const Error& e) {
            report.error = e.what();
            return;
        }
        report.requery_count = analysis.requery_count;

        ScenarioRotation rotation(analysis.scenarios);
        std::map<std::string, std::size_t> scenario_slots;
        std::vector<std::string> previous;
        for (std::size_t slot = 0; slot < config_.variations_per_seed; ++slot) {
            const std::string* scenario = nullptr;
            for (std::size_t probe = 0; probe < analysis.scenarios.size(); ++probe) {
                const std::string& candidate = rotation.next();
                if (config_.per_scenario_quota == 0 ||
                    scenario_slots[candidate] < config_.per_scenario_quota) {
                    scenario = &candidate;
                    break;
                }
            }
            if (!scenario) {
                GenerationFailure f{seed.id, slot, "scenario quota exhausted", {}};
                report.failures.push_back(std::move(f));
                continue;
            }
            ++scenario_slots[*scenario];

            ProblemOutcome outcome =
                generate_problem(seed, analysis, *scenario, previous, slot);
            if (outcome.accepted()) {
                out.push_back(std::move(*outcome.record));
                ++report.accepted;
            } else {
                report.failures.push_back(std::move(outcome.failure));
            }
        }
    }

    const FormulaLibrary& library_;
    const PromptLibrary& prompts_;
    std::vector<SanityRule> rules_;
    GenerationConfig config_;
    Backend& backend_;
    SignatureRegistry registry_;
    CallStats stats_;
    CallBudget budget_{config_.max_calls ? config_.max_calls : SIZE_MAX};
    std::atomic<std::size_t> collisions_{0};
};

// ---------------------------------------------------------------------------
// Session manifest

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = fnv1a64(bytes);
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = digits[h & 0xF];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string("fnv1a64:") + buf;
}

inline nlohmann::ordered_json
session_manifest(const GenerationConfig& config, const std::string& seed_path,
                 const std::string& seed_file_bytes, const std::string& backend_name,
                 const SessionResult& result, const std::string& started_at,
                 const std::string& finished_at) {
    nlohmann::ordered_json m;
    m["config"] = config_to_json(config);
    m["seed_file"] = seed_path;
    m["seed_file_hash"] = fnv1a64_hex(seed_file_bytes);
    m["backend"] = backend_name;
    m["started_at"] = started_at;
    m["finished_at"] = finished_at;
    nlohmann::ordered_json per_seed = nlohmann::ordered_json::object();
    for (const auto& s : result.seeds) {
        nlohmann::ordered_json sj;
        sj["accepted"] = s.accepted;
        sj["failed_slots"] = s.failures.size();
        sj["requery_count"] = s.requery_count;
        if (!s.error.empty()) sj["error"] = s.error;
        per_seed[s.seed_id] = sj;
    }
    m["seeds"] = per_seed;
    m["records_accepted"] = result.records.size();
    m["signature_collisions"] = result.collisions;
    m["call_stats"] = result.call_stats;
    return m;
}

} // namespace ipg

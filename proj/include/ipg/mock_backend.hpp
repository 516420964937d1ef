#pragma once

// Deterministic offline backend.
//
// The mock plays the model's role well enough for the whole pipeline to run
// with no network: it reads the same prompts a hosted model would receive,
// extracts the structured INPUT payloads, and synthesizes responses with an
// RNG seeded from the prompt bytes — so identical prompts always produce
// identical completions, and a changed retry context (appended error, grown
// duplicate list) naturally produces a different one.
//
// Two stages are honest about their limits: `analysis` and `sufficiency`
// require either a scripted response or (for sufficiency) fall back to a
// plain YES, because inventing chapter analyses would only manufacture
// garbage. Tests can enqueue exact response text per stage to exercise any
// path, including malformed output.

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipg/backend.hpp"
#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/hash.hpp"
#include "ipg/sampling.hpp"

namespace ipg {

namespace detail {

// Pulls the single-line payload following `marker` in the prompt.
inline std::string prompt_field(const std::string& prompt, const std::string& marker) {
    size_t pos = prompt.find(marker);
    if (pos == std::string::npos)
        throw BackendError("mock backend: prompt is missing \"" + marker + "\"");
    size_t start = pos + marker.size();
    size_t end = prompt.find('\n', start);
    if (end == std::string::npos) end = prompt.size();
    std::string value = prompt.substr(start, end - start);
    size_t b = value.find_first_not_of(" \t");
    return b == std::string::npos ? "" : value.substr(b);
}

inline nlohmann::ordered_json prompt_json_field(const std::string& prompt,
                                                const std::string& marker) {
    std::string raw = prompt_field(prompt, marker);
    try {
        return nlohmann::ordered_json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError("mock backend: field \"" + marker + "\" is not JSON: " + e.what());
    }
}

// The slice of a formula doc the mock needs.
struct MockFormulaDoc {
    std::string id;
    std::vector<std::string> param_names;
    std::string output_name;
    std::string output_unit;
};

inline std::vector<MockFormulaDoc> parse_formula_docs(const nlohmann::ordered_json& arr) {
    std::vector<MockFormulaDoc> docs;
    for (const auto& f : arr) {
        MockFormulaDoc d;
        d.id = f.at("formula_id").get<std::string>();
        for (const auto& p : f.at("params")) d.param_names.push_back(p.at("name").get<std::string>());
        d.output_name = f.at("output").at("name").get<std::string>();
        d.output_unit = f.at("output").at("unit").get<std::string>();
        docs.push_back(std::move(d));
    }
    return docs;
}

} // namespace detail

class MockBackend : public Backend {
public:
    std::string name() const override { return "mock"; }

    // Queue an exact response for the next call to `stage`; scripted
    // responses take precedence over synthesis and are consumed in order.
    void enqueue(const std::string& stage, const std::string& response) {
        std::lock_guard<std::mutex> lock(mu_);
        scripted_[stage].push_back(response);
    }

    size_t calls(const std::string& stage) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = call_counts_.find(stage);
        return it == call_counts_.end() ? 0 : it->second;
    }

    std::string complete(const BackendRequest& request) override {
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++call_counts_[request.stage];
            auto it = scripted_.find(request.stage);
            if (it != scripted_.end() && !it->second.empty()) {
                std::string response = std::move(it->second.front());
                it->second.pop_front();
                return response;
            }
        }
        if (request.stage == "generate" || request.stage == "generate_fix")
            return synthesize_problem(request.prompt);
        if (request.stage == "code" || request.stage == "code_fix")
            return synthesize_plan(request.prompt);
        if (request.stage == "sufficiency") return "{\"status\": \"YES\"}";
        throw BackendError("mock backend has no model for stage \"" + request.stage +
                           "\"; enqueue a scripted response");
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::deque<std::string>> scripted_;
    std::map<std::string, size_t> call_counts_;

    // ---- generate / generate_fix ----------------------------------------
    //
    // Reads the available formulas, the variable dictionary, and the
    // scenario; picks 3-5 formulas favoring ones grounded in already-known
    // quantities; samples every given from its range; and writes a plain,
    // deliberately formulaic word problem around the chosen scenario.
    std::string synthesize_problem(const std::string& prompt) const {
        auto docs = detail::parse_formula_docs(
            detail::prompt_json_field(prompt, "- Available Formulas:"));
        auto var_dict = detail::prompt_json_field(prompt, "- Variables and Ranges:");
        std::string scenario = detail::prompt_field(prompt, "- Alternate Scenario:");
        if (docs.empty()) throw BackendError("mock backend: no formulas to select from");

        Rng rng(fnv1a64(prompt));
        size_t target = 3 + rng.pick(3); // 3, 4, or 5

        std::set<std::string> known;
        for (const auto& [name, spec] : var_dict.items()) {
            (void)spec;
            known.insert(name);
        }

        std::vector<size_t> selected;
        std::set<size_t> taken;
        for (size_t step = 0; step < target && taken.size() < docs.size(); ++step) {
            std::vector<size_t> grounded, rest;
            for (size_t i = 0; i < docs.size(); ++i) {
                if (taken.count(i)) continue;
                bool anchored = false;
                for (const auto& p : docs[i].param_names)
                    if (known.count(p)) anchored = true;
                (anchored ? grounded : rest).push_back(i);
            }
            const auto& pool = grounded.empty() ? rest : grounded;
            size_t pick = pool[rng.pick(pool.size())];
            taken.insert(pick);
            selected.push_back(pick);
            known.insert(docs[pick].output_name);
        }

        const auto& last = docs[selected.back()];
        std::string unknown = last.output_name;
        std::string unknown_unit = last.output_unit;

        // Sample all given values; the unknown (whether or not it also
        // appears in the dictionary) carries the NaN marker.
        nlohmann::ordered_json variables = nlohmann::ordered_json::object();
        size_t index = 0;
        for (const auto& [name, spec] : var_dict.items()) {
            if (name == unknown) continue;
            VariableSpec vs;
            vs.name = name;
            vs.unit = spec.at("unit").get<std::string>();
            vs.min = spec.at("range").at(0).get<double>();
            vs.max = spec.at("range").at(1).get<double>();
            Rng child = rng.child(1000 + index++);
            double value = sample_value(vs, child);
            variables[name] = {{"value", value}, {"unit", vs.unit}};
        }
        variables[unknown] = {{"value", "NaN"}, {"unit", unknown_unit}};

        std::ostringstream text;
        text << "Consider " << scenario << " The measurements on record are:";
        bool first = true;
        for (const auto& [name, entry] : variables.items()) {
            if (name == unknown) continue;
            text << (first ? " " : "; ") << readable(name) << " of "
                 << detail::format_double(entry.at("value").get<double>()) << " "
                 << entry.at("unit").get<std::string>();
            first = false;
        }
        text << ". Working only from the governing relations, determine the " << readable(unknown)
             << " (in " << unknown_unit << ").";

        nlohmann::ordered_json response;
        response["word_problem"] = text.str();
        nlohmann::ordered_json fids = nlohmann::ordered_json::array();
        for (size_t i : selected) fids.push_back(docs[i].id);
        response["formula_ids"] = std::move(fids);
        response["variables"] = std::move(variables);
        return response.dump();
    }

    // ---- code / code_fix --------------------------------------------------
    //
    // Deterministically transcribes the inputs into a plan: bind every given,
    // invoke each allowed formula (the one producing the unknown goes
    // last), resolve parameters by name against bound or derived values and
    // fall back to a unit literal, then return the unknown's producer.
    std::string synthesize_plan(const std::string& prompt) const {
        auto docs = detail::parse_formula_docs(
            detail::prompt_json_field(prompt, "- All Available Formulas:"));
        auto fids = detail::prompt_json_field(prompt, "- IDs for Allowed Formulas:");
        auto variables = detail::prompt_json_field(prompt, "- Variables:");

        std::map<std::string, detail::MockFormulaDoc> by_id;
        for (auto& d : docs) by_id[d.id] = d;

        std::string unknown;
        std::vector<std::pair<std::string, double>> givens;
        for (const auto& [name, entry] : variables.items()) {
            const auto& value = entry.at("value");
            if (value.is_string()) {
                unknown = name;
            } else {
                givens.emplace_back(name, value.get<double>());
            }
        }

        std::vector<detail::MockFormulaDoc> order;
        for (const auto& fid : fids) {
            auto it = by_id.find(fid.get<std::string>());
            if (it == by_id.end())
                throw BackendError("mock backend: allowed formula " + fid.get<std::string>() +
                                   " is not among the available docs");
            order.push_back(it->second);
        }
        // The unknown's producer returns last so the plan ends on it.
        std::stable_partition(order.begin(), order.end(),
                              [&](const detail::MockFormulaDoc& d) {
                                  return d.output_name != unknown;
                              });

        std::ostringstream plan;
        plan << "# derive " << (unknown.empty() ? "the result" : unknown)
             << " from the given quantities\n";
        std::set<std::string> defined;
        for (const auto& [name, value] : givens) {
            plan << "bind " << name << " = " << detail::format_double(value) << "\n";
            defined.insert(name);
        }
        std::string last_name;
        for (const auto& doc : order) {
            std::string alias = doc.output_name;
            if (defined.count(alias)) {
                std::string suffix = doc.id;
                for (auto& c : suffix) c = static_cast<char>(std::tolower(c));
                alias = doc.output_name + "_" + suffix;
            }
            plan << "invoke " << alias << " = " << doc.id << "(";
            for (size_t i = 0; i < doc.param_names.size(); ++i) {
                if (i) plan << ", ";
                plan << (defined.count(doc.param_names[i]) ? doc.param_names[i] : "1.0");
            }
            plan << ")\n";
            defined.insert(alias);
            last_name = alias;
        }
        if (last_name.empty()) {
            // No formulas at all: answer with the first given.
            last_name = givens.empty() ? "nothing" : givens.front().first;
        }
        plan << "return " << last_name << "\n";
        return plan.str();
    }

    // "angular_acceleration" -> "angular acceleration" for problem text.
    static std::string readable(const std::string& name) {
        std::string out = name;
        for (auto& c : out)
            if (c == '_') c = ' ';
        return out;
    }
};

} // namespace ipg

#pragma once

// Prompt template library.
//
// Templates live on disk, one file per pipeline stage, and are editable
// without recompiling. A template mixes three brace forms: {name} is a
// placeholder substituted at render time, and {{ / }} are escapes for
// literal braces (the JSON skeletons the model is told to emit). The
// analysis template predates the escaping convention and carries literal
// single braces; rendering therefore collapses escapes BEFORE substitution,
// which leaves lone braces untouched and never reprocesses substituted
// payloads (whose JSON routinely ends in "}}").

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ipg/errors.hpp"

namespace ipg {

// The six pipeline stages, in call order.
inline const std::vector<std::string>& prompt_stage_names() {
    static const std::vector<std::string> names{"analysis",     "sufficiency", "generate",
                                                "generate_fix", "code",        "code_fix"};
    return names;
}

// Placeholders each template must consume. Render calls are checked both
// ways: every required name must be supplied, and no extras are accepted.
inline const std::map<std::string, std::vector<std::string>>& prompt_placeholders() {
    static const std::map<std::string, std::vector<std::string>> table{
        {"analysis", {"chapters_json", "question", "solution"}},
        {"sufficiency", {"solution", "identified_chapters", "all_chapters_json"}},
        {"generate", {"available_formulas", "alternate_scenarios", "variables",
                      "previous_problems"}},
        {"generate_fix", {"error_message", "available_formulas", "alternate_scenarios",
                          "variables", "previous_problems"}},
        {"code", {"word_problem", "formula_ids", "variables_dict", "available_formulas"}},
        {"code_fix", {"error_message", "word_problem", "formula_ids", "variables_dict",
                      "available_formulas"}},
    };
    return table;
}

class PromptLibrary {
public:
    // Loads all six stage templates from `dir` (e.g. the repo's data/prompts).
    static PromptLibrary load(const std::string& dir) {
        PromptLibrary lib;
        for (const auto& name : prompt_stage_names()) {
            std::ifstream in(dir + "/" + name + ".txt", std::ios::binary);
            if (!in) throw ConfigError("missing prompt template " + dir + "/" + name + ".txt");
            std::ostringstream ss;
            ss << in.rdbuf();
            lib.templates_[name] = ss.str();
        }
        return lib;
    }

    const std::string& raw(const std::string& stage) const {
        auto it = templates_.find(stage);
        if (it == templates_.end()) throw ConfigError("unknown prompt stage \"" + stage + "\"");
        return it->second;
    }

    // Renders a stage template: collapse {{ }} escapes, then substitute each
    // {name}. Substitutions are validated against the stage's placeholder
    // contract so a renamed template field fails loudly.
    std::string render(const std::string& stage,
                       const std::map<std::string, std::string>& subs) const {
        const auto& required = prompt_placeholders().at(stage_checked(stage));
        for (const auto& name : required)
            if (!subs.count(name))
                throw ConfigError("prompt \"" + stage + "\" needs placeholder {" + name + "}");
        for (const auto& [name, value] : subs) {
            (void)value;
            if (std::find(required.begin(), required.end(), name) == required.end())
                throw ConfigError("prompt \"" + stage + "\" has no placeholder {" + name + "}");
        }

        std::string text = collapse_escapes(raw(stage));
        for (const auto& [name, value] : subs) {
            const std::string token = "{" + name + "}";
            size_t pos = 0;
            bool found = false;
            while ((pos = text.find(token, pos)) != std::string::npos) {
                text.replace(pos, token.size(), value);
                pos += value.size();
                found = true;
            }
            if (!found)
                throw ConfigError("template for \"" + stage + "\" lost placeholder {" + name +
                                  "}");
        }
        return text;
    }

private:
    std::map<std::string, std::string> templates_;

    const std::string& stage_checked(const std::string& stage) const {
        if (!prompt_placeholders().count(stage))
            throw ConfigError("unknown prompt stage \"" + stage + "\"");
        return stage;
    }

    // One left-to-right pass: "{{" -> "{", "}}" -> "}".
    static std::string collapse_escapes(const std::string& text) {
        std::string out;
        out.reserve(text.size());
        for (size_t i = 0; i < text.size(); ++i) {
            if (i + 1 < text.size() && (text[i] == '{' || text[i] == '}') &&
                text[i + 1] == text[i]) {
                out.push_back(text[i]);
                ++i;
            } else {
                out.push_back(text[i]);
            }
        }
        return out;
    }
};

} // namespace ipg

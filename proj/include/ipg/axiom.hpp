#pragma once

// The executable axiom library: physics formulas as typed, dimension-checked
// expressions, organized by textbook chapter.
//
// Registration is the integrity gate: a formula enters the library only if
// its id is fresh, its body references declared parameters only, and the
// body's inferred dimension equals the declared output unit. A library that
// loads is therefore dimensionally sound end to end.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipg/errors.hpp"
#include "ipg/expr.hpp"
#include "ipg/units.hpp"

namespace ipg {

struct Param {
    std::string name;
    std::string unit; // as written, e.g. "m/s"
    Dim dim;          // parsed dimension vector
};

struct Formula {
    std::string id;   // e.g. "10_I"
    std::string name; // descriptive snake_case name
    int chapter_number = 0;
    std::vector<Param> params;
    Param output;
    std::string body_source;
    ExprPtr body;
    std::string docstring;
};

struct ChapterInfo {
    int number = 0;
    std::string name;
    std::string description;
    std::vector<std::string> formula_ids; // registration order
};

class FormulaLibrary {
public:
    // Validates and registers one formula. Throws DuplicateFormulaIdError,
    // UndeclaredParameterError, DimensionMismatchError, ParseError,
    // UnknownUnitError.
    void register_axiom(Formula f) {
        if (formulas_.count(f.id)) throw DuplicateFormulaIdError(f.id);
        if (!f.body) f.body = parse_expr(f.body_source);

        DimEnv denv;
        for (auto& p : f.params) {
            p.dim = parse_unit(p.unit);
            denv[p.name] = p.dim;
        }
        f.output.dim = parse_unit(f.output.unit);

        std::vector<std::string> used;
        collect_vars(f.body, used);
        for (const auto& v : used) {
            if (!denv.count(v)) throw UndeclaredParameterError(v);
        }

        Dim body_dim = infer_dim(f.body, denv);
        if (body_dim != f.output.dim)
            throw DimensionMismatchError("formula " + f.id + " body has dimension " +
                                         to_string(body_dim) + " but output \"" +
                                         f.output.name + "\" is declared " +
                                         to_string(f.output.dim));

        auto& ch = chapters_[f.chapter_number];
        ch.number = f.chapter_number;
        ch.formula_ids.push_back(f.id);
        order_.push_back(f.id);
        formulas_.emplace(f.id, std::move(f));
    }

    bool has(const std::string& id) const { return formulas_.count(id) != 0; }

    const Formula& lookup(const std::string& id) const {
        auto it = formulas_.find(id);
        if (it == formulas_.end()) throw UnknownFormulaIdError(id);
        return it->second;
    }

    // Positional invocation; throws ArityError on length mismatch plus
    // whatever evaluation throws.
    double invoke(const std::string& id, const std::vector<double>& args) const {
        const Formula& f = lookup(id);
        if (args.size() != f.params.size())
            throw ArityError("formula " + id + " takes " + std::to_string(f.params.size()) +
                             " argument(s), got " + std::to_string(args.size()));
        Env env;
        for (size_t i = 0; i < args.size(); ++i) env[f.params[i].name] = args[i];
        return evaluate(f.body, env);
    }

    size_t size() const { return formulas_.size(); }

    // Ids in registration order.
    const std::vector<std::string>& all_ids() const { return order_; }

    // Chapter number owning `id`; throws UnknownFormulaIdError.
    int chapter_of(const std::string& id) const { return lookup(id).chapter_number; }

    // Chapters keyed (and therefore iterated) by ascending chapter number.
    const std::map<int, ChapterInfo>& chapters() const { return chapters_; }

    void describe_chapter(int number, const std::string& name, const std::string& description) {
        auto& ch = chapters_[number];
        ch.number = number;
        ch.name = name;
        ch.description = description;
    }

    const ChapterInfo* chapter(int number) const {
        auto it = chapters_.find(number);
        return it == chapters_.end() ? nullptr : &it->second;
    }

    // Chapter display label used in dataset records: "<number>.<Name>".
    std::string chapter_label(int number) const {
        auto it = chapters_.find(number);
        if (it == chapters_.end())
            throw PreconditionError("unknown chapter number " + std::to_string(number));
        return std::to_string(number) + "." + it->second.name;
    }

private:
    std::map<std::string, Formula> formulas_;
    std::map<int, ChapterInfo> chapters_;
    std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// JSON loading

inline FormulaLibrary load_library(const nlohmann::json& doc) {
    FormulaLibrary lib;
    if (!doc.is_object() || !doc.contains("chapters") || !doc["chapters"].is_array())
        throw ParseError("library document must be an object with a \"chapters\" array");
    for (const auto& ch : doc["chapters"]) {
        int number = ch.at("number").get<int>();
        lib.describe_chapter(number, ch.at("name").get<std::string>(),
                             ch.value("description", std::string{}));
        for (const auto& fj : ch.at("formulas")) {
            Formula f;
            f.id = fj.at("formula_id").get<std::string>();
            f.name = fj.at("name").get<std::string>();
            f.chapter_number = number;
            for (const auto& pj : fj.at("params")) {
                Param p;
                p.name = pj.at("name").get<std::string>();
                p.unit = pj.at("unit").get<std::string>();
                f.params.push_back(std::move(p));
            }
            f.output.name = fj.at("output").at("name").get<std::string>();
            f.output.unit = fj.at("output").at("unit").get<std::string>();
            f.body_source = fj.at("body").get<std::string>();
            f.docstring = fj.value("docstring", std::string{});
            lib.register_axiom(std::move(f));
        }
    }
    return lib;
}

// ---------------------------------------------------------------------------
// Chapter dictionary (analysis-facing view: name -> description + ids)

struct ChapterEntry {
    int number = 0;
    std::string description;
    std::vector<std::string> formula_ids;
};

// Keyed by chapter name (the analysis prompts address chapters by name);
// entries keep the number for anything that needs curriculum order.
using ChapterDictionary = std::map<std::string, ChapterEntry>;

inline ChapterDictionary chapter_dictionary(const FormulaLibrary& lib) {
    ChapterDictionary dict;
    for (const auto& [num, info] : lib.chapters()) {
        ChapterEntry e;
        e.number = num;
        e.description = info.description;
        e.formula_ids = info.formula_ids;
        dict[info.name] = std::move(e);
    }
    return dict;
}

// ---------------------------------------------------------------------------
// Prompt-facing formula docs
//
// The JSON shape a formula takes when embedded in a prompt: id, signature,
// body, and docstring — everything a model (or the mock) needs to choose
// and call it.

inline nlohmann::ordered_json formula_doc(const Formula& f) {
    nlohmann::ordered_json doc;
    doc["formula_id"] = f.id;
    doc["name"] = f.name;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& p : f.params)
        params.push_back(nlohmann::ordered_json{{"name", p.name}, {"unit", p.unit}});
    doc["params"] = std::move(params);
    doc["output"] = nlohmann::ordered_json{{"name", f.output.name}, {"unit", f.output.unit}};
    doc["body"] = f.body_source;
    doc["docstring"] = f.docstring;
    return doc;
}

inline nlohmann::ordered_json formula_docs_json(const FormulaLibrary& lib,
                                                const std::vector<std::string>& ids) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& id : ids) arr.push_back(formula_doc(lib.lookup(id)));
    return arr;
}

} // namespace ipg

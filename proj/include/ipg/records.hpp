#pragma once

// Dataset records and their JSONL serialization.
//
// A record is one released problem. Field order is part of the format:
//
//   chapter, word_problem, execution_result, signature, formula_ids,
//   unknown_var, variables, code, validation_result
//
// `execution_result` is the answer as a shortest round-trip decimal string,
// or null when verification could not produce a finite value. `variables`
// maps every quantity in the problem to {value, unit}; the unknown is the
// single entry whose value is null (a marker, never NaN). `code` is either
// a solution plan (generated records) or opaque source kept verbatim.
//
// The reader is strict about field presence and types, tolerant about
// content: null execution results and unparseable code are data, not errors.
// Unknown extra fields round-trip unchanged.

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ipg/errors.hpp"
#include "ipg/format.hpp"

namespace ipg {

using ordered_json = nlohmann::ordered_json;

struct VariableEntry {
    std::optional<double> value; // nullopt marks the unknown
    std::string unit;
};

struct ValidationResult {
    bool valid = false;
    std::string unknown_var;
};

struct DatasetRecord {
    std::string chapter; // "<number>.<Name>", e.g. "9.Centre of Mass"
    std::string word_problem;
    std::optional<std::string> execution_result;
    std::string signature;
    std::vector<std::string> formula_ids;
    std::string unknown_var;
    std::vector<std::pair<std::string, VariableEntry>> variables; // insertion order kept
    std::string code;
    ValidationResult validation_result;
    ordered_json extras = ordered_json::object(); // unrecognized fields, verbatim

    const VariableEntry* find_variable(const std::string& name) const {
        for (const auto& [n, v] : variables)
            if (n == name) return &v;
        return nullptr;
    }

    // Count of variables whose value is the null marker.
    size_t unknown_count() const {
        size_t n = 0;
        for (const auto& [name, v] : variables)
            if (!v.value) ++n;
        return n;
    }
};

inline ordered_json record_to_json(const DatasetRecord& r) {
    ordered_json j;
    j["chapter"] = r.chapter;
    j["word_problem"] = r.word_problem;
    if (r.execution_result) j["execution_result"] = *r.execution_result;
    else j["execution_result"] = nullptr;
    j["signature"] = r.signature;
    j["formula_ids"] = r.formula_ids;
    j["unknown_var"] = r.unknown_var;
    ordered_json vars = ordered_json::object();
    for (const auto& [name, v] : r.variables) {
        ordered_json vj;
        if (v.value) vj["value"] = *v.value;
        else vj["value"] = nullptr;
        vj["unit"] = v.unit;
        vars[name] = std::move(vj);
    }
    j["variables"] = std::move(vars);
    j["code"] = r.code;
    j["validation_result"] = {{"valid", r.validation_result.valid},
                              {"unknown_var", r.validation_result.unknown_var}};
    for (const auto& [key, val] : r.extras.items()) j[key] = val;
    return j;
}

inline DatasetRecord record_from_json(const ordered_json& j) {
    if (!j.is_object()) throw MalformedRecordError("record is not an object");
    auto require = [&](const char* field) -> const ordered_json& {
        auto it = j.find(field);
        if (it == j.end())
            throw MalformedRecordError(std::string("missing field \"") + field + "\"");
        return *it;
    };
    auto require_string = [&](const char* field) -> std::string {
        const auto& v = require(field);
        if (!v.is_string())
            throw MalformedRecordError(std::string("field \"") + field + "\" must be a string");
        return v.get<std::string>();
    };

    DatasetRecord r;
    r.chapter = require_string("chapter");
    r.word_problem = require_string("word_problem");

    const auto& exec = require("execution_result");
    if (exec.is_null()) r.execution_result = std::nullopt;
    else if (exec.is_string()) r.execution_result = exec.get<std::string>();
    else throw MalformedRecordError("execution_result must be a string or null");

    r.signature = require_string("signature");

    const auto& fids = require("formula_ids");
    if (!fids.is_array()) throw MalformedRecordError("formula_ids must be an array");
    for (const auto& f : fids) {
        if (!f.is_string()) throw MalformedRecordError("formula_ids entries must be strings");
        r.formula_ids.push_back(f.get<std::string>());
    }

    r.unknown_var = require_string("unknown_var");

    const auto& vars = require("variables");
    if (!vars.is_object()) throw MalformedRecordError("variables must be an object");
    for (const auto& [name, vj] : vars.items()) {
        if (!vj.is_object() || !vj.contains("value") || !vj.contains("unit"))
            throw MalformedRecordError("variable \"" + name + "\" must carry value and unit");
        VariableEntry entry;
        const auto& value = vj["value"];
        if (value.is_null()) entry.value = std::nullopt;
        else if (value.is_number()) entry.value = value.get<double>();
        else throw MalformedRecordError("variable \"" + name + "\" value must be number or null");
        if (!vj["unit"].is_string())
            throw MalformedRecordError("variable \"" + name + "\" unit must be a string");
        entry.unit = vj["unit"].get<std::string>();
        r.variables.emplace_back(name, std::move(entry));
    }

    r.code = require_string("code");

    const auto& val = require("validation_result");
    if (!val.is_object() || !val.contains("valid") || !val["valid"].is_boolean() ||
        !val.contains("unknown_var") || !val["unknown_var"].is_string())
        throw MalformedRecordError("validation_result must be {valid: bool, unknown_var: string}");
    r.validation_result.valid = val["valid"].get<bool>();
    r.validation_result.unknown_var = val["unknown_var"].get<std::string>();

    static const std::vector<std::string> known = {
        "chapter",     "word_problem", "execution_result", "signature", "formula_ids",
        "unknown_var", "variables",    "code",             "validation_result"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) r.extras[key] = value;
    }
    return r;
}

// ---------------------------------------------------------------------------
// JSONL files

inline std::vector<DatasetRecord> read_records(std::istream& in, const std::string& origin) {
    std::vector<DatasetRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            records.push_back(record_from_json(j));
        } catch (const MalformedRecordError& e) {
            throw MalformedRecordError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

inline std::vector<DatasetRecord> read_records_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open dataset file " + path);
    return read_records(in, path);
}

inline void write_records(std::ostream& out, const std::vector<DatasetRecord>& records) {
    for (const auto& r : records) out << record_to_json(r).dump() << "\n";
}

inline void write_records_file(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path);
    write_records(out, records);
}

// Normalizes foreign input — a JSON array of records or JSONL — into the
// canonical record list. Unknown fields survive in `extras`.
inline std::vector<DatasetRecord> import_records(const std::string& text,
                                                 const std::string& origin) {
    std::string trimmed;
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos) trimmed = text.substr(first);
    if (!trimmed.empty() && trimmed.front() == '[') {
        ordered_json doc;
        try {
            doc = ordered_json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedRecordError(origin + ": " + e.what());
        }
        std::vector<DatasetRecord> records;
        for (const auto& j : doc) records.push_back(record_from_json(j));
        return records;
    }
    std::istringstream in(text);
    return read_records(in, origin);
}

} // namespace ipg

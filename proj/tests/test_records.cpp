#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ipg/records.hpp"

using namespace ipg;

namespace {

DatasetRecord sample_record() {
    DatasetRecord r;
    r.chapter = "9.Centre of Mass";
    r.word_problem = "Two trolleys collide head-on; find the coefficient of restitution.";
    r.execution_result = "0.5";
    r.signature = "fids=[]|unknown=coefficient_of_restitution_e";
    r.formula_ids = {};
    r.unknown_var = "coefficient_of_restitution_e";
    r.variables = {
        {"mass_m", {50.0, "kg"}},
        {"initial_velocity_v", {10.0, "m/s"}},
        {"final_velocity_u1", {2.5, "m/s"}},
        {"final_velocity_u2", {7.5, "m/s"}},
        {"coefficient_of_restitution_e", {std::nullopt, "dimensionless"}},
    };
    r.code = "def solve():\n    return (7.5 - 2.5) / (10.0 - 0.0)\n";
    r.validation_result = {true, "coefficient_of_restitution_e"};
    return r;
}

} // namespace

TEST_CASE("serialization preserves the canonical field order") {
    std::string dumped = record_to_json(sample_record()).dump();
    size_t pos_chapter = dumped.find("\"chapter\"");
    size_t pos_problem = dumped.find("\"word_problem\"");
    size_t pos_exec = dumped.find("\"execution_result\"");
    size_t pos_sig = dumped.find("\"signature\"");
    size_t pos_fids = dumped.find("\"formula_ids\"");
    size_t pos_unknown = dumped.find("\"unknown_var\"");
    size_t pos_vars = dumped.find("\"variables\"");
    size_t pos_code = dumped.find("\"code\"");
    size_t pos_val = dumped.find("\"validation_result\"");
    CHECK(pos_chapter < pos_problem);
    CHECK(pos_problem < pos_exec);
    CHECK(pos_exec < pos_sig);
    CHECK(pos_sig < pos_fids);
    CHECK(pos_fids < pos_unknown);
    CHECK(pos_unknown < pos_vars);
    CHECK(pos_vars < pos_code);
    CHECK(pos_code < pos_val);
}

TEST_CASE("round trip preserves everything, including variable order") {
    DatasetRecord r = sample_record();
    DatasetRecord back = record_from_json(record_to_json(r));
    CHECK(back.chapter == r.chapter);
    CHECK(back.word_problem == r.word_problem);
    CHECK(back.execution_result == r.execution_result);
    CHECK(back.signature == r.signature);
    CHECK(back.formula_ids == r.formula_ids);
    CHECK(back.unknown_var == r.unknown_var);
    REQUIRE(back.variables.size() == r.variables.size());
    for (size_t i = 0; i < r.variables.size(); ++i) {
        CHECK(back.variables[i].first == r.variables[i].first);
        CHECK(back.variables[i].second.value == r.variables[i].second.value);
        CHECK(back.variables[i].second.unit == r.variables[i].second.unit);
    }
    CHECK(back.code == r.code);
    CHECK(back.validation_result.valid == r.validation_result.valid);
    CHECK(back.validation_result.unknown_var == r.validation_result.unknown_var);
}

TEST_CASE("null execution result round-trips") {
    DatasetRecord r = sample_record();
    r.execution_result = std::nullopt;
    r.validation_result.valid = false;
    DatasetRecord back = record_from_json(record_to_json(r));
    CHECK_FALSE(back.execution_result.has_value());
    CHECK_FALSE(back.validation_result.valid);
}

TEST_CASE("the unknown is a null marker, countable") {
    DatasetRecord r = sample_record();
    CHECK(r.unknown_count() == 1);
    REQUIRE(r.find_variable("coefficient_of_restitution_e") != nullptr);
    CHECK_FALSE(r.find_variable("coefficient_of_restitution_e")->value.has_value());
    CHECK(r.find_variable("mass_m")->value == 50.0);
    CHECK(r.find_variable("nonexistent") == nullptr);
}

TEST_CASE("reader rejects structurally broken records") {
    ordered_json good = record_to_json(sample_record());

    auto drop = [&](const char* field) {
        ordered_json j = good;
        j.erase(field);
        return j;
    };
    for (const char* field : {"chapter", "word_problem", "execution_result", "signature",
                              "formula_ids", "unknown_var", "variables", "code",
                              "validation_result"}) {
        CAPTURE(field);
        CHECK_THROWS_AS(record_from_json(drop(field)), MalformedRecordError);
    }

    ordered_json bad = good;
    bad["execution_result"] = 0.5; // must be string or null
    CHECK_THROWS_AS(record_from_json(bad), MalformedRecordError);

    bad = good;
    bad["variables"]["mass_m"] = 50.0; // entries must be {value, unit}
    CHECK_THROWS_AS(record_from_json(bad), MalformedRecordError);

    bad = good;
    bad["validation_result"] = {{"valid", "yes"}, {"unknown_var", "x"}};
    CHECK_THROWS_AS(record_from_json(bad), MalformedRecordError);

    bad = good;
    bad["formula_ids"] = "3_A"; // must be an array
    CHECK_THROWS_AS(record_from_json(bad), MalformedRecordError);
}

TEST_CASE("reader tolerates opaque code and extra fields") {
    ordered_json j = record_to_json(sample_record());
    j["provenance"] = {{"source", "archive"}};
    j["difficulty_hint"] = 3;
    DatasetRecord r = record_from_json(j);
    CHECK(r.extras.size() == 2);
    CHECK(r.extras["difficulty_hint"] == 3);
    // Extras re-serialize after the canonical fields.
    std::string dumped = record_to_json(r).dump();
    CHECK(dumped.find("\"validation_result\"") < dumped.find("\"provenance\""));
    DatasetRecord back = record_from_json(record_to_json(r));
    CHECK(back.extras == r.extras);
}

TEST_CASE("jsonl files round-trip with line diagnostics on errors") {
    std::vector<DatasetRecord> records{sample_record(), sample_record()};
    records[1].chapter = "3.Kinematics";
    records[1].execution_result = std::nullopt;
    records[1].validation_result.valid = false;

    std::ostringstream out;
    write_records(out, records);
    std::istringstream in(out.str());
    auto back = read_records(in, "test.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[0].chapter == "9.Centre of Mass");
    CHECK(back[1].chapter == "3.Kinematics");
    CHECK_FALSE(back[1].execution_result.has_value());

    std::istringstream broken("{\"chapter\": \"3.Kinematics\"}\n");
    try {
        read_records(broken, "broken.jsonl");
        FAIL("expected MalformedRecordError");
    } catch (const MalformedRecordError& e) {
        std::string msg = e.what();
        CHECK(msg.find("broken.jsonl:1") != std::string::npos);
    }

    std::istringstream garbage("not json at all\n");
    CHECK_THROWS_AS(read_records(garbage, "g.jsonl"), MalformedRecordError);
}

TEST_CASE("import accepts a JSON array or JSONL and preserves extras") {
    ordered_json j = record_to_json(sample_record());
    j["note"] = "imported";
    std::string array_text = "[" + j.dump() + "]";
    auto from_array = import_records(array_text, "in.json");
    REQUIRE(from_array.size() == 1);
    CHECK(from_array[0].extras["note"] == "imported");

    std::string jsonl_text = j.dump() + "\n" + j.dump() + "\n";
    auto from_jsonl = import_records(jsonl_text, "in.jsonl");
    CHECK(from_jsonl.size() == 2);

    CHECK_THROWS_AS(import_records("[{\"chapter\": 1}]", "bad.json"), MalformedRecordError);
}

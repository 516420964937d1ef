#include <catch2/catch_amalgamated.hpp>

#include "ipg/axiom.hpp"
#include "ipg/backend.hpp"
#include "ipg/mock_backend.hpp"
#include "ipg/plan.hpp"
#include "ipg/prompts.hpp"
#include "ipg/strict_json.hpp"

#include "support.hpp"

using namespace ipg;
using Catch::Approx;

namespace {

FormulaLibrary demo_library() {
    return load_library(ipg_test::load_json(ipg_test::data_path("classical_mechanics_library.json")));
}

PromptLibrary prompts() { return PromptLibrary::load(ipg_test::data_path("prompts")); }

} // namespace

// ---------------------------------------------------------------------------
// Prompt templates

TEST_CASE("all six stage templates load") {
    auto lib = prompts();
    for (const auto& stage : prompt_stage_names()) {
        CHECK_FALSE(lib.raw(stage).empty());
    }
    CHECK_THROWS_AS(lib.raw("nonexistent"), ConfigError);
    CHECK_THROWS_AS(PromptLibrary::load(ipg_test::data_path("no_such_dir")), ConfigError);
}

TEST_CASE("sufficiency render matches the frozen golden byte for byte") {
    auto lib = prompts();
    std::string rendered = lib.render(
        "sufficiency",
        {{"solution", "Angular momentum about the axle is conserved; divide by the moment of "
                      "inertia to get the spin rate."},
         {"identified_chapters", "[\"Centre of Mass\"]"},
         {"all_chapters_json",
          "{\"Centre of Mass\": {\"formula_ids\": [\"9_K\"]}, \"Rigid Body Dynamics\": "
          "{\"formula_ids\": [\"10_A\", \"10_Q\"]}}"}});
    CHECK(rendered == ipg_test::read_file(ipg_test::golden_path("sufficiency_rendered.txt")));
}

TEST_CASE("escape collapsing precedes substitution and spares payloads") {
    auto lib = prompts();
    // A payload whose tail is "}}" must survive verbatim: escapes are
    // collapsed on the template, never on substituted content.
    std::string payload = "{\"a\":{\"b\":1}}";
    std::string rendered = lib.render("generate", {{"available_formulas", payload},
                                                   {"alternate_scenarios", "a quarry hoist"},
                                                   {"variables", "{}"},
                                                   {"previous_problems", "[]"}});
    CHECK(rendered.find(payload) != std::string::npos);
    // The template's own JSON skeleton collapsed to single braces.
    CHECK(rendered.find("{{") == std::string::npos);
    CHECK(rendered.find("}}") == rendered.find(payload) + payload.size() - 2);
    CHECK(rendered.find("\"word_problem\": \"Complete problem statement as text\"") !=
          std::string::npos);
}

TEST_CASE("the analysis template's literal braces survive rendering") {
    auto lib = prompts();
    std::string rendered = lib.render("analysis", {{"chapters_json", "{\"Kinematics\": {}}"},
                                                   {"question", "Q-TEXT"},
                                                   {"solution", "S-TEXT"}});
    CHECK(rendered.find("Q-TEXT") != std::string::npos);
    CHECK(rendered.find("S-TEXT") != std::string::npos);
    // The single-braced output skeleton is template text, not a placeholder.
    CHECK(rendered.find("\"relevant_chapters\": [\"chapter_name_1\", \"chapter_name_2\"]") !=
          std::string::npos);
    CHECK(rendered.find("{chapters_json}") == std::string::npos);
}

TEST_CASE("render validates the placeholder contract both ways") {
    auto lib = prompts();
    CHECK_THROWS_AS(lib.render("analysis", {{"question", "q"}, {"solution", "s"}}), ConfigError);
    CHECK_THROWS_AS(lib.render("analysis", {{"chapters_json", "{}"},
                                            {"question", "q"},
                                            {"solution", "s"},
                                            {"bogus", "x"}}),
                    ConfigError);
    CHECK_THROWS_AS(lib.render("nonexistent", {}), ConfigError);

    // error_message appears twice in code_fix; both get substituted.
    std::string rendered = lib.render("code_fix", {{"error_message", "E-MARKER"},
                                                   {"word_problem", "w"},
                                                   {"formula_ids", "[]"},
                                                   {"variables_dict", "{}"},
                                                   {"available_formulas", "[]"}});
    size_t first = rendered.find("E-MARKER");
    REQUIRE(first != std::string::npos);
    CHECK(rendered.find("E-MARKER", first + 1) != std::string::npos);
}

// ---------------------------------------------------------------------------
// Strict JSON

TEST_CASE("strict JSON accepts bare objects and single fences only") {
    auto bare = parse_strict_json("  {\"a\": 1}\n");
    CHECK(bare.doc["a"] == 1);
    CHECK_FALSE(bare.was_fenced);

    auto fenced = parse_strict_json("```json\n{\"a\": 1}\n```");
    CHECK(fenced.doc["a"] == 1);
    CHECK(fenced.was_fenced);

    auto plain_fence = parse_strict_json("```\n{\"b\": [1, 2]}\n```\n");
    CHECK(plain_fence.was_fenced);
    CHECK(plain_fence.doc["b"][1] == 2);

    CHECK(parse_strict_json("{}").doc.is_object());
}

TEST_CASE("strict JSON rejects everything else") {
    CHECK_THROWS_AS(parse_strict_json(""), ParseError);
    CHECK_THROWS_AS(parse_strict_json("Sure! Here is the JSON: {\"a\": 1}"), ParseError);
    CHECK_THROWS_AS(parse_strict_json("{\"a\": 1} trailing"), ParseError);
    CHECK_THROWS_AS(parse_strict_json("[1, 2, 3]"), ParseError);
    CHECK_THROWS_AS(parse_strict_json("42"), ParseError);
    CHECK_THROWS_AS(parse_strict_json("{\"a\": }"), ParseError);
    CHECK_THROWS_AS(parse_strict_json("{\"a\": 1"), ParseError);
    CHECK_THROWS_AS(parse_strict_json("```json\n{\"a\": 1}"), ParseError);    // unterminated
    CHECK_THROWS_AS(parse_strict_json("```json{\"a\": 1}```"), ParseError);   // no newline
    CHECK_THROWS_AS(parse_strict_json("```a b\n{\"x\":1}\n```"), ParseError); // bad tag
    CHECK_THROWS_AS(parse_strict_json("```\n{\"a\": 1}\n```\n```\n{\"b\": 2}\n```"),
                    ParseError); // two fences
}

// ---------------------------------------------------------------------------
// Call accounting

TEST_CASE("call stats aggregate per stage") {
    CallStats stats;
    stats.record("generate");
    stats.record("generate");
    stats.record("code");
    CHECK(stats.total() == 3);
    CHECK(stats.stage("generate") == 2);
    CHECK(stats.stage("code") == 1);
    CHECK(stats.stage("analysis") == 0);

    auto j = stats.to_json();
    CHECK(j["total_calls"] == 3);
    CHECK(j["per_stage"]["generate"] == 2);
}

TEST_CASE("call budgets cap and report usage") {
    CallBudget budget(2);
    budget.consume("first");
    budget.consume("second");
    CHECK(budget.used() == 2);
    CHECK(budget.remaining() == 0);
    CHECK_THROWS_AS(budget.consume("third"), BudgetExhaustedError);
    CHECK(budget.used() == 2); // failed consume does not count
}

TEST_CASE("stage temperatures follow the generation/code split") {
    CHECK(default_temperature("generate") == Approx(0.7));
    CHECK(default_temperature("generate_fix") == Approx(0.7));
    CHECK(default_temperature("code") == 0.0);
    CHECK(default_temperature("code_fix") == 0.0);
    CHECK(default_temperature("analysis") == 0.0);
    CHECK(default_temperature("sufficiency") == 0.0);
}

// ---------------------------------------------------------------------------
// Mock backend

TEST_CASE("scripted responses take precedence and drain in order") {
    MockBackend mock;
    mock.enqueue("sufficiency", "{\"status\": \"NO\", \"missing_chapter\": \"Friction\"}");
    mock.enqueue("sufficiency", "{\"status\": \"YES\"}");

    BackendRequest req{"sufficiency", "irrelevant", 0.0};
    CHECK(mock.complete(req).find("NO") != std::string::npos);
    CHECK(mock.complete(req) == "{\"status\": \"YES\"}");
    // Queue drained: synthesis takes over with the default YES.
    CHECK(mock.complete(req) == "{\"status\": \"YES\"}");
    CHECK(mock.calls("sufficiency") == 3);
}

TEST_CASE("analysis has no synthetic model") {
    MockBackend mock;
    CHECK_THROWS_AS(mock.complete({"analysis", "prompt", 0.0}), BackendError);
    mock.enqueue("analysis", "{\"relevant_chapters\": []}");
    CHECK(mock.complete({"analysis", "prompt", 0.0}) == "{\"relevant_chapters\": []}");
}

TEST_CASE("mock problem synthesis respects the generation contract") {
    auto lib = demo_library();
    auto tpl = prompts();

    // Offer chapter 3 + chapter 5 formulas, as the driver would after
    // chapter selection.
    std::vector<std::string> available;
    for (const auto& id : lib.chapters().at(3).formula_ids) available.push_back(id);
    for (const auto& id : lib.chapters().at(5).formula_ids) available.push_back(id);

    nlohmann::ordered_json var_dict = {
        {"initial_velocity", {{"range", {0.5, 8.0}}, {"unit", "m/s"}}},
        {"acceleration", {{"range", {1.0, 9.8}}, {"unit", "m/s^2"}}},
        {"elapsed_time", {{"range", {1.0, 6.0}}, {"unit", "s"}}},
        {"mass", {{"range", {2.0, 40.0}}, {"unit", "kg"}}},
    };

    std::string prompt = tpl.render(
        "generate", {{"available_formulas", formula_docs_json(lib, available).dump()},
                     {"alternate_scenarios", "a goods lift rising through a mine shaft."},
                     {"variables", var_dict.dump()},
                     {"previous_problems", "[]"}});

    MockBackend mock;
    std::string response = mock.complete({"generate", prompt, 0.7});
    auto parsed = parse_strict_json(response);
    CHECK_FALSE(parsed.was_fenced);

    const auto& doc = parsed.doc;
    CHECK(doc.at("word_problem").get<std::string>().find("mine shaft") != std::string::npos);

    auto fids = doc.at("formula_ids");
    REQUIRE(fids.is_array());
    CHECK(fids.size() >= 3);
    CHECK(fids.size() <= 5);
    for (const auto& fid : fids)
        CHECK(std::find(available.begin(), available.end(), fid.get<std::string>()) !=
              available.end());

    size_t nan_count = 0;
    for (const auto& [name, entry] : doc.at("variables").items()) {
        const auto& value = entry.at("value");
        if (value.is_string()) {
            ++nan_count;
            CHECK(value.get<std::string>() == "NaN");
        } else if (var_dict.contains(name)) {
            double v = value.get<double>();
            CHECK(v >= var_dict[name]["range"][0].get<double>());
            CHECK(v <= var_dict[name]["range"][1].get<double>());
        }
    }
    CHECK(nan_count == 1);

    // Byte-determinism on identical prompts; a changed context re-rolls.
    CHECK(mock.complete({"generate", prompt, 0.7}) == response);
    CHECK(mock.complete({"generate_fix", prompt + "\nPREVIOUS ERROR: duplicate", 0.7}) !=
          response);
}

TEST_CASE("mock plan synthesis produces a runnable, signature-true plan") {
    auto lib = demo_library();
    auto tpl = prompts();

    std::vector<std::string> allowed{"5_G", "6_A", "6_B"};
    nlohmann::ordered_json variables = {
        {"mass", {{"value", 12.0}, {"unit", "kg"}}},
        {"gravitational_acceleration", {{"value", 9.8}, {"unit", "m/s^2"}}},
        {"friction_coefficient", {{"value", 0.35}, {"unit", "dimensionless"}}},
        {"friction_force", {{"value", "NaN"}, {"unit", "N"}}},
    };

    std::string prompt =
        tpl.render("code", {{"word_problem", "A crate slides across a warehouse floor."},
                            {"formula_ids", nlohmann::ordered_json(allowed).dump()},
                            {"variables_dict", variables.dump()},
                            {"available_formulas", formula_docs_json(lib, allowed).dump()}});

    MockBackend mock;
    std::string plan_text = mock.complete({"code", prompt, 0.0});

    auto plan = parse_plan(plan_text);
    auto declared = plan.declared_formula_ids();
    CHECK(std::set<std::string>(declared.begin(), declared.end()) ==
          std::set<std::string>(allowed.begin(), allowed.end()));

    auto run = run_plan(plan, lib);
    CHECK(std::isfinite(run.value));
    // 6_A produces the unknown friction_force and therefore runs last:
    // mu * N = 0.35 * (12 * 9.8).
    CHECK(run.value == Approx(0.35 * 12.0 * 9.8));

    // Every given is bound; the unknown is computed, not bound.
    CHECK(run.bindings.count("mass") == 1);
    CHECK(run.bindings.count("friction_coefficient") == 1);
    CHECK(run.bindings.count("friction_force") == 1); // defined by its invoke
    CHECK(mock.complete({"code", prompt, 0.0}) == plan_text);
}

// Acceptance gate: re-derives the seven headline claims about the toolkit
// and its reference corpus, printing one verdict line per criterion with the
// sub-checks that feed it. Exits nonzero if any criterion fails.
//
// Criterion 1 is expected to carry one red sub-check by construction: the
// released corpus holds 1335 records, so it cannot simultaneously exhibit
// the full seven-bucket formula-count histogram, whose entries sum to 1415
// — that histogram describes the pre-filter candidate pool. The criterion
// keeps both demands anyway and reports the contradiction rather than
// papering over it; the candidate file's histogram is printed as evidence.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "json.hpp"

#include "ipg/axiom.hpp"
#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/generation.hpp"
#include "ipg/metrics.hpp"
#include "ipg/mock_backend.hpp"
#include "ipg/plan.hpp"
#include "ipg/prompts.hpp"
#include "ipg/records.hpp"
#include "ipg/sanity.hpp"
#include "ipg/seeds.hpp"
#include "ipg/signature.hpp"
#include "ipg/taxonomy.hpp"
#include "ipg/verify.hpp"

namespace {

struct Gate {
    bool all_pass = true;
    std::vector<std::string> detail;

    void sub(bool ok, const std::string& what) {
        detail.push_back(std::string("    ") + (ok ? "ok   " : "FAIL ") + what);
    }

    // Emits the buffered sub-checks under one criterion verdict.
    void criterion(int number, const std::string& title, bool pass) {
        std::cout << "criterion " << number << ": " << (pass ? "PASS" : "FAIL") << " — " << title
                  << "\n";
        for (const auto& line : detail) std::cout << line << "\n";
        detail.clear();
        if (!pass) all_pass = false;
    }

    void note(const std::string& line) { detail.push_back("    note " + line); }
};

std::string data_path(const std::string& leaf) {
    return std::string(IPG_DATA_DIR) + "/" + leaf;
}
std::string fixture_path(const std::string& leaf) {
    return std::string(IPG_BUILD_DIR) + "/fixtures/" + leaf;
}
std::string test_path(const std::string& leaf) {
    return std::string(IPG_TEST_DIR) + "/" + leaf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ipg::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool within(double got, double want, double tol) { return std::abs(got - want) <= tol; }

std::string fmt(double v) { return ipg::detail::format_double(v); }

ipg::ProblemDraft draft_from(const ipg::DatasetRecord& r) {
    ipg::ProblemDraft d;
    d.word_problem = r.word_problem;
    d.code = r.code;
    d.formula_ids = r.formula_ids;
    d.unknown_var = r.unknown_var;
    for (const auto& [name, entry] : r.variables)
        if (entry.value) d.given_values.emplace_back(name, *entry.value);
    return d;
}

// ---------------------------------------------------------------------------
// Criterion 1: corpus statistics reproduction.

void criterion_1(Gate& gate, const std::vector<ipg::DatasetRecord>& released,
                 const std::vector<ipg::DatasetRecord>& candidates,
                 const std::vector<ipg::Seed>& seeds,
                 const std::vector<ipg::SanityRule>& rules) {
    auto started = std::chrono::steady_clock::now();

    ipg::DatasetMetrics metrics = ipg::compute_intrinsic_metrics(released, rules);
    auto buckets = ipg::formula_count_distribution(released);
    auto unknowns = ipg::unknown_variable_frequencies(released, 1);
    std::map<std::string, size_t> seed_counts;
    for (const auto& s : seeds) ++seed_counts[ipg::strip_chapter_prefix(s.chapter)];
    auto chapters = ipg::chapter_report(released, seed_counts);

    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                         .count();

    bool pass = true;
    auto check = [&](bool ok, const std::string& what) {
        gate.sub(ok, what);
        pass = pass && ok;
    };

    check(metrics.total == 1335, "total records = 1335 (got " +
                                     std::to_string(metrics.total) + ")");

    const std::map<std::string, size_t> expected_chapters = {
        {"Kinematics", 185},     {"Newton's Laws of Motion", 149},
        {"Friction", 87},        {"Work, Power, Energy", 200},
        {"Circular Motion", 178}, {"Centre of Mass", 181},
        {"Rigid Body Dynamics", 355}};
    bool chapters_ok = chapters.size() == expected_chapters.size();
    for (const auto& row : chapters) {
        auto it = expected_chapters.find(row.chapter);
        if (it == expected_chapters.end() || it->second != row.generated) chapters_ok = false;
    }
    check(chapters_ok, "chapter counts = 185/149/87/200/178/181/355");

    // The seven-bucket histogram demanded here sums to 1415: it describes the
    // pre-filter pool, so its 0- and 1-formula buckets cannot appear in the
    // 1335-record release. Checked verbatim and reported honestly.
    const std::map<size_t, size_t> full_histogram = {{0, 38},  {1, 42}, {2, 261}, {3, 814},
                                                     {4, 198}, {5, 60}, {6, 2}};
    bool histogram_ok = true;
    std::string histogram_got = "{";
    for (const auto& [k, want] : full_histogram) {
        auto it = buckets.find(k);
        size_t got = it == buckets.end() ? 0 : it->second.count;
        if (got != want) histogram_ok = false;
        histogram_got += std::to_string(k) + ":" + std::to_string(got) + (k == 6 ? "" : ",");
    }
    histogram_got += "}";
    check(histogram_ok, "formula-count distribution = {0:38,1:42,2:261,3:814,4:198,5:60,6:2} "
                        "on the released file (got " + histogram_got +
                        "; the demanded histogram sums to 1415, not 1335)");

    auto cand_buckets = ipg::formula_count_distribution(candidates);
    bool cand_ok = true;
    for (const auto& [k, want] : full_histogram) {
        auto it = cand_buckets.find(k);
        if (it == cand_buckets.end() || it->second.count != want) cand_ok = false;
    }
    gate.note(std::string("evidence: the pre-filter candidate file (") +
              std::to_string(candidates.size()) + " records) " +
              (cand_ok ? "reproduces that histogram exactly"
                       : "FAILS to reproduce that histogram") +
              "; pruning its " + std::to_string(candidates.size() - released.size()) +
              " sub-2-formula records yields the released file");

    check(!unknowns.empty() && unknowns[0].first == "acceleration" &&
              unknowns[0].second == 33,
          "top unknown = acceleration x33 (got " +
              (unknowns.empty() ? std::string("none")
                                : unknowns[0].first + " x" + std::to_string(unknowns[0].second)) +
              ")");
    check(metrics.unique_formulas == 102, "unique formulas = 102 (got " +
                                              std::to_string(metrics.unique_formulas) + ")");
    check(within(metrics.valid_answer_pct, 99.85, 0.01),
          "valid-answer % = 99.85 ± 0.01 (got " + fmt(metrics.valid_answer_pct) + ")");

    bool com_ok = false;
    double com_ratio = 0.0;
    for (const auto& row : chapters)
        if (row.chapter == "Centre of Mass") {
            com_ratio = row.expansion_ratio;
            com_ok = within(com_ratio, 6.24, 0.01);
        }
    check(com_ok, "Centre of Mass expansion ratio = 6.24 ± 0.01 (got " + fmt(com_ratio) + ")");

    check(elapsed < 10.0, "audit runtime < 10 s (took " + fmt(elapsed) + " s)");

    gate.criterion(1, "corpus statistics reproduction", pass);
}

// ---------------------------------------------------------------------------
// Criterion 2: complexity blueprint.

void criterion_2(Gate& gate, const std::vector<ipg::DatasetRecord>& released) {
    bool pass = true;
    auto check = [&](bool ok, const std::string& what) {
        gate.sub(ok, what);
        pass = pass && ok;
    };

    ipg::ComplexityFit fit = ipg::fit_complexity_blueprint(released, 2, 5);
    check(within(fit.r_squared, 0.953, 0.005),
          "bucket-mean fit R^2 = 0.953 ± 0.005 (got " + fmt(fit.r_squared) + ")");

    const std::map<size_t, double> plotted = {{2, 2420.0}, {3, 2635.0}, {4, 3277.0}, {5, 4011.0}};
    bool means_ok = true;
    for (const auto& [k, want] : plotted) {
        auto it = fit.bucket_means.find(k);
        if (it == fit.bucket_means.end() || std::abs(it->second - want) > 0.01 * want)
            means_ok = false;
    }
    check(means_ok, "bucket means within ±1% of 2420/2635/3277/4011");
    check(fit.slope >= 500.0 && fit.slope <= 560.0,
          "slope within [500, 560] (got " + fmt(fit.slope) + ")");

    ipg::LineFit reference =
        ipg::fit_line({{2.0, 2420.0}, {3.0, 2635.0}, {4.0, 3277.0}, {5.0, 4011.0}});
    check(within(reference.slope, 541.5, 0.1),
          "four-point reference fit slope = 541.5 ± 0.1 (got " + fmt(reference.slope) + ")");
    check(within(reference.intercept, 1190.5, 0.1),
          "four-point reference fit intercept = 1190.5 ± 0.1 (got " + fmt(reference.intercept) +
              ")");
    check(within(reference.r_squared, 0.9526, 0.0005),
          "four-point reference fit R^2 = 0.9526 ± 0.0005 (got " + fmt(reference.r_squared) +
              ")");

    gate.criterion(2, "complexity blueprint", pass);
}

// ---------------------------------------------------------------------------
// Criterion 3: type-token ratio.

void criterion_3(Gate& gate, const std::vector<ipg::DatasetRecord>& released,
                 const std::vector<ipg::SanityRule>& rules) {
    double ttr = ipg::compute_intrinsic_metrics(released, rules).ttr;
    bool pass = within(ttr, 5.94, 0.05);
    gate.sub(pass, "corpus TTR = 5.94 ± 0.05 under the default tokenizer (got " + fmt(ttr) + ")");
    gate.criterion(3, "type-token ratio", pass);
}

// ---------------------------------------------------------------------------
// Criterion 4: verification engine golden plans.

void criterion_4(Gate& gate, const ipg::FormulaLibrary& library,
                 const std::vector<ipg::SanityRule>& rules) {
    bool pass = true;
    auto check = [&](bool ok, const std::string& what) {
        gate.sub(ok, what);
        pass = pass && ok;
    };

    ipg::DatasetRecord d1 = ipg::record_from_json(
        nlohmann::ordered_json::parse(read_file(test_path("golden/d1_record.json"))));
    ipg::VerificationReport r1 = ipg::verify(draft_from(d1), library, rules);
    check(r1.passed, "restitution plan verdict is pass" +
                         (r1.passed ? std::string()
                                    : " (failed at the " + r1.failure_stage + " stage)"));
    check(r1.has_value && r1.value == 0.5,
          "restitution plan evaluates to 0.5 exactly (got " + fmt(r1.value) + ")");

    ipg::DatasetRecord d2 = ipg::record_from_json(
        nlohmann::ordered_json::parse(read_file(test_path("golden/d2_record.json"))));
    ipg::VerificationReport r2 = ipg::verify(draft_from(d2), library, rules);
    check(r2.passed, "dart-and-log plan verdict is pass" +
                         (r2.passed ? std::string()
                                    : " (failed at the " + r2.failure_stage + " stage)"));
    const double want = 0.12492187503051848;
    bool close = r2.has_value && std::abs(r2.value - want) / want <= 1e-12;
    check(close, "dart-and-log plan evaluates to 0.12492187503051848 within 1e-12 relative "
                 "(got " + fmt(r2.value) + ")");

    gate.criterion(4, "verification engine golden plans", pass);
}

// ---------------------------------------------------------------------------
// Criterion 5: property suites.

void criterion_5(Gate& gate) {
    std::string binary = std::string(IPG_BUILD_DIR) + "/tests/test_properties";
    std::string log = std::string(IPG_BUILD_DIR) + "/scratch/acceptance_properties.log";
    std::string cmd = "\"" + binary + "\" >\"" + log + "\" 2>&1";

    auto started = std::chrono::steady_clock::now();
    int status = std::system(cmd.c_str());
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    bool ran = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    bool pass = ran && elapsed < 60.0;
    gate.sub(ran, "property suites all pass (signature canonicalization, registry, sampling, "
                  "round-robin, evaluator determinism, least-squares oracle, strict-JSON fuzz, "
                  "record round-trip)");
    gate.sub(elapsed < 60.0, "property suites finish inside 60 s (took " + fmt(elapsed) + " s)");
    gate.criterion(5, "property suites", pass);
}

// ---------------------------------------------------------------------------
// Criterion 6: end-to-end offline pipeline.

void criterion_6(Gate& gate, const ipg::FormulaLibrary& library,
                 const std::vector<ipg::SanityRule>& rules) {
    bool pass = true;
    auto check = [&](bool ok, const std::string& what) {
        gate.sub(ok, what);
        pass = pass && ok;
    };

    std::vector<ipg::Seed> seeds = ipg::read_seeds_file(data_path("seeds_demo.jsonl"));
    check(seeds.size() >= 5, "fixture carries >= 5 seeds (got " + std::to_string(seeds.size()) +
                                 ")");

    ipg::PromptLibrary prompts = ipg::PromptLibrary::load(data_path("prompts"));
    ipg::GenerationConfig config;
    config.variations_per_seed = 10;
    config.rng_seed = 2024;

    auto run_once = [&]() {
        ipg::MockBackend backend;
        ipg::GenerationSession session(library, prompts, rules, config, backend);
        return session.run(seeds);
    };
    ipg::SessionResult first = run_once();
    ipg::SessionResult second = run_once();

    bool every_seed = first.seeds.size() == seeds.size();
    for (const auto& s : first.seeds) every_seed = every_seed && s.accepted >= 1;
    check(every_seed, ">= 1 accepted record per seed at N=10");

    size_t divergences = 0;
    for (const auto& r : first.records) {
        ipg::VerificationReport report = ipg::verify(draft_from(r), library, rules);
        bool same = report.passed == r.validation_result.valid;
        if (same && report.passed && r.execution_result)
            same = ipg::detail::format_double(report.value) == *r.execution_result;
        if (!same) ++divergences;
    }
    check(divergences == 0, "100% of accepted records pass re-verification (divergences: " +
                                std::to_string(divergences) + " of " +
                                std::to_string(first.records.size()) + ")");

    std::set<std::string> signatures;
    for (const auto& r : first.records) signatures.insert(r.signature);
    check(signatures.size() == first.records.size(),
          "zero duplicate signatures among " + std::to_string(first.records.size()) +
              " accepted records");

    std::map<std::string, const ipg::Seed*> seeds_by_chapter;
    for (const auto& s : seeds) seeds_by_chapter[s.chapter] = &s;
    size_t out_of_range = 0;
    for (const auto& r : first.records) {
        auto it = seeds_by_chapter.find(r.chapter);
        if (it == seeds_by_chapter.end() || !it->second->analysis) {
            ++out_of_range;
            continue;
        }
        for (const auto& [name, entry] : r.variables) {
            if (!entry.value) continue;
            bool found = false;
            for (const auto& spec : it->second->analysis->variables)
                if (spec.name == name) {
                    found = true;
                    if (*entry.value < spec.min || *entry.value > spec.max) ++out_of_range;
                }
            if (!found) ++out_of_range;
        }
    }
    check(out_of_range == 0, "every sampled value lies inside its declared range (violations: " +
                                 std::to_string(out_of_range) + ")");

    auto [kept, pruned] = ipg::prune_low_complexity(first.records, 2);
    bool band_ok = true;
    for (const auto& r : kept)
        band_ok = band_ok && r.formula_ids.size() >= 3 && r.formula_ids.size() <= 5;
    check(band_ok, "every accepted record holds 3-5 formula ids unless flagged low-complexity (" +
                       std::to_string(pruned.size()) + " flagged)");

    std::ostringstream run_a, run_b;
    ipg::write_records(run_a, first.records);
    ipg::write_records(run_b, second.records);
    check(run_a.str() == run_b.str(), "two identically-configured runs are byte-identical");

    gate.criterion(6, "end-to-end offline pipeline", pass);
}

// ---------------------------------------------------------------------------
// Criterion 7: failure taxonomy on a fault-injection fixture.

// One well-formed kinematics record; every fault below is a controlled
// mutation of this base.
ipg::DatasetRecord base_record(size_t index) {
    ipg::DatasetRecord r;
    r.chapter = "3.Kinematics";
    r.word_problem = "Fault-injection probe " + std::to_string(index) +
                     ": a cart accelerates from rest along a rail; find the elapsed time.";
    r.formula_ids = {"3_A", "3_D", "3_G"};
    r.unknown_var = "time_check";
    r.signature = ipg::compute_signature(r.formula_ids, r.unknown_var);
    double v0 = 1.5 + 0.25 * static_cast<double>(index);
    r.variables.emplace_back("initial_velocity", ipg::VariableEntry{v0, "m/s"});
    r.variables.emplace_back("acceleration", ipg::VariableEntry{9.7, "m/s^2"});
    r.variables.emplace_back("elapsed_time", ipg::VariableEntry{3.0, "s"});
    r.variables.emplace_back("time_check", ipg::VariableEntry{std::nullopt, "s"});
    std::string v0s = ipg::detail::format_double(v0);
    r.code = "bind initial_velocity = " + v0s + "\n" +
             "bind acceleration = 9.7\n"
             "bind elapsed_time = 3\n"
             "invoke final_velocity = 3_A(initial_velocity, acceleration, elapsed_time)\n"
             "invoke average_velocity = 3_D(initial_velocity, final_velocity)\n"
             "invoke time_check = 3_G(initial_velocity, final_velocity, acceleration)\n"
             "return time_check";
    r.execution_result = "3";
    r.validation_result.valid = true;
    r.validation_result.unknown_var = r.unknown_var;
    return r;
}

void criterion_7(Gate& gate, const ipg::FormulaLibrary& library) {
    std::vector<ipg::DatasetRecord> fixture;
    std::map<size_t, std::set<int>> planted;

    for (size_t i = 0; i < 20; ++i) fixture.push_back(base_record(i));

    // Category 1: the record confesses a failed validation.
    fixture[2].validation_result.valid = false;
    planted[2] = {1};

    // Category 4: a single-formula record (kept consistent everywhere else).
    {
        ipg::DatasetRecord& r = fixture[5];
        r.formula_ids = {"3_A"};
        r.unknown_var = "final_velocity";
        r.signature = ipg::compute_signature(r.formula_ids, r.unknown_var);
        r.variables.clear();
        r.variables.emplace_back("initial_velocity", ipg::VariableEntry{2.0, "m/s"});
        r.variables.emplace_back("acceleration", ipg::VariableEntry{9.7, "m/s^2"});
        r.variables.emplace_back("elapsed_time", ipg::VariableEntry{3.0, "s"});
        r.variables.emplace_back("final_velocity", ipg::VariableEntry{std::nullopt, "m/s"});
        r.code = "bind initial_velocity = 2\n"
                 "bind acceleration = 9.7\n"
                 "bind elapsed_time = 3\n"
                 "invoke final_velocity = 3_A(initial_velocity, acceleration, elapsed_time)\n"
                 "return final_velocity";
        r.execution_result = "31.1";
        r.validation_result.unknown_var = r.unknown_var;
        planted[5] = {4};
    }

    // Category 6: a stored answer far outside the realistic magnitude window.
    fixture[8].execution_result = "8.5e+17";
    planted[8] = {6};

    // Category 7: a formula id the registry has never heard of; the plan
    // invokes it too, so the signature stays internally consistent.
    {
        ipg::DatasetRecord& r = fixture[11];
        r.formula_ids = {"3_A", "3_D", "3_G", "99_Z"};
        r.signature = ipg::compute_signature(r.formula_ids, r.unknown_var);
        r.code += "\n"; // placeholder; rebuilt below with the extra invoke
        r.code = "bind initial_velocity = 4.25\n"
                 "bind acceleration = 9.7\n"
                 "bind elapsed_time = 3\n"
                 "invoke final_velocity = 3_A(initial_velocity, acceleration, elapsed_time)\n"
                 "invoke average_velocity = 3_D(initial_velocity, final_velocity)\n"
                 "invoke mystery = 99_Z(initial_velocity)\n"
                 "invoke time_check = 3_G(initial_velocity, final_velocity, acceleration)\n"
                 "return time_check";
        planted[11] = {7};
    }

    // Category 8: the stored signature names a different unknown.
    fixture[14].signature = ipg::compute_signature(fixture[14].formula_ids, "wrong_unknown");
    planted[14] = {8};

    // Category 9: a declared given the plan never binds.
    fixture[16].variables.emplace_back("spare_mass", ipg::VariableEntry{5.0, "kg"});
    planted[16] = {9};

    // Category 13: an exact word-problem duplicate pair.
    fixture[19].word_problem = fixture[18].word_problem;
    planted[18] = {13};
    planted[19] = {13};

    std::vector<ipg::FailureRecord> failures = ipg::classify_corpus(fixture, &library);

    bool pass = true;
    auto check = [&](bool ok, const std::string& what) {
        gate.sub(ok, what);
        pass = pass && ok;
    };

    bool exact = failures.size() == fixture.size();
    size_t spurious = 0, missed = 0;
    for (size_t i = 0; exact && i < failures.size(); ++i) {
        std::set<int> expected =
            planted.count(i) ? planted.at(i) : std::set<int>{};
        for (int cat : failures[i].categories)
            if (!expected.count(cat)) ++spurious;
        for (int cat : expected)
            if (!failures[i].categories.count(cat)) ++missed;
    }
    check(exact && missed == 0,
          "every planted fault is assigned its category (1, 4, 6, 7, 8, 9, 13; missed: " +
              std::to_string(missed) + ")");
    check(exact && spurious == 0,
          "zero spurious assignments across the 20-record fixture (spurious: " +
              std::to_string(spurious) + ")");

    std::map<int, size_t> census;
    for (const auto& f : failures)
        for (int cat : f.categories) ++census[cat];
    const std::map<int, size_t> expected_census = {{1, 1}, {4, 1}, {6, 1}, {7, 1},
                                                   {8, 1}, {9, 1}, {13, 2}};
    check(census == expected_census, "category census is {1:1, 4:1, 6:1, 7:1, 8:1, 9:1, 13:2}");

    gate.criterion(7, "failure taxonomy on the fault-injection fixture", pass);
}

} // namespace

int main() {
    try {
        std::ifstream lib_in(data_path("classical_mechanics_library.json"));
        if (!lib_in) throw ipg::ConfigError("cannot open the formula library");
        ipg::FormulaLibrary library = ipg::load_library(nlohmann::json::parse(lib_in));

        std::ifstream rules_in(data_path("sanity_rules.json"));
        if (!rules_in) throw ipg::ConfigError("cannot open the sanity rules");
        std::vector<ipg::SanityRule> rules =
            ipg::load_sanity_rules(nlohmann::json::parse(rules_in));

        std::vector<ipg::DatasetRecord> released =
            ipg::read_records_file(fixture_path("classical_mechanics_v1.jsonl"));
        std::vector<ipg::DatasetRecord> candidates =
            ipg::read_records_file(fixture_path("classical_mechanics_v1_candidates.jsonl"));
        std::vector<ipg::Seed> seeds = ipg::read_seeds_file(fixture_path("seed_problems.jsonl"));

        Gate gate;
        criterion_1(gate, released, candidates, seeds, rules);
        criterion_2(gate, released);
        criterion_3(gate, released, rules);
        criterion_4(gate, library, rules);
        criterion_5(gate);
        criterion_6(gate, library, rules);
        criterion_7(gate, library);

        std::cout << (gate.all_pass ? "acceptance: all criteria hold"
                                    : "acceptance: at least one criterion failed")
                  << "\n";
        return gate.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: aborted: " << e.what() << "\n";
        return 1;
    }
}

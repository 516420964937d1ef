// ipg — command-line front end for the problem-generation toolkit.
//
// Subcommands:
//   generate   run a generation session against a backend and write the
//              accepted records, the rejected-attempt log, and a manifest
//   audit      compute the intrinsic report for a dataset file and export
//              metrics/tables/blueprint/taxonomy; optionally compare the
//              numbers against an expectations file
//   verify     re-run the verification pipeline on every record and report
//              divergences from the stored validation verdicts
//   stats      quick human-readable summary of a dataset file
//   import     normalize an external dataset dump into canonical JSONL
//
// Exit codes: 0 success; 2 configuration or input error; 3 backend
// unreachable; 4 generation session accepted zero records; 5 expectation
// mismatch; 6 verification divergence.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ipg/axiom.hpp"
#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/generation.hpp"
#include "ipg/http_backend.hpp"
#include "ipg/metrics.hpp"
#include "ipg/mock_backend.hpp"
#include "ipg/plan.hpp"
#include "ipg/prompts.hpp"
#include "ipg/records.hpp"
#include "ipg/sanity.hpp"
#include "ipg/seeds.hpp"
#include "ipg/taxonomy.hpp"
#include "ipg/verify.hpp"

#ifndef IPG_DATA_DIR
#error "IPG_DATA_DIR must point at the repository data directory"
#endif

namespace fs = std::filesystem;

namespace {

std::string default_data(const char* leaf) {
    return std::string(IPG_DATA_DIR) + "/" + leaf;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ipg::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ipg::ConfigError("cannot write " + path.string());
    out << content;
}

std::string now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

ipg::FormulaLibrary load_library_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ipg::ConfigError("cannot open formula library " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ipg::ConfigError("formula library " + path + " is not valid JSON: " + e.what());
    }
    return ipg::load_library(doc);
}

std::vector<ipg::SanityRule> load_rules_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ipg::ConfigError("cannot open sanity rules " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ipg::ConfigError("sanity rules " + path + " is not valid JSON: " + e.what());
    }
    return ipg::load_sanity_rules(doc);
}

const std::map<int, std::string>& category_labels() {
    static const std::map<int, std::string> labels = {
        {1, "execution/validation failure"},
        {2, "missing required fields"},
        {3, "formatting inconsistencies"},
        {4, "insufficient formulas"},
        {5, "syntax errors"},
        {6, "null or unrealistic results"},
        {7, "wrong formula ids"},
        {8, "signature mismatch"},
        {9, "variable issues"},
        {13, "low uniqueness"},
    };
    return labels;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOpts {
    std::string seeds;
    std::string library = default_data("classical_mechanics_library.json");
    std::string prompts = std::string(IPG_DATA_DIR) + "/prompts";
    std::string rules = default_data("sanity_rules.json");
    std::string backend = "mock";
    std::string out = "session_out";
    std::size_t n = 10;
    std::uint64_t rng = 0;
    std::size_t min_formulas = 3;
    std::size_t max_formulas = 5;
    std::size_t retries = 6;
    std::size_t code_retries = 2;
    std::size_t jobs = 1;
    std::size_t max_calls = 0;
    std::size_t scenario_quota = 0;
};

int run_generate(const GenerateOpts& o) {
    ipg::FormulaLibrary library = load_library_file(o.library);
    ipg::PromptLibrary prompts = ipg::PromptLibrary::load(o.prompts);
    std::vector<ipg::SanityRule> rules = load_rules_file(o.rules);
    std::string seed_bytes = read_file_bytes(o.seeds);
    std::vector<ipg::Seed> seeds = ipg::read_seeds_file(o.seeds);

    ipg::GenerationConfig cfg;
    cfg.variations_per_seed = o.n;
    cfg.min_formulas = o.min_formulas;
    cfg.max_formulas = o.max_formulas;
    cfg.retry_budget = o.retries;
    cfg.code_retry_budget = o.code_retries;
    cfg.rng_seed = o.rng;
    cfg.per_scenario_quota = o.scenario_quota;
    cfg.max_calls = o.max_calls;
    cfg.jobs = o.jobs;

    std::unique_ptr<ipg::Backend> backend;
    if (o.backend == "mock") {
        backend = std::make_unique<ipg::MockBackend>();
    } else if (o.backend == "remote" || o.backend == "http") {
        backend = std::make_unique<ipg::HttpBackend>(ipg::http_config_from_env());
    } else {
        throw ipg::ConfigError("unknown backend \"" + o.backend +
                               "\" (expected \"mock\" or \"remote\")");
    }

    std::string started = now_iso8601();
    ipg::GenerationSession session(library, prompts, rules, cfg, *backend);
    ipg::SessionResult result = session.run(seeds); // BackendError aborts -> exit 3
    std::string finished = now_iso8601();

    fs::create_directories(o.out);
    ipg::write_records_file(o.out + "/records.jsonl", result.records);

    std::ostringstream rejected;
    std::size_t rejected_count = 0;
    for (const auto& seed : result.seeds) {
        if (!seed.error.empty()) {
            nlohmann::ordered_json line;
            line["seed_id"] = seed.seed_id;
            line["stage"] = "analysis";
            line["reason"] = seed.error;
            rejected << line.dump() << "\n";
            ++rejected_count;
        }
        for (const auto& f : seed.failures) {
            nlohmann::ordered_json line;
            line["seed_id"] = f.seed_id;
            line["slot"] = f.slot;
            line["reason"] = f.reason;
            line["trace"] = f.trace;
            rejected << line.dump() << "\n";
            ++rejected_count;
        }
    }
    write_text_file(fs::path(o.out) / "rejected.jsonl", rejected.str());

    nlohmann::ordered_json manifest = ipg::session_manifest(
        cfg, o.seeds, seed_bytes, backend->name(), result, started, finished);
    write_text_file(fs::path(o.out) / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "seeds: " << seeds.size() << "\n";
    for (const auto& seed : result.seeds) {
        std::cout << "  " << seed.seed_id << ": accepted " << seed.accepted << "/" << o.n
                  << ", failed slots " << seed.failures.size();
        if (seed.requery_count > 0) std::cout << ", sufficiency re-queries " << seed.requery_count;
        if (!seed.error.empty()) std::cout << ", analysis error: " << seed.error;
        std::cout << "\n";
    }
    std::cout << "accepted records: " << result.records.size() << "\n"
              << "rejected attempts: " << rejected_count << "\n"
              << "signature collisions: " << result.collisions << "\n"
              << "wrote " << o.out << "/records.jsonl, rejected.jsonl, manifest.json\n";

    if (result.records.empty()) {
        std::cerr << "error: the session accepted zero records\n";
        return 4;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// audit

struct AuditOpts {
    std::string data;
    std::string out = "audit_out";
    std::string library = default_data("classical_mechanics_library.json");
    std::string rules = default_data("sanity_rules.json");
    std::string check;
    std::string seeds;
};

struct AuditReport {
    ipg::DatasetMetrics metrics;
    std::map<std::size_t, ipg::BucketStat> buckets;
    std::vector<std::pair<std::string, std::size_t>> top_unknowns;
    std::vector<ipg::ChapterRow> chapters;
    std::map<std::string, std::set<std::string>> chapter_formulas; // stripped name -> ids
    ipg::ComplexityFit fit;
    std::vector<ipg::FailureRecord> failures;
    std::map<int, std::size_t> census; // category -> flagged records
    std::size_t flagged = 0;
    ipg::TierReport tiers;
};

AuditReport build_audit_report(const std::vector<ipg::DatasetRecord>& records,
                               const ipg::FormulaLibrary& library,
                               const std::vector<ipg::SanityRule>& rules,
                               const std::map<std::string, std::size_t>& seed_counts) {
    AuditReport r;
    r.metrics = ipg::compute_intrinsic_metrics(records, rules);
    r.buckets = ipg::formula_count_distribution(records);
    r.top_unknowns = ipg::unknown_variable_frequencies(records, 10);
    r.chapters = ipg::chapter_report(records, seed_counts);
    for (const auto& rec : records) {
        auto& ids = r.chapter_formulas[ipg::strip_chapter_prefix(rec.chapter)];
        for (const auto& id : rec.formula_ids) ids.insert(id);
    }
    r.fit = ipg::fit_complexity_blueprint(records, 2, 5);
    r.failures = ipg::classify_corpus(records, &library);
    for (const auto& f : r.failures) {
        if (!f.clean()) ++r.flagged;
        for (int cat : f.categories) ++r.census[cat];
    }
    r.tiers = ipg::stratify_tiers(records, r.failures);
    return r;
}

nlohmann::ordered_json metrics_json(const AuditReport& r) {
    nlohmann::ordered_json j;
    j["total"] = r.metrics.total;
    j["valid_answer_pct"] = r.metrics.valid_answer_pct;
    j["unrealistic_count"] = r.metrics.unrealistic_count;
    j["signature_uniqueness_pct"] = r.metrics.signature_uniqueness_pct;
    j["text_uniqueness_pct"] = r.metrics.text_uniqueness_pct;
    j["duplicate_text_count"] = r.metrics.duplicate_text_count;
    j["ttr"] = r.metrics.ttr;
    j["unique_formulas"] = r.metrics.unique_formulas;
    j["unique_unknowns"] = r.metrics.unique_unknowns;
    j["avg_formulas_per_problem"] = r.metrics.avg_formulas_per_problem;
    j["difficulty"] = r.metrics.difficulty;
    j["avg_word_count"] = r.metrics.avg_word_count;
    j["avg_code_length"] = r.metrics.avg_code_length;

    nlohmann::ordered_json buckets = nlohmann::ordered_json::object();
    for (const auto& [k, stat] : r.buckets)
        buckets[std::to_string(k)] =
            nlohmann::ordered_json{{"count", stat.count}, {"pct", stat.pct}};
    j["formula_count_buckets"] = buckets;

    nlohmann::ordered_json unknowns = nlohmann::ordered_json::array();
    for (const auto& [name, count] : r.top_unknowns)
        unknowns.push_back(nlohmann::ordered_json::array({name, count}));
    j["top_unknowns"] = unknowns;

    nlohmann::ordered_json chapters = nlohmann::ordered_json::object();
    for (const auto& row : r.chapters) {
        nlohmann::ordered_json cj;
        cj["generated"] = row.generated;
        cj["pct"] = row.pct;
        if (row.seeds > 0) {
            cj["seeds"] = row.seeds;
            cj["expansion_ratio"] = row.expansion_ratio;
        }
        auto it = r.chapter_formulas.find(row.chapter);
        cj["unique_formulas"] = it == r.chapter_formulas.end() ? 0 : it->second.size();
        chapters[row.chapter] = cj;
    }
    j["chapters"] = chapters;

    nlohmann::ordered_json fit;
    nlohmann::ordered_json means = nlohmann::ordered_json::object();
    for (const auto& [k, mean] : r.fit.bucket_means) means[std::to_string(k)] = mean;
    fit["bucket_means"] = means;
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [k, n] : r.fit.bucket_counts) counts[std::to_string(k)] = n;
    fit["bucket_counts"] = counts;
    fit["slope"] = r.fit.slope;
    fit["intercept"] = r.fit.intercept;
    fit["r_squared"] = r.fit.r_squared;
    fit["bucket_lo"] = r.fit.bucket_lo;
    fit["bucket_hi"] = r.fit.bucket_hi;
    j["complexity_blueprint"] = fit;

    nlohmann::ordered_json screen;
    screen["flagged"] = r.flagged;
    screen["clean_pct"] = r.metrics.total == 0
                              ? 0.0
                              : 100.0 * static_cast<double>(r.metrics.total - r.flagged) /
                                    static_cast<double>(r.metrics.total);
    nlohmann::ordered_json census = nlohmann::ordered_json::object();
    for (const auto& [cat, n] : r.census) census[std::to_string(cat)] = n;
    screen["category_counts"] = census;
    j["failure_screen"] = screen;
    return j;
}

std::string tables_csv(const AuditReport& r) {
    std::ostringstream out;
    out << "chapter,generated,pct,seeds,expansion_ratio,unique_formulas\n";
    for (const auto& row : r.chapters) {
        auto it = r.chapter_formulas.find(row.chapter);
        std::size_t unique = it == r.chapter_formulas.end() ? 0 : it->second.size();
        out << csv_quote(row.chapter) << "," << row.generated << ","
            << ipg::detail::format_double(row.pct) << ",";
        if (row.seeds > 0)
            out << row.seeds << "," << ipg::detail::format_double(row.expansion_ratio);
        else
            out << ",";
        out << "," << unique << "\n";
    }
    out << "\nformula_count,records,pct\n";
    for (const auto& [k, stat] : r.buckets)
        out << k << "," << stat.count << "," << ipg::detail::format_double(stat.pct) << "\n";
    out << "\nunknown_variable,records\n";
    for (const auto& [name, count] : r.top_unknowns)
        out << csv_quote(name) << "," << count << "\n";
    return out.str();
}

std::string blueprint_csv(const AuditReport& r) {
    std::ostringstream out;
    out << "formula_count,mean_code_length,records\n";
    for (const auto& [k, mean] : r.fit.bucket_means) {
        auto it = r.fit.bucket_counts.find(k);
        out << k << "," << ipg::detail::format_double(mean) << ","
            << (it == r.fit.bucket_counts.end() ? 0 : it->second) << "\n";
    }
    out << "\nslope,intercept,r_squared\n"
        << ipg::detail::format_double(r.fit.slope) << ","
        << ipg::detail::format_double(r.fit.intercept) << ","
        << ipg::detail::format_double(r.fit.r_squared) << "\n";
    return out.str();
}

std::string taxonomy_csv(const AuditReport& r) {
    std::ostringstream out;
    out << "category,label,records\n";
    for (const auto& [cat, label] : category_labels()) {
        auto it = r.census.find(cat);
        out << cat << "," << csv_quote(label) << ","
            << (it == r.census.end() ? 0 : it->second) << "\n";
    }
    out << "\ntier,records,clean,clean_pct\n";
    for (const auto& tier : r.tiers.tiers)
        out << csv_quote(tier.label) << "," << tier.count << "," << tier.clean << ","
            << ipg::detail::format_double(tier.clean_pct) << "\n";
    out << "\ntier,category,records\n";
    for (const auto& tier : r.tiers.tiers)
        for (const auto& [cat, n] : tier.incidence)
            out << csv_quote(tier.label) << "," << cat << "," << n << "\n";
    return out.str();
}

// Compares the report against an expectations document. Only the blocks
// present in the document are checked. Returns one line per mismatch.
std::vector<std::string> run_checks(const nlohmann::json& exp, const AuditReport& r,
                                    bool have_seeds, std::size_t* comparisons) {
    std::vector<std::string> misses;
    auto miss = [&](const std::string& line) { misses.push_back(line); };
    auto count = [&]() {
        if (comparisons) ++(*comparisons);
    };
    auto fmt = ipg::detail::format_double;

    auto check_exact = [&](const std::string& label, double expected, double got) {
        count();
        if (expected != got)
            miss(label + ": expected " + fmt(expected) + ", got " + fmt(got));
    };
    auto check_tol = [&](const std::string& label, double expected, double tol, double got) {
        count();
        if (std::abs(got - expected) > tol)
            miss(label + ": expected " + fmt(expected) + " within " + fmt(tol) + ", got " +
                 fmt(got));
    };

    if (exp.contains("total"))
        check_exact("total", exp["total"].get<double>(), static_cast<double>(r.metrics.total));

    if (exp.contains("chapters")) {
        std::map<std::string, std::size_t> got;
        for (const auto& row : r.chapters) got[row.chapter] = row.generated;
        for (const auto& [name, expected] : exp["chapters"].items()) {
            auto it = got.find(name);
            check_exact("chapters[" + name + "]", expected.get<double>(),
                        it == got.end() ? 0.0 : static_cast<double>(it->second));
        }
    }

    if (exp.contains("formula_buckets")) {
        const auto& expected_buckets = exp["formula_buckets"];
        for (const auto& [key, expected] : expected_buckets.items()) {
            std::size_t k = std::stoull(key);
            auto it = r.buckets.find(k);
            check_exact("formula_buckets[" + key + "]", expected.get<double>(),
                        it == r.buckets.end() ? 0.0 : static_cast<double>(it->second.count));
        }
        for (const auto& [k, stat] : r.buckets) {
            if (!expected_buckets.contains(std::to_string(k))) {
                count();
                miss("formula_buckets[" + std::to_string(k) + "]: unexpected bucket with " +
                     std::to_string(stat.count) + " records");
            }
        }
    }

    if (exp.contains("top_unknowns")) {
        const auto& expected_top = exp["top_unknowns"];
        for (std::size_t i = 0; i < expected_top.size(); ++i) {
            std::string name = expected_top[i][0].get<std::string>();
            auto expected_count = expected_top[i][1].get<double>();
            count();
            if (i >= r.top_unknowns.size()) {
                miss("top_unknowns[" + std::to_string(i) + "]: expected " + name +
                     ", but the ranking has only " + std::to_string(r.top_unknowns.size()) +
                     " entries");
                continue;
            }
            if (r.top_unknowns[i].first != name ||
                static_cast<double>(r.top_unknowns[i].second) != expected_count)
                miss("top_unknowns[" + std::to_string(i) + "]: expected " + name + " x" +
                     fmt(expected_count) + ", got " + r.top_unknowns[i].first + " x" +
                     std::to_string(r.top_unknowns[i].second));
        }
    }

    if (exp.contains("unique_formulas"))
        check_exact("unique_formulas", exp["unique_formulas"].get<double>(),
                    static_cast<double>(r.metrics.unique_formulas));

    if (exp.contains("chapter_unique_formulas")) {
        for (const auto& [name, expected] : exp["chapter_unique_formulas"].items()) {
            auto it = r.chapter_formulas.find(name);
            check_exact("chapter_unique_formulas[" + name + "]", expected.get<double>(),
                        it == r.chapter_formulas.end() ? 0.0
                                                       : static_cast<double>(it->second.size()));
        }
    }

    if (exp.contains("metrics")) {
        const auto& m = exp["metrics"];
        auto metric = [&](const char* key, double got) {
            if (!m.contains(key)) return;
            check_tol(std::string("metrics.") + key, m[key]["value"].get<double>(),
                      m[key]["tolerance"].get<double>(), got);
        };
        metric("valid_answer_pct", r.metrics.valid_answer_pct);
        metric("ttr", r.metrics.ttr);
        metric("signature_uniqueness_pct", r.metrics.signature_uniqueness_pct);
        metric("text_uniqueness_pct", r.metrics.text_uniqueness_pct);
        metric("avg_formulas_per_problem", r.metrics.avg_formulas_per_problem);
        if (m.contains("difficulty")) {
            count();
            if (r.metrics.difficulty != m["difficulty"].get<std::string>())
                miss("metrics.difficulty: expected " + m["difficulty"].get<std::string>() +
                     ", got " + r.metrics.difficulty);
        }
    }

    if (exp.contains("expansion_ratios")) {
        if (!have_seeds)
            throw ipg::ConfigError(
                "the expectations file checks expansion ratios; pass --seeds");
        std::map<std::string, double> ratios;
        for (const auto& row : r.chapters) ratios[row.chapter] = row.expansion_ratio;
        for (const auto& [name, spec] : exp["expansion_ratios"].items()) {
            auto it = ratios.find(name);
            check_tol("expansion_ratios[" + name + "]", spec["value"].get<double>(),
                      spec["tolerance"].get<double>(), it == ratios.end() ? 0.0 : it->second);
        }
    }

    if (exp.contains("blueprint")) {
        const auto& b = exp["blueprint"];
        if (b.contains("bucket_means")) {
            double pct_tol = b.value("bucket_mean_pct_tolerance", 1.0);
            for (const auto& [key, expected] : b["bucket_means"].items()) {
                std::size_t k = std::stoull(key);
                auto it = r.fit.bucket_means.find(k);
                double want = expected.get<double>();
                check_tol("blueprint.bucket_means[" + key + "]", want,
                          want * pct_tol / 100.0,
                          it == r.fit.bucket_means.end() ? 0.0 : it->second);
            }
        }
        if (b.contains("slope_range")) {
            count();
            double lo = b["slope_range"][0].get<double>();
            double hi = b["slope_range"][1].get<double>();
            if (r.fit.slope < lo || r.fit.slope > hi)
                miss("blueprint.slope: expected within [" + fmt(lo) + ", " + fmt(hi) +
                     "], got " + fmt(r.fit.slope));
        }
        if (b.contains("r_squared"))
            check_tol("blueprint.r_squared", b["r_squared"]["value"].get<double>(),
                      b["r_squared"]["tolerance"].get<double>(), r.fit.r_squared);
    }

    return misses;
}

int run_audit(const AuditOpts& o) {
    std::vector<ipg::DatasetRecord> records = ipg::read_records_file(o.data);
    ipg::FormulaLibrary library = load_library_file(o.library);
    std::vector<ipg::SanityRule> rules = load_rules_file(o.rules);

    std::map<std::string, std::size_t> seed_counts;
    if (!o.seeds.empty()) {
        for (const auto& seed : ipg::read_seeds_file(o.seeds))
            ++seed_counts[ipg::strip_chapter_prefix(seed.chapter)];
    }

    AuditReport report = build_audit_report(records, library, rules, seed_counts);

    fs::create_directories(o.out);
    write_text_file(fs::path(o.out) / "metrics.json", metrics_json(report).dump(2) + "\n");
    write_text_file(fs::path(o.out) / "tables.csv", tables_csv(report));
    write_text_file(fs::path(o.out) / "blueprint.csv", blueprint_csv(report));
    write_text_file(fs::path(o.out) / "taxonomy.csv", taxonomy_csv(report));

    std::cout << "records: " << report.metrics.total << "\n"
              << "valid answers: " << ipg::detail::format_double(report.metrics.valid_answer_pct)
              << "%\n"
              << "flagged by the failure screen: " << report.flagged << "\n"
              << "wrote " << o.out << "/metrics.json, tables.csv, blueprint.csv, taxonomy.csv\n";

    if (!o.check.empty()) {
        nlohmann::json exp;
        try {
            exp = nlohmann::json::parse(read_file_bytes(o.check));
        } catch (const nlohmann::json::exception& e) {
            throw ipg::ConfigError("expectations file " + o.check + " is not valid JSON: " +
                                   e.what());
        }
        std::size_t comparisons = 0;
        std::vector<std::string> misses = run_checks(exp, report, !o.seeds.empty(), &comparisons);
        for (const auto& line : misses) std::cout << "MISS " << line << "\n";
        std::cout << "check: " << (comparisons - misses.size()) << "/" << comparisons
                  << " expectations hold\n";
        if (!misses.empty()) return 5;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
    std::string data;
    std::string library = default_data("classical_mechanics_library.json");
    std::string rules = default_data("sanity_rules.json");
    std::string emit_source;
};

int run_verify(const VerifyOpts& o) {
    std::vector<ipg::DatasetRecord> records = ipg::read_records_file(o.data);
    ipg::FormulaLibrary library = load_library_file(o.library);
    std::vector<ipg::SanityRule> rules = load_rules_file(o.rules);

    if (!o.emit_source.empty()) fs::create_directories(o.emit_source);

    std::size_t opaque = 0, checked = 0, divergences = 0, emitted = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ipg::DatasetRecord& r = records[i];
        if (!ipg::plan_formatted(r.code)) {
            std::cout << "record " << i << " (" << r.signature
                      << "): unverifiable: opaque source\n";
            ++opaque;
            continue;
        }

        ipg::ProblemDraft draft;
        draft.word_problem = r.word_problem;
        draft.code = r.code;
        draft.formula_ids = r.formula_ids;
        draft.unknown_var = r.unknown_var;
        for (const auto& [name, entry] : r.variables) {
            if (name == r.unknown_var) continue;
            if (entry.value) draft.given_values.emplace_back(name, *entry.value);
        }

        ipg::VerificationReport report = ipg::verify(draft, library, rules);
        ++checked;

        std::vector<std::string> notes;
        if (report.passed != r.validation_result.valid) {
            std::string stage = report.failure_stage.empty() ? "verified" : report.failure_stage;
            notes.push_back("stored valid=" + std::string(r.validation_result.valid ? "true"
                                                                                    : "false") +
                            " but re-verification " +
                            (report.passed ? "passed" : "failed at the " + stage + " stage"));
        } else if (report.passed) {
            if (!r.execution_result) {
                notes.push_back("record passed verification but stores no execution_result");
            } else {
                std::string recomputed = ipg::detail::format_double(report.value);
                if (recomputed != *r.execution_result)
                    notes.push_back("stored execution_result " + *r.execution_result +
                                    " but re-execution yields " + recomputed);
            }
        }
        if (!notes.empty()) {
            ++divergences;
            for (const auto& note : notes)
                std::cout << "record " << i << " (" << r.signature << "): divergence: " << note
                          << "\n";
        }

        if (!o.emit_source.empty()) {
            ipg::SolutionPlan plan = ipg::parse_plan(r.code);
            char name[32];
            std::snprintf(name, sizeof(name), "record_%04zu.py", i);
            write_text_file(fs::path(o.emit_source) / name,
                            ipg::render_plan_python(plan, library));
            ++emitted;
        }
    }

    std::cout << "records: " << records.size() << ", re-verified: " << checked
              << ", opaque: " << opaque << ", divergences: " << divergences << "\n";
    if (!o.emit_source.empty())
        std::cout << "wrote " << emitted << " solver transcriptions to " << o.emit_source << "\n";
    return divergences > 0 ? 6 : 0;
}

// ---------------------------------------------------------------------------
// stats

struct StatsOpts {
    std::string data;
    std::string rules = default_data("sanity_rules.json");
    std::string seeds;
};

int run_stats(const StatsOpts& o) {
    std::vector<ipg::DatasetRecord> records = ipg::read_records_file(o.data);
    std::vector<ipg::SanityRule> rules = load_rules_file(o.rules);
    ipg::DatasetMetrics m = ipg::compute_intrinsic_metrics(records, rules);

    std::map<std::string, std::size_t> seed_counts;
    if (!o.seeds.empty()) {
        for (const auto& seed : ipg::read_seeds_file(o.seeds))
            ++seed_counts[ipg::strip_chapter_prefix(seed.chapter)];
    }

    auto fmt = ipg::detail::format_double;
    std::cout << "dataset: " << o.data << "\n"
              << "records: " << m.total << "    difficulty: " << m.difficulty << " ("
              << fmt(m.avg_formulas_per_problem) << " formulas/problem)\n"
              << "valid answers: " << fmt(m.valid_answer_pct)
              << "%    unrealistic results: " << m.unrealistic_count << "\n"
              << "signature uniqueness: " << fmt(m.signature_uniqueness_pct)
              << "%    text uniqueness: " << fmt(m.text_uniqueness_pct) << "% ("
              << m.duplicate_text_count << " duplicates)\n"
              << "type-token ratio: " << fmt(m.ttr) << "\n"
              << "unique formulas: " << m.unique_formulas
              << "    unique unknowns: " << m.unique_unknowns << "\n"
              << "avg words: " << fmt(m.avg_word_count)
              << "    avg code chars: " << fmt(m.avg_code_length) << "\n";

    std::cout << "\nformula-count buckets:\n";
    for (const auto& [k, stat] : ipg::formula_count_distribution(records))
        std::cout << "  " << k << " formulas: " << stat.count << " (" << fmt(stat.pct) << "%)\n";

    std::cout << "\nchapters:\n";
    for (const auto& row : ipg::chapter_report(records, seed_counts)) {
        std::cout << "  " << row.chapter << ": " << row.generated << " (" << fmt(row.pct) << "%)";
        if (row.seeds > 0)
            std::cout << "  seeds " << row.seeds << ", expansion x" << fmt(row.expansion_ratio);
        std::cout << "\n";
    }

    std::cout << "\ntop unknowns:\n";
    for (const auto& [name, count] : ipg::unknown_variable_frequencies(records, 10))
        std::cout << "  " << name << ": " << count << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// import

struct ImportOpts {
    std::string input;
    std::string output;
};

int run_import(const ImportOpts& o) {
    std::string text = read_file_bytes(o.input);
    std::vector<ipg::DatasetRecord> records = ipg::import_records(text, o.input);
    if (records.empty()) throw ipg::EmptyDatasetError();
    ipg::write_records_file(o.output, records);
    std::cout << "imported " << records.size() << " records -> " << o.output << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"problem-generation toolkit"};
    app.require_subcommand(1);

    GenerateOpts gen;
    CLI::App* gen_cmd =
        app.add_subcommand("generate", "run a generation session against a backend");
    gen_cmd->add_option("--seeds", gen.seeds, "seed problems (JSONL)")->required();
    gen_cmd->add_option("--library", gen.library, "formula library JSON");
    gen_cmd->add_option("--prompts", gen.prompts, "prompt template directory");
    gen_cmd->add_option("--rules", gen.rules, "sanity rules JSON");
    gen_cmd->add_option("--backend", gen.backend, "backend: mock or remote");
    gen_cmd->add_option("--out", gen.out, "output directory");
    gen_cmd->add_option("--n", gen.n, "variations per seed");
    gen_cmd->add_option("--rng", gen.rng, "session RNG seed");
    gen_cmd->add_option("--min-formulas", gen.min_formulas, "minimum formulas per problem");
    gen_cmd->add_option("--max-formulas", gen.max_formulas, "maximum formulas per problem");
    gen_cmd->add_option("--retries", gen.retries, "generation attempts per slot");
    gen_cmd->add_option("--code-retries", gen.code_retries, "code-fix attempts per generation");
    gen_cmd->add_option("--jobs", gen.jobs, "seeds processed in parallel");
    gen_cmd->add_option("--max-calls", gen.max_calls, "backend call budget (0 = unlimited)");
    gen_cmd->add_option("--scenario-quota", gen.scenario_quota,
                        "max acceptances per scenario (0 = unlimited)");

    AuditOpts aud;
    CLI::App* aud_cmd = app.add_subcommand("audit", "compute the intrinsic dataset report");
    aud_cmd->add_option("--data", aud.data, "dataset records (JSONL)")->required();
    aud_cmd->add_option("--out", aud.out, "output directory");
    aud_cmd->add_option("--library", aud.library, "formula library JSON");
    aud_cmd->add_option("--rules", aud.rules, "sanity rules JSON");
    aud_cmd->add_option("--check", aud.check, "expectations JSON to compare against");
    aud_cmd->add_option("--seeds", aud.seeds, "seed problems, enables expansion ratios");

    VerifyOpts ver;
    CLI::App* ver_cmd =
        app.add_subcommand("verify", "re-run verification and report divergences");
    ver_cmd->add_option("--data", ver.data, "dataset records (JSONL)")->required();
    ver_cmd->add_option("--library", ver.library, "formula library JSON");
    ver_cmd->add_option("--rules", ver.rules, "sanity rules JSON");
    ver_cmd->add_option("--emit-source", ver.emit_source,
                        "directory for rendered solver source");

    StatsOpts sta;
    CLI::App* sta_cmd = app.add_subcommand("stats", "print a quick dataset summary");
    sta_cmd->add_option("--data", sta.data, "dataset records (JSONL)")->required();
    sta_cmd->add_option("--rules", sta.rules, "sanity rules JSON");
    sta_cmd->add_option("--seeds", sta.seeds, "seed problems, enables expansion ratios");

    ImportOpts imp;
    CLI::App* imp_cmd =
        app.add_subcommand("import", "normalize an external dump into canonical JSONL");
    imp_cmd->add_option("--input", imp.input, "JSON array or JSONL file")->required();
    imp_cmd->add_option("--output", imp.output, "destination JSONL path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(gen_cmd)) return run_generate(gen);
        if (app.got_subcommand(aud_cmd)) return run_audit(aud);
        if (app.got_subcommand(ver_cmd)) return run_verify(ver);
        if (app.got_subcommand(sta_cmd)) return run_stats(sta);
        if (app.got_subcommand(imp_cmd)) return run_import(imp);
    } catch (const ipg::BackendError& e) {
        std::cerr << "error: backend unreachable: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

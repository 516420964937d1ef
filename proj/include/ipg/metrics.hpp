#pragma once

// Intrinsic dataset metrics and the complexity blueprint.
//
// Everything here is a pure function over a vector of DatasetRecords:
// type-token ratio, validity and uniqueness percentages, formula-count and
// chapter distributions, unknown-variable frequencies, low-complexity
// pruning, and the ordinary-least-squares fit of solution-code length
// against formula count (the blueprint that makes code length a usable
// difficulty proxy). Determinism is part of the contract: the same file
// always yields byte-identical reports.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ipg/errors.hpp"
#include "ipg/format.hpp"
#include "ipg/records.hpp"
#include "ipg/sanity.hpp"

namespace ipg {

// ---------------------------------------------------------------------------
// Tokenization (shared by TTR and word counts)

// Lowercase alphanumeric runs; everything else separates tokens.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

struct TtrResult {
    size_t unique_tokens = 0;
    size_t total_tokens = 0;
    double percent = 0.0; // unique / total * 100
};

inline TtrResult type_token_ratio(const std::vector<std::string>& texts) {
    TtrResult r;
    std::set<std::string> seen;
    for (const auto& text : texts) {
        for (auto& tok : tokenize(text)) {
            ++r.total_tokens;
            seen.insert(std::move(tok));
        }
    }
    r.unique_tokens = seen.size();
    r.percent = r.total_tokens == 0 ? 0.0
                                    : 100.0 * static_cast<double>(r.unique_tokens) /
                                          static_cast<double>(r.total_tokens);
    return r;
}

// ---------------------------------------------------------------------------
// Small shared helpers

// Mean of the keys weighted by their counts.
inline double weighted_mean(const std::map<size_t, size_t>& histogram) {
    double num = 0.0, den = 0.0;
    for (const auto& [k, n] : histogram) {
        num += static_cast<double>(k) * static_cast<double>(n);
        den += static_cast<double>(n);
    }
    if (den == 0.0) throw EmptyDatasetError();
    return num / den;
}

// Easy below two formulas per problem, Hard above three, Medium between.
inline std::string difficulty_label(double avg_formulas) {
    if (avg_formulas < 2.0) return "Easy";
    if (avg_formulas <= 3.0) return "Medium";
    return "Hard";
}

// "9.Centre of Mass" -> "Centre of Mass"; labels without the numeric prefix
// pass through unchanged.
inline std::string strip_chapter_prefix(const std::string& label) {
    size_t i = 0;
    while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i]))) ++i;
    if (i > 0 && i < label.size() && label[i] == '.') return label.substr(i + 1);
    return label;
}

// ---------------------------------------------------------------------------
// Intrinsic metrics

struct DatasetMetrics {
    size_t total = 0;
    double valid_answer_pct = 0.0;
    size_t unrealistic_count = 0; // records tripping the magnitude window
    double signature_uniqueness_pct = 0.0;
    double text_uniqueness_pct = 0.0;
    size_t duplicate_text_count = 0; // total minus distinct texts
    double ttr = 0.0;
    size_t unique_formulas = 0;
    size_t unique_unknowns = 0;
    double avg_formulas_per_problem = 0.0;
    std::string difficulty; // Easy / Medium / Hard from the average
    double avg_word_count = 0.0;
    double avg_code_length = 0.0; // characters of the code field
};

inline DatasetMetrics compute_intrinsic_metrics(const std::vector<DatasetRecord>& records,
                                                const std::vector<SanityRule>& rules) {
    if (records.empty()) throw EmptyDatasetError();
    DatasetMetrics m;
    m.total = records.size();

    size_t valid = 0, words = 0, formulas = 0, code_chars = 0;
    std::set<std::string> signatures, texts, formula_ids, unknowns;
    std::vector<std::string> problem_texts;
    problem_texts.reserve(records.size());

    for (const auto& r : records) {
        if (r.validation_result.valid) ++valid;
        signatures.insert(r.signature);
        texts.insert(r.word_problem);
        problem_texts.push_back(r.word_problem);
        formula_ids.insert(r.formula_ids.begin(), r.formula_ids.end());
        unknowns.insert(r.unknown_var);
        formulas += r.formula_ids.size();
        words += tokenize(r.word_problem).size();
        code_chars += r.code.size();

        std::vector<std::pair<std::string, double>> values;
        for (const auto& [name, v] : r.variables)
            if (v.value.has_value()) values.emplace_back(name, *v.value);
        if (r.execution_result.has_value())
            values.emplace_back(r.unknown_var, detail::parse_double(*r.execution_result));
        auto findings = check_sanity(values, rules);
        if (std::any_of(findings.begin(), findings.end(),
                        [](const SanityFinding& f) { return f.severity == Severity::Unrealistic; }))
            ++m.unrealistic_count;
    }

    double n = static_cast<double>(m.total);
    m.valid_answer_pct = 100.0 * static_cast<double>(valid) / n;
    m.signature_uniqueness_pct = 100.0 * static_cast<double>(signatures.size()) / n;
    m.text_uniqueness_pct = 100.0 * static_cast<double>(texts.size()) / n;
    m.duplicate_text_count = m.total - texts.size();
    m.ttr = type_token_ratio(problem_texts).percent;
    m.unique_formulas = formula_ids.size();
    m.unique_unknowns = unknowns.size();
    m.avg_formulas_per_problem = static_cast<double>(formulas) / n;
    m.difficulty = difficulty_label(m.avg_formulas_per_problem);
    m.avg_word_count = static_cast<double>(words) / n;
    m.avg_code_length = static_cast<double>(code_chars) / n;
    return m;
}

// ---------------------------------------------------------------------------
// Distributions

struct BucketStat {
    size_t count = 0;
    double pct = 0.0;
};

inline std::map<size_t, BucketStat>
formula_count_distribution(const std::vector<DatasetRecord>& records) {
    std::map<size_t, BucketStat> dist;
    for (const auto& r : records) ++dist[r.formula_ids.size()].count;
    for (auto& [k, stat] : dist)
        stat.pct = records.empty() ? 0.0
                                   : 100.0 * static_cast<double>(stat.count) /
                                         static_cast<double>(records.size());
    return dist;
}

struct ChapterRow {
    std::string chapter; // prefix-stripped name
    size_t generated = 0;
    double pct = 0.0;
    size_t seeds = 0;           // 0 when no seed table given
    double expansion_ratio = 0; // generated / seeds; 0 when seeds unknown
};

// Per-chapter counts, with expansion ratios when a seed-count table is
// supplied. Every chapter appearing in the records must then have a seed
// count; chapters with seeds but no records still get a row.
inline std::vector<ChapterRow> chapter_report(const std::vector<DatasetRecord>& records,
                                              const std::map<std::string, size_t>& seed_counts) {
    std::map<std::string, size_t> generated;
    for (const auto& r : records) ++generated[strip_chapter_prefix(r.chapter)];

    std::map<std::string, ChapterRow> rows;
    for (const auto& [name, count] : generated) {
        if (!seed_counts.empty() && !seed_counts.count(name)) throw UnknownChapterLabelError(name);
        ChapterRow row;
        row.chapter = name;
        row.generated = count;
        row.pct = records.empty() ? 0.0
                                  : 100.0 * static_cast<double>(count) /
                                        static_cast<double>(records.size());
        rows[name] = row;
    }
    for (const auto& [name, seeds] : seed_counts) {
        auto& row = rows[name]; // creates empty rows for unexpanded chapters
        row.chapter = name;
        row.seeds = seeds;
        if (seeds > 0)
            row.expansion_ratio =
                static_cast<double>(row.generated) / static_cast<double>(seeds);
    }
    std::vector<ChapterRow> out;
    for (auto& [name, row] : rows) out.push_back(std::move(row));
    return out;
}

// Top-k target unknowns, descending by frequency, ties lexicographic.
inline std::vector<std::pair<std::string, size_t>>
unknown_variable_frequencies(const std::vector<DatasetRecord>& records, size_t k) {
    if (k < 1) throw PreconditionError("top-k requires k >= 1");
    std::map<std::string, size_t> freq;
    for (const auto& r : records) ++freq[r.unknown_var];
    std::vector<std::pair<std::string, size_t>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

// ---------------------------------------------------------------------------
// Low-complexity pruning

struct PrunePartition {
    std::vector<DatasetRecord> kept;
    std::vector<DatasetRecord> pruned;
};

// Order-preserving partition: records with fewer than `threshold` formula
// ids go to `pruned`. Callers decide whether to drop them or just report.
inline PrunePartition prune_low_complexity(const std::vector<DatasetRecord>& records,
                                           size_t threshold) {
    PrunePartition p;
    for (const auto& r : records)
        (r.formula_ids.size() < threshold ? p.pruned : p.kept).push_back(r);
    return p;
}

// ---------------------------------------------------------------------------
// Complexity blueprint (OLS of code length on formula count)

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of y on x. R^2 = SSreg / SStot; a zero-variance y
// is a perfect horizontal fit.
inline LineFit fit_line(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw InsufficientBucketsError(points.size());
    double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, sstot = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        sstot += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw PreconditionError("complexity fit needs at least two distinct x values");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = sstot == 0.0 ? 1.0 : (fit.slope * fit.slope * sxx) / sstot;
    return fit;
}

struct ComplexityFit {
    std::map<size_t, double> bucket_means;  // formula count -> mean code length
    std::map<size_t, size_t> bucket_counts; // formula count -> records
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    size_t bucket_lo = 0;
    size_t bucket_hi = 0;
};

// Mean code length per occupied formula-count bucket within [lo, hi].
inline std::map<size_t, double>
mean_code_length_by_bucket(const std::vector<DatasetRecord>& records, size_t lo, size_t hi) {
    std::map<size_t, double> sums;
    std::map<size_t, size_t> counts;
    for (const auto& r : records) {
        size_t bucket = r.formula_ids.size();
        if (bucket < lo || bucket > hi) continue;
        sums[bucket] += static_cast<double>(r.code.size());
        ++counts[bucket];
    }
    for (auto& [bucket, sum] : sums) sum /= static_cast<double>(counts[bucket]);
    return sums;
}

// The default (bucket-mean) blueprint: regress per-bucket mean code length
// on formula count over the occupied buckets in [lo, hi].
inline ComplexityFit fit_complexity_blueprint(const std::vector<DatasetRecord>& records,
                                              size_t lo = 2, size_t hi = 5) {
    ComplexityFit fit;
    fit.bucket_lo = lo;
    fit.bucket_hi = hi;
    for (const auto& r : records) {
        size_t bucket = r.formula_ids.size();
        if (bucket < lo || bucket > hi) continue;
        ++fit.bucket_counts[bucket];
    }
    fit.bucket_means = mean_code_length_by_bucket(records, lo, hi);
    if (fit.bucket_means.size() < 2) throw InsufficientBucketsError(fit.bucket_means.size());
    std::vector<std::pair<double, double>> points;
    for (const auto& [bucket, mean] : fit.bucket_means)
        points.emplace_back(static_cast<double>(bucket), mean);
    LineFit line = fit_line(points);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    return fit;
}

// The per-record variant: every record contributes its own point.
inline LineFit fit_complexity_per_record(const std::vector<DatasetRecord>& records, size_t lo = 2,
                                         size_t hi = 5) {
    std::vector<std::pair<double, double>> points;
    for (const auto& r : records) {
        size_t bucket = r.formula_ids.size();
        if (bucket < lo || bucket > hi) continue;
        points.emplace_back(static_cast<double>(bucket), static_cast<double>(r.code.size()));
    }
    return fit_line(points);
}

} // namespace ipg

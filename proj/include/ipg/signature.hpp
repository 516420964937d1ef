#pragma once

// Problem signatures and the deduplication registry.
//
// A signature is the canonical identity of a generated problem: the set of
// formula ids its solution invokes plus the unknown variable being asked
// for. Two problems with the same signature are the same problem in
// different clothes, so generation keeps a registry and regenerates on
// collision.

#include <algorithm>
#include <mutex>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

namespace ipg {

// Canonical rendering: "fids=[<ids sorted, comma-joined>]|unknown=<target>".
// Duplicate ids collapse; order of the input does not matter.
inline std::string compute_signature(std::vector<std::string> formula_ids,
                                     const std::string& unknown_var) {
    std::sort(formula_ids.begin(), formula_ids.end());
    formula_ids.erase(std::unique(formula_ids.begin(), formula_ids.end()), formula_ids.end());
    std::string out = "fids=[";
    for (size_t i = 0; i < formula_ids.size(); ++i) {
        if (i) out += ",";
        out += formula_ids[i];
    }
    out += "]|unknown=" + unknown_var;
    return out;
}

inline std::string compute_signature(const std::set<std::string>& formula_ids,
                                     const std::string& unknown_var) {
    return compute_signature(std::vector<std::string>(formula_ids.begin(), formula_ids.end()),
                             unknown_var);
}

inline std::string compute_signature(std::initializer_list<std::string> formula_ids,
                                     const std::string& unknown_var) {
    return compute_signature(std::vector<std::string>(formula_ids), unknown_var);
}

enum class InsertOutcome { Fresh, Collision };

// Thread-safe test-and-insert set of canonical signatures. The check and the
// insertion are one atomic step, so two concurrent inserts of the same
// signature can never both come back Fresh.
class SignatureRegistry {
public:
    InsertOutcome test_and_insert(const std::string& canonical) {
        std::lock_guard<std::mutex> lock(mu_);
        return seen_.insert(canonical).second ? InsertOutcome::Fresh : InsertOutcome::Collision;
    }

    bool contains(const std::string& canonical) const {
        std::lock_guard<std::mutex> lock(mu_);
        return seen_.count(canonical) != 0;
    }

    size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return seen_.size();
    }

private:
    mutable std::mutex mu_;
    std::unordered_set<std::string> seen_;
};

} // namespace ipg

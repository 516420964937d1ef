#pragma once

// Backend abstraction, call accounting, and retry budgets.
//
// A backend is a shared, internally synchronized completion client; the
// pipeline holds exactly one and calls it from however many workers are
// configured. Call counts are observability, never acceptance: the paper's
// per-problem call range depends on a hosted model's behavior, so it is
// logged in the session manifest and asserted nowhere.

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>

#include "json.hpp"

#include "ipg/errors.hpp"

namespace ipg {

struct BackendRequest {
    std::string stage; // one of the six prompt stages
    std::string prompt;
    double temperature = 0.0;
};

class Backend {
public:
    virtual ~Backend() = default;

    // Returns the raw completion text. Throws BackendError on transport or
    // provider failure. Must be safe to call concurrently.
    virtual std::string complete(const BackendRequest& request) = 0;

    // Human-readable identity for the session manifest.
    virtual std::string name() const = 0;
};

// Exploration for problem text, determinism for code.
inline double default_temperature(const std::string& stage) {
    return stage.rfind("generate", 0) == 0 ? 0.7 : 0.0;
}

// Thread-safe per-stage call counters.
class CallStats {
public:
    void record(const std::string& stage) {
        std::lock_guard<std::mutex> lock(mu_);
        ++per_stage_[stage];
        ++total_;
    }

    size_t total() const {
        std::lock_guard<std::mutex> lock(mu_);
        return total_;
    }

    size_t stage(const std::string& name) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = per_stage_.find(name);
        return it == per_stage_.end() ? 0 : it->second;
    }

    nlohmann::ordered_json to_json() const {
        std::lock_guard<std::mutex> lock(mu_);
        nlohmann::ordered_json j;
        j["total_calls"] = total_;
        nlohmann::ordered_json stages = nlohmann::ordered_json::object();
        for (const auto& [stage, count] : per_stage_) stages[stage] = count;
        j["per_stage"] = std::move(stages);
        return j;
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, size_t> per_stage_;
    size_t total_ = 0;
};

// A hard cap on backend calls for one unit of work (a problem slot, or a
// whole session). Exhaustion throws; the caller decides whether that
// abandons a slot or the run.
class CallBudget {
public:
    explicit CallBudget(size_t limit) : limit_(limit) {}

    void consume(const std::string& what) {
        size_t used = used_.fetch_add(1, std::memory_order_relaxed) + 1;
        if (used > limit_) {
            used_.fetch_sub(1, std::memory_order_relaxed);
            throw BudgetExhaustedError("call budget of " + std::to_string(limit_) +
                                       " exhausted at " + what);
        }
    }

    size_t limit() const { return limit_; }
    size_t used() const { return used_.load(std::memory_order_relaxed); }
    size_t remaining() const {
        size_t u = used();
        return u >= limit_ ? 0 : limit_ - u;
    }

private:
    size_t limit_;
    std::atomic<size_t> used_{0};
};

} // namespace ipg

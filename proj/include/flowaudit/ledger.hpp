#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace flowaudit {

enum class QueryClass { Analysis, Reask, Feasibility };

const char* to_string(QueryClass c);

struct LedgerEntry {
    std::string fingerprint;
    QueryClass query_class = QueryClass::Analysis;
    std::string source_key; // the source value whose scanning round issued it
    long input_tokens = 0;
    long output_tokens = 0;
    double latency_seconds = 0.0;
};

struct RatesConfig {
    double input_per_million = 0.0;
    double output_per_million = 0.0;
    std::string currency = "USD";
};

struct SourceCost {
    long prompt_rounds = 0;
    long input_tokens = 0;
    long output_tokens = 0;
};

/// Run-wide cost accounting: prompt rounds, token totals, financial cost and
/// timing. Totals are maintained as the exact sums of the per-response
/// entries; updated atomically per response.
class RunLedger {
public:
    void add(const LedgerEntry& entry);
    void record_attempt(bool succeeded);
    void set_cache_stats(long hits, long misses);
    void set_wall_seconds(double seconds);

    long prompt_rounds() const;
    long analysis_queries() const;
    long reask_queries() const;
    long feasibility_queries() const;
    long input_tokens() const;
    long output_tokens() const;
    double model_seconds() const;
    double wall_seconds() const;
    long cache_hits() const;
    long cache_misses() const;
    long attempted_queries() const;
    long succeeded_queries() const;

    double financial_cost(const RatesConfig& rates) const;

    std::vector<LedgerEntry> entries() const;
    std::map<std::string, SourceCost> per_source() const;

    nlohmann::json to_json(const RatesConfig& rates) const;

private:
    mutable std::mutex mu_;
    std::vector<LedgerEntry> entries_;
    long input_tokens_ = 0;
    long output_tokens_ = 0;
    long analysis_ = 0;
    long reask_ = 0;
    long feasibility_ = 0;
    double model_seconds_ = 0.0;
    double wall_seconds_ = 0.0;
    long cache_hits_ = 0;
    long cache_misses_ = 0;
    long attempted_ = 0;
    long succeeded_ = 0;
};

} // namespace flowaudit

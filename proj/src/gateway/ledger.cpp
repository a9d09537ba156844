#include "flowaudit/ledger.hpp"

namespace flowaudit {

const char* to_string(QueryClass c) {
    switch (c) {
    case QueryClass::Analysis: return "analysis";
    case QueryClass::Reask: return "reask";
    case QueryClass::Feasibility: return "feasibility";
    }
    return "analysis";
}

void RunLedger::add(const LedgerEntry& entry) {
    std::lock_guard<std::mutex> lock(mu_);
    entries_.push_back(entry);
    input_tokens_ += entry.input_tokens;
    output_tokens_ += entry.output_tokens;
    model_seconds_ += entry.latency_seconds;
    switch (entry.query_class) {
    case QueryClass::Analysis: ++analysis_; break;
    case QueryClass::Reask: ++reask_; break;
    case QueryClass::Feasibility: ++feasibility_; break;
    }
}

void RunLedger::record_attempt(bool succeeded) {
    std::lock_guard<std::mutex> lock(mu_);
    ++attempted_;
    if (succeeded)
        ++succeeded_;
}

void RunLedger::set_cache_stats(long hits, long misses) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_hits_ = hits;
    cache_misses_ = misses;
}

void RunLedger::set_wall_seconds(double seconds) {
    std::lock_guard<std::mutex> lock(mu_);
    wall_seconds_ = seconds;
}

long RunLedger::prompt_rounds() const {
    std::lock_guard<std::mutex> lock(mu_);
    return analysis_ + reask_ + feasibility_;
}
long RunLedger::analysis_queries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return analysis_;
}
long RunLedger::reask_queries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return reask_;
}
long RunLedger::feasibility_queries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return feasibility_;
}
long RunLedger::input_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    return input_tokens_;
}
long RunLedger::output_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    return output_tokens_;
}
double RunLedger::model_seconds() const {
    std::lock_guard<std::mutex> lock(mu_);
    return model_seconds_;
}
double RunLedger::wall_seconds() const {
    std::lock_guard<std::mutex> lock(mu_);
    return wall_seconds_;
}
long RunLedger::cache_hits() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_hits_;
}
long RunLedger::cache_misses() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cache_misses_;
}
long RunLedger::attempted_queries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return attempted_;
}
long RunLedger::succeeded_queries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return succeeded_;
}

double RunLedger::financial_cost(const RatesConfig& rates) const {
    std::lock_guard<std::mutex> lock(mu_);
    return static_cast<double>(input_tokens_) / 1e6 * rates.input_per_million +
           static_cast<double>(output_tokens_) / 1e6 * rates.output_per_million;
}

std::vector<LedgerEntry> RunLedger::entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_;
}

std::map<std::string, SourceCost> RunLedger::per_source() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::map<std::string, SourceCost> out;
    for (const auto& e : entries_) {
        SourceCost& cost = out[e.source_key];
        ++cost.prompt_rounds;
        cost.input_tokens += e.input_tokens;
        cost.output_tokens += e.output_tokens;
    }
    return out;
}

nlohmann::json RunLedger::to_json(const RatesConfig& rates) const {
    nlohmann::json per_source_doc = nlohmann::json::object();
    for (const auto& [key, cost] : per_source())
        per_source_doc[key] = {{"prompt_rounds", cost.prompt_rounds},
                               {"input_tokens", cost.input_tokens},
                               {"output_tokens", cost.output_tokens}};
    std::lock_guard<std::mutex> lock(mu_);
    return {{"prompt_rounds", analysis_ + reask_ + feasibility_},
            {"analysis_queries", analysis_},
            {"reask_queries", reask_},
            {"feasibility_queries", feasibility_},
            {"input_tokens", input_tokens_},
            {"output_tokens", output_tokens_},
            {"financial_cost", static_cast<double>(input_tokens_) / 1e6 * rates.input_per_million +
                                   static_cast<double>(output_tokens_) / 1e6 * rates.output_per_million},
            {"currency", rates.currency},
            {"model_seconds", model_seconds_},
            {"wall_seconds", wall_seconds_},
            {"cache_hits", cache_hits_},
            {"cache_misses", cache_misses_},
            {"per_source", std::move(per_source_doc)}};
}

} // namespace flowaudit

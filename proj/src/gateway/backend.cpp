#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "flowaudit/errors.hpp"
#include "flowaudit/gateway.hpp"

#include "json.hpp"

namespace flowaudit {

namespace {

struct MockScript {
    std::string raw_text;
    long input_tokens = 0;
    long output_tokens = 0;
    double latency_seconds = 0.0;
    bool truncated = false;
};

bool load_script(const std::filesystem::path& path, MockScript& script) {
    std::ifstream in(path);
    if (!in)
        return false;
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception&) {
        return false;
    }
    script.raw_text = doc.value("raw_text", std::string{});
    script.input_tokens = doc.value("input_tokens", 0L);
    script.output_tokens = doc.value("output_tokens", 0L);
    script.latency_seconds = doc.value("latency_seconds", 0.0);
    script.truncated = doc.value("truncated", false);
    return true;
}

} // namespace

MockBackend::MockBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

ModelResponse MockBackend::complete(const PromptRequest& request) {
    MockScript script;
    std::string used;
    if (!request.detail_fingerprint.empty() &&
        load_script(dir_ / (request.detail_fingerprint + ".json"), script)) {
        used = request.detail_fingerprint;
    } else if (load_script(dir_ / (request.fingerprint + ".json"), script)) {
        used = request.fingerprint;
    } else {
        std::ostringstream os;
        os << request.fingerprint;
        if (!request.detail_fingerprint.empty())
            os << " (detail " << request.detail_fingerprint << ")";
        os << " [template=" << to_string(request.template_kind) << ", dir=" << dir_.string() << "]";
        throw MockResponseMissing(os.str());
    }
    if (script.truncated)
        throw OutputTruncated(used);
    ModelResponse response;
    response.raw_text = script.raw_text;
    response.input_tokens = script.input_tokens;
    response.output_tokens = script.output_tokens;
    response.latency_seconds = script.latency_seconds;
    response.backend_id = id();
    return response;
}

void MockBackend::script(const std::filesystem::path& dir, const std::string& fingerprint,
                         const std::string& raw_text, long input_tokens, long output_tokens,
                         double latency_seconds) {
    std::filesystem::create_directories(dir);
    nlohmann::json doc = {{"raw_text", raw_text},
                          {"input_tokens", input_tokens},
                          {"output_tokens", output_tokens},
                          {"latency_seconds", latency_seconds}};
    std::ofstream out(dir / (fingerprint + ".json"));
    out << doc.dump(2) << "\n";
}

class Gateway::Slots {
public:
    explicit Slots(int count) : count_(count > 0 ? count : 1) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mu_);
        free_.wait(lock, [&] { return in_flight_ < count_; });
        ++in_flight_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            --in_flight_;
        }
        free_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable free_;
    int count_;
    int in_flight_ = 0;
};

Gateway::Gateway(Backend& backend, RunLedger& ledger, GatewayOptions options, DiagnosticLog* diag)
    : backend_(backend), ledger_(ledger), options_(options), diag_(diag),
      slots_(std::make_shared<Slots>(options.parallel_requests)) {}

ModelResponse Gateway::query(const PromptRequest& request, QueryClass query_class,
                             const std::string& source_key) {
    slots_->acquire();
    struct Release {
        std::shared_ptr<Slots> slots;
        ~Release() { slots->release(); }
    } release{slots_};

    int attempts = 0;
    for (;;) {
        ++attempts;
        try {
            ModelResponse response = backend_.complete(request);
            ledger_.record_attempt(true);
            LedgerEntry entry;
            entry.fingerprint = request.fingerprint;
            entry.query_class = query_class;
            entry.source_key = source_key;
            entry.input_tokens = response.input_tokens;
            entry.output_tokens = response.output_tokens;
            entry.latency_seconds = response.latency_seconds;
            ledger_.add(entry);
            return response;
        } catch (const BackendUnreachable& e) {
            ledger_.record_attempt(false);
            if (attempts > options_.transport_retries)
                throw;
            if (diag_)
                diag_->warn("gateway", std::string("transport failure (attempt ") +
                                           std::to_string(attempts) + "): " + e.what());
            const double delay =
                options_.backoff_seconds * static_cast<double>(1 << (attempts - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
        } catch (const Error&) {
            // non-transport failures (missing script, truncation) are not retried
            ledger_.record_attempt(false);
            throw;
        }
    }
}

} // namespace flowaudit

#include <chrono>

#include "flowaudit/errors.hpp"
#include "flowaudit/gateway.hpp"

#include "httplib.h"
#include "json.hpp"

namespace flowaudit {

namespace {

struct ParsedUrl {
    std::string host_port; // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    ParsedUrl out;
    std::size_t scheme = url.find("://");
    std::size_t path_start =
        scheme == std::string::npos ? url.find('/') : url.find('/', scheme + 3);
    if (path_start == std::string::npos) {
        out.host_port = url;
        out.path = "/";
    } else {
        out.host_port = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

} // namespace

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::id() const {
    return config_.provider + ":" + (config_.model.empty() ? "default" : config_.model);
}

ModelResponse HttpBackend::complete(const PromptRequest& request) {
    const ParsedUrl url = split_url(config_.endpoint);

    nlohmann::json body;
    httplib::Headers headers;
    if (config_.provider == "anthropic") {
        body = {{"model", config_.model},
                {"max_tokens", request.decoding.max_output_tokens},
                {"temperature", request.decoding.temperature},
                {"messages",
                 nlohmann::json::array(
                     {{{"role", "user"}, {"content", request.rendered_text}}})}};
        headers.emplace("x-api-key", config_.api_key);
        headers.emplace("anthropic-version", "2023-06-01");
    } else { // openai-style chat completion
        body = {{"model", config_.model},
                {"max_tokens", request.decoding.max_output_tokens},
                {"temperature", request.decoding.temperature},
                {"messages",
                 nlohmann::json::array(
                     {{{"role", "user"}, {"content", request.rendered_text}}})}};
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);
    }

    httplib::Client client(url.host_port);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);

    const auto start = std::chrono::steady_clock::now();
    httplib::Result result = client.Post(url.path, headers, body.dump(), "application/json");
    const double latency =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!result)
        throw BackendUnreachable(config_.endpoint + ": " + httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300)
        throw BackendUnreachable(config_.endpoint + ": HTTP " + std::to_string(result->status));

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(result->body);
    } catch (const std::exception& e) {
        throw BackendUnreachable(config_.endpoint + ": unparseable response body: " + e.what());
    }

    ModelResponse response;
    response.backend_id = id();
    response.latency_seconds = latency;
    bool truncated = false;
    try {
        if (config_.provider == "anthropic") {
            for (const auto& block : doc.at("content"))
                if (block.value("type", "text") == "text")
                    response.raw_text += block.value("text", "");
            response.input_tokens = doc.at("usage").value("input_tokens", 0L);
            response.output_tokens = doc.at("usage").value("output_tokens", 0L);
            truncated = doc.value("stop_reason", "") == "max_tokens";
        } else {
            const auto& choice = doc.at("choices").at(0);
            response.raw_text = choice.at("message").value("content", "");
            response.input_tokens = doc.at("usage").value("prompt_tokens", 0L);
            response.output_tokens = doc.at("usage").value("completion_tokens", 0L);
            truncated = choice.value("finish_reason", "") == "length";
        }
    } catch (const std::exception& e) {
        throw BackendUnreachable(config_.endpoint + ": unexpected response schema: " + e.what());
    }
    if (truncated)
        throw OutputTruncated(request.fingerprint);
    return response;
}

} // namespace flowaudit

#pragma once

// Chat-completions HTTP backend.
//
// Speaks the ubiquitous /v1/chat/completions shape: one user message
// carrying the rendered prompt, model and temperature from configuration,
// answer read from choices[0].message.content. Provider-specific features
// (tool calls, structured-output modes, streaming) are deliberately not
// used. The client is shared and internally synchronized; transport and
// provider failures surface as BackendError with enough context to debug.

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "ipg/backend.hpp"
#include "ipg/errors.hpp"

namespace ipg {

struct HttpBackendConfig {
    std::string base_url; // e.g. "http://localhost:8080" or "https://api.example.com"
    std::string api_key;  // optional; sent as a bearer token when non-empty
    std::string model;
    int timeout_seconds = 120;
};

// Reads IPG_BACKEND_URL, IPG_BACKEND_KEY, IPG_BACKEND_MODEL.
inline HttpBackendConfig http_config_from_env() {
    HttpBackendConfig cfg;
    const char* url = std::getenv("IPG_BACKEND_URL");
    const char* key = std::getenv("IPG_BACKEND_KEY");
    const char* model = std::getenv("IPG_BACKEND_MODEL");
    if (!url || !*url) throw ConfigError("IPG_BACKEND_URL is not set");
    if (!model || !*model) throw ConfigError("IPG_BACKEND_MODEL is not set");
    cfg.base_url = url;
    cfg.api_key = key ? key : "";
    cfg.model = model;
    return cfg;
}

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config)
        : config_(std::move(config)), client_(config_.base_url) {
        client_.set_connection_timeout(config_.timeout_seconds, 0);
        client_.set_read_timeout(config_.timeout_seconds, 0);
        client_.set_write_timeout(config_.timeout_seconds, 0);
    }

    std::string name() const override { return "http:" + config_.model; }

    std::string complete(const BackendRequest& request) override {
        nlohmann::ordered_json body;
        body["model"] = config_.model;
        body["messages"] = nlohmann::ordered_json::array(
            {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});
        body["temperature"] = request.temperature;

        httplib::Headers headers;
        if (!config_.api_key.empty())
            headers.emplace("Authorization", "Bearer " + config_.api_key);

        httplib::Result res = [&] {
            std::lock_guard<std::mutex> lock(mu_);
            return client_.Post("/v1/chat/completions", headers, body.dump(),
                                "application/json");
        }();

        if (!res)
            throw BackendError("request to " + config_.base_url +
                               " failed: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw BackendError("backend returned HTTP " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 500));
        try {
            auto doc = nlohmann::ordered_json::parse(res->body);
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(std::string("malformed completion response: ") + e.what());
        }
    }

private:
    HttpBackendConfig config_;
    std::mutex mu_;
    httplib::Client client_;
};

} // namespace ipg

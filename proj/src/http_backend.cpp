#include <httplib.h>

#include <cstdlib>
#include <thread>

#include "armeval/llmgw.hpp"

namespace armeval {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return (v && *v) ? std::string(v) : fallback;
}

class HttpChatBackend : public Backend {
  public:
    explicit HttpChatBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.base_url.empty()) throw UsageError("backend base URL is empty");
    }

    LlmResponse complete(const LlmRequest& request) override {
        const auto [path, body, headers] = build(request);
        auto backoff = cfg_.retry.initial_backoff;
        std::string last_error;
        for (int attempt = 1; attempt <= cfg_.retry.max_attempts; ++attempt) {
            httplib::Client client(cfg_.base_url);
            client.set_connection_timeout(cfg_.timeout);
            client.set_read_timeout(cfg_.timeout);
            auto res = client.Post(path, headers, body, "application/json");
            if (!res) {
                last_error = "connection error: " + httplib::to_string(res.error());
            } else if (res->status == 200) {
                return {parse(res->body), false, id()};
            } else if (res->status == 429 || res->status >= 500) {
                last_error = "HTTP " + std::to_string(res->status);
            } else {
                throw TransportError("HTTP " + std::to_string(res->status) + " from " + cfg_.base_url + path + ": " +
                                     res->body.substr(0, 500));
            }
            if (attempt < cfg_.retry.max_attempts) {
                std::this_thread::sleep_for(backoff);
                backoff = std::chrono::milliseconds(
                    static_cast<long long>(static_cast<double>(backoff.count()) * cfg_.retry.backoff_multiplier));
            }
        }
        throw TransportError("request failed after " + std::to_string(cfg_.retry.max_attempts) +
                             " attempts: " + last_error);
    }

    [[nodiscard]] std::string id() const override {
        return std::string(cfg_.flavor == ApiFlavor::anthropic ? "anthropic" : "openai") + "@" + cfg_.base_url;
    }

  private:
    struct Built {
        std::string path;
        std::string body;
        httplib::Headers headers;
    };

    Built build(const LlmRequest& r) const {
        if (cfg_.flavor == ApiFlavor::anthropic) {
            json body = {{"model", r.model},
                         {"max_tokens", r.max_tokens},
                         {"temperature", r.temperature},
                         {"messages", json::array({{{"role", "user"}, {"content", r.user}}})}};
            if (!r.system.empty()) body["system"] = r.system;
            return {"/v1/messages", body.dump(),
                    {{"x-api-key", cfg_.api_key}, {"anthropic-version", "2023-06-01"}}};
        }
        json messages = json::array();
        if (!r.system.empty()) messages.push_back({{"role", "system"}, {"content", r.system}});
        messages.push_back({{"role", "user"}, {"content", r.user}});
        json body = {{"model", r.model},
                     {"max_tokens", r.max_tokens},
                     {"temperature", r.temperature},
                     {"messages", messages}};
        return {"/v1/chat/completions", body.dump(), {{"Authorization", "Bearer " + cfg_.api_key}}};
    }

    std::string parse(const std::string& body) const {
        try {
            const json doc = json::parse(body);
            if (cfg_.flavor == ApiFlavor::anthropic) {
                std::string out;
                for (const auto& block : doc.at("content"))
                    if (block.value("type", "") == "text") out += block.at("text").get<std::string>();
                return out;
            }
            return doc.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw TransportError(std::string("unexpected response body: ") + e.what());
        }
    }

    HttpBackendConfig cfg_;
};

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env(ApiFlavor flavor) {
    HttpBackendConfig cfg;
    cfg.flavor = flavor;
    if (flavor == ApiFlavor::anthropic) {
        cfg.base_url = env_or("ANTHROPIC_BASE_URL", "https://api.anthropic.com");
        cfg.api_key = env_or("ANTHROPIC_API_KEY", "");
    } else {
        cfg.base_url = env_or("OPENAI_BASE_URL", "https://api.openai.com");
        cfg.api_key = env_or("OPENAI_API_KEY", "");
    }
    if (cfg.api_key.empty())
        throw UsageError(std::string(flavor == ApiFlavor::anthropic ? "ANTHROPIC_API_KEY" : "OPENAI_API_KEY") +
                         " is not set");
    return cfg;
}

std::unique_ptr<Backend> make_http_backend(HttpBackendConfig config) {
    return std::make_unique<HttpChatBackend>(std::move(config));
}

}  // namespace armeval

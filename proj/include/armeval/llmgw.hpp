#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "armeval/errors.hpp"
#include "armeval/prompts.hpp"

namespace armeval {

struct LlmRequest {
    std::string model;
    std::string system;
    std::string user;
    double temperature = 0.0;
    int max_tokens = 2048;
    int sample_index = 0;  // self-consistency samples
    int attempt = 0;       // re-asks after an extraction failure

    /// SHA-256 over (model, system, user, temperature, sample_index, attempt).
    [[nodiscard]] std::string digest() const;
    [[nodiscard]] nlohmann::json key_json() const;
};

struct LlmResponse {
    std::string raw_text;
    bool cached = false;
    std::string backend_id;
};

class Backend {
  public:
    virtual ~Backend() = default;
    virtual LlmResponse complete(const LlmRequest& request) = 0;
    [[nodiscard]] virtual std::string id() const = 0;
};

std::string sha256_hex(std::string_view data);

// --- HTTP backends -----------------------------------------------------------

enum class ApiFlavor { openai, anthropic };

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{500};
    double backoff_multiplier = 2.0;
};

struct HttpBackendConfig {
    ApiFlavor flavor = ApiFlavor::openai;
    std::string base_url;  // e.g. https://api.openai.com
    std::string api_key;
    RetryPolicy retry;
    std::chrono::seconds timeout{120};

    /// OPENAI_API_KEY / OPENAI_BASE_URL or ANTHROPIC_API_KEY / ANTHROPIC_BASE_URL.
    static HttpBackendConfig from_env(ApiFlavor flavor);
};

/// Chat-completion client. Retries connection failures, 429 and 5xx with
/// exponential backoff; other HTTP errors fail immediately.
std::unique_ptr<Backend> make_http_backend(HttpBackendConfig config);

/// Choose a flavor from the model name: "claude*" is Anthropic, everything
/// else speaks the OpenAI chat-completions protocol.
ApiFlavor flavor_for_model(std::string_view model);

// --- scripted backend --------------------------------------------------------

/// Deterministic backend driven by a callback. Used by tests and by the
/// `script:` backend spec for building fixture caches offline.
class ScriptedBackend : public Backend {
  public:
    using Responder = std::function<std::string(const LlmRequest&)>;

    explicit ScriptedBackend(Responder responder, std::string id = "scripted");

    /// JSON script: {"rules": [{"contains": [..], "response": ".."}], "default": ".."}.
    /// The first rule whose every `contains` string occurs in the user
    /// prompt wins; optional "sample_index"/"attempt" fields narrow a rule.
    static std::unique_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);

    LlmResponse complete(const LlmRequest& request) override;
    [[nodiscard]] std::string id() const override { return id_; }
    [[nodiscard]] std::size_t calls() const;

  private:
    Responder responder_;
    std::string id_;
    mutable std::mutex mu_;
    std::size_t calls_ = 0;
};

// --- replay cache ------------------------------------------------------------

/// Content-addressed response store: `objects/<digest>.json` plus a sorted
/// `index.json`. Writes are serialized and atomic per file.
class ReplayCache {
  public:
    explicit ReplayCache(std::filesystem::path dir);

    [[nodiscard]] std::optional<LlmResponse> get(const LlmRequest& request) const;
    void put(const LlmRequest& request, const LlmResponse& response);
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }
    /// SHA-256 of the index file contents; "empty" when nothing is stored.
    [[nodiscard]] std::string content_digest() const;

  private:
    void write_index() const;

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::map<std::string, nlohmann::json> index_;
};

enum class BackendMode { live, record, replay };

BackendMode parse_backend_mode(std::string_view s);
std::string_view to_string(BackendMode m);

/// live: pass-through. record: serve hits from the cache, otherwise call
/// `inner` and persist before returning. replay: cache only; a miss throws
/// CacheMissError and no inner backend is needed.
class CachingBackend : public Backend {
  public:
    CachingBackend(BackendMode mode, std::shared_ptr<ReplayCache> cache, std::unique_ptr<Backend> inner);

    LlmResponse complete(const LlmRequest& request) override;
    [[nodiscard]] std::string id() const override;

  private:
    BackendMode mode_;
    std::shared_ptr<ReplayCache> cache_;
    std::unique_ptr<Backend> inner_;
};

// --- extraction --------------------------------------------------------------

enum class Arity { exactly_one, one_or_more };

/// Inner text of each `<tag>...</tag>` span in order, whitespace-trimmed.
/// Spans that are empty after trimming are ignored. Throws ExtractionError
/// when the count does not satisfy `arity`.
std::vector<std::string> extract_tagged(std::string_view text, std::string_view tag, Arity arity);

/// `text` with every `<tag>...</tag>` span removed, trimmed.
std::string strip_tagged(std::string_view text, std::string_view tag);

/// Case-insensitive "yes"/"no"; anything else is nullopt.
std::optional<bool> parse_yes_no(std::string_view answer);

/// Issue `request`; if `extract` throws ExtractionError, re-ask once with
/// attempt+1. Every raw response is appended to `raw_log`. Returns nullopt
/// when both attempts fail to parse.
template <typename T>
std::optional<T> ask_with_reask(Backend& backend, LlmRequest request,
                                const std::function<T(const std::string&)>& extract,
                                std::vector<std::string>& raw_log) {
    for (int i = 0; i < 2; ++i) {
        LlmResponse resp = backend.complete(request);
        raw_log.push_back(resp.raw_text);
        try {
            return extract(resp.raw_text);
        } catch (const ExtractionError&) {
            ++request.attempt;
        }
    }
    return std::nullopt;
}

}  // namespace armeval

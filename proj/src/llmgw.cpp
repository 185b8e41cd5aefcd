#include "armeval/llmgw.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "armeval/textproc.hpp"

namespace armeval {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

json LlmRequest::key_json() const {
    return {{"model", model},
            {"system", system},
            {"user", user},
            {"temperature", temperature},
            {"sample_index", sample_index},
            {"attempt", attempt}};
}

std::string LlmRequest::digest() const { return sha256_hex(key_json().dump()); }

ApiFlavor flavor_for_model(std::string_view model) {
    return model.rfind("claude", 0) == 0 ? ApiFlavor::anthropic : ApiFlavor::openai;
}

// --- scripted ---------------------------------------------------------------

ScriptedBackend::ScriptedBackend(Responder responder, std::string id)
    : responder_(std::move(responder)), id_(std::move(id)) {}

LlmResponse ScriptedBackend::complete(const LlmRequest& request) {
    {
        std::lock_guard lock(mu_);
        ++calls_;
    }
    return {responder_(request), false, id_};
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open script file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError("script file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    struct Rule {
        std::vector<std::string> contains;
        std::optional<int> sample_index;
        std::optional<int> attempt;
        std::string response;
    };
    std::vector<Rule> rules;
    for (const auto& r : doc.value("rules", json::array())) {
        Rule rule;
        const json& c = r.at("contains");
        if (c.is_string()) {
            rule.contains.push_back(c.get<std::string>());
        } else {
            rule.contains = c.get<std::vector<std::string>>();
        }
        if (r.contains("sample_index")) rule.sample_index = r.at("sample_index").get<int>();
        if (r.contains("attempt")) rule.attempt = r.at("attempt").get<int>();
        rule.response = r.at("response").get<std::string>();
        rules.push_back(std::move(rule));
    }
    std::optional<std::string> fallback;
    if (doc.contains("default")) fallback = doc.at("default").get<std::string>();
    const std::string id = "script:" + path.filename().string();
    return std::make_unique<ScriptedBackend>(
        [rules = std::move(rules), fallback](const LlmRequest& req) -> std::string {
            for (const auto& r : rules) {
                if (r.sample_index && *r.sample_index != req.sample_index) continue;
                if (r.attempt && *r.attempt != req.attempt) continue;
                const bool all = std::all_of(r.contains.begin(), r.contains.end(), [&](const std::string& s) {
                    return req.user.find(s) != std::string::npos;
                });
                if (all) return r.response;
            }
            if (fallback) return *fallback;
            throw BackendError("script has no rule for request " + req.digest());
        },
        id);
}

// --- replay cache ------------------------------------------------------------

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw BackendError("cannot write cache file '" + tmp.string() + "'");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ReplayCache::ReplayCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    const auto index = dir_ / "index.json";
    if (std::filesystem::exists(index)) {
        try {
            const json doc = json::parse(slurp(index));
            for (auto it = doc.at("entries").begin(); it != doc.at("entries").end(); ++it)
                index_.emplace(it.key(), it.value());
        } catch (const json::exception& e) {
            throw BackendError("corrupt cache index '" + index.string() + "': " + e.what());
        }
    }
}

std::optional<LlmResponse> ReplayCache::get(const LlmRequest& request) const {
    const std::string digest = request.digest();
    {
        std::lock_guard lock(mu_);
        if (!index_.count(digest)) return std::nullopt;
    }
    const auto obj = dir_ / "objects" / (digest + ".json");
    if (!std::filesystem::exists(obj)) throw BackendError("cache object missing for indexed request " + digest);
    json doc;
    try {
        doc = json::parse(slurp(obj));
    } catch (const json::exception& e) {
        throw BackendError("corrupt cache object " + digest + ": " + e.what());
    }
    return LlmResponse{doc.at("response").at("raw_text").get<std::string>(), true,
                       doc.at("response").value("backend_id", std::string("cache"))};
}

void ReplayCache::put(const LlmRequest& request, const LlmResponse& response) {
    const std::string digest = request.digest();
    const json obj = {{"request", request.key_json()},
                      {"response", {{"raw_text", response.raw_text}, {"backend_id", response.backend_id}}}};
    std::lock_guard lock(mu_);
    std::filesystem::create_directories(dir_ / "objects");
    write_atomic(dir_ / "objects" / (digest + ".json"), obj.dump(2) + "\n");
    index_[digest] = {{"model", request.model},
                      {"sample_index", request.sample_index},
                      {"attempt", request.attempt},
                      {"temperature", request.temperature}};
    write_index();
}

void ReplayCache::write_index() const {
    json entries = json::object();
    for (const auto& [k, v] : index_) entries[k] = v;
    write_atomic(dir_ / "index.json", json{{"version", 1}, {"entries", entries}}.dump(2) + "\n");
}

std::size_t ReplayCache::size() const {
    std::lock_guard lock(mu_);
    return index_.size();
}

std::string ReplayCache::content_digest() const {
    std::lock_guard lock(mu_);
    if (index_.empty()) return "empty";
    json entries = json::object();
    for (const auto& [k, v] : index_) entries[k] = v;
    return sha256_hex(entries.dump());
}

BackendMode parse_backend_mode(std::string_view s) {
    if (s == "live") return BackendMode::live;
    if (s == "record") return BackendMode::record;
    if (s == "replay") return BackendMode::replay;
    throw UsageError("mode must be live, record or replay (got '" + std::string(s) + "')");
}

std::string_view to_string(BackendMode m) {
    switch (m) {
        case BackendMode::live: return "live";
        case BackendMode::record: return "record";
        case BackendMode::replay: return "replay";
    }
    return "?";
}

CachingBackend::CachingBackend(BackendMode mode, std::shared_ptr<ReplayCache> cache, std::unique_ptr<Backend> inner)
    : mode_(mode), cache_(std::move(cache)), inner_(std::move(inner)) {
    if (mode_ != BackendMode::live && !cache_) throw UsageError("record/replay mode requires a cache");
    if (mode_ != BackendMode::replay && !inner_) throw UsageError("live/record mode requires a backend");
}

LlmResponse CachingBackend::complete(const LlmRequest& request) {
    if (mode_ == BackendMode::live) return inner_->complete(request);
    if (auto hit = cache_->get(request)) return *hit;
    if (mode_ == BackendMode::replay) throw CacheMissError(request.digest());
    LlmResponse resp = inner_->complete(request);
    cache_->put(request, resp);
    return resp;
}

std::string CachingBackend::id() const {
    std::string base = inner_ ? inner_->id() : std::string("cache");
    return base + "+" + std::string(to_string(mode_));
}

// --- extraction -------------------------------------------------------------

std::vector<std::string> extract_tagged(std::string_view text, std::string_view tag, Arity arity) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t a = text.find(open, pos);
        if (a == std::string_view::npos) break;
        const std::size_t b = text.find(close, a + open.size());
        if (b == std::string_view::npos) break;
        const std::string_view inner = trim(text.substr(a + open.size(), b - a - open.size()));
        if (!inner.empty()) out.emplace_back(inner);
        pos = b + close.size();
    }
    if (out.empty()) throw ExtractionError("no <" + std::string(tag) + "> span in model output");
    if (arity == Arity::exactly_one && out.size() != 1)
        throw ExtractionError("expected exactly one <" + std::string(tag) + "> span, found " + std::to_string(out.size()));
    return out;
}

std::string strip_tagged(std::string_view text, std::string_view tag) {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t a = text.find(open, pos);
        const std::size_t b = a == std::string_view::npos ? a : text.find(close, a + open.size());
        if (b == std::string_view::npos) {
            out += text.substr(pos);
            break;
        }
        out += text.substr(pos, a - pos);
        pos = b + close.size();
    }
    return std::string(trim(out));
}

std::optional<bool> parse_yes_no(std::string_view answer) {
    std::string s(trim(answer));
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "yes") return true;
    if (s == "no") return false;
    return std::nullopt;
}

}  // namespace armeval

#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "armeval/llmgw.hpp"
#include "test_support.hpp"

using namespace armeval;
using nlohmann::json;

namespace {

LlmRequest req(std::string user = "hello") {
    LlmRequest r;
    r.model = "m";
    r.system = "s";
    r.user = std::move(user);
    return r;
}

std::unique_ptr<ScriptedBackend> echo_backend() {
    return std::make_unique<ScriptedBackend>([](const LlmRequest& r) { return "echo:" + r.user; }, "echo");
}

}  // namespace

TEST_CASE("sha256 of known inputs") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("request digest covers every key field") {
    const auto base = req();
    CHECK(base.digest() == req().digest());
    CHECK(base.digest().size() == 64);
    auto a = base;
    a.model = "other";
    auto b = base;
    b.system = "other";
    auto c = base;
    c.user = "other";
    auto d = base;
    d.temperature = 0.7;
    auto e = base;
    e.sample_index = 1;
    auto f = base;
    f.attempt = 1;
    for (const auto* x : {&a, &b, &c, &d, &e, &f}) CHECK(x->digest() != base.digest());
    auto g = base;
    g.max_tokens = 17;  // not part of the key
    CHECK(g.digest() == base.digest());
}

TEST_CASE("replay cache persists across instances") {
    const auto dir = scratch_dir("cache_persist");
    {
        ReplayCache cache(dir);
        CHECK(cache.size() == 0);
        CHECK(cache.content_digest() == "empty");
        cache.put(req("one"), {"r1", false, "x"});
        cache.put(req("two"), {"r2", false, "x"});
    }
    ReplayCache again(dir);
    CHECK(again.size() == 2);
    REQUIRE(again.get(req("one")).has_value());
    CHECK(again.get(req("one"))->raw_text == "r1");
    CHECK(again.get(req("one"))->cached);
    CHECK_FALSE(again.get(req("three")).has_value());
    CHECK(std::filesystem::exists(dir / "index.json"));
    CHECK(std::filesystem::exists(dir / "objects" / (req("one").digest() + ".json")));
}

TEST_CASE("cache digest depends on content, not insertion order") {
    const auto d1 = scratch_dir("cache_order1"), d2 = scratch_dir("cache_order2");
    ReplayCache c1(d1), c2(d2);
    c1.put(req("a"), {"A", false, ""});
    c1.put(req("b"), {"B", false, ""});
    c2.put(req("b"), {"B", false, ""});
    c2.put(req("a"), {"A", false, ""});
    CHECK(c1.content_digest() == c2.content_digest());
    CHECK(slurp(d1 / "index.json") == slurp(d2 / "index.json"));
}

TEST_CASE("record then replay serves identical text without the inner backend") {
    const auto dir = scratch_dir("cache_record");
    auto cache = std::make_shared<ReplayCache>(dir);
    auto inner = echo_backend();
    auto* raw_inner = inner.get();
    CachingBackend rec(BackendMode::record, cache, std::move(inner));
    const auto first = rec.complete(req("q"));
    CHECK(first.raw_text == "echo:q");
    CHECK_FALSE(first.cached);
    const auto second = rec.complete(req("q"));
    CHECK(second.cached);
    CHECK(raw_inner->calls() == 1);

    CachingBackend replay(BackendMode::replay, std::make_shared<ReplayCache>(dir), nullptr);
    CHECK(replay.complete(req("q")).raw_text == "echo:q");
    CHECK_THROWS_AS(replay.complete(req("unseen")), CacheMissError);
    try {
        replay.complete(req("unseen"));
    } catch (const CacheMissError& e) {
        CHECK(e.digest() == req("unseen").digest());
    }
}

TEST_CASE("live mode never touches the cache") {
    const auto dir = scratch_dir("cache_live");
    auto cache = std::make_shared<ReplayCache>(dir);
    CachingBackend live(BackendMode::live, cache, echo_backend());
    CHECK(live.complete(req("z")).raw_text == "echo:z");
    CHECK(cache->size() == 0);
    CHECK_THROWS_AS(CachingBackend(BackendMode::record, cache, nullptr), UsageError);
}

TEST_CASE("backend mode parsing") {
    CHECK(parse_backend_mode("live") == BackendMode::live);
    CHECK(parse_backend_mode("record") == BackendMode::record);
    CHECK(parse_backend_mode("replay") == BackendMode::replay);
    CHECK_THROWS_AS(parse_backend_mode("cassette"), UsageError);
}

TEST_CASE("tagged span extraction") {
    CHECK(extract_tagged("x <answer> Yes </answer> y", "answer", Arity::exactly_one) == std::vector<std::string>{"Yes"});
    CHECK(extract_tagged("<item>a</item>\n<item>b</item>", "item", Arity::one_or_more) ==
          std::vector<std::string>{"a", "b"});
    CHECK(extract_tagged("<item>a</item><item>  </item>", "item", Arity::one_or_more) == std::vector<std::string>{"a"});
    CHECK_THROWS_AS(extract_tagged("no tags", "answer", Arity::exactly_one), ExtractionError);
    CHECK_THROWS_AS(extract_tagged("<answer>a</answer><answer>b</answer>", "answer", Arity::exactly_one),
                    ExtractionError);
    CHECK_THROWS_AS(extract_tagged("<answer>unterminated", "answer", Arity::exactly_one), ExtractionError);
    CHECK_THROWS_AS(extract_tagged("<answer> </answer>", "answer", Arity::exactly_one), ExtractionError);
    CHECK(strip_tagged("Because reasons.\n\n<answer>New text.</answer>", "answer") == "Because reasons.");
}

TEST_CASE("yes/no parsing") {
    CHECK(parse_yes_no("Yes") == true);
    CHECK(parse_yes_no(" no ") == false);
    CHECK(parse_yes_no("YES") == true);
    CHECK_FALSE(parse_yes_no("maybe").has_value());
}

TEST_CASE("ask_with_reask retries once with a new attempt number") {
    ScriptedBackend b([](const LlmRequest& r) {
        return r.attempt == 0 ? std::string("garbage") : std::string("<answer>ok</answer>");
    });
    std::vector<std::string> log;
    const std::function<std::string(const std::string&)> ex = [](const std::string& raw) {
        return extract_tagged(raw, "answer", Arity::exactly_one).front();
    };
    CHECK(ask_with_reask<std::string>(b, req(), ex, log) == std::optional<std::string>("ok"));
    CHECK(log.size() == 2);

    ScriptedBackend never([](const LlmRequest&) { return std::string("garbage"); });
    log.clear();
    CHECK_FALSE(ask_with_reask<std::string>(never, req(), ex, log).has_value());
    CHECK(log.size() == 2);
}

TEST_CASE("script files drive the scripted backend") {
    const auto dir = scratch_dir("script");
    {
        std::ofstream(dir / "s.json") << R"({"rules": [
            {"contains": ["alpha", "beta"], "response": "both"},
            {"contains": "alpha", "attempt": 1, "response": "retry"},
            {"contains": "alpha", "response": "first"}],
          "default": "fallback"})";
    }
    auto b = ScriptedBackend::from_file(dir / "s.json");
    CHECK(b->complete(req("alpha beta")).raw_text == "both");
    CHECK(b->complete(req("alpha")).raw_text == "first");
    auto r = req("alpha");
    r.attempt = 1;
    CHECK(b->complete(r).raw_text == "retry");
    CHECK(b->complete(req("gamma")).raw_text == "fallback");
    CHECK(b->calls() == 4);
    CHECK_THROWS_AS(ScriptedBackend::from_file(dir / "missing.json"), UsageError);
}

TEST_CASE("model names pick the API flavor") {
    CHECK(flavor_for_model("claude-3-5-sonnet-20240620") == ApiFlavor::anthropic);
    CHECK(flavor_for_model("gpt-4-0613") == ApiFlavor::openai);
}

namespace {

struct LocalServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    LocalServer() {
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LocalServer() {
        server.stop();
        thread.join();
    }
    [[nodiscard]] std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

HttpBackendConfig fast_config(ApiFlavor flavor, const std::string& url) {
    HttpBackendConfig cfg;
    cfg.flavor = flavor;
    cfg.base_url = url;
    cfg.api_key = "test-key";
    cfg.retry.initial_backoff = std::chrono::milliseconds(1);
    cfg.timeout = std::chrono::seconds(5);
    return cfg;
}

}  // namespace

TEST_CASE("openai client retries 5xx and 429 then succeeds") {
    LocalServer srv;
    std::atomic<int> hits{0};
    json seen;
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request& rq, httplib::Response& rs) {
        const int n = ++hits;
        if (n == 1) {
            rs.status = 503;
            return;
        }
        if (n == 2) {
            rs.status = 429;
            return;
        }
        seen = json::parse(rq.body);
        CHECK(rq.get_header_value("Authorization") == "Bearer test-key");
        rs.set_content(R"({"choices":[{"message":{"role":"assistant","content":"<answer>Yes</answer>"}}]})",
                       "application/json");
    });
    auto b = make_http_backend(fast_config(ApiFlavor::openai, srv.url()));
    auto r = req("question");
    r.temperature = 0.7;
    CHECK(b->complete(r).raw_text == "<answer>Yes</answer>");
    CHECK(hits == 3);
    CHECK(seen["model"] == "m");
    CHECK(seen["temperature"] == 0.7);
    CHECK(seen["messages"][0]["role"] == "system");
    CHECK(seen["messages"][1]["content"] == "question");
}

TEST_CASE("anthropic client sends its headers and reads content blocks") {
    LocalServer srv;
    srv.server.Post("/v1/messages", [&](const httplib::Request& rq, httplib::Response& rs) {
        CHECK(rq.get_header_value("x-api-key") == "test-key");
        CHECK(rq.get_header_value("anthropic-version") == "2023-06-01");
        const auto body = json::parse(rq.body);
        CHECK(body["system"] == "s");
        rs.set_content(R"({"content":[{"type":"text","text":"part one "},{"type":"text","text":"part two"}]})",
                       "application/json");
    });
    auto b = make_http_backend(fast_config(ApiFlavor::anthropic, srv.url()));
    CHECK(b->complete(req()).raw_text == "part one part two");
}

TEST_CASE("client errors fail fast and retries are bounded") {
    LocalServer srv;
    std::atomic<int> hits{0};
    srv.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& rs) {
        ++hits;
        rs.status = 400;
        rs.set_content("bad request", "text/plain");
    });
    auto b = make_http_backend(fast_config(ApiFlavor::openai, srv.url()));
    CHECK_THROWS_AS(b->complete(req()), TransportError);
    CHECK(hits == 1);

    LocalServer down;
    std::atomic<int> down_hits{0};
    down.server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& rs) {
        ++down_hits;
        rs.status = 500;
    });
    auto cfg = fast_config(ApiFlavor::openai, down.url());
    cfg.retry.max_attempts = 3;
    auto b2 = make_http_backend(cfg);
    CHECK_THROWS_AS(b2->complete(req()), TransportError);
    CHECK(down_hits == 3);
}

#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "armeval/commands.hpp"
#include "armeval/errors.hpp"
#include "test_support.hpp"

using namespace armeval;
using nlohmann::json;

namespace {

RunConfig replay_config(const std::string& out) {
    RunConfig cfg;
    cfg.corpus = test_data("fixtures/mini/corpus.json");
    cfg.model = "scripted-model";
    cfg.mode = BackendMode::replay;
    cfg.cache = test_data("fixtures/mini/cache");
    cfg.seed = 7;
    cfg.out = scratch_dir(out);
    return cfg;
}

int code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (...) {
        return exit_code_for(std::current_exception());
    }
    return exit_ok;
}

}  // namespace

TEST_CASE("gold layers") {
    const Corpus c = load_corpus(test_data("fixtures/mini/corpus.json"));
    const auto subj = gold_labels(c, GoldLayer::subjectivity);
    const auto faith = gold_labels(c, GoldLayer::faithfulness);
    const auto either = gold_labels(c, GoldLayer::subj_or_unfaith);
    CHECK(subj.size() == 21);
    CHECK(faith.size() == 21);
    CHECK(either.size() == 21);
    CHECK(subj.at("orchard-llm-a-3") == false);
    CHECK(faith.at("orchard-llm-a-3") == true);
    CHECK(either.at("orchard-llm-a-3") == true);
    CHECK(subj.at("violin-human-1-2") == true);
    CHECK(faith.at("violin-human-1-2") == false);
    CHECK_FALSE(subj.count("lighthouse-llm-b-3"));
    CHECK(parse_gold_layer("subj_or_unfaith") == GoldLayer::subj_or_unfaith);
    CHECK_THROWS_AS(parse_gold_layer("nope"), UsageError);
}

TEST_CASE("exit codes follow the error type") {
    CHECK(code_of([] { throw UsageError("u"); }) == exit_usage);
    CHECK(code_of([] { throw DataError("d"); }) == exit_data);
    CHECK(code_of([] { throw CacheMissError("abc"); }) == exit_backend);
    CHECK(code_of([] { throw TransportError("t"); }) == exit_backend);
    CHECK(code_of([] {}) == exit_ok);
}

TEST_CASE("replayed arm run reproduces the recorded numbers") {
    auto cfg = replay_config("cmd_arm");
    std::ostringstream log;
    const auto rep = cmd_arm(cfg, log);
    CHECK(rep.find("rewrite_count")->get<std::size_t>() == 10);
    CHECK(rep.find("parse_failures")->get<std::size_t>() == 0);
    CHECK(rep.find("tp")->get<std::size_t>() == 9);
    CHECK(rep.find("fp")->get<std::size_t>() == 1);
    CHECK(rep.find("tn")->get<std::size_t>() == 11);
    CHECK(rep.find("fn")->get<std::size_t>() == 0);
    CHECK(rep.find("balanced_accuracy")->get<double>() == doctest::Approx(100.0 * (1.0 + 11.0 / 12.0) / 2.0));
    CHECK(rep.find("explanation_points")->get<std::size_t>() == 12);
    for (const char* f : {"arm_results.json", "arm_report.json", "arm_report.txt", "arm_report.csv"})
        CHECK(std::filesystem::exists(cfg.out / f));
    const auto results = json::parse(slurp(cfg.out / "arm_results.json"));
    CHECK(results.at("manifest").at("run_id") == rep.manifest.run_id);
    CHECK(slurp(cfg.out / "arm_report.csv").find(rep.manifest.config_digest) != std::string::npos);
    CHECK(log.str().find("rewrite_summary") != std::string::npos);
}

TEST_CASE("gold layer changes the scoring, not the run") {
    auto cfg = replay_config("cmd_arm_faith");
    cfg.gold = GoldLayer::faithfulness;
    std::ostringstream log;
    const auto rep = cmd_arm(cfg, log);
    // every unfaithful claim in the fixture is rewritten; two faithful subjective ones are too
    CHECK(rep.find("tp")->get<std::size_t>() == 8);
    CHECK(rep.find("fp")->get<std::size_t>() == 2);
    CHECK(rep.find("rewrite_count")->get<std::size_t>() == 10);
}

TEST_CASE("replayed baselines and synth") {
    std::ostringstream log;
    for (const char* m : {"zero_shot", "few_shot", "self_consistency"}) {
        auto cfg = replay_config(std::string("cmd_baseline_") + m);
        cfg.method = m;
        const auto rep = cmd_baseline(cfg, log);
        CHECK(rep.find("parse_failures")->get<std::size_t>() == 0);
        CHECK(rep.find("claims")->get<std::size_t>() == 21);
    }
    auto cfg = replay_config("cmd_synth");
    const auto rep = cmd_synth(cfg, log);
    CHECK(rep.find("variants_accepted")->get<std::size_t>() == 21);
    CHECK(std::filesystem::exists(cfg.out / "spliced_corpus.json"));
    CHECK(std::filesystem::exists(cfg.out / "finetune.jsonl"));
    CHECK_NOTHROW(load_corpus(cfg.out / "spliced_corpus.json"));
}

TEST_CASE("configuration errors") {
    std::ostringstream log;
    auto missing_cache = replay_config("cmd_err1");
    missing_cache.cache = missing_cache.out / "nope";
    CHECK_THROWS_AS(cmd_arm(missing_cache, log), UsageError);

    auto no_model = replay_config("cmd_err2");
    no_model.model.clear();
    CHECK_THROWS_AS(cmd_arm(no_model, log), UsageError);

    auto other_model = replay_config("cmd_err3");
    other_model.model = "never-recorded";
    CHECK_THROWS_AS(cmd_arm(other_model, log), CacheMissError);

    auto empty = replay_config("cmd_err4");
    std::ofstream(empty.out / "empty.json") << R"({"schema_version":"1","stories":[],"summaries":[]})";
    empty.corpus = empty.out / "empty.json";
    CHECK_THROWS_AS(cmd_arm(empty, log), DataError);
}

TEST_CASE("validate reports partial layers with a warning") {
    const auto dir = scratch_dir("cmd_validate");
    std::ofstream(dir / "c.json") << R"({"schema_version":"1",
      "stories":[{"id":"s","title":"","text":"Story."}],
      "summaries":[{"id":"m","story_id":"s","writer":"w","writer_kind":"llm","claims":[
        {"id":"c1","text":"One.","faithfulness_labels":[{"annotator_id":"a","value":"faithful"}]},
        {"id":"c2","text":"Two.","subjectivity":"objective",
         "faithfulness_labels":[{"annotator_id":"a","value":"faithful"}]}]}]})";
    RunConfig cfg;
    cfg.corpus = dir / "c.json";
    std::ostringstream log;
    const auto rep = cmd_validate(cfg, log);
    CHECK(rep.find("count/faithful/objective")->get<std::size_t>() == 1);
    CHECK(rep.find("unlabeled_subjectivity")->get<std::size_t>() == 1);
    CHECK(log.str().find("warning") != std::string::npos);
}

TEST_CASE("stats over an annotation file") {
    const auto dir = scratch_dir("cmd_stats");
    json doc = {{"schema_version", "1"}, {"agreement", json::array()}, {"explanations", json::array()}};
    for (int i = 0; i < 10; ++i) {
        doc["agreement"].push_back({{"item_id", "o" + std::to_string(i)},
                                    {"group", "original"},
                                    {"labels", i < 3 ? json{"faithful", "faithful", "faithful"}
                                                     : json{"faithful", "unfaithful", "unfaithful"}}});
        doc["agreement"].push_back({{"item_id", "r" + std::to_string(i)},
                                    {"group", "rewrite"},
                                    {"labels", i < 8 ? json{"faithful", "faithful", "faithful"}
                                                     : json{"faithful", "faithful", "unfaithful"}}});
    }
    doc["explanations"].push_back(
        {{"rewrite_id", "x"},
         {"points", {{{"text", "a"}, {"labels", {{"p", "IMPORTANT"}, {"q", "IMPORTANT"}, {"r", "NEUTRAL"}}}},
                     {{"text", "b"}, {"labels", {{"p", "WRONG"}, {"q", "NEUTRAL"}, {"r", "NEUTRAL"}}}},
                     {{"text", "c"}, {"is_decoy", true}, {"labels", {{"p", "WRONG"}, {"q", "WRONG"}, {"r", "WRONG"}}}}}}});
    std::ofstream(dir / "ann.json") << doc.dump();

    RunConfig cfg;
    cfg.annotations = dir / "ann.json";
    cfg.compare = "original:rewrite";
    cfg.trials = 2000;
    cfg.out = dir / "out";
    std::ostringstream log;
    const auto rep = cmd_stats(cfg, log);
    CHECK(rep.find("agreement/original")->get<double>() == 30.0);
    CHECK(rep.find("agreement/rewrite")->get<double>() == 80.0);
    CHECK(rep.find("faithful/original")->get<double>() == 30.0);
    CHECK(rep.find("faithful/rewrite")->get<double>() == 100.0);
    CHECK(rep.find("p_agreement")->get<double>() < 0.1);
    CHECK(rep.find("pct_important/all/majority")->get<double>() == 50.0);
    CHECK(rep.find("pct_important/all/individual")->get<double>() == doctest::Approx(100.0 * (0.5 + 0.5 + 0.0) / 3.0));
    CHECK(rep.find("pct_none_wrong/all/majority")->get<double>() == 100.0);
    CHECK(std::filesystem::exists(cfg.out / "stats_report.csv"));

    cfg.compare = "original:missing";
    CHECK_THROWS_AS(cmd_stats(cfg, log), UsageError);
}

#include <doctest.h>

#include <nlohmann/json.hpp>

#include "armeval/corpus.hpp"
#include "armeval/errors.hpp"
#include "test_support.hpp"

using namespace armeval;
using nlohmann::json;

namespace {

json tiny_doc() {
    return json::parse(R"({
      "schema_version": "1",
      "stories": [{"id": "s1", "title": "T", "text": "A story."}],
      "summaries": [{"id": "m1", "story_id": "s1", "writer": "w", "writer_kind": "llm",
        "claims": [
          {"id": "c1", "text": "It rained.", "subjectivity": "objective",
           "faithfulness_labels": [{"annotator_id": "a", "value": "faithful"}]},
          {"id": "c2", "text": "It was sad.", "subjectivity": "subjective", "ambiguity_type": 2,
           "faithfulness_labels": [{"annotator_id": "a", "value": "unfaithful"}]}
        ]}]
    })");
}

std::string error_of(const json& doc) {
    try {
        corpus_from_json(doc);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("mini corpus loads with expected shape") {
    const Corpus c = load_corpus(test_data("fixtures/mini/corpus.json"));
    CHECK(c.stories.size() == 3);
    CHECK(c.summaries.size() == 5);
    CHECK(c.claim_count() == 22);
    CHECK(c.story("violin").title == "The Borrowed Violin");
    CHECK_THROWS_AS((void)c.story("nope"), DataError);
}

TEST_CASE("round trip through the native schema") {
    const Corpus c = load_corpus(test_data("fixtures/mini/corpus.json"));
    const auto dir = scratch_dir("roundtrip");
    write_corpus(c, dir / "out.json");
    Corpus back = load_corpus(dir / "out.json");
    back.provenance.source_path = c.provenance.source_path;
    CHECK(back == c);
}

TEST_CASE("schema violations name the record") {
    auto doc = tiny_doc();
    CHECK(error_of(doc).empty());

    auto dangling = doc;
    dangling["summaries"][0]["story_id"] = "missing";
    CHECK(error_of(dangling).find("[record m1]") != std::string::npos);

    auto dup = doc;
    dup["summaries"][0]["claims"][1]["id"] = "c1";
    CHECK(error_of(dup).find("duplicate claim id [record c1]") != std::string::npos);

    auto two = doc;
    two["summaries"][0]["claims"][0]["text"] = "It rained. Then it stopped.";
    CHECK(error_of(two).find("single sentence") != std::string::npos);

    auto typed = doc;
    typed["summaries"][0]["claims"][0]["ambiguity_type"] = 1;
    CHECK(error_of(typed).find("not subjective") != std::string::npos);

    auto range = doc;
    range["summaries"][0]["claims"][1]["ambiguity_type"] = 6;
    CHECK(error_of(range).find("1..5") != std::string::npos);

    auto badlabel = doc;
    badlabel["summaries"][0]["claims"][0]["faithfulness_labels"][0]["value"] = "maybe";
    CHECK(error_of(badlabel).find("[record c1]") != std::string::npos);

    auto empty_claims = doc;
    empty_claims["summaries"][0]["claims"] = json::array();
    CHECK(error_of(empty_claims).find("no claims") != std::string::npos);
}

TEST_CASE("empty or malformed files are rejected") {
    const auto dir = scratch_dir("empty");
    { std::ofstream(dir / "empty.json"); }
    CHECK_THROWS_AS(load_corpus(dir / "empty.json"), DataError);
    { std::ofstream(dir / "obj.json") << "{}"; }
    CHECK_THROWS_AS(load_corpus(dir / "obj.json"), DataError);
    CHECK_THROWS_AS(load_corpus(dir / "missing.json"), DataError);
}

TEST_CASE("count_labels partitions the mini corpus") {
    const Corpus c = load_corpus(test_data("fixtures/mini/corpus.json"));
    const auto faith = count_labels(c, LabelAxis::faith_by_subjectivity);
    CHECK(faith.at("faithful/objective") == 11);
    CHECK(faith.at("faithful/subjective") == 2);
    CHECK(faith.at("unfaithful/objective") == 1);
    CHECK(faith.at("unfaithful/subjective") == 7);
    CHECK(faith.excluded == 1);
    CHECK(faith.total() + faith.excluded == c.claim_count());

    const auto types = count_labels(c, LabelAxis::ambiguity_type);
    CHECK(types.at("1") == 2);
    CHECK(types.at("2") == 3);
    CHECK(types.at("3") == 2);
    CHECK(types.at("4") == 2);
    CHECK(types.at("5") == 0);
    CHECK(types.total() == 9);
}

TEST_CASE("count_labels reports missing layers") {
    auto doc = tiny_doc();
    doc["summaries"][0]["claims"][0].erase("subjectivity");
    const Corpus c = corpus_from_json(doc);
    try {
        (void)count_labels(c, LabelAxis::faith_by_subjectivity);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("c1") != std::string::npos);
    }
    const auto partial = count_labels(c, LabelAxis::faith_by_subjectivity, true);
    CHECK(partial.unlabeled == std::vector<std::string>{"c1"});
    CHECK(partial.at("unfaithful/subjective") == 1);
}

TEST_CASE("zero subjective claims gives zero subjective counts") {
    auto doc = tiny_doc();
    doc["summaries"][0]["claims"][1]["subjectivity"] = "objective";
    doc["summaries"][0]["claims"][1].erase("ambiguity_type");
    const auto t = count_labels(corpus_from_json(doc), LabelAxis::faith_by_subjectivity);
    CHECK(t.at("faithful/subjective") == 0);
    CHECK(t.at("unfaithful/subjective") == 0);
}

TEST_CASE("resolved faithfulness uses gold then strict majority") {
    Claim c;
    CHECK_FALSE(c.resolved_faithfulness().has_value());
    c.faithfulness_labels = {{"a", FaithStatus::supported}, {"b", FaithStatus::unsupported}, {"c", FaithStatus::supported}};
    CHECK(c.resolved_faithfulness() == FaithStatus::supported);
    c.faithfulness_labels.pop_back();
    CHECK(c.resolved_faithfulness() == FaithStatus::ambiguous);
    c.gold_faithfulness = FaithStatus::not_applicable;
    CHECK(c.resolved_faithfulness() == FaithStatus::not_applicable);
}

TEST_CASE("StorySumm-style records go through the adapter") {
    const auto doc = json::parse(R"({
      "12": {"story": "Once there was a fox. It ran away.", "title": "Fox", "model": "gpt-4",
             "summary": ["A fox ran away.", "The fox was scared.", "This is a summary."],
             "claim-labels": [1, 0, "N/A"],
             "subjectivity-labels": ["objective", "subjective", null],
             "ambiguity-types": [null, 3, null]},
      "13": {"story": "Once there was a fox. It ran away.", "model": "claude",
             "summary": "The fox left. It did not return.",
             "annotator-labels": [["faithful", "faithful", "unfaithful"], ["faithful", "faithful", "faithful"]]}
    })");
    const Corpus c = corpus_from_json(doc);
    CHECK(c.provenance.schema_version == "storysumm");
    CHECK(c.stories.size() == 1);
    REQUIRE(c.summaries.size() == 2);
    CHECK(c.summaries[0].story_id == c.summaries[1].story_id);
    const auto& first = c.summaries[0].claims;
    CHECK(first[0].id == "12-0");
    CHECK(first[0].resolved_faithfulness() == FaithStatus::supported);
    CHECK(first[1].resolved_faithfulness() == FaithStatus::unsupported);
    CHECK(first[2].resolved_faithfulness() == FaithStatus::not_applicable);
    CHECK(first[1].ambiguity_type == 3);
    const auto& second = c.summaries[1].claims;
    REQUIRE(second.size() == 2);
    CHECK(second[1].text == "It did not return.");
    CHECK(second[0].faithfulness_labels.size() == 3);

    auto bad = doc;
    bad["12"]["claim-labels"] = json::array({1, 0});
    CHECK_THROWS_AS(corpus_from_json(bad), DataError);
}

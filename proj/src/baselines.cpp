#include "armeval/baselines.hpp"

#include "armeval/errors.hpp"
#include "armeval/parallel.hpp"

namespace armeval {

using nlohmann::json;

std::string_view to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::zero_shot: return "zero_shot";
        case BaselineKind::few_shot: return "few_shot";
        case BaselineKind::self_consistency: return "self_consistency";
    }
    return "?";
}

BaselineKind parse_baseline_kind(std::string_view s) {
    if (s == "zero_shot" || s == "zero-shot") return BaselineKind::zero_shot;
    if (s == "few_shot" || s == "few-shot") return BaselineKind::few_shot;
    if (s == "self_consistency" || s == "self-consistency") return BaselineKind::self_consistency;
    throw UsageError("method must be zero_shot, few_shot or self_consistency (got '" + std::string(s) + "')");
}

BaselineMethod BaselineMethod::make(BaselineKind kind) {
    if (kind == BaselineKind::self_consistency) return {kind, 3, 0.7};
    return {kind, 1, 0.0};
}

std::string_view BaselineMethod::template_name() const {
    switch (kind) {
        case BaselineKind::zero_shot: return prompt_names::zero_shot;
        case BaselineKind::few_shot: return prompt_names::few_shot;
        case BaselineKind::self_consistency: return prompt_names::self_consistency;
    }
    return {};
}

Classification vote_self_consistency(const std::vector<std::optional<bool>>& answers) {
    Classification c;
    c.answers = answers;
    std::size_t yes = 0;
    std::size_t no = 0;
    for (const auto& a : answers) {
        if (!a) continue;
        (*a ? yes : no) += 1;
    }
    if (yes + no < 2) {
        c.status = ResultStatus::parse_failed;
        return c;
    }
    c.tie = yes == no;
    c.positive = no >= yes;
    return c;
}

Classification classify_claim(Backend& backend, const PromptLibrary& prompts, const BaselineMethod& method,
                              const std::string& model, int max_tokens, const Story& story,
                              const SummaryRecord& summary, const Claim& claim) {
    const auto rendered = render(prompts.get(method.template_name()),
                                 {{"story", story.text}, {"summary", summary.text()}, {"claim", claim.text}});
    const std::function<bool(const std::string&)> extract = [](const std::string& raw) {
        const std::string ans = extract_tagged(raw, "answer", Arity::exactly_one).front();
        const auto yn = parse_yes_no(ans);
        if (!yn) throw ExtractionError("answer is not Yes or No: '" + ans + "'");
        return *yn;
    };

    std::vector<std::optional<bool>> answers;
    std::vector<std::string> raw;
    for (int s = 0; s < method.sample_count; ++s) {
        LlmRequest req{model, rendered.system, rendered.user, method.temperature, max_tokens, s, 0};
        answers.push_back(ask_with_reask<bool>(backend, req, extract, raw));
    }

    Classification c;
    if (method.kind == BaselineKind::self_consistency) {
        c = vote_self_consistency(answers);
    } else {
        c.answers = answers;
        if (!answers.front()) {
            c.status = ResultStatus::parse_failed;
        } else {
            c.positive = !*answers.front();  // "No, not objective" => subjective
        }
    }
    c.raw_responses = std::move(raw);
    return c;
}

BaselineRun run_baseline(const Corpus& corpus, Backend& backend, const PromptLibrary& prompts,
                         const BaselineConfig& cfg) {
    struct Item {
        const Story* story;
        const SummaryRecord* summary;
        const Claim* claim;
    };
    std::vector<Item> items;
    for (const auto& sm : corpus.summaries) {
        const Story& st = corpus.story(sm.story_id);
        for (const auto& c : sm.claims) {
            if (c.resolved_faithfulness() == FaithStatus::not_applicable) continue;
            items.push_back({&st, &sm, &c});
        }
    }
    BaselineRun run;
    run.model = cfg.model;
    run.method = cfg.method;
    run.seed = cfg.seed;
    run.records.resize(items.size());
    parallel_for(items.size(), cfg.parallelism, [&](std::size_t i) {
        const Item& it = items[i];
        run.records[i] = {it.claim->id, true,
                          classify_claim(backend, prompts, cfg.method, cfg.model, cfg.max_tokens, *it.story,
                                         *it.summary, *it.claim)};
    });
    json ids = json::array();
    for (const auto& r : run.records) {
        if (r.result.status != ResultStatus::ok) ++run.failure_count;
        if (r.result.tie) ++run.tie_count;
        ids.push_back(r.claim_id);
    }
    run.run_id = sha256_hex(json{{"model", cfg.model},
                                 {"method", to_string(cfg.method.kind)},
                                 {"seed", cfg.seed},
                                 {"claims", ids}}
                                .dump())
                     .substr(0, 16);
    return run;
}

Predictions baseline_predictions(const BaselineRun& run) {
    Predictions p;
    for (const auto& r : run.records) {
        if (!r.in_scope) continue;
        if (r.result.status != ResultStatus::ok) {
            ++p.excluded_failures;
            continue;
        }
        p.labels[r.claim_id] = r.result.positive;
    }
    return p;
}

json to_json(const BaselineRun& run) {
    json records = json::array();
    for (const auto& r : run.records) {
        json answers = json::array();
        for (const auto& a : r.result.answers) answers.push_back(a ? json(*a ? "Yes" : "No") : json(nullptr));
        json j = {{"claim_id", r.claim_id},
                  {"method", to_string(run.method.kind)},
                  {"status", to_string(r.result.status)},
                  {"in_scope", r.in_scope},
                  {"answers", answers},
                  {"tie", r.result.tie}};
        j["prediction"] = r.result.status == ResultStatus::ok ? json(r.result.positive ? "positive" : "negative")
                                                              : json(nullptr);
        j["raw_responses"] = r.result.raw_responses;
        records.push_back(std::move(j));
    }
    return {{"run_id", run.run_id},
            {"method", to_string(run.method.kind)},
            {"model", run.model},
            {"seed", run.seed},
            {"sample_count", run.method.sample_count},
            {"temperature", run.method.temperature},
            {"failure_count", run.failure_count},
            {"tie_count", run.tie_count},
            {"records", records}};
}

}  // namespace armeval

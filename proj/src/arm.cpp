#include "armeval/arm.hpp"

#include "armeval/errors.hpp"
#include "armeval/parallel.hpp"

namespace armeval {

using nlohmann::json;

std::string_view to_string(RewriteVariant v) {
    switch (v) {
        case RewriteVariant::subjectivity_focused: return "subjectivity";
        case RewriteVariant::inconsistency_focused: return "inconsistency";
        case RewriteVariant::both: return "both";
    }
    return "?";
}

RewriteVariant parse_rewrite_variant(std::string_view s) {
    if (s == "subjectivity" || s == "subj" || s == "subjectivity_focused") return RewriteVariant::subjectivity_focused;
    if (s == "inconsistency" || s == "inconsist" || s == "inconsistency_focused")
        return RewriteVariant::inconsistency_focused;
    if (s == "both") return RewriteVariant::both;
    throw UsageError("variant must be subjectivity, inconsistency or both (got '" + std::string(s) + "')");
}

std::string_view template_name(RewriteVariant v) {
    switch (v) {
        case RewriteVariant::subjectivity_focused: return prompt_names::rewrite_subjectivity;
        case RewriteVariant::inconsistency_focused: return prompt_names::rewrite_inconsistency;
        case RewriteVariant::both: return prompt_names::rewrite_both;
    }
    return {};
}

std::string_view to_string(ResultStatus s) { return s == ResultStatus::ok ? "ok" : "parse_failed"; }

std::string_view to_string(ExplanationStatus s) {
    switch (s) {
        case ExplanationStatus::ok: return "ok";
        case ExplanationStatus::skipped: return "skipped";
        case ExplanationStatus::empty: return "empty";
        case ExplanationStatus::parse_failed: return "parse_failed";
    }
    return "?";
}

std::size_t ArmRun::rewrite_count() const {
    std::size_t n = 0;
    for (const auto& r : results)
        if (r.status == ResultStatus::ok && r.rewritten) ++n;
    return n;
}

double ArmRun::mean_edit_distance_rewrites() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : results) {
        if (r.status != ResultStatus::ok || !r.rewritten) continue;
        sum += r.normalized_edit_distance;
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double ArmRun::mean_edit_distance_all() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : results) {
        if (r.status != ResultStatus::ok) continue;
        sum += r.normalized_edit_distance;
        ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

RewriteOutcome rewrite_claim(Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg,
                             const Story& story, const SummaryRecord& summary, const Claim& claim) {
    if (summary.story_id != story.id) throw UsageError("summary " + summary.id + " does not belong to story " + story.id);
    const auto& tmpl = prompts.get(template_name(cfg.variant));
    const auto rendered = render(tmpl, {{"story", story.text}, {"summary", summary.text()}, {"claim", claim.text}});
    LlmRequest req{cfg.model, rendered.system, rendered.user, cfg.temperature, cfg.max_tokens, 0, 0};
    RewriteOutcome out;
    out.rewrite_text = ask_with_reask<std::string>(
        backend, req,
        [](const std::string& raw) { return extract_tagged(raw, "answer", Arity::exactly_one).front(); },
        out.raw_responses);
    return out;
}

ExplanationOutcome explain_rewrite(Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg,
                                   std::string_view explanation) {
    ExplanationOutcome out;
    if (trim(explanation).empty()) {
        out.status = ExplanationStatus::empty;
        return out;
    }
    const auto rendered = render(prompts.get(prompt_names::explanation_parse), {{"explanation", std::string(explanation)}});
    LlmRequest req{cfg.model, rendered.system, rendered.user, cfg.temperature, cfg.max_tokens, 0, 0};
    auto points = ask_with_reask<std::vector<std::string>>(
        backend, req, [](const std::string& raw) { return extract_tagged(raw, "item", Arity::one_or_more); },
        out.raw_responses);
    if (points) {
        out.points = std::move(*points);
        out.status = ExplanationStatus::ok;
    } else {
        out.status = ExplanationStatus::parse_failed;
    }
    return out;
}

RewriteResult make_rewrite_result(const Claim& claim, RewriteVariant variant, std::string rewrite_text,
                                  RewriteEquality equality) {
    RewriteResult r;
    r.claim_id = claim.id;
    r.variant = variant;
    r.original_text = claim.text;
    r.rewrite_text = std::move(rewrite_text);
    r.rewritten = is_rewritten(claim.text, r.rewrite_text, equality);
    const TokenSeq a = normalize(claim.text);
    const TokenSeq b = normalize(r.rewrite_text);
    r.edit_distance = word_edit_distance(a, b);
    r.normalized_edit_distance = normalized_edit_distance(a, b);
    return r;
}

namespace {

struct WorkItem {
    const Story* story;
    const SummaryRecord* summary;
    const Claim* claim;
};

RewriteResult process_claim(Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg, const WorkItem& w) {
    RewriteOutcome rw = rewrite_claim(backend, prompts, cfg, *w.story, *w.summary, *w.claim);
    RewriteResult r;
    if (!rw.rewrite_text) {
        r.claim_id = w.claim->id;
        r.variant = cfg.variant;
        r.original_text = w.claim->text;
        r.status = ResultStatus::parse_failed;
    } else {
        r = make_rewrite_result(*w.claim, cfg.variant, *rw.rewrite_text, cfg.equality);
    }
    r.in_scope = w.claim->resolved_faithfulness() != FaithStatus::not_applicable;
    r.raw_responses = std::move(rw.raw_responses);
    if (r.status != ResultStatus::ok || !r.rewritten || !cfg.explain) return r;

    std::string explanation;
    if (cfg.explanation_source == ExplanationSource::rewrite_response) {
        explanation = strip_tagged(r.raw_responses.back(), "answer");
    } else {
        const auto rendered = render(prompts.get(prompt_names::explanation_request),
                                     {{"story", w.story->text},
                                      {"summary", w.summary->text()},
                                      {"claim", w.claim->text},
                                      {"rewrite", r.rewrite_text}});
        LlmRequest req{cfg.model, rendered.system, rendered.user, cfg.temperature, cfg.max_tokens, 0, 0};
        explanation = backend.complete(req).raw_text;
        r.raw_responses.push_back(explanation);
    }
    ExplanationOutcome ex = explain_rewrite(backend, prompts, cfg, explanation);
    r.explanation_status = ex.status;
    r.explanation_points = std::move(ex.points);
    for (auto& raw : ex.raw_responses) r.raw_responses.push_back(std::move(raw));
    return r;
}

}  // namespace

ArmRun run_arm(const Corpus& corpus, Backend& backend, const PromptLibrary& prompts, const ArmConfig& cfg) {
    std::vector<WorkItem> items;
    for (const auto& sm : corpus.summaries) {
        const Story& st = corpus.story(sm.story_id);
        for (const auto& c : sm.claims) items.push_back({&st, &sm, &c});
    }
    ArmRun run;
    run.model = cfg.model;
    run.variant = cfg.variant;
    run.seed = cfg.seed;
    run.results.resize(items.size());
    parallel_for(items.size(), cfg.parallelism,
                 [&](std::size_t i) { run.results[i] = process_claim(backend, prompts, cfg, items[i]); });
    for (const auto& r : run.results)
        if (r.status != ResultStatus::ok) ++run.failure_count;
    json ids = json::array();
    for (const auto& w : items) ids.push_back(w.claim->id);
    run.run_id = sha256_hex(json{{"model", cfg.model},
                                 {"variant", to_string(cfg.variant)},
                                 {"seed", cfg.seed},
                                 {"claims", ids}}
                                .dump())
                     .substr(0, 16);
    return run;
}

Predictions arm_predictions(const ArmRun& run) {
    Predictions p;
    for (const auto& r : run.results) {
        if (!r.in_scope) continue;
        if (r.status != ResultStatus::ok) {
            ++p.excluded_failures;
            continue;
        }
        p.labels[r.claim_id] = r.rewritten;
    }
    return p;
}

json to_json(const RewriteResult& r) {
    json j = {{"claim_id", r.claim_id},
              {"method", "arm"},
              {"variant", to_string(r.variant)},
              {"status", to_string(r.status)},
              {"in_scope", r.in_scope},
              {"original_text", r.original_text}};
    if (r.status == ResultStatus::ok) {
        j["prediction"] = r.rewritten ? "positive" : "negative";
        j["rewrite_text"] = r.rewrite_text;
        j["rewritten"] = r.rewritten;
        j["edit_distance"] = r.edit_distance;
        j["normalized_edit_distance"] = r.normalized_edit_distance;
        j["explanation_status"] = to_string(r.explanation_status);
        j["explanation_points"] = r.explanation_points;
    } else {
        j["prediction"] = nullptr;
    }
    j["raw_responses"] = r.raw_responses;
    return j;
}

json to_json(const ArmRun& run) {
    json records = json::array();
    for (const auto& r : run.results) records.push_back(to_json(r));
    return {{"run_id", run.run_id},
            {"method", "arm"},
            {"model", run.model},
            {"variant", to_string(run.variant)},
            {"seed", run.seed},
            {"failure_count", run.failure_count},
            {"records", records}};
}

ArmRun arm_run_from_json(const json& doc) {
    try {
        ArmRun run;
        run.run_id = doc.at("run_id").get<std::string>();
        run.model = doc.at("model").get<std::string>();
        run.variant = parse_rewrite_variant(doc.at("variant").get<std::string>());
        run.seed = doc.at("seed").get<std::uint64_t>();
        run.failure_count = doc.at("failure_count").get<std::size_t>();
        for (const auto& j : doc.at("records")) {
            RewriteResult r;
            r.claim_id = j.at("claim_id").get<std::string>();
            r.variant = parse_rewrite_variant(j.at("variant").get<std::string>());
            r.status = j.at("status").get<std::string>() == "ok" ? ResultStatus::ok : ResultStatus::parse_failed;
            r.in_scope = j.at("in_scope").get<bool>();
            r.original_text = j.at("original_text").get<std::string>();
            if (r.status == ResultStatus::ok) {
                r.rewrite_text = j.at("rewrite_text").get<std::string>();
                r.rewritten = j.at("rewritten").get<bool>();
                r.edit_distance = j.at("edit_distance").get<std::size_t>();
                r.normalized_edit_distance = j.at("normalized_edit_distance").get<double>();
                r.explanation_points = j.at("explanation_points").get<std::vector<std::string>>();
                const auto es = j.at("explanation_status").get<std::string>();
                r.explanation_status = es == "ok"       ? ExplanationStatus::ok
                                       : es == "empty"  ? ExplanationStatus::empty
                                       : es == "parse_failed" ? ExplanationStatus::parse_failed
                                                              : ExplanationStatus::skipped;
            }
            r.raw_responses = j.at("raw_responses").get<std::vector<std::string>>();
            run.results.push_back(std::move(r));
        }
        return run;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed ARM results file: ") + e.what());
    }
}

}  // namespace armeval

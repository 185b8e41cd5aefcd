#include "armeval/synth.hpp"

#include <fstream>
#include <map>
#include <random>
#include <unordered_map>

#include "armeval/errors.hpp"
#include "armeval/parallel.hpp"
#include "armeval/textproc.hpp"

namespace armeval {

using nlohmann::json;

std::string_view to_string(Direction d) { return d == Direction::to_objective ? "to_objective" : "to_subjective"; }

std::string_view to_string(VariantStatus s) {
    switch (s) {
        case VariantStatus::ok: return "ok";
        case VariantStatus::unchanged: return "unchanged";
        case VariantStatus::parse_failed: return "parse_failed";
    }
    return "?";
}

SyntheticVariant generate_variant(Backend& backend, const PromptLibrary& prompts, const SynthConfig& cfg,
                                  const Story& story, const SummaryRecord& summary, const Claim& claim,
                                  Direction direction, int ambiguity_type) {
    if (trim(claim.text).empty()) throw UsageError("claim " + claim.id + " has empty text");
    if (direction == Direction::to_objective) {
        if (claim.subjectivity != Subjectivity::subjective || claim.ambiguity_type != ambiguity_type)
            throw UsageError("to_objective requires a subjective claim of type " + std::to_string(ambiguity_type) +
                             " (claim " + claim.id + ")");
    } else if (claim.subjectivity != Subjectivity::objective) {
        throw UsageError("to_subjective requires an objective claim (claim " + claim.id + ")");
    }

    SyntheticVariant v;
    v.source_claim_id = claim.id;
    v.direction = direction;
    v.ambiguity_type = ambiguity_type;
    v.template_name = prompt_names::synth(direction == Direction::to_subjective, ambiguity_type);
    const auto rendered = render(prompts.get(v.template_name),
                                 {{"story", story.text}, {"summary", summary.text()}, {"claim", claim.text}});
    LlmRequest req{cfg.model, rendered.system, rendered.user, 0.0, cfg.max_tokens, 0, 0};

    const bool must_change = direction == Direction::to_subjective;
    const std::function<std::string(const std::string&)> extract = [&](const std::string& raw) {
        std::string s = extract_tagged(raw, "sentence", Arity::exactly_one).front();
        if (must_change && !is_rewritten(claim.text, s)) throw ExtractionError("variant equals the source claim");
        return s;
    };
    if (auto text = ask_with_reask<std::string>(backend, req, extract, v.raw_responses)) {
        v.text = std::move(*text);
        return v;
    }
    // Distinguish "model kept the claim" from "model output had no tags".
    try {
        v.text = extract_tagged(v.raw_responses.back(), "sentence", Arity::exactly_one).front();
        v.status = VariantStatus::unchanged;
    } catch (const ExtractionError&) {
        v.status = VariantStatus::parse_failed;
    }
    return v;
}

std::vector<VariantJob> plan_variants(const Corpus& corpus, const SynthConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::vector<VariantJob> jobs;
    for (const auto& sm : corpus.summaries) {
        const Story& st = corpus.story(sm.story_id);
        for (const auto& c : sm.claims) {
            if (c.resolved_faithfulness() == FaithStatus::not_applicable) continue;
            if (c.subjectivity == Subjectivity::objective) {
                if (cfg.all_types) {
                    for (int t = 1; t <= 4; ++t) jobs.push_back({&st, &sm, &c, Direction::to_subjective, t});
                } else {
                    const int t = 1 + static_cast<int>(uniform_index(rng, 4));
                    jobs.push_back({&st, &sm, &c, Direction::to_subjective, t});
                }
            } else if (c.subjectivity == Subjectivity::subjective && c.ambiguity_type && *c.ambiguity_type <= 4) {
                jobs.push_back({&st, &sm, &c, Direction::to_objective, *c.ambiguity_type});
            }
        }
    }
    return jobs;
}

std::vector<SyntheticVariant> generate_variants(const Corpus& corpus, Backend& backend, const PromptLibrary& prompts,
                                                const SynthConfig& cfg) {
    const auto jobs = plan_variants(corpus, cfg);
    std::vector<SyntheticVariant> out(jobs.size());
    parallel_for(jobs.size(), cfg.parallelism, [&](std::size_t i) {
        const auto& j = jobs[i];
        out[i] = generate_variant(backend, prompts, cfg, *j.story, *j.summary, *j.claim, j.direction, j.ambiguity_type);
    });
    return out;
}

std::vector<SplicedSummary> splice(const Corpus& corpus, const std::vector<SyntheticVariant>& variants,
                                   std::uint64_t seed) {
    // First accepted variant per (claim, direction) is the candidate.
    std::map<std::pair<std::string, Direction>, const SyntheticVariant*> by_claim;
    for (const auto& v : variants)
        if (v.accepted()) by_claim.emplace(std::make_pair(v.source_claim_id, v.direction), &v);

    std::mt19937_64 rng(seed);
    std::vector<SplicedSummary> out;
    for (const auto& sm : corpus.summaries) {
        SplicedSummary sp{sm.id, sm.story_id, seed, {}};
        for (std::size_t pos = 0; pos < sm.claims.size(); ++pos) {
            const Claim& c = sm.claims[pos];
            if (c.resolved_faithfulness() == FaithStatus::not_applicable) {
                sp.claims.push_back({pos, c.id, std::nullopt, "original", c.text, "", std::nullopt});
                continue;
            }
            auto candidate = [&](Direction d) -> std::optional<SplicedClaim> {
                const Subjectivity pol = d == Direction::to_subjective ? Subjectivity::subjective : Subjectivity::objective;
                if (auto it = by_claim.find({c.id, d}); it != by_claim.end()) {
                    const auto* v = it->second;
                    return SplicedClaim{pos, c.id, pol, std::string(to_string(d)), v->text, v->template_name,
                                        v->ambiguity_type};
                }
                if (c.subjectivity == pol) return SplicedClaim{pos, c.id, pol, "original", c.text, "", c.ambiguity_type};
                return std::nullopt;
            };
            auto obj = candidate(Direction::to_objective);
            auto subj = candidate(Direction::to_subjective);
            if (!obj || !subj)
                throw DataError("no " + std::string(!obj ? "objective" : "subjective") + " variant for position " +
                                    std::to_string(pos) + " of summary " + sm.id,
                                c.id);
            sp.claims.push_back(fair_coin(rng) ? std::move(*subj) : std::move(*obj));
        }
        out.push_back(std::move(sp));
    }
    return out;
}

Corpus spliced_corpus(const Corpus& source, const std::vector<SplicedSummary>& splices) {
    Corpus out;
    out.stories = source.stories;
    for (const auto& sp : splices) {
        SummaryRecord sm;
        sm.id = sp.summary_id + "-splice-" + std::to_string(sp.seed);
        sm.story_id = sp.story_id;
        sm.writer = "spliced";
        for (const auto& c : sp.claims) {
            Claim claim;
            claim.id = sm.id + "-" + std::to_string(c.position);
            claim.text = c.text;
            ClaimProvenance p;
            p.source_claim_id = c.source_claim_id;
            p.variant = c.variant;
            p.expected = c.polarity;
            p.ambiguity_type = c.ambiguity_type;
            p.template_name = c.template_name;
            claim.provenance = std::move(p);
            sm.claims.push_back(std::move(claim));
        }
        out.summaries.push_back(std::move(sm));
    }
    if (!splices.empty()) out.provenance.extra = {{"spliced_from", source.provenance.source_path}, {"seed", splices.front().seed}};
    return out;
}

void export_finetune_corpus(const Corpus& corpus, const std::vector<SyntheticVariant>& variants,
                            const std::filesystem::path& path) {
    struct Where {
        const SummaryRecord* summary;
        std::size_t position;
    };
    std::unordered_map<std::string, Where> index;
    for (const auto& sm : corpus.summaries)
        for (std::size_t i = 0; i < sm.claims.size(); ++i) index.emplace(sm.claims[i].id, Where{&sm, i});

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write finetune corpus '" + path.string() + "'");
    for (const auto& v : variants) {
        if (!v.accepted()) continue;
        auto it = index.find(v.source_claim_id);
        if (it == index.end()) throw DataError("variant refers to unknown claim", v.source_claim_id);
        const SummaryRecord& sm = *it->second.summary;
        std::string summary;
        for (std::size_t i = 0; i < sm.claims.size(); ++i) {
            if (i) summary += ' ';
            summary += i == it->second.position ? v.text : sm.claims[i].text;
        }
        const json rec = {{"story", corpus.story(sm.story_id).text},
                          {"summary", summary},
                          {"claim", v.text},
                          {"label", to_string(v.polarity())}};
        out << rec.dump() << '\n';
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

json to_json(const SyntheticVariant& v) {
    return {{"source_claim_id", v.source_claim_id},
            {"direction", to_string(v.direction)},
            {"ambiguity_type", v.ambiguity_type},
            {"text", v.text},
            {"template", v.template_name},
            {"status", to_string(v.status)},
            {"raw_responses", v.raw_responses}};
}

}  // namespace armeval

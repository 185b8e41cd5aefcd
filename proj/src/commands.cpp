#include "armeval/commands.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "armeval/errors.hpp"
#include "armeval/synth.hpp"

namespace armeval {

using nlohmann::json;

int exit_code_for(std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const UsageError&) {
        return exit_usage;
    } catch (const BackendError&) {
        return exit_backend;
    } catch (const DataError&) {
        return exit_data;
    } catch (const ExtractionError&) {
        return exit_backend;
    } catch (...) {
        return exit_data;
    }
}

std::string_view to_string(GoldLayer g) {
    switch (g) {
        case GoldLayer::subjectivity: return "subjectivity";
        case GoldLayer::faithfulness: return "faithfulness";
        case GoldLayer::subj_or_unfaith: return "subj_or_unfaith";
    }
    return "?";
}

GoldLayer parse_gold_layer(std::string_view s) {
    if (s == "subjectivity" || s == "subj") return GoldLayer::subjectivity;
    if (s == "faithfulness" || s == "unfaith") return GoldLayer::faithfulness;
    if (s == "subj_or_unfaith" || s == "either") return GoldLayer::subj_or_unfaith;
    throw UsageError("unknown gold layer '" + std::string(s) + "' (subjectivity|faithfulness|subj_or_unfaith)");
}

std::map<std::string, bool> gold_labels(const Corpus& corpus, GoldLayer layer) {
    std::map<std::string, bool> out;
    for (const auto& sm : corpus.summaries) {
        for (const auto& c : sm.claims) {
            const auto faith = c.resolved_faithfulness();
            if (faith == FaithStatus::not_applicable) continue;
            const bool subj_known = c.subjectivity.has_value();
            const bool subj = c.subjectivity == Subjectivity::subjective;
            const bool faith_known = faith == FaithStatus::supported || faith == FaithStatus::unsupported;
            const bool unfaith = faith == FaithStatus::unsupported;
            switch (layer) {
                case GoldLayer::subjectivity:
                    if (subj_known) out[c.id] = subj;
                    break;
                case GoldLayer::faithfulness:
                    if (faith_known) out[c.id] = unfaith;
                    break;
                case GoldLayer::subj_or_unfaith:
                    if (subj || unfaith) out[c.id] = true;
                    else if (subj_known && faith_known) out[c.id] = false;
                    break;
            }
        }
    }
    return out;
}

namespace {

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json file_ref(const std::filesystem::path& p) {
    if (p.empty()) return nullptr;
    if (!std::filesystem::exists(p)) return {{"name", p.filename().string()}, {"sha256", nullptr}};
    return {{"name", p.filename().string()}, {"sha256", sha256_hex(read_bytes(p))}};
}

json prompts_ref(const std::filesystem::path& dir) {
    if (dir.empty()) return "builtin";
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(dir))
        for (const auto& e : std::filesystem::directory_iterator(dir))
            if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.filename().string() + '\0' + read_bytes(f) + '\0';
    return {{"dir", dir.filename().string()}, {"sha256", sha256_hex(all)}};
}

const PromptLibrary& prompt_library(const RunConfig& cfg, std::optional<PromptLibrary>& storage) {
    if (cfg.prompts.empty()) return PromptLibrary::builtin();
    storage = PromptLibrary::from_directory(cfg.prompts);
    return *storage;
}

void require_model(const RunConfig& cfg) {
    if (cfg.model.empty()) throw UsageError("--model is required");
}

Manifest make_manifest(const RunConfig& cfg, const std::string& run_id, const ReplayCache* cache) {
    Manifest m;
    m.run_id = run_id;
    m.config = cfg.canonical_json();
    m.config_digest = sha256_hex(m.config.dump());
    if (cache) m.cache_digest = cache->content_digest();
    return m;
}

std::string pct(double v) { return format_fixed(v, 2); }

void emit(const MetricReport& rep, const RunConfig& cfg, const std::string& stem, std::ostream& log) {
    if (!cfg.out.empty()) write_report(rep, cfg.out, stem);
    log << rep.to_text();
}

json with_manifest(const Manifest& m, const char* key, json payload) {
    return {{"manifest", m.to_json()}, {key, std::move(payload)}};
}

}  // namespace

json RunConfig::canonical_json() const {
    return {{"corpus", file_ref(corpus)},
            {"schema_version", schema_version},
            {"model", model},
            {"mode", to_string(mode)},
            {"backend", backend.rfind("script:", 0) == 0
                            ? json{{"script", file_ref(backend.substr(7))}}
                            : json(backend)},
            {"prompts", prompts_ref(prompts)},
            {"variant", to_string(variant)},
            {"method", method},
            {"seed", seed},
            {"gold", to_string(gold)},
            {"explain", explain},
            {"explanation_source",
             explanation_source == ExplanationSource::rewrite_response ? "rewrite_response" : "separate_call"},
            {"equality", equality == RewriteEquality::normalized ? "normalized" : "raw"},
            {"all_types", all_types},
            {"trials", trials},
            {"annotations", file_ref(annotations)},
            {"compare", compare}};
}

std::string RunConfig::digest() const { return sha256_hex(canonical_json().dump()); }

BackendStack make_backend(const RunConfig& cfg) {
    BackendStack s;
    std::unique_ptr<Backend> inner;
    if (cfg.mode != BackendMode::replay) {
        if (cfg.backend.rfind("script:", 0) == 0) {
            inner = ScriptedBackend::from_file(cfg.backend.substr(7));
        } else if (cfg.backend.empty()) {
            inner = make_http_backend(HttpBackendConfig::from_env(flavor_for_model(cfg.model)));
        } else if (cfg.backend == "openai") {
            inner = make_http_backend(HttpBackendConfig::from_env(ApiFlavor::openai));
        } else if (cfg.backend == "anthropic") {
            inner = make_http_backend(HttpBackendConfig::from_env(ApiFlavor::anthropic));
        } else {
            throw UsageError("unknown backend '" + cfg.backend + "' (openai|anthropic|script:<file>)");
        }
    }
    if (cfg.mode == BackendMode::live) {
        s.backend = std::move(inner);
        return s;
    }
    if (cfg.cache.empty()) throw UsageError(std::string(to_string(cfg.mode)) + " mode requires --cache");
    if (cfg.mode == BackendMode::replay && !std::filesystem::is_directory(cfg.cache))
        throw UsageError("replay mode requires an existing cache at '" + cfg.cache.string() + "'");
    s.cache = std::make_shared<ReplayCache>(cfg.cache);
    s.backend = std::make_unique<CachingBackend>(cfg.mode, s.cache, std::move(inner));
    return s;
}

Corpus load_run_corpus(const RunConfig& cfg) {
    if (cfg.corpus.empty()) throw UsageError("--corpus is required");
    if (!std::filesystem::exists(cfg.corpus)) throw UsageError("corpus '" + cfg.corpus.string() + "' not found");
    return load_corpus(cfg.corpus, cfg.schema_version);
}

void add_detection_scores(MetricReport& rep, const std::string& method, const Corpus& corpus,
                          const Predictions& preds, GoldLayer gold) {
    const auto golds = gold_labels(corpus, gold);
    const auto aligned = align(preds.labels, golds);
    const auto& c = aligned.counts;
    rep.set("gold_layer", std::string(to_string(gold)));
    rep.set("scored_claims", c.total());
    rep.set("tp", c.tp);
    rep.set("fp", c.fp);
    rep.set("tn", c.tn);
    rep.set("fn", c.fn);
    rep.set("excluded_parse_failures", preds.excluded_failures);
    rep.set("claims_without_gold", aligned.unmatched_predictions);
    std::string ba = "n/a", f1 = "n/a";
    try {
        const double b = balanced_accuracy(c);
        const double f = f1_macro(c);
        rep.set("balanced_accuracy", b);
        rep.set("f1_macro", f);
        ba = pct(b);
        f1 = pct(f);
    } catch (const DataError& e) {
        rep.set("balanced_accuracy", nullptr);
        rep.set("f1_macro", nullptr);
        rep.notes.push_back(std::string("classification scores skipped: ") + e.what());
    }
    rep.tables.push_back({"detection", {"method", "gold", "balanced_accuracy", "f1_macro"},
                          {{method, std::string(to_string(gold)), ba, f1}}});

    bool typed = false;
    for (const auto& sm : corpus.summaries)
        for (const auto& cl : sm.claims) typed = typed || cl.ambiguity_type.has_value();
    if (!typed) return;
    const auto tr = recall_by_type(preds.labels, corpus);
    ReportTable t{"recall_by_type", {"method", "type", "support", "recall"}, {}};
    for (const auto& [type, r] : tr.recall) {
        rep.set("recall_type_" + std::to_string(type), r);
        t.rows.push_back({method, std::to_string(type), std::to_string(tr.support.at(type)), format_fixed(r, 4)});
    }
    for (int type : tr.omitted) rep.notes.push_back("ambiguity type " + std::to_string(type) + " omitted: no scored claims");
    rep.tables.push_back(std::move(t));
}

MetricReport cmd_validate(const RunConfig& cfg, std::ostream& log) {
    const Corpus corpus = load_run_corpus(cfg);
    MetricReport rep;
    rep.command = "validate";
    rep.manifest = make_manifest(cfg, cfg.digest().substr(0, 16), nullptr);
    rep.set("stories", corpus.stories.size());
    rep.set("summaries", corpus.summaries.size());
    rep.set("claims", corpus.claim_count());

    const auto faith = count_labels(corpus, LabelAxis::faith_by_subjectivity, true);
    ReportTable fig2{"faith_by_subjectivity", {"cell", "count"}, {}};
    for (const auto& [k, n] : faith.cells) {
        rep.set("count/" + k, n);
        fig2.rows.push_back({k, std::to_string(n)});
    }
    rep.set("excluded_not_applicable", faith.excluded);
    if (!faith.unlabeled.empty()) {
        rep.set("unlabeled_subjectivity", faith.unlabeled.size());
        rep.notes.push_back("warning: " + std::to_string(faith.unlabeled.size()) +
                            " claims lack a subjectivity or faithfulness label; report is partial");
    }
    rep.tables.push_back(std::move(fig2));

    const auto types = count_labels(corpus, LabelAxis::ambiguity_type, true);
    ReportTable fig5{"ambiguity_types", {"type", "count"}, {}};
    for (const auto& [k, n] : types.cells) {
        rep.set("type/" + k, n);
        fig5.rows.push_back({k, std::to_string(n)});
    }
    if (!types.unlabeled.empty())
        rep.notes.push_back("warning: " + std::to_string(types.unlabeled.size()) +
                            " subjective claims lack an ambiguity type");
    rep.tables.push_back(std::move(fig5));
    emit(rep, cfg, "validate_report", log);
    return rep;
}

MetricReport cmd_arm(const RunConfig& cfg, std::ostream& log) {
    require_model(cfg);
    const Corpus corpus = load_run_corpus(cfg);
    if (corpus.claim_count() == 0) throw DataError("corpus has no claims");
    std::optional<PromptLibrary> storage;
    const PromptLibrary& prompts = prompt_library(cfg, storage);
    auto stack = make_backend(cfg);

    ArmConfig ac;
    ac.model = cfg.model;
    ac.variant = cfg.variant;
    ac.seed = cfg.seed;
    ac.parallelism = cfg.parallelism;
    ac.explain = cfg.explain;
    ac.explanation_source = cfg.explanation_source;
    ac.equality = cfg.equality;
    const ArmRun run = run_arm(corpus, *stack.backend, prompts, ac);

    MetricReport rep;
    rep.command = "arm";
    rep.manifest = make_manifest(cfg, run.run_id, stack.cache.get());
    const std::string method = cfg.model + " ARM (" + std::string(to_string(cfg.variant)) + ")";
    const std::size_t n = run.results.size();
    rep.set("model", cfg.model);
    rep.set("variant", std::string(to_string(cfg.variant)));
    rep.set("seed", cfg.seed);
    rep.set("claims", n);
    rep.set("parse_failures", run.failure_count);
    rep.set("parse_failure_rate", n ? static_cast<double>(run.failure_count) / static_cast<double>(n) : 0.0);
    rep.set("rewrite_count", run.rewrite_count());
    rep.set("avg_edit_distance", run.mean_edit_distance_rewrites());
    rep.set("avg_edit_distance_all", run.mean_edit_distance_all());
    std::size_t explained = 0, points = 0;
    for (const auto& r : run.results) {
        if (r.explanation_status == ExplanationStatus::ok) ++explained;
        points += r.explanation_points.size();
    }
    rep.set("explained_rewrites", explained);
    rep.set("explanation_points", points);
    rep.tables.push_back({"rewrite_summary",
                          {"method", "rewrite_count", "avg_edit_distance"},
                          {{method, std::to_string(run.rewrite_count()), format_fixed(run.mean_edit_distance_rewrites(), 2)}}});
    add_detection_scores(rep, method, corpus, arm_predictions(run), cfg.gold);

    if (!cfg.out.empty()) write_file(cfg.out / "arm_results.json", with_manifest(rep.manifest, "run", to_json(run)).dump(2) + "\n");
    emit(rep, cfg, "arm_report", log);
    return rep;
}

MetricReport cmd_baseline(const RunConfig& cfg, std::ostream& log) {
    require_model(cfg);
    const Corpus corpus = load_run_corpus(cfg);
    if (corpus.claim_count() == 0) throw DataError("corpus has no claims");
    std::optional<PromptLibrary> storage;
    const PromptLibrary& prompts = prompt_library(cfg, storage);
    BaselineConfig bc;
    bc.model = cfg.model;
    bc.method = BaselineMethod::make(parse_baseline_kind(cfg.method));
    bc.seed = cfg.seed;
    bc.parallelism = cfg.parallelism;
    auto stack = make_backend(cfg);
    const BaselineRun run = run_baseline(corpus, *stack.backend, prompts, bc);

    MetricReport rep;
    rep.command = "baseline";
    rep.manifest = make_manifest(cfg, run.run_id, stack.cache.get());
    const std::string method = cfg.model + " " + std::string(to_string(bc.method.kind));
    std::size_t positives = 0;
    for (const auto& r : run.records)
        if (r.in_scope && r.result.status == ResultStatus::ok && r.result.positive) ++positives;
    rep.set("model", cfg.model);
    rep.set("method", std::string(to_string(bc.method.kind)));
    rep.set("claims", run.records.size());
    rep.set("parse_failures", run.failure_count);
    rep.set("parse_failure_rate",
            run.records.empty() ? 0.0 : static_cast<double>(run.failure_count) / static_cast<double>(run.records.size()));
    rep.set("ties", run.tie_count);
    rep.set("positives", positives);
    if (run.tie_count) rep.notes.push_back("self-consistency ties resolved to positive");
    add_detection_scores(rep, method, corpus, baseline_predictions(run), cfg.gold);

    if (!cfg.out.empty())
        write_file(cfg.out / "baseline_results.json", with_manifest(rep.manifest, "run", to_json(run)).dump(2) + "\n");
    emit(rep, cfg, "baseline_report", log);
    return rep;
}

MetricReport cmd_synth(const RunConfig& cfg, std::ostream& log) {
    require_model(cfg);
    const Corpus corpus = load_run_corpus(cfg);
    if (corpus.claim_count() == 0) throw DataError("corpus has no claims");
    std::optional<PromptLibrary> storage;
    const PromptLibrary& prompts = prompt_library(cfg, storage);
    SynthConfig sc;
    sc.model = cfg.model;
    sc.seed = cfg.seed;
    sc.parallelism = cfg.parallelism;
    sc.all_types = cfg.all_types;
    auto stack = make_backend(cfg);
    const auto variants = generate_variants(corpus, *stack.backend, prompts, sc);

    MetricReport rep;
    rep.command = "synth";
    rep.manifest = make_manifest(cfg, cfg.digest().substr(0, 16), stack.cache.get());
    std::map<std::string, std::size_t> tally;
    for (const auto& v : variants) {
        ++tally[std::string(to_string(v.direction)) + "/" + std::string(to_string(v.status))];
        if (v.accepted()) ++tally[std::string(to_string(v.direction)) + "/type" + std::to_string(v.ambiguity_type)];
    }
    rep.set("variants_planned", variants.size());
    rep.set("variants_accepted",
            static_cast<std::size_t>(std::count_if(variants.begin(), variants.end(), [](const auto& v) { return v.accepted(); })));
    for (const auto& [k, n] : tally) rep.set(k, n);
    rep.set("types_per_objective_claim", cfg.all_types ? 4 : 1);

    json variants_json = json::array();
    for (const auto& v : variants) variants_json.push_back(to_json(v));
    if (!cfg.out.empty()) {
        write_file(cfg.out / "variants.json", with_manifest(rep.manifest, "variants", variants_json).dump(2) + "\n");
        export_finetune_corpus(corpus, variants, cfg.out / "finetune.jsonl");
    }

    try {
        const auto splices = splice(corpus, variants, cfg.seed);
        std::size_t subj = 0, obj = 0;
        for (const auto& sp : splices)
            for (const auto& c : sp.claims) {
                if (c.polarity == Subjectivity::subjective) ++subj;
                else if (c.polarity == Subjectivity::objective) ++obj;
            }
        rep.set("spliced_summaries", splices.size());
        rep.set("spliced_subjective_claims", subj);
        rep.set("spliced_objective_claims", obj);
        if (!cfg.out.empty()) {
            Corpus sc_corpus = spliced_corpus(corpus, splices);
            sc_corpus.provenance.extra["manifest"] = rep.manifest.to_json();
            write_corpus(sc_corpus, cfg.out / "spliced_corpus.json");
        }
    } catch (const DataError& e) {
        rep.set("spliced_summaries", 0);
        rep.notes.push_back(std::string("splicing skipped: ") + e.what());
    }
    if (!cfg.out.empty()) write_file(cfg.out / "manifest.json", rep.manifest.to_json().dump(2) + "\n");
    emit(rep, cfg, "synth_report", log);
    return rep;
}

// --- annotations -----------------------------------------------------------------

AnnotationFile annotations_from_json(const json& doc) {
    if (!doc.is_object()) throw DataError("annotation file must be a JSON object");
    AnnotationFile f;
    try {
        if (doc.contains("agreement")) {
            for (const auto& it : doc.at("agreement")) {
                AgreementItem item;
                item.id = it.at("item_id").get<std::string>();
                const std::string group = it.value("group", "all");
                for (const auto& l : it.at("labels")) item.labels.push_back(parse_faith_status(l.get<std::string>()));
                f.agreement[group].push_back(std::move(item));
            }
        }
        if (doc.contains("explanations")) {
            for (const auto& it : doc.at("explanations")) {
                ExplanationLabelSet set;
                set.rewrite_id = it.at("rewrite_id").get<std::string>();
                const std::string group = it.value("group", "all");
                for (const auto& p : it.at("points")) {
                    ExplanationPoint pt;
                    pt.text = p.value("text", "");
                    pt.is_decoy = p.value("is_decoy", false);
                    for (const auto& [ann, l] : p.at("labels").items())
                        pt.labels[ann] = parse_point_label(l.get<std::string>());
                    set.points.push_back(std::move(pt));
                }
                f.explanations[group].push_back(std::move(set));
            }
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed annotation file: ") + e.what());
    }
    if (f.agreement.empty() && f.explanations.empty())
        throw DataError("annotation file has neither 'agreement' nor 'explanations' records");
    return f;
}

AnnotationFile load_annotations(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_bytes(path));
    } catch (const json::parse_error& e) {
        throw DataError("cannot parse '" + path.string() + "': " + e.what());
    }
    return annotations_from_json(doc);
}

namespace {

std::string significance(double p) {
    if (p <= 0.001) return "**";
    if (p <= 0.05) return "*";
    return "";
}

double mean_pct(const std::vector<int>& xs) {
    std::size_t n = 0;
    for (int x : xs) n += static_cast<std::size_t>(x);
    return xs.empty() ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(xs.size());
}

}  // namespace

MetricReport cmd_stats(const RunConfig& cfg, std::ostream& log) {
    if (cfg.annotations.empty()) throw UsageError("--annotations is required");
    if (!std::filesystem::exists(cfg.annotations))
        throw UsageError("annotation file '" + cfg.annotations.string() + "' not found");
    const AnnotationFile ann = load_annotations(cfg.annotations);

    MetricReport rep;
    rep.command = "stats";
    rep.manifest = make_manifest(cfg, cfg.digest().substr(0, 16), nullptr);

    ReportTable t1{"agreement_by_group", {"group", "items", "agreement", "faithful"}, {}};
    for (const auto& [group, items] : ann.agreement) {
        const double agree = agreement_rate(items);
        const double faithful = mean_pct(faithful_outcomes(items));
        rep.set("items/" + group, items.size());
        rep.set("agreement/" + group, agree);
        rep.set("faithful/" + group, faithful);
        t1.rows.push_back({group, std::to_string(items.size()), pct(agree), pct(faithful)});
    }
    if (!t1.rows.empty()) rep.tables.push_back(std::move(t1));

    if (!cfg.compare.empty()) {
        const auto colon = cfg.compare.find(':');
        if (colon == std::string::npos) throw UsageError("--compare expects GROUP_A:GROUP_B");
        const std::string a = cfg.compare.substr(0, colon), b = cfg.compare.substr(colon + 1);
        for (const auto& g : {a, b})
            if (!ann.agreement.count(g)) throw UsageError("no agreement records in group '" + g + "'");
        const auto& ia = ann.agreement.at(a);
        const auto& ib = ann.agreement.at(b);
        ReportTable t3{"group_comparison", {"measure", a, b, "p_value", "sig"}, {}};
        const std::pair<const char*, std::vector<int> (*)(const std::vector<AgreementItem>&)> measures[] = {
            {"agreement", [](const std::vector<AgreementItem>& v) { return agreement_outcomes(v); }},
            {"faithful", [](const std::vector<AgreementItem>& v) { return faithful_outcomes(v); }}};
        for (const auto& [name, fn] : measures) {
            const auto oa = fn(ia), ob = fn(ib);
            const auto r = bootstrap_pvalue(oa, ob, cfg.trials, cfg.seed, cfg.parallelism);
            rep.set(std::string("p_") + name, r.p_value);
            t3.rows.push_back({name, pct(mean_pct(oa)), pct(mean_pct(ob)), format_fixed(r.p_value, 4),
                               significance(r.p_value)});
        }
        rep.set("bootstrap_trials", cfg.trials);
        rep.set("bootstrap_seed", cfg.seed);
        rep.tables.push_back(std::move(t3));
        rep.notes.push_back("p-values are two-sided (pooled-null bootstrap); * p<=.05, ** p<=.001");
    }

    ReportTable t4{"explanation_quality",
                   {"group", "aggregation", "explanations", "pct_important", "pct_none_important", "pct_wrong",
                    "pct_none_wrong"},
                   {}};
    for (const auto& [group, sets] : ann.explanations) {
        for (auto mode : {AggregationMode::individual, AggregationMode::majority_vote}) {
            const std::string mname = mode == AggregationMode::individual ? "individual" : "majority";
            std::vector<Explanation> r;
            try {
                r = aggregate_explanation_labels(sets, mode);
            } catch (const DataError& e) {
                if (mode == AggregationMode::individual) throw;
                rep.notes.push_back("majority vote skipped for group " + group + ": " + e.what());
                continue;
            }
            if (r.empty()) continue;
            const std::string key = group + "/" + mname;
            const double pi = pct_important(r), pni = pct_none_important(r), pw = pct_wrong(r),
                         pnw = pct_none_wrong(r);
            rep.set("pct_important/" + key, pi);
            rep.set("pct_none_important/" + key, pni);
            rep.set("pct_wrong/" + key, pw);
            rep.set("pct_none_wrong/" + key, pnw);
            t4.rows.push_back({group, mname, std::to_string(r.size()), pct(pi), pct(pni), pct(pw), pct(pnw)});
        }
    }
    if (!t4.rows.empty()) rep.tables.push_back(std::move(t4));
    emit(rep, cfg, "stats_report", log);
    return rep;
}

}  // namespace armeval

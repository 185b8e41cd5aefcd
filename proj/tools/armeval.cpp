// armeval: command-line front end for the rewrite-metric pipeline.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "armeval/commands.hpp"
#include "armeval/errors.hpp"

using namespace armeval;

namespace {

struct RawFlags {
    std::string mode = "replay";
    std::string variant = "both";
    std::string gold = "subjectivity";
    std::string explanation_source = "rewrite_response";
    bool raw_equality = false;
    bool no_explain = false;
};

void add_corpus_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--corpus", cfg.corpus, "Corpus JSON file")->required();
    cmd->add_option("--schema-version", cfg.schema_version, "1 | storysumm | auto");
    cmd->add_option("--out", cfg.out, "Output directory for results and reports");
}

void add_model_flags(CLI::App* cmd, RunConfig& cfg, RawFlags& raw) {
    cmd->add_option("--model", cfg.model, "Model name")->required();
    cmd->add_option("--mode", raw.mode, "live | record | replay");
    cmd->add_option("--backend", cfg.backend, "openai | anthropic | script:<file> (default: from model name)");
    cmd->add_option("--cache", cfg.cache, "Replay cache directory");
    cmd->add_option("--prompts", cfg.prompts, "Directory of prompt templates overriding the built-in set");
    cmd->add_option("--seed", cfg.seed, "Seed");
    cmd->add_option("--parallel", cfg.parallelism, "Maximum concurrent model calls");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rewrite-based ambiguity and faithfulness evaluation"};
    app.require_subcommand(1);
    RunConfig cfg;
    RawFlags raw;

    auto* validate = app.add_subcommand("validate", "Check a corpus and print its label counts");
    add_corpus_flags(validate, cfg);

    auto* arm = app.add_subcommand("arm", "Rewrite every claim and score the rewrite signal");
    add_corpus_flags(arm, cfg);
    add_model_flags(arm, cfg, raw);
    arm->add_option("--variant", raw.variant, "subjectivity | inconsistency | both");
    arm->add_option("--gold", raw.gold, "subjectivity | faithfulness | subj_or_unfaith");
    arm->add_option("--explanation-source", raw.explanation_source, "rewrite_response | separate_call");
    arm->add_flag("--no-explain", raw.no_explain, "Skip explanation parsing");
    arm->add_flag("--raw-equality", raw.raw_equality, "Compare raw strings instead of normalized tokens");

    auto* baseline = app.add_subcommand("baseline", "Run a prompting baseline classifier");
    add_corpus_flags(baseline, cfg);
    add_model_flags(baseline, cfg, raw);
    baseline->add_option("--method", cfg.method, "zero_shot | few_shot | self_consistency");
    baseline->add_option("--gold", raw.gold, "subjectivity | faithfulness | subj_or_unfaith");

    auto* synth = app.add_subcommand("synth", "Generate synthetic claim variants and spliced summaries");
    add_corpus_flags(synth, cfg);
    add_model_flags(synth, cfg, raw);
    synth->add_flag("--all-types", cfg.all_types, "Generate all four types per objective claim");

    auto* stats = app.add_subcommand("stats", "Agreement, explanation metrics and bootstrap tests");
    stats->add_option("--annotations", cfg.annotations, "Annotation JSON file")->required();
    stats->add_option("--compare", cfg.compare, "GROUP_A:GROUP_B bootstrap comparison");
    stats->add_option("--trials", cfg.trials, "Bootstrap trials");
    stats->add_option("--seed", cfg.seed, "Bootstrap seed");
    stats->add_option("--parallel", cfg.parallelism, "Bootstrap worker threads");
    stats->add_option("--out", cfg.out, "Output directory for reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        cfg.mode = parse_backend_mode(raw.mode);
        cfg.variant = parse_rewrite_variant(raw.variant);
        cfg.gold = parse_gold_layer(raw.gold);
        cfg.explain = !raw.no_explain;
        cfg.equality = raw.raw_equality ? RewriteEquality::raw : RewriteEquality::normalized;
        if (raw.explanation_source == "separate_call") cfg.explanation_source = ExplanationSource::separate_call;
        else if (raw.explanation_source != "rewrite_response")
            throw UsageError("unknown explanation source '" + raw.explanation_source + "'");
        if (cfg.parallelism == 0) throw UsageError("--parallel must be at least 1");

        if (*validate) cmd_validate(cfg, std::cout);
        else if (*arm) cmd_arm(cfg, std::cout);
        else if (*baseline) cmd_baseline(cfg, std::cout);
        else if (*synth) cmd_synth(cfg, std::cout);
        else if (*stats) cmd_stats(cfg, std::cout);
        return exit_ok;
    } catch (const std::exception& e) {
        std::cerr << "armeval: " << e.what() << '\n';
        return exit_code_for(std::current_exception());
    }
}

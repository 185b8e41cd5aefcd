#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "armeval/arm.hpp"
#include "armeval/baselines.hpp"
#include "armeval/corpus.hpp"
#include "armeval/llmgw.hpp"
#include "armeval/metrics.hpp"
#include "armeval/report.hpp"

namespace armeval {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_data = 2, exit_backend = 3 };

/// Maps an in-flight exception to the CLI exit code.
int exit_code_for(std::exception_ptr e);

/// Which gold layer scores detection-positive predictions.
///  subjectivity:    subjective => positive, objective => negative
///  faithfulness:    unsupported => positive, supported => negative
///  subj_or_unfaith: subjective or unsupported => positive,
///                   objective and supported => negative
/// Claims the layer cannot decide (N/A, ambiguous, unlabeled) are left out.
enum class GoldLayer { subjectivity, faithfulness, subj_or_unfaith };

std::string_view to_string(GoldLayer g);
GoldLayer parse_gold_layer(std::string_view s);

std::map<std::string, bool> gold_labels(const Corpus& corpus, GoldLayer layer);

struct RunConfig {
    std::filesystem::path corpus;
    std::string schema_version = "auto";
    std::string model;
    BackendMode mode = BackendMode::replay;
    /// "" picks the HTTP API from the model name; otherwise "openai",
    /// "anthropic" or "script:<file>".
    std::string backend;
    std::filesystem::path cache;
    std::filesystem::path prompts;  // empty: built-in templates
    RewriteVariant variant = RewriteVariant::both;
    std::string method = "zero_shot";
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    GoldLayer gold = GoldLayer::subjectivity;
    bool explain = true;
    ExplanationSource explanation_source = ExplanationSource::rewrite_response;
    RewriteEquality equality = RewriteEquality::normalized;
    bool all_types = false;
    std::size_t trials = 10000;
    std::filesystem::path annotations;
    std::string compare;  // "A:B" group names for cmd_stats
    std::filesystem::path out;

    /// Canonical, location-independent description of the run: file
    /// inputs appear by name and content digest, never by absolute path.
    [[nodiscard]] nlohmann::json canonical_json() const;
    [[nodiscard]] std::string digest() const;
};

/// Builds the backend stack for `cfg`: replay needs an existing cache,
/// record needs a cache directory, live ignores it.
struct BackendStack {
    std::shared_ptr<ReplayCache> cache;
    std::unique_ptr<Backend> backend;
};
BackendStack make_backend(const RunConfig& cfg);

Corpus load_run_corpus(const RunConfig& cfg);

MetricReport cmd_validate(const RunConfig& cfg, std::ostream& log);
MetricReport cmd_arm(const RunConfig& cfg, std::ostream& log);
MetricReport cmd_baseline(const RunConfig& cfg, std::ostream& log);
MetricReport cmd_synth(const RunConfig& cfg, std::ostream& log);
MetricReport cmd_stats(const RunConfig& cfg, std::ostream& log);

/// Adds the classification and recall-by-type scores of `preds` to
/// `report` (shared by the arm and baseline commands). `method` labels the
/// detection table row.
void add_detection_scores(MetricReport& report, const std::string& method, const Corpus& corpus,
                          const Predictions& preds, GoldLayer gold);

/// Annotation file consumed by cmd_stats.
struct AnnotationFile {
    std::map<std::string, std::vector<AgreementItem>> agreement;          // group -> items
    std::map<std::string, std::vector<ExplanationLabelSet>> explanations;  // group -> sets
};
AnnotationFile load_annotations(const std::filesystem::path& path);
AnnotationFile annotations_from_json(const nlohmann::json& doc);

}  // namespace armeval

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "armeval/corpus.hpp"

namespace armeval {

// --- agreement ----------------------------------------------------------------

struct AgreementItem {
    std::string id;
    std::vector<FaithStatus> labels;
};

/// Percent of items on which all `k` annotators give the same label.
/// Throws DataError listing every item that does not have exactly k labels.
double agreement_rate(const std::vector<AgreementItem>& items, std::size_t k = 3);

/// 1/0 per item: unanimous or not. Input for bootstrap comparisons.
std::vector<int> agreement_outcomes(const std::vector<AgreementItem>& items, std::size_t k = 3);

/// 1/0 per item: at least `min_votes` annotators said supported.
std::vector<int> faithful_outcomes(const std::vector<AgreementItem>& items, std::size_t min_votes = 2);

// --- classification -------------------------------------------------------------

/// Binary confusion counts with "positive" as the detection class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    [[nodiscard]] std::size_t total() const { return tp + fp + tn + fn; }
};

struct AlignedScores {
    ConfusionCounts counts;
    std::size_t unmatched_predictions = 0;  // predictions without a gold label
    std::size_t missing_predictions = 0;    // gold labels without a prediction
};

/// Pairs predictions and golds on claim id; only ids present in both count.
AlignedScores align(const std::map<std::string, bool>& preds, const std::map<std::string, bool>& golds);

/// Mean per-class recall x 100. Throws DataError if either gold class is absent.
double balanced_accuracy(const ConfusionCounts& c);
/// Unweighted mean of the positive- and negative-class F1, in [0, 1].
double f1_macro(const ConfusionCounts& c);

// --- explanation labels ---------------------------------------------------------

enum class PointLabel { important, neutral, wrong };

std::string_view to_string(PointLabel l);
PointLabel parse_point_label(std::string_view s);

/// Labels on one explanation, one entry per point (E).
using Explanation = std::vector<PointLabel>;

/// Macro average over R of the fraction of points carrying `target`, x 100.
double pct_with_label(const std::vector<Explanation>& r, PointLabel target);
/// 100 x fraction of explanations in R with no point carrying `target`.
double pct_none_with_label(const std::vector<Explanation>& r, PointLabel target);

inline double pct_important(const std::vector<Explanation>& r) { return pct_with_label(r, PointLabel::important); }
inline double pct_none_important(const std::vector<Explanation>& r) {
    return pct_none_with_label(r, PointLabel::important);
}
inline double pct_wrong(const std::vector<Explanation>& r) { return pct_with_label(r, PointLabel::wrong); }
inline double pct_none_wrong(const std::vector<Explanation>& r) { return pct_none_with_label(r, PointLabel::wrong); }

struct ExplanationPoint {
    std::string text;
    bool is_decoy = false;
    std::map<std::string, PointLabel> labels;  // annotator id -> label
};

/// Human labels for the parsed explanation of one rewrite.
struct ExplanationLabelSet {
    std::string rewrite_id;
    std::vector<ExplanationPoint> points;
};

enum class AggregationMode { individual, majority_vote };

/// Builds R. Decoy points are dropped first. `individual` yields one E per
/// (rewrite, annotator); `majority_vote` one E per rewrite with each point's
/// modal label (needs >= 3 annotators; no unique mode resolves to NEUTRAL).
/// Rewrites left with no points are skipped.
std::vector<Explanation> aggregate_explanation_labels(const std::vector<ExplanationLabelSet>& sets,
                                                      AggregationMode mode);

// --- recall by ambiguity type -----------------------------------------------------

struct TypeRecall {
    std::map<int, double> recall;          // type -> recall in [0, 1]
    std::map<int, std::size_t> support;    // gold-subjective claims per type
    std::vector<int> omitted;              // types with no gold-subjective claims
};

/// Recall of detection-positive predictions among gold-subjective claims of
/// each type 1-4. Claims without a prediction are not counted.
TypeRecall recall_by_type(const std::map<std::string, bool>& preds, const Corpus& gold);

/// Per-type mean of several runs' recalls (types missing in a run are skipped).
TypeRecall mean_recall_by_type(const std::vector<TypeRecall>& runs);

// --- bootstrap ------------------------------------------------------------------------

struct BootstrapResult {
    double observed_difference = 0.0;  // mean(A) - mean(B)
    double p_value = 1.0;
    std::size_t trials = 10000;
    std::uint64_t seed = 0;
};

/// Two-sided bootstrap test of a difference in proportions under the null
/// that both groups share one distribution: each trial resamples groups of
/// sizes |A| and |B| with replacement from the pooled outcomes. p is
/// (1 + #{|d*| >= |d_obs|}) / (1 + trials). Trial t draws from its own
/// generator seeded with splitmix64(seed ^ t), so the result does not
/// depend on `parallelism`.
BootstrapResult bootstrap_pvalue(const std::vector<int>& group_a, const std::vector<int>& group_b,
                                 std::size_t trials = 10000, std::uint64_t seed = 0, std::size_t parallelism = 1);

}  // namespace armeval

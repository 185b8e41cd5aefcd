#include "armeval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <random>
#include <set>

#include "armeval/errors.hpp"
#include "armeval/parallel.hpp"

namespace armeval {

namespace {

void check_label_counts(const std::vector<AgreementItem>& items, std::size_t k) {
    if (items.empty()) throw DataError("agreement needs at least one item");
    std::string bad;
    for (const auto& it : items) {
        if (it.labels.size() == k) continue;
        if (!bad.empty()) bad += ", ";
        bad += it.id + " (" + std::to_string(it.labels.size()) + ")";
    }
    if (!bad.empty()) throw DataError("items without exactly " + std::to_string(k) + " labels: " + bad);
}

bool unanimous(const AgreementItem& it) {
    return std::all_of(it.labels.begin(), it.labels.end(), [&](FaithStatus s) { return s == it.labels.front(); });
}

}  // namespace

std::vector<int> agreement_outcomes(const std::vector<AgreementItem>& items, std::size_t k) {
    check_label_counts(items, k);
    std::vector<int> out;
    out.reserve(items.size());
    for (const auto& it : items) out.push_back(unanimous(it) ? 1 : 0);
    return out;
}

double agreement_rate(const std::vector<AgreementItem>& items, std::size_t k) {
    const auto outcomes = agreement_outcomes(items, k);
    std::size_t n = 0;
    for (int o : outcomes) n += static_cast<std::size_t>(o);
    return 100.0 * static_cast<double>(n) / static_cast<double>(outcomes.size());
}

std::vector<int> faithful_outcomes(const std::vector<AgreementItem>& items, std::size_t min_votes) {
    std::vector<int> out;
    out.reserve(items.size());
    for (const auto& it : items) {
        const auto votes = std::count(it.labels.begin(), it.labels.end(), FaithStatus::supported);
        out.push_back(static_cast<std::size_t>(votes) >= min_votes ? 1 : 0);
    }
    return out;
}

AlignedScores align(const std::map<std::string, bool>& preds, const std::map<std::string, bool>& golds) {
    AlignedScores s;
    for (const auto& [id, gold] : golds) {
        auto it = preds.find(id);
        if (it == preds.end()) {
            ++s.missing_predictions;
            continue;
        }
        const bool pred = it->second;
        if (gold && pred) ++s.counts.tp;
        else if (gold) ++s.counts.fn;
        else if (pred) ++s.counts.fp;
        else ++s.counts.tn;
    }
    for (const auto& [id, pred] : preds)
        if (!golds.count(id)) ++s.unmatched_predictions;
    return s;
}

namespace {

// Both scores are ratios of integers. Dividing once, with operands that are
// exact as doubles, gives the correctly rounded value regardless of how the
// formula is grouped. Counts this large never occur; the guard only keeps
// the products from overflowing.
constexpr std::uint64_t kExactLimit = std::uint64_t{1} << 24;

double ratio(std::uint64_t num, std::uint64_t den) { return static_cast<double>(num) / static_cast<double>(den); }

bool small(const ConfusionCounts& c) {
    return c.tp < kExactLimit && c.fp < kExactLimit && c.tn < kExactLimit && c.fn < kExactLimit;
}

}  // namespace

double balanced_accuracy(const ConfusionCounts& c) {
    const std::uint64_t pos = c.tp + c.fn;
    const std::uint64_t neg = c.tn + c.fp;
    if (pos == 0 || neg == 0)
        throw DataError(std::string("balanced accuracy undefined: no gold ") + (pos == 0 ? "positive" : "negative") +
                        " claims");
    // 100 * (tp/pos + tn/neg) / 2
    if (small(c)) return ratio(50 * (c.tp * neg + c.tn * pos), pos * neg);
    return 50.0 * (ratio(c.tp, pos) + ratio(c.tn, neg));
}

double f1_macro(const ConfusionCounts& c) {
    // Per-class F1 = 2TP / (2TP + FP + FN); a class never predicted nor present scores 0.
    const std::uint64_t dpos = 2 * c.tp + c.fp + c.fn;
    const std::uint64_t dneg = 2 * c.tn + c.fn + c.fp;
    if (dpos == 0 && dneg == 0) return 0.0;
    if (dpos == 0) return ratio(c.tn, dneg);
    if (dneg == 0) return ratio(c.tp, dpos);
    if (small(c)) return ratio(c.tp * dneg + c.tn * dpos, dpos * dneg);
    return ratio(c.tp, dpos) + ratio(c.tn, dneg);
}

std::string_view to_string(PointLabel l) {
    switch (l) {
        case PointLabel::important: return "IMPORTANT";
        case PointLabel::neutral: return "NEUTRAL";
        case PointLabel::wrong: return "WRONG";
    }
    return "?";
}

PointLabel parse_point_label(std::string_view s) {
    std::string up(s);
    for (auto& ch : up) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up == "IMPORTANT" || up == "I") return PointLabel::important;
    if (up == "NEUTRAL" || up == "N") return PointLabel::neutral;
    if (up == "WRONG" || up == "W") return PointLabel::wrong;
    throw DataError("unknown explanation label '" + std::string(s) + "'");
}

namespace {

void check_explanations(const std::vector<Explanation>& r) {
    if (r.empty()) throw DataError("explanation metrics need at least one explanation");
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i].empty()) throw DataError("explanation " + std::to_string(i) + " has no points");
}

}  // namespace

double pct_with_label(const std::vector<Explanation>& r, PointLabel target) {
    check_explanations(r);
    double sum = 0.0;
    for (const auto& e : r) {
        const auto hits = std::count(e.begin(), e.end(), target);
        sum += static_cast<double>(hits) / static_cast<double>(e.size());
    }
    return 100.0 * sum / static_cast<double>(r.size());
}

double pct_none_with_label(const std::vector<Explanation>& r, PointLabel target) {
    check_explanations(r);
    std::size_t none = 0;
    for (const auto& e : r)
        if (std::find(e.begin(), e.end(), target) == e.end()) ++none;
    return 100.0 * static_cast<double>(none) / static_cast<double>(r.size());
}

std::vector<Explanation> aggregate_explanation_labels(const std::vector<ExplanationLabelSet>& sets,
                                                      AggregationMode mode) {
    std::vector<Explanation> out;
    for (const auto& set : sets) {
        std::vector<const ExplanationPoint*> points;
        for (const auto& p : set.points)
            if (!p.is_decoy) points.push_back(&p);
        if (points.empty()) continue;

        if (mode == AggregationMode::majority_vote) {
            Explanation e;
            for (const auto* p : points) {
                if (p->labels.size() < 3)
                    throw DataError("majority vote needs at least 3 annotators per point", set.rewrite_id);
                std::array<std::size_t, 3> votes{};
                for (const auto& [ann, l] : p->labels) ++votes[static_cast<std::size_t>(l)];
                const auto top = *std::max_element(votes.begin(), votes.end());
                if (std::count(votes.begin(), votes.end(), top) > 1) {
                    e.push_back(PointLabel::neutral);
                } else {
                    e.push_back(static_cast<PointLabel>(std::find(votes.begin(), votes.end(), top) - votes.begin()));
                }
            }
            out.push_back(std::move(e));
            continue;
        }

        std::set<std::string> annotators;
        for (const auto* p : points)
            for (const auto& [ann, l] : p->labels) annotators.insert(ann);
        for (const auto& ann : annotators) {
            Explanation e;
            for (const auto* p : points) {
                auto it = p->labels.find(ann);
                if (it == p->labels.end())
                    throw DataError("annotator " + ann + " did not label every point", set.rewrite_id);
                e.push_back(it->second);
            }
            out.push_back(std::move(e));
        }
    }
    return out;
}

TypeRecall recall_by_type(const std::map<std::string, bool>& preds, const Corpus& gold) {
    std::map<int, std::size_t> hits;
    TypeRecall r;
    for (const auto& sm : gold.summaries) {
        for (const auto& c : sm.claims) {
            if (c.subjectivity != Subjectivity::subjective || !c.ambiguity_type) continue;
            const int t = *c.ambiguity_type;
            if (t < 1 || t > 4) continue;
            auto it = preds.find(c.id);
            if (it == preds.end()) continue;
            ++r.support[t];
            if (it->second) ++hits[t];
        }
    }
    for (int t = 1; t <= 4; ++t) {
        auto it = r.support.find(t);
        if (it == r.support.end()) {
            r.omitted.push_back(t);
            continue;
        }
        r.recall[t] = static_cast<double>(hits[t]) / static_cast<double>(it->second);
    }
    return r;
}

TypeRecall mean_recall_by_type(const std::vector<TypeRecall>& runs) {
    TypeRecall out;
    for (int t = 1; t <= 4; ++t) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& run : runs) {
            auto it = run.recall.find(t);
            if (it == run.recall.end()) continue;
            sum += it->second;
            ++n;
            out.support[t] += run.support.at(t);
        }
        if (n == 0) out.omitted.push_back(t);
        else out.recall[t] = sum / static_cast<double>(n);
    }
    return out;
}

BootstrapResult bootstrap_pvalue(const std::vector<int>& group_a, const std::vector<int>& group_b,
                                 std::size_t trials, std::uint64_t seed, std::size_t parallelism) {
    if (group_a.empty() || group_b.empty()) throw DataError("bootstrap needs two non-empty groups");
    if (trials == 0) throw UsageError("bootstrap needs at least one trial");
    std::vector<int> pooled;
    pooled.reserve(group_a.size() + group_b.size());
    for (const auto* g : {&group_a, &group_b})
        for (int v : *g) {
            if (v != 0 && v != 1) throw DataError("bootstrap outcomes must be 0 or 1");
            pooled.push_back(v);
        }

    const auto na = static_cast<std::int64_t>(group_a.size());
    const auto nb = static_cast<std::int64_t>(group_b.size());
    // Compare na*nb*|mean diff| as integers so ties are exact.
    auto scaled_diff = [&](std::int64_t sa, std::int64_t sb) { return std::llabs(sa * nb - sb * na); };
    std::int64_t sa = 0, sb = 0;
    for (int v : group_a) sa += v;
    for (int v : group_b) sb += v;
    const std::int64_t observed = scaled_diff(sa, sb);

    // Trials are split into fixed blocks; each trial owns its generator.
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<std::size_t> extreme(blocks, 0);
    parallel_for(blocks, parallelism, [&](std::size_t b) {
        const std::size_t end = std::min(trials, (b + 1) * kBlock);
        std::size_t count = 0;
        for (std::size_t t = b * kBlock; t < end; ++t) {
            std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(t)));
            std::int64_t ra = 0, rb = 0;
            for (std::int64_t i = 0; i < na; ++i) ra += pooled[uniform_index(rng, pooled.size())];
            for (std::int64_t i = 0; i < nb; ++i) rb += pooled[uniform_index(rng, pooled.size())];
            if (scaled_diff(ra, rb) >= observed) ++count;
        }
        extreme[b] = count;
    });
    std::size_t total = 0;
    for (auto c : extreme) total += c;

    BootstrapResult r;
    r.observed_difference = static_cast<double>(sa) / static_cast<double>(na) -
                            static_cast<double>(sb) / static_cast<double>(nb);
    r.p_value = static_cast<double>(1 + total) / static_cast<double>(1 + trials);
    r.trials = trials;
    r.seed = seed;
    return r;
}

}  // namespace armeval

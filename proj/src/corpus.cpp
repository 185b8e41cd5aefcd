#include "armeval/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "armeval/errors.hpp"
#include "armeval/textproc.hpp"

namespace armeval {

using nlohmann::json;

std::string_view to_string(FaithStatus s) {
    switch (s) {
        case FaithStatus::supported: return "supported";
        case FaithStatus::unsupported: return "unsupported";
        case FaithStatus::ambiguous: return "ambiguous";
        case FaithStatus::not_applicable: return "not_applicable";
    }
    return "?";
}

std::string_view to_string(Subjectivity s) {
    return s == Subjectivity::objective ? "objective" : "subjective";
}

std::string_view to_string(WriterKind w) { return w == WriterKind::llm ? "llm" : "human"; }

FaithStatus parse_faith_status(std::string_view s) {
    if (s == "supported" || s == "faithful") return FaithStatus::supported;
    if (s == "unsupported" || s == "unfaithful") return FaithStatus::unsupported;
    if (s == "ambiguous") return FaithStatus::ambiguous;
    if (s == "not_applicable" || s == "N/A" || s == "n/a" || s == "NA") return FaithStatus::not_applicable;
    throw DataError("unknown faithfulness status '" + std::string(s) + "'");
}

Subjectivity parse_subjectivity(std::string_view s) {
    if (s == "objective") return Subjectivity::objective;
    if (s == "subjective") return Subjectivity::subjective;
    throw DataError("unknown subjectivity label '" + std::string(s) + "'");
}

std::optional<FaithStatus> Claim::resolved_faithfulness() const {
    if (gold_faithfulness) return gold_faithfulness;
    if (faithfulness_labels.empty()) return std::nullopt;
    std::map<FaithStatus, std::size_t> votes;
    for (const auto& l : faithfulness_labels) ++votes[l.value];
    for (const auto& [status, n] : votes)
        if (2 * n > faithfulness_labels.size()) return status;
    return FaithStatus::ambiguous;
}

std::string SummaryRecord::text() const {
    std::string out;
    for (const auto& c : claims) {
        if (!out.empty()) out += ' ';
        out += c.text;
    }
    return out;
}

const Story& Corpus::story(std::string_view id) const {
    for (const auto& s : stories)
        if (s.id == id) return s;
    throw DataError("unknown story id", std::string(id));
}

std::size_t Corpus::claim_count() const {
    std::size_t n = 0;
    for (const auto& s : summaries) n += s.claims.size();
    return n;
}

void validate_corpus(const Corpus& corpus) {
    std::unordered_set<std::string> story_ids;
    for (const auto& st : corpus.stories) {
        if (st.id.empty()) throw DataError("story with empty id");
        if (!story_ids.insert(st.id).second) throw DataError("duplicate story id", st.id);
        if (trim(st.text).empty()) throw DataError("story text is empty", st.id);
    }
    std::unordered_set<std::string> summary_ids;
    std::unordered_set<std::string> claim_ids;
    for (const auto& sm : corpus.summaries) {
        if (!summary_ids.insert(sm.id).second) throw DataError("duplicate summary id", sm.id);
        if (!story_ids.count(sm.story_id))
            throw DataError("summary references missing story '" + sm.story_id + "'", sm.id);
        if (sm.claims.empty()) throw DataError("summary has no claims", sm.id);
        for (const auto& c : sm.claims) {
            if (c.id.empty()) throw DataError("claim with empty id", sm.id);
            if (!claim_ids.insert(c.id).second) throw DataError("duplicate claim id", c.id);
            if (trim(c.text).empty()) throw DataError("claim text is empty", c.id);
            if (segment_sentences(c.text).size() != 1)
                throw DataError("claim text is not a single sentence", c.id);
            if (c.ambiguity_type) {
                if (*c.ambiguity_type < 1 || *c.ambiguity_type > 5)
                    throw DataError("ambiguity_type must be in 1..5", c.id);
                if (c.subjectivity != Subjectivity::subjective)
                    throw DataError("ambiguity_type on a claim that is not subjective", c.id);
            }
        }
    }
}

// --- native schema -------------------------------------------------------

namespace {

const json& require(const json& obj, const char* key, const std::string& record) {
    if (!obj.is_object() || !obj.contains(key))
        throw DataError(std::string("missing field '") + key + "'", record);
    return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& record) {
    const json& v = require(obj, key, record);
    if (!v.is_string()) throw DataError(std::string("field '") + key + "' must be a string", record);
    return v.get<std::string>();
}

std::string optional_string(const json& obj, const char* key) {
    if (obj.contains(key) && obj.at(key).is_string()) return obj.at(key).get<std::string>();
    return {};
}

ClaimProvenance provenance_from_json(const json& j, const std::string& record) {
    ClaimProvenance p;
    p.source_claim_id = require_string(j, "source_claim_id", record);
    p.variant = require_string(j, "variant", record);
    if (j.contains("expected_polarity") && !j.at("expected_polarity").is_null())
        p.expected = parse_subjectivity(j.at("expected_polarity").get<std::string>());
    if (j.contains("ambiguity_type") && !j.at("ambiguity_type").is_null())
        p.ambiguity_type = j.at("ambiguity_type").get<int>();
    p.template_name = optional_string(j, "template");
    return p;
}

json provenance_to_json(const ClaimProvenance& p) {
    json j = {{"source_claim_id", p.source_claim_id}, {"variant", p.variant}};
    j["expected_polarity"] = p.expected ? json(to_string(*p.expected)) : json(nullptr);
    j["ambiguity_type"] = p.ambiguity_type ? json(*p.ambiguity_type) : json(nullptr);
    if (!p.template_name.empty()) j["template"] = p.template_name;
    return j;
}

Claim claim_from_json(const json& j, const std::string& parent) {
    Claim c;
    c.id = require_string(j, "id", parent);
    c.text = require_string(j, "text", c.id);
    if (j.contains("faithfulness_labels")) {
        const json& labels = j.at("faithfulness_labels");
        if (!labels.is_array()) throw DataError("faithfulness_labels must be an array", c.id);
        for (const auto& l : labels) {
            FaithLabel fl;
            fl.annotator_id = require_string(l, "annotator_id", c.id);
            try {
                fl.value = parse_faith_status(require_string(l, "value", c.id));
            } catch (const DataError& e) {
                throw DataError(e.what(), c.id);
            }
            c.faithfulness_labels.push_back(std::move(fl));
        }
    }
    try {
        if (j.contains("gold_faithfulness") && !j.at("gold_faithfulness").is_null())
            c.gold_faithfulness = parse_faith_status(j.at("gold_faithfulness").get<std::string>());
        if (j.contains("subjectivity") && !j.at("subjectivity").is_null())
            c.subjectivity = parse_subjectivity(j.at("subjectivity").get<std::string>());
        if (j.contains("ambiguity_type") && !j.at("ambiguity_type").is_null())
            c.ambiguity_type = j.at("ambiguity_type").get<int>();
        if (j.contains("provenance") && !j.at("provenance").is_null())
            c.provenance = provenance_from_json(j.at("provenance"), c.id);
    } catch (const json::exception& e) {
        throw DataError(e.what(), c.id);
    }
    return c;
}

json claim_to_json(const Claim& c) {
    json labels = json::array();
    for (const auto& l : c.faithfulness_labels)
        labels.push_back({{"annotator_id", l.annotator_id}, {"value", to_string(l.value)}});
    json j = {{"id", c.id}, {"text", c.text}, {"faithfulness_labels", labels}};
    j["gold_faithfulness"] = c.gold_faithfulness ? json(to_string(*c.gold_faithfulness)) : json(nullptr);
    j["subjectivity"] = c.subjectivity ? json(to_string(*c.subjectivity)) : json(nullptr);
    j["ambiguity_type"] = c.ambiguity_type ? json(*c.ambiguity_type) : json(nullptr);
    if (c.provenance) j["provenance"] = provenance_to_json(*c.provenance);
    return j;
}

Corpus native_from_json(const json& doc) {
    Corpus corpus;
    const json& stories = require(doc, "stories", "<corpus>");
    const json& summaries = require(doc, "summaries", "<corpus>");
    if (!stories.is_array() || !summaries.is_array())
        throw DataError("'stories' and 'summaries' must be arrays", "<corpus>");
    corpus.provenance.schema_version = optional_string(doc, "schema_version");
    if (corpus.provenance.schema_version.empty())
        throw DataError("missing field 'schema_version'", "<corpus>");
    if (corpus.provenance.schema_version != kCorpusSchemaVersion)
        throw DataError("unsupported schema_version '" + corpus.provenance.schema_version + "'", "<corpus>");
    if (doc.contains("provenance") && doc.at("provenance").is_object())
        corpus.provenance.extra = doc.at("provenance");

    std::size_t idx = 0;
    for (const auto& s : stories) {
        const std::string where = "stories[" + std::to_string(idx++) + "]";
        Story st;
        st.id = require_string(s, "id", where);
        st.title = optional_string(s, "title");
        st.text = require_string(s, "text", st.id);
        corpus.stories.push_back(std::move(st));
    }
    idx = 0;
    for (const auto& s : summaries) {
        const std::string where = "summaries[" + std::to_string(idx++) + "]";
        SummaryRecord sm;
        sm.id = require_string(s, "id", where);
        sm.story_id = require_string(s, "story_id", sm.id);
        sm.writer = optional_string(s, "writer");
        const std::string kind = optional_string(s, "writer_kind");
        if (kind == "human") {
            sm.writer_kind = WriterKind::human;
        } else if (!kind.empty() && kind != "llm") {
            throw DataError("writer_kind must be 'llm' or 'human'", sm.id);
        }
        const json& claims = require(s, "claims", sm.id);
        if (!claims.is_array()) throw DataError("'claims' must be an array", sm.id);
        for (const auto& c : claims) sm.claims.push_back(claim_from_json(c, sm.id));
        corpus.summaries.push_back(std::move(sm));
    }
    return corpus;
}

// --- StorySumm release adapter ---------------------------------------------
// See docs/corpus_schema.md for the field mapping.

FaithStatus storysumm_label(const json& v, const std::string& record) {
    if (v.is_number_integer() || v.is_boolean()) {
        const int flag = v.is_boolean() ? static_cast<int>(v.get<bool>()) : v.get<int>();
        if (flag == 1) return FaithStatus::supported;
        if (flag == 0) return FaithStatus::unsupported;
        throw DataError("claim label flag must be 0 or 1", record);
    }
    if (v.is_string()) {
        try {
            return parse_faith_status(v.get<std::string>());
        } catch (const DataError& e) {
            throw DataError(e.what(), record);
        }
    }
    throw DataError("unrecognised claim label", record);
}

const json* first_of(const json& obj, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
        if (obj.contains(k) && !obj.at(k).is_null()) return &obj.at(k);
    return nullptr;
}

Corpus storysumm_from_json(const json& doc) {
    std::vector<std::pair<std::string, const json*>> records;
    if (doc.is_object()) {
        for (auto it = doc.begin(); it != doc.end(); ++it) records.emplace_back(it.key(), &it.value());
    } else if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) records.emplace_back(std::to_string(i), &doc[i]);
    } else {
        throw DataError("StorySumm release must be an object or array of records", "<corpus>");
    }
    if (records.empty()) throw DataError("StorySumm release contains no records", "<corpus>");

    Corpus corpus;
    corpus.provenance.schema_version = "storysumm";
    std::unordered_map<std::string, std::string> story_by_text;
    for (const auto& [key, rec] : records) {
        if (!rec->is_object()) throw DataError("record is not an object", key);
        std::string summary_id = key;
        if (const json* v = first_of(*rec, {"id", "summary_id", "summary-id"}))
            summary_id = v->is_string() ? v->get<std::string>() : v->dump();
        const std::string story_text = require_string(*rec, "story", summary_id);

        std::string story_id;
        if (const json* v = first_of(*rec, {"story_id", "story-id"})) {
            story_id = v->is_string() ? v->get<std::string>() : v->dump();
        } else if (auto it = story_by_text.find(story_text); it != story_by_text.end()) {
            story_id = it->second;
        } else {
            story_id = "story-" + std::to_string(story_by_text.size());
        }
        if (!story_by_text.count(story_text)) {
            story_by_text.emplace(story_text, story_id);
            Story st{story_id, optional_string(*rec, "title"), story_text};
            corpus.stories.push_back(std::move(st));
        }

        SummaryRecord sm;
        sm.id = summary_id;
        sm.story_id = story_id;
        sm.writer = optional_string(*rec, "model");
        if (optional_string(*rec, "writer_kind") == "human") sm.writer_kind = WriterKind::human;

        const json& summary = require(*rec, "summary", summary_id);
        std::vector<std::string> sentences;
        if (summary.is_array()) {
            for (const auto& s : summary) sentences.push_back(s.get<std::string>());
        } else if (summary.is_string()) {
            sentences = segment_sentences(summary.get<std::string>());
        } else {
            throw DataError("'summary' must be a string or list of sentences", summary_id);
        }

        const json* gold = first_of(*rec, {"claim-labels", "claim_labels", "labels"});
        const json* annot = first_of(*rec, {"annotator-labels", "annotator_labels"});
        const json* subj = first_of(*rec, {"subjectivity-labels", "subjectivity_labels", "subjectivity"});
        const json* types = first_of(*rec, {"ambiguity-types", "ambiguity_types"});
        auto check_len = [&](const json* arr, const char* name) {
            if (arr && (!arr->is_array() || arr->size() != sentences.size()))
                throw DataError(std::string("'") + name + "' must have one entry per sentence", summary_id);
        };
        check_len(gold, "claim-labels");
        check_len(annot, "annotator-labels");
        check_len(subj, "subjectivity-labels");
        check_len(types, "ambiguity-types");

        for (std::size_t i = 0; i < sentences.size(); ++i) {
            Claim c;
            c.id = summary_id + "-" + std::to_string(i);
            c.text = sentences[i];
            if (gold && !(*gold)[i].is_null()) {
                const json& g = (*gold)[i];
                if (g.is_array()) {
                    for (std::size_t a = 0; a < g.size(); ++a)
                        c.faithfulness_labels.push_back({"a" + std::to_string(a + 1), storysumm_label(g[a], c.id)});
                } else {
                    c.gold_faithfulness = storysumm_label(g, c.id);
                }
            }
            if (annot && (*annot)[i].is_array()) {
                const json& g = (*annot)[i];
                for (std::size_t a = 0; a < g.size(); ++a)
                    c.faithfulness_labels.push_back({"a" + std::to_string(a + 1), storysumm_label(g[a], c.id)});
            }
            if (subj && !(*subj)[i].is_null()) {
                const json& s = (*subj)[i];
                if (s.is_string()) {
                    c.subjectivity = parse_subjectivity(s.get<std::string>());
                } else {
                    c.subjectivity = s.get<int>() != 0 ? Subjectivity::subjective : Subjectivity::objective;
                }
            }
            if (types && !(*types)[i].is_null()) c.ambiguity_type = (*types)[i].get<int>();
            sm.claims.push_back(std::move(c));
        }
        corpus.summaries.push_back(std::move(sm));
    }
    return corpus;
}

}  // namespace

Corpus corpus_from_json(const json& doc, std::string_view schema_version) {
    std::string version(schema_version);
    if (version == "auto") version = (doc.is_object() && doc.contains("stories")) ? "1" : "storysumm";
    Corpus corpus;
    try {
        if (version == "1") {
            corpus = native_from_json(doc);
        } else if (version == "storysumm") {
            corpus = storysumm_from_json(doc);
        } else {
            throw UsageError("unknown corpus schema version '" + version + "'");
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("schema violation: ") + e.what());
    }
    validate_corpus(corpus);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, std::string_view schema_version) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("corpus is not valid JSON: ") + e.what(), path.string());
    }
    Corpus corpus = corpus_from_json(doc, schema_version);
    corpus.provenance.source_path = path.string();
    return corpus;
}

json corpus_to_json(const Corpus& corpus) {
    json stories = json::array();
    for (const auto& s : corpus.stories) stories.push_back({{"id", s.id}, {"title", s.title}, {"text", s.text}});
    json summaries = json::array();
    for (const auto& sm : corpus.summaries) {
        json claims = json::array();
        for (const auto& c : sm.claims) claims.push_back(claim_to_json(c));
        summaries.push_back({{"id", sm.id},
                             {"story_id", sm.story_id},
                             {"writer", sm.writer},
                             {"writer_kind", to_string(sm.writer_kind)},
                             {"claims", claims}});
    }
    json doc = {{"schema_version", kCorpusSchemaVersion}, {"stories", stories}, {"summaries", summaries}};
    if (!corpus.provenance.extra.empty()) doc["provenance"] = corpus.provenance.extra;
    return doc;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file '" + path.string() + "'");
    out << corpus_to_json(corpus).dump(2) << '\n';
}

// --- label counts ---------------------------------------------------------

std::size_t CountTable::at(const std::string& key) const {
    auto it = cells.find(key);
    return it == cells.end() ? 0 : it->second;
}

std::size_t CountTable::total() const {
    std::size_t n = 0;
    for (const auto& [k, v] : cells) n += v;
    return n;
}

namespace {

std::string faith_key(FaithStatus s) {
    switch (s) {
        case FaithStatus::supported: return "faithful";
        case FaithStatus::unsupported: return "unfaithful";
        default: return "ambiguous";
    }
}

}  // namespace

CountTable count_labels(const Corpus& corpus, LabelAxis axis, bool allow_partial) {
    CountTable table;
    table.axis = axis;
    if (axis == LabelAxis::faith_by_subjectivity) {
        for (const char* f : {"faithful", "unfaithful"})
            for (const char* s : {"objective", "subjective"}) table.cells[std::string(f) + "/" + s] = 0;
    } else {
        for (int t = 1; t <= 5; ++t) table.cells[std::to_string(t)] = 0;
    }
    for (const auto& sm : corpus.summaries) {
        for (const auto& c : sm.claims) {
            if (axis == LabelAxis::faith_by_subjectivity) {
                const auto faith = c.resolved_faithfulness();
                if (faith == FaithStatus::not_applicable) {
                    ++table.excluded;
                    continue;
                }
                if (!faith || !c.subjectivity) {
                    table.unlabeled.push_back(c.id);
                    continue;
                }
                ++table.cells[faith_key(*faith) + "/" + std::string(to_string(*c.subjectivity))];
            } else {
                if (c.subjectivity != Subjectivity::subjective) continue;
                if (!c.ambiguity_type) {
                    table.unlabeled.push_back(c.id);
                    continue;
                }
                ++table.cells[std::to_string(*c.ambiguity_type)];
            }
        }
    }
    if (!table.unlabeled.empty() && !allow_partial) {
        std::ostringstream msg;
        msg << "label layer missing on " << table.unlabeled.size() << " claim(s):";
        for (const auto& id : table.unlabeled) msg << ' ' << id;
        throw DataError(msg.str());
    }
    return table;
}

}  // namespace armeval

#include "armeval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "armeval/errors.hpp"

namespace armeval {

using nlohmann::json;

json Manifest::to_json() const {
    return {{"run_id", run_id}, {"config_digest", config_digest}, {"cache_digest", cache_digest}, {"config", config}};
}

std::string Manifest::reference() const {
    return "run_id=" + run_id + " config_digest=" + config_digest + " cache_digest=" + cache_digest;
}

void MetricReport::set(const std::string& key, json value) {
    for (auto& [k, v] : metrics) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    metrics.emplace_back(key, std::move(value));
}

const json* MetricReport::find(const std::string& key) const {
    for (const auto& [k, v] : metrics)
        if (k == key) return &v;
    return nullptr;
}

json MetricReport::to_json() const {
    json flat = json::object();
    for (const auto& [k, v] : metrics) flat[k] = v;
    json tabs = json::array();
    for (const auto& t : tables) tabs.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows}});
    return {{"command", command}, {"manifest", manifest.to_json()}, {"metrics", flat}, {"tables", tabs},
            {"notes", notes}};
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s == "-0" || s.rfind("-0.", 0) == 0) {
        // avoid "-0.00" for tiny negatives
        if (s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    }
    return s;
}

namespace {

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_fixed(v.get<double>(), 4);
    return v.dump();
}

void aligned(std::ostringstream& out, const std::vector<std::string>& header,
             const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size(), 0);
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += "  ";
            s += cells[i];
            if (i + 1 < cells.size()) s.append(width[i] - cells[i].size(), ' ');
        }
        out << s << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows) line(r);
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

void csv_row(std::ostringstream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
    out << '\n';
}

}  // namespace

std::string MetricReport::to_text() const {
    std::ostringstream out;
    out << "# " << command << "  " << manifest.reference() << "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& [k, v] : metrics) rows.push_back({k, scalar_text(v)});
    aligned(out, {"metric", "value"}, rows);
    for (const auto& t : tables) {
        out << '\n' << t.name << '\n';
        aligned(out, t.columns, t.rows);
    }
    if (!notes.empty()) {
        out << "\nnotes\n";
        for (const auto& n : notes) out << "- " << n << '\n';
    }
    return out.str();
}

std::string MetricReport::to_csv() const {
    std::ostringstream out;
    out << "# " << command << " " << manifest.reference() << '\n';
    csv_row(out, {"metric", "value"});
    for (const auto& [k, v] : metrics) csv_row(out, {k, scalar_text(v)});
    for (const auto& t : tables) {
        out << "\n# " << t.name << '\n';
        csv_row(out, t.columns);
        for (const auto& r : t.rows) csv_row(out, r);
    }
    return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw DataError("cannot write '" + path.string() + "'");
        f << content;
        if (!f) throw DataError("write failed for '" + path.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void write_report(const MetricReport& report, const std::filesystem::path& dir, const std::string& stem) {
    write_file(dir / (stem + ".json"), report.to_json().dump(2) + "\n");
    write_file(dir / (stem + ".txt"), report.to_text());
    write_file(dir / (stem + ".csv"), report.to_csv());
}

}  // namespace armeval

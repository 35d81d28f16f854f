#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cogalign/errors.hpp"
#include "cogalign/report.hpp"

namespace cogalign {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatNames[] = {"json", "csv", "svg-heatmap", "dot-graph"};

std::string safe_name(const std::string& label) {
    std::string out;
    for (char c : label) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? "group" : out;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number()) return format_csv_number(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    std::string s = v.is_string() ? v.get<std::string>() : v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        s = quoted + "\"";
    }
    return s;
}

std::string join_list(const json& list) {
    std::string out;
    for (const auto& v : list) {
        if (!out.empty()) out += ";";
        out += v.get<std::string>();
    }
    return out;
}

std::string matrix_csv(const json& labels, const json& values) {
    std::ostringstream out;
    out << "label";
    for (const auto& l : labels) out << ',' << csv_cell(l);
    out << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << csv_cell(labels[i]);
        for (const auto& v : values[i]) out << ',' << csv_cell(v);
        out << '\n';
    }
    return out.str();
}

std::string table_csv(const json& rows, const std::vector<std::string>& columns) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const json& v = row.contains(columns[c]) ? row.at(columns[c]) : json(nullptr);
            out << (c ? "," : "") << (v.is_array() ? csv_cell(join_list(v)) : csv_cell(v));
        }
        out << '\n';
    }
    return out.str();
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

// Diverging blue-white-red over [-1, 1].
std::string diverging_color(double v) {
    v = std::clamp(v, -1.0, 1.0);
    const double t = std::abs(v);
    const int end[3] = {v >= 0 ? 178 : 33, v >= 0 ? 24 : 102, v >= 0 ? 43 : 172};
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(255 + (end[0] - 255) * t)),
                  static_cast<int>(std::lround(255 + (end[1] - 255) * t)),
                  static_cast<int>(std::lround(255 + (end[2] - 255) * t)));
    return buf;
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
    return s;
}

}  // namespace

std::string_view to_string(OutputFormat f) { return kFormatNames[static_cast<int>(f)]; }

OutputFormat parse_format(std::string_view label) {
    for (int i = 0; i < 4; ++i) {
        if (label == kFormatNames[i]) return static_cast<OutputFormat>(i);
    }
    throw Error(ErrorCode::UnsupportedFormat, "unknown output format '" + std::string(label) + "'");
}

std::set<OutputFormat> parse_formats(std::string_view comma_list) {
    std::set<OutputFormat> out;
    std::size_t start = 0;
    while (start <= comma_list.size()) {
        const auto end = std::min(comma_list.find(',', start), comma_list.size());
        const auto token = comma_list.substr(start, end - start);
        if (!token.empty()) out.insert(parse_format(token));
        start = end + 1;
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "sha256 digest failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string render_svg_heatmap(const json& rsm) {
    const json& labels = rsm.at("labels");
    const json& values = rsm.at("values");
    const std::size_t n = labels.size();
    constexpr int cell = 24;
    constexpr int margin = 110;
    const int side = margin + static_cast<int>(n) * cell + 20;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side + 30
        << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<title>" << xml_escape(rsm.value("group", "")) << " " << xml_escape(rsm.value("mode", ""))
        << " similarity, color scale -1 to 1</title>\n";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string label = xml_escape(labels[i].get<std::string>());
        const int offset = margin + static_cast<int>(i) * cell + cell / 2;
        out << "<text x=\"" << margin - 4 << "\" y=\"" << offset + 3 << "\" text-anchor=\"end\">" << label
            << "</text>\n";
        out << "<text x=\"" << offset << "\" y=\"" << margin - 4 << "\" transform=\"rotate(-60 " << offset << ' '
            << margin - 4 << ")\">" << label << "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const json& v = values[i][j];
            const std::string fill = v.is_null() ? "#bdbdbd" : diverging_color(v.get<double>());
            out << "<rect x=\"" << margin + static_cast<int>(j) * cell << "\" y=\"" << margin + static_cast<int>(i) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"" << fill << "\"><title>"
                << (v.is_null() ? "undefined" : fixed(v.get<double>(), 3)) << "</title></rect>\n";
        }
    }
    // legend: -1 .. 1 in 11 steps
    const int ly = margin + static_cast<int>(n) * cell + 8;
    for (int s = 0; s <= 10; ++s) {
        out << "<rect x=\"" << margin + s * 10 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\""
            << diverging_color(-1.0 + 0.2 * s) << "\"/>\n";
    }
    out << "<text x=\"" << margin << "\" y=\"" << ly + 22 << "\">-1</text>\n";
    out << "<text x=\"" << margin + 100 << "\" y=\"" << ly + 22 << "\">1</text>\n";
    out << "</svg>\n";
    return out.str();
}

std::string render_dot(const json& network, double isolation_threshold) {
    const json& nodes = network.at("nodes");
    const json& weights = network.at("weights");
    const json& partition = network.contains("partition") ? network.at("partition") : json::object();
    std::ostringstream out;
    out << "graph \"" << dot_escape(network.value("group", "network")) << "\" {\n";
    for (const auto& node : nodes) {
        const std::string name = node.get<std::string>();
        out << "  \"" << dot_escape(name) << "\"";
        if (partition.contains(name)) out << " [system=\"" << partition.at(name).get<std::string>() << "\"]";
        out << ";\n";
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const json& w = weights[i][j];
            if (w.is_null() || std::abs(w.get<double>()) < isolation_threshold) continue;
            out << "  \"" << dot_escape(nodes[i].get<std::string>()) << "\" -- \""
                << dot_escape(nodes[j].get<std::string>()) << "\" [label=\"" << fixed(w.get<double>(), 3) << "\"];\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::vector<ManifestEntry> emit_report(const AlignmentReport& report, const std::set<OutputFormat>& formats,
                                       const std::filesystem::path& dest) {
    if (formats.empty()) return {};
    return emit_report_json(report_to_json(report), formats, dest);
}

std::vector<ManifestEntry> emit_report_json(const json& report, const std::set<OutputFormat>& formats,
                                            const std::filesystem::path& dest) {
    std::vector<ManifestEntry> manifest;
    if (formats.empty()) return manifest;
    std::error_code ec;
    std::filesystem::create_directories(dest, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dest.string() + ": " + ec.message());

    auto write = [&](const std::string& name, std::string_view kind, const std::string& content) {
        write_text_file(dest / name, content);
        manifest.push_back({name, std::string(kind), sha256_hex(content)});
    };

    try {
        const json& groups = report.at("groups");
        if (formats.contains(OutputFormat::Json)) write("report.json", "json", report.dump(2) + "\n");
        if (formats.contains(OutputFormat::Csv)) {
            for (const auto& g : groups) {
                const std::string name = safe_name(g.at("label").get<std::string>());
                if (!g.at("rsm").is_null()) {
                    write("rsm_" + name + ".csv", "csv", matrix_csv(g["rsm"]["labels"], g["rsm"]["values"]));
                }
                if (!g.at("network").is_null()) {
                    write("network_" + name + ".csv", "csv",
                          matrix_csv(g["network"]["nodes"], g["network"]["weights"]));
                }
            }
            const json& cmp = report.at("rsm_comparison");
            if (!cmp.at("labels").empty()) {
                write("rsm_comparison.csv", "csv", matrix_csv(cmp["labels"], cmp["values"]));
            }
            write("table1_connectivity.csv", "csv",
                  table_csv(report.at("table1_connectivity"),
                            {"group", "avg_connectivity", "hot_cold_integration", "density"}));
            write("table2_structure.csv", "csv",
                  table_csv(report.at("table2_structure"),
                            {"group", "dominant_core", "information_isolated", "isolated_modules"}));
            if (!report.at("interventions").empty()) {
                json rows = json::array();
                auto find_structure = [&](const std::string& label) -> json {
                    for (const auto& g : groups) {
                        if (g.at("label") == label) return g.at("structure");
                    }
                    return nullptr;
                };
                for (const auto& iv : report.at("interventions")) {
                    for (const char* side : {"pre", "post"}) {
                        const std::string s(side);
                        json row = {{"model", iv.at("model")},
                                    {"condition", iv.at(s + "_condition")},
                                    {"group", iv.at(s + "_group")},
                                    {"accuracy", iv.at(s + "_accuracy")}};
                        const json st = find_structure(iv.at(s + "_group").get<std::string>());
                        row["dominant_core"] = st.is_null() ? json(nullptr) : st.at("dominant_core");
                        row["information_isolated"] = st.is_null() ? json(nullptr) : st.at("information_isolated");
                        row["delta"] = s == "post" ? iv.at("delta") : json(nullptr);
                        rows.push_back(std::move(row));
                    }
                }
                write("interventions.csv", "csv",
                      table_csv(rows, {"model", "condition", "group", "accuracy", "delta", "dominant_core",
                                       "information_isolated"}));
            }
        }
        if (formats.contains(OutputFormat::SvgHeatmap)) {
            for (const auto& g : groups) {
                if (g.at("rsm").is_null()) continue;
                write("rsm_" + safe_name(g.at("label").get<std::string>()) + ".svg", "svg-heatmap",
                      render_svg_heatmap(g.at("rsm")));
            }
        }
        if (formats.contains(OutputFormat::DotGraph)) {
            const double iso = report.at("metadata").at("isolation_threshold").get<double>();
            for (const auto& g : groups) {
                if (g.at("network").is_null()) continue;
                write("network_" + safe_name(g.at("label").get<std::string>()) + ".dot", "dot-graph",
                      render_dot(g.at("network"), iso));
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("report document: ") + e.what());
    }

    json listing = json::array();
    for (const auto& m : manifest) listing.push_back({{"path", m.path}, {"kind", m.kind}, {"sha256", m.sha256}});
    write_text_file(dest / "manifest.json", listing.dump(2) + "\n");
    return manifest;
}

}  // namespace cogalign

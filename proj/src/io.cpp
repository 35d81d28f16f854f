#include "cogalign/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "cogalign/errors.hpp"

namespace cogalign {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaViolation, path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(path + "." + key, "missing field");
    return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

int require_int(const json& obj, const std::string& key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer()) schema_error(path + "." + key, "expected an integer");
    return v.get<int>();
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::string sanitize_cell(std::string cell) {
    const auto first = cell.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = cell.find_last_not_of(" \t");
    return cell.substr(first, last - first + 1);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

ScaleDefinition scale_from_json(const json& j) {
    ScaleDefinition scale;
    scale.name = require_string(j, "name", "$");
    scale.version = require_string(j, "version", "$");

    const json& partition = require(j, "hot_cold_partition", "$");
    if (!partition.is_object()) schema_error("$.hot_cold_partition", "expected an object");
    for (const auto& [key, value] : partition.items()) {
        const std::string path = "$.hot_cold_partition." + key;
        const auto dim = parse_dimension(key);
        if (!dim) schema_error(path, "unknown dimension '" + key + "'");
        if (!value.is_string()) schema_error(path, "expected \"Hot\" or \"Cold\"");
        const auto tag = parse_system_tag(value.get<std::string>());
        if (!tag) schema_error(path, "expected \"Hot\" or \"Cold\"");
        scale.hot_cold_partition[*dim] = *tag;
    }

    const json& catalog = require(j, "bias_catalog", "$");
    if (!catalog.is_array()) schema_error("$.bias_catalog", "expected an array");
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (!catalog[i].is_string()) schema_error("$.bias_catalog[" + std::to_string(i) + "]", "expected a string");
        scale.bias_catalog.insert(catalog[i].get<std::string>());
    }

    const json& items = require(j, "items", "$");
    if (!items.is_array()) schema_error("$.items", "expected an array");
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string path = "$.items[" + std::to_string(i) + "]";
        const json& it = items[i];
        Item item;
        item.id = require_string(it, "id", path);
        item.text = require_string(it, "text", path);
        const std::string dim_label = require_string(it, "dimension", path);
        const auto dim = parse_dimension(dim_label);
        if (!dim) schema_error(path + ".dimension", "unknown dimension '" + dim_label + "'");
        item.dimension = *dim;
        item.bias_name = require_string(it, "bias_name", path);
        const json& format = require(it, "format", path);
        const std::string kind = require_string(format, "kind", path + ".format");
        if (kind == "multiple_choice") {
            MultipleChoice mc;
            const json& options = require(format, "options", path + ".format");
            if (!options.is_array()) schema_error(path + ".format.options", "expected an array");
            for (const auto& o : options) {
                if (!o.is_string()) schema_error(path + ".format.options", "option ids must be strings");
                mc.options.push_back(o.get<std::string>());
            }
            mc.rational_key = require_string(format, "rational_key", path + ".format");
            item.format = std::move(mc);
        } else if (kind == "likert") {
            item.format = Likert{require_int(format, "min", path + ".format"), require_int(format, "max", path + ".format")};
        } else {
            schema_error(path + ".format.kind", "expected \"multiple_choice\" or \"likert\"");
        }
        scale.items.push_back(std::move(item));
    }

    const auto report = validate_scale(scale);
    if (!report.valid()) {
        std::string message = "scale failed validation:";
        for (const auto& v : report.violations) {
            if (v.warning) continue;
            message += " [" + std::string(to_string(v.kind)) + (v.item_id.empty() ? "" : " " + v.item_id) + "] " + v.message + ";";
        }
        throw Error(ErrorCode::SchemaViolation, message);
    }
    return scale;
}

json scale_to_json(const ScaleDefinition& scale) {
    json j;
    j["name"] = scale.name;
    j["version"] = scale.version;
    json partition = json::object();
    for (const auto& [dim, tag] : scale.hot_cold_partition) partition[std::string(to_string(dim))] = to_string(tag);
    j["hot_cold_partition"] = partition;
    j["bias_catalog"] = json(std::vector<std::string>(scale.bias_catalog.begin(), scale.bias_catalog.end()));
    json items = json::array();
    for (const auto& item : scale.items) {
        json it;
        it["id"] = item.id;
        it["text"] = item.text;
        it["dimension"] = to_string(item.dimension);
        it["bias_name"] = item.bias_name;
        if (const auto* mc = std::get_if<MultipleChoice>(&item.format)) {
            it["format"] = {{"kind", "multiple_choice"}, {"options", mc->options}, {"rational_key", mc->rational_key}};
        } else {
            const auto& lk = std::get<Likert>(item.format);
            it["format"] = {{"kind", "likert"}, {"min", lk.min}, {"max", lk.max}};
        }
        items.push_back(std::move(it));
    }
    j["items"] = std::move(items);
    return j;
}

std::string serialize_scale(const ScaleDefinition& scale) { return scale_to_json(scale).dump(2) + "\n"; }

ScaleDefinition load_scale(std::istream& in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)) +
                                               ": " + e.what());
    }
    return scale_from_json(j);
}

ScaleDefinition load_scale_file(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    try {
        return load_scale(in);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + std::string(e.what()).substr(to_string(e.code()).size() + 2));
    }
}

std::string_view to_string(Layout layout) { return layout == Layout::Wide ? "wide" : "long"; }

std::optional<Layout> parse_layout(std::string_view label) {
    if (label == "wide") return Layout::Wide;
    if (label == "long") return Layout::Long;
    return std::nullopt;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(sanitize_cell(std::move(cell)));
            cell.clear();
        } else {
            cell += c;
        }
    }
    out.push_back(sanitize_cell(std::move(cell)));
    return out;
}

LoadedResponses load_responses(std::istream& in, const ScaleDefinition& scale, Layout layout,
                               const std::string& group_label) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::EmptyMatrix, "response file is empty");
    const auto header = split_csv_line(strip_cr(line));

    // (respondent, item) -> raw, respondents in first-appearance order
    std::vector<std::string> respondents;
    std::map<std::string, std::size_t> respondent_index;
    std::map<std::pair<std::size_t, std::size_t>, std::string> raw_cells;
    std::set<std::size_t> used_items;
    std::size_t line_no = 1;

    auto respondent_row = [&](const std::string& id) {
        const auto [it, inserted] = respondent_index.emplace(id, respondents.size());
        if (inserted) respondents.push_back(id);
        return it->second;
    };
    auto item_column = [&](const std::string& id) {
        const auto idx = scale.index_of(id);
        if (!idx) throw Error(ErrorCode::UnknownItemColumn, "item '" + id + "' is not in scale " + scale.name);
        return *idx;
    };

    if (layout == Layout::Wide) {
        if (header.empty() || header[0] != "respondent_id") {
            throw Error(ErrorCode::ParseError, "line 1: wide header must start with respondent_id");
        }
        std::vector<std::size_t> columns;
        for (std::size_t c = 1; c < header.size(); ++c) {
            columns.push_back(item_column(header[c]));
            if (!used_items.insert(columns.back()).second) {
                throw Error(ErrorCode::DuplicateCell, "item column '" + header[c] + "' repeated");
            }
        }
        while (std::getline(in, line)) {
            ++line_no;
            line = strip_cr(line);
            if (line.find_first_not_of(" \t,") == std::string::npos) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != header.size()) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                                       std::to_string(header.size()) + " fields, got " +
                                                       std::to_string(cells.size()));
            }
            const std::size_t before = respondents.size();
            const std::size_t row = respondent_row(cells[0]);
            if (respondents.size() == before) {
                throw Error(ErrorCode::DuplicateCell, "respondent '" + cells[0] + "' appears twice");
            }
            for (std::size_t c = 1; c < cells.size(); ++c) {
                if (!cells[c].empty()) raw_cells[{row, columns[c - 1]}] = cells[c];
            }
        }
    } else {
        if (header.size() != 3 || header[0] != "respondent_id" || header[1] != "item_id" || header[2] != "value") {
            throw Error(ErrorCode::ParseError, "line 1: long header must be respondent_id,item_id,value");
        }
        while (std::getline(in, line)) {
            ++line_no;
            line = strip_cr(line);
            if (line.find_first_not_of(" \t,") == std::string::npos) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != 3) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 3 fields");
            }
            const std::size_t row = respondent_row(cells[0]);
            const std::size_t col = item_column(cells[1]);
            used_items.insert(col);
            if (raw_cells.contains({row, col})) {
                throw Error(ErrorCode::DuplicateCell, "respondent '" + cells[0] + "', item '" + cells[1] + "' given twice");
            }
            raw_cells[{row, col}] = cells[2];
        }
    }
    if (respondents.empty()) throw Error(ErrorCode::EmptyMatrix, "response file has no data rows");
    if (used_items.empty()) throw Error(ErrorCode::EmptyMatrix, "response file has no item columns");

    std::vector<std::size_t> scale_cols(used_items.begin(), used_items.end());
    std::vector<std::string> item_ids;
    std::map<std::size_t, std::size_t> matrix_col;
    for (std::size_t idx : scale_cols) {
        matrix_col[idx] = item_ids.size();
        item_ids.push_back(scale.items[idx].id);
    }

    LoadedResponses out;
    out.matrix = ResponseMatrix(group_label, respondents, std::move(item_ids), {scale.name, scale.version});
    for (const auto& [key, raw] : raw_cells) {
        const auto& [row, scale_col] = key;
        if (raw.empty()) continue;
        try {
            out.matrix.set(row, matrix_col.at(scale_col), score_response(scale.items[scale_col], raw).value);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnparseableResponse) throw;
            ++out.unparseable_cells;
            out.warnings.push_back(e.what());
        }
    }
    return out;
}

LoadedResponses load_responses_file(const std::filesystem::path& path, const ScaleDefinition& scale, Layout layout,
                                    const std::string& group_label) {
    std::istringstream in(read_text_file(path));
    return load_responses(in, scale, layout, group_label);
}

std::string write_responses(const ResponseMatrix& m, const ScaleDefinition& scale, Layout layout) {
    std::ostringstream out;
    std::vector<const Item*> items;
    for (const auto& id : m.item_ids()) items.push_back(&scale.item(id));
    if (layout == Layout::Wide) {
        out << "respondent_id";
        for (const auto& id : m.item_ids()) out << ',' << csv_escape(id);
        out << '\n';
        for (std::size_t r = 0; r < m.n(); ++r) {
            out << csv_escape(m.respondent_ids()[r]);
            for (std::size_t c = 0; c < m.k(); ++c) {
                out << ',';
                if (const auto& v = m.at(r, c)) out << csv_escape(raw_for_score(*items[c], *v));
            }
            out << '\n';
        }
    } else {
        out << "respondent_id,item_id,value\n";
        for (std::size_t r = 0; r < m.n(); ++r) {
            for (std::size_t c = 0; c < m.k(); ++c) {
                if (const auto& v = m.at(r, c)) {
                    out << csv_escape(m.respondent_ids()[r]) << ',' << csv_escape(m.item_ids()[c]) << ','
                        << csv_escape(raw_for_score(*items[c], *v)) << '\n';
                }
            }
        }
    }
    return out.str();
}

json transcript_to_json(const TranscriptRecord& rec) {
    json j;
    j["model"] = rec.model;
    j["condition"] = to_string(rec.condition);
    j["run_index"] = rec.run_index;
    j["item_id"] = rec.item_id;
    j["system_text"] = rec.system_text;
    j["prompt_text"] = rec.prompt_text;
    j["raw_completion"] = rec.raw_completion;
    if (rec.parsed) {
        json parsed = {{"value", rec.parsed->value}};
        parsed["correct"] = rec.parsed->correct ? json(*rec.parsed->correct) : json(nullptr);
        j["parsed"] = std::move(parsed);
    } else if (rec.status == "ok") {
        j["parsed"] = "Unparseable";
    } else {
        j["parsed"] = nullptr;
    }
    j["timestamp"] = rec.timestamp;
    j["request_params"] = {{"temperature", rec.request_params.temperature},
                           {"max_tokens", rec.request_params.max_tokens},
                           {"top_p", rec.request_params.top_p}};
    j["retry_count"] = rec.retry_count;
    j["status"] = rec.status;
    j["error"] = rec.error;
    return j;
}

TranscriptRecord transcript_from_json(const json& j) {
    TranscriptRecord rec;
    try {
        rec.model = j.at("model").get<std::string>();
        const auto condition = parse_condition(j.at("condition").get<std::string>());
        if (!condition) throw Error(ErrorCode::SchemaViolation, "unknown prompt condition");
        rec.condition = *condition;
        rec.run_index = j.at("run_index").get<int>();
        rec.item_id = j.at("item_id").get<std::string>();
        rec.system_text = j.value("system_text", "");
        rec.prompt_text = j.at("prompt_text").get<std::string>();
        rec.raw_completion = j.at("raw_completion").get<std::string>();
        const json& parsed = j.at("parsed");
        if (parsed.is_object()) {
            ScoredValue v;
            v.value = parsed.at("value").get<double>();
            if (parsed.contains("correct") && !parsed.at("correct").is_null()) v.correct = parsed.at("correct").get<bool>();
            rec.parsed = v;
        }
        rec.timestamp = j.at("timestamp").get<std::string>();
        const json& params = j.at("request_params");
        rec.request_params.temperature = params.at("temperature").get<double>();
        rec.request_params.max_tokens = params.at("max_tokens").get<int>();
        rec.request_params.top_p = params.at("top_p").get<double>();
        rec.retry_count = j.value("retry_count", 0);
        rec.status = j.value("status", "ok");
        rec.error = j.value("error", "");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("transcript record: ") + e.what());
    }
    if (rec.run_index < 0) throw Error(ErrorCode::SchemaViolation, "transcript run_index must be >= 0");
    return rec;
}

std::string transcript_to_jsonl(const TranscriptRecord& rec) { return transcript_to_json(rec).dump() + "\n"; }

std::vector<TranscriptRecord> read_transcripts(std::istream& in) {
    std::vector<TranscriptRecord> out;
    std::set<std::tuple<std::string, int, int, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
        }
        TranscriptRecord rec = transcript_from_json(j);
        if (!seen.emplace(rec.model, static_cast<int>(rec.condition), rec.run_index, rec.item_id).second) {
            throw Error(ErrorCode::DuplicateCell, "line " + std::to_string(line_no) + ": repeated (model, condition, run, item)");
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TranscriptRecord> read_transcripts_file(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    return read_transcripts(in);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string format_csv_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

}  // namespace cogalign

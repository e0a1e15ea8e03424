#include "rislab/result_table.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "rislab/errors.hpp"

namespace rislab {
namespace {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_field(const Cell& cell) {
    std::string text = format_cell(cell);
    if (!std::holds_alternative<std::string>(cell) || !needs_quoting(text)) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

std::vector<std::string> split_csv_line(const std::string& line, std::vector<bool>& quoted) {
    std::vector<std::string> fields(1);
    quoted.assign(1, false);
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                in_quotes = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            quoted.back() = true;
        } else if (c == ',') {
            fields.emplace_back();
            quoted.push_back(false);
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

Cell parse_field(const std::string& text, bool was_quoted) {
    if (was_quoted) return text;
    if (text.empty()) return std::monostate{};
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    if (text == "nan") return std::nan("");
    std::int64_t iv = 0;
    auto [ip, iec] = std::from_chars(text.data(), text.data() + text.size(), iv);
    if (iec == std::errc() && ip == text.data() + text.size()) return iv;
    double dv = 0.0;
    auto [dp, dec] = std::from_chars(text.data(), text.data() + text.size(), dv);
    if (dec == std::errc() && dp == text.data() + text.size()) return dv;
    return text;
}

nlohmann::json cell_json(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                if (std::isfinite(v)) return v;
                return format_real(v);
            } else {
                return v;
            }
        },
        cell);
}

Cell json_cell(const nlohmann::json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << bytes;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) {
        throw ConfigurationError("ResultTable: row has " + std::to_string(row.size()) +
                                 " cells, expected " + std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(row));
}

void ResultTable::append(const ResultTable& other) {
    if (other.columns_ != columns_) throw ConfigurationError("ResultTable: column mismatch");
    rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::string format_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {};
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_real(v);
            } else {
                return v;
            }
        },
        cell);
}

void write_csv(std::ostream& out, const ResultTable& table) {
    for (std::size_t c = 0; c < table.columns().size(); ++c) {
        out << (c ? "," : "") << csv_field(Cell(table.columns()[c]));
    }
    out << '\n';
    for (const auto& row : table.rows()) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_field(row[c]);
        out << '\n';
    }
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

ResultTable parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("parse_csv: missing header row");
    std::vector<bool> quoted;
    ResultTable table(split_csv_line(line, quoted));
    while (std::getline(in, line)) {
        const auto fields = split_csv_line(line, quoted);
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row.push_back(parse_field(fields[i], quoted[i]));
        table.add_row(std::move(row));
    }
    return table;
}

nlohmann::json metadata_json(const TableMetadata& meta) {
    return {{"version", meta.version},
            {"workflow", meta.workflow},
            {"seed", meta.seed},
            {"timestamp", meta.timestamp},
            {"config_hash", meta.config_hash}};
}

nlohmann::json to_json(const ResultTable& table) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows()) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& cell : row) r.push_back(cell_json(cell));
        rows.push_back(std::move(r));
    }
    return {{"metadata", metadata_json(table.metadata)}, {"columns", table.columns()}, {"rows", rows}};
}

ResultTable table_from_json(const nlohmann::json& doc) {
    ResultTable table(doc.at("columns").get<std::vector<std::string>>());
    for (const auto& r : doc.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r) row.push_back(json_cell(c));
        table.add_row(std::move(row));
    }
    if (doc.contains("metadata")) {
        const auto& m = doc["metadata"];
        table.metadata.version = m.value("version", "");
        table.metadata.workflow = m.value("workflow", "");
        table.metadata.seed = m.value("seed", std::uint64_t{0});
        table.metadata.timestamp = m.value("timestamp", "");
        table.metadata.config_hash = m.value("config_hash", "");
    }
    return table;
}

std::vector<std::filesystem::path> emit(const ResultTable& table, OutputFormat format,
                                        const std::filesystem::path& dir, const std::string& stem) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    if (format == OutputFormat::Json) {
        const auto path = dir / (stem + ".json");
        write_file(path, to_json(table).dump(2) + "\n");
        return {path};
    }
    const auto csv = dir / (stem + ".csv");
    const auto meta = dir / (stem + ".run.json");
    write_file(csv, to_csv(table));
    write_file(meta, metadata_json(table.metadata).dump(2) + "\n");
    return {csv, meta};
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace rislab

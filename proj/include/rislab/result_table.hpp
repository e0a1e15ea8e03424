#ifndef RISLAB_RESULT_TABLE_HPP
#define RISLAB_RESULT_TABLE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace rislab {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// Empty cell (e.g. an undefined ratio), integer, real or text.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct TableMetadata {
    std::string version = kToolkitVersion;
    std::string workflow;
    std::uint64_t seed = 0;
    std::string timestamp;    ///< UTC, ISO 8601; not part of the config hash
    std::string config_hash;  ///< FNV-1a 64 of the canonical config dump, hex
};

class ResultTable {
public:
    explicit ResultTable(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    std::size_t row_count() const { return rows_.size(); }

    /// Row length must match the column count.
    void add_row(std::vector<Cell> row);
    void append(const ResultTable& other);

    TableMetadata metadata;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

/// %.17g for reals; inf/-inf/nan spelled out; empty cells left blank.
std::string format_cell(const Cell& cell);

/// Header plus data rows. Metadata is not part of the CSV body, so identical
/// runs give identical bytes.
void write_csv(std::ostream& out, const ResultTable& table);
std::string to_csv(const ResultTable& table);

nlohmann::json metadata_json(const TableMetadata& meta);
/// {"metadata": ..., "columns": [...], "rows": [[...], ...]}. Non-finite reals
/// are written as the strings "inf", "-inf", "nan".
nlohmann::json to_json(const ResultTable& table);
ResultTable table_from_json(const nlohmann::json& doc);

/// Parses CSV produced by write_csv back into a table (cells typed as written).
ResultTable parse_csv(std::istream& in);

enum class OutputFormat { Csv, Json };

/// Writes <dir>/<stem>.csv plus <stem>.run.json (metadata), or <dir>/<stem>.json.
/// Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> emit(const ResultTable& table, OutputFormat format,
                                        const std::filesystem::path& dir, const std::string& stem);

std::string fnv1a_hex(const std::string& bytes);
std::string utc_timestamp();

}  // namespace rislab

#endif  // RISLAB_RESULT_TABLE_HPP

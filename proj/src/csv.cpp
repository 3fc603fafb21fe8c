#include "aqbound/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "aqbound/errors.hpp"

namespace aqb {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::Io: return "io";
        case ErrorCode::CsvParse: return "csv_parse";
        case ErrorCode::MissingColumn: return "missing_column";
        case ErrorCode::DuplicateBaseId: return "duplicate_base_id";
        case ErrorCode::UnparseableNumber: return "unparseable_number";
        case ErrorCode::SchemaViolation: return "schema_violation";
        case ErrorCode::QuerySyntax: return "query_syntax";
        case ErrorCode::UnknownColumn: return "unknown_column";
        case ErrorCode::NegativeValue: return "negative_value";
        case ErrorCode::Infeasible: return "infeasible";
        case ErrorCode::TooLarge: return "too_large";
        case ErrorCode::ZeroNominal: return "zero_nominal";
        case ErrorCode::UndefinedAverage: return "undefined_average";
        case ErrorCode::NoBoundingCap: return "no_bounding_cap";
        case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

CsvTable parse_csv(const std::string& text, const std::string& source) {
    std::vector<CsvRow> records;
    CsvRow record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;  // true once the current record has any content
    size_t line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record = CsvRow();
        field_started = false;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    fail(ErrorCode::CsvParse, source + ": line " + std::to_string(line) +
                                                  ": quote inside unquoted field");
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                field_started = true;
                break;
            case '\r':
                // Swallow the CR of a CRLF; a bare CR is treated as a line break.
                if (i + 1 < text.size() && text[i + 1] == '\n') break;
                [[fallthrough]];
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes)
        fail(ErrorCode::CsvParse, source + ": unterminated quoted field at end of input");
    if (field_started || !field.empty() || !record.empty()) end_record();

    if (records.empty()) fail(ErrorCode::CsvParse, source + ": empty input, expected a header row");

    CsvTable table;
    table.header = records.front();
    for (size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size())
            fail(ErrorCode::CsvParse, source + ": row " + std::to_string(r) + " has " +
                                          std::to_string(records[r].size()) + " fields, header has " +
                                          std::to_string(table.header.size()));
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    return parse_csv(read_file(path), path);
}

std::string csv_escape(const std::string& field) {
    bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

static void append_row(std::string& out, const CsvRow& row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(row[i]);
    }
    out.push_back('\n');
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    append_row(out, table.header);
    for (const CsvRow& row : table.rows) {
        if (row.size() != table.header.size())
            fail(ErrorCode::Internal, "format_csv: ragged row");
        append_row(out, row);
    }
    return out;
}

void write_csv_file(const CsvTable& table, const std::string& path) {
    write_file_atomic(path, format_csv(table));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) fail(ErrorCode::Io, "read error on " + path);
    return buf.str();
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) fail(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) fail(ErrorCode::Io, "write error on " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) fail(ErrorCode::Io, "cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

}  // namespace aqb

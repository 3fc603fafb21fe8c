#pragma once

#include <string>
#include <vector>

namespace aqb {

// RFC 4180 CSV support: quoted fields, escaped quotes, embedded separators and
// line breaks.  Rows are raw string fields; typing happens at the relation layer.
using CsvRow = std::vector<std::string>;

struct CsvTable {
    CsvRow header;
    std::vector<CsvRow> rows;
};

// Parses a CSV document.  The first record is the header; every later record
// must have the same field count.  `source` names the input in error messages.
CsvTable parse_csv(const std::string& text, const std::string& source);

CsvTable read_csv_file(const std::string& path);

std::string format_csv(const CsvTable& table);

// Writes via a temporary file in the same directory followed by a rename, so a
// crash cannot leave a half-written file at `path`.
void write_csv_file(const CsvTable& table, const std::string& path);

// Quotes a single field iff it contains a separator, quote, or line break.
std::string csv_escape(const std::string& field);

// Atomic text-file write (temp + rename), shared by the CSV and JSON emitters.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace aqb

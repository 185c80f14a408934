#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace pixelaudit::app {

// Minimal RFC 4180 reader/writer: fields with commas, quotes or newlines are
// quoted, embedded quotes doubled.
using CsvRow = std::vector<std::string>;

void write_csv_row(std::ostream& out, const CsvRow& row);
// Returns false at end of input.
bool read_csv_row(std::istream& in, CsvRow& row);
std::vector<CsvRow> read_csv(std::istream& in);

// Shortest text that parses back to the same double.
std::string format_double(double value);
double parse_double(const std::string& text);

}  // namespace pixelaudit::app

#pragma once

// Small CSV helpers.  All real numbers are written with 17 significant digits
// so a value round-trips bit-exactly through text; this is what makes the
// byte-identical determinism checks meaningful.

#include <string>
#include <vector>

namespace pteem {

// Shortest-faithful rendering at fixed precision ("%.17g").
std::string fmt_real(double v);
std::string fmt_int(long long v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

// Parses a CSV written by write_csv (no quoting/escaping: our writers never
// emit commas inside fields).  Throws run_error on unreadable files or ragged
// rows.
CsvTable read_csv(const std::string& path);

double parse_real(const std::string& field);
long long parse_int(const std::string& field);

} // namespace pteem

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latentkit::csv {

using Row = std::vector<std::string>;

struct Table {
    Row header;
    std::vector<Row> rows;

    // Index of a header column, -1 if absent.
    int column(const std::string& name) const;
};

// RFC 4180 reader: quoted fields, embedded separators/quotes/newlines,
// CRLF or LF records.
Table read(std::istream& in);
Table read_file(const std::string& path);

std::string escape(const std::string& field);
void write(std::ostream& out, const Table& t);
void write_file(const std::string& path, const Table& t);

} // namespace latentkit::csv

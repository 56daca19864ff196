#include "latentkit/csv.hpp"

#include "latentkit/common.hpp"

#include <fstream>
#include <sstream>

namespace latentkit::csv {

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

Table read(std::istream& in) {
    std::vector<Row> records;
    Row current;
    std::string field;
    bool in_quotes = false;
    bool any = false;

    auto end_field = [&] {
        current.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(current));
        current = {};
    };

    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get(c);
            end_record();
        } else if (c == '\n') {
            end_record();
        } else {
            field.push_back(c);
        }
    }
    if (!field.empty() || !current.empty()) end_record();

    Table t;
    if (!any || records.empty()) return t;
    t.header = std::move(records.front());
    t.rows.assign(records.begin() + 1, records.end());
    return t;
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open " + path);
    return read(in);
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write(std::ostream& out, const Table& t) {
    auto put_row = [&](const Row& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out.put(',');
            out << escape(r[i]);
        }
        out << "\r\n";
    };
    put_row(t.header);
    for (const Row& r : t.rows) put_row(r);
}

void write_file(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::io_error, "cannot open " + path + " for writing");
    write(out, t);
}

} // namespace latentkit::csv

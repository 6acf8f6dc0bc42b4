#include "ctpath/csv.hpp"

#include "ctpath/common.hpp"

#include <charconv>
#include <sstream>

namespace ctpath::csv {

std::string escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw Error("cannot format double");
    return std::string(buf, ptr);
}

namespace {

// Parses records from `text` starting at `pos`; returns false at end.
bool next_record(std::string_view text, std::size_t& pos, Row& row)
{
    row.clear();
    if (pos >= text.size()) return false;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    while (pos < text.size()) {
        char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    field += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            field_started = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
            break;
        } else {
            field += c;
            field_started = true;
        }
    }
    row.push_back(std::move(field));
    return true;
}

}  // namespace

Row parse_line(std::string_view line)
{
    std::size_t pos = 0;
    Row row;
    next_record(line, pos, row);
    return row;
}

std::vector<Row> read_file(const std::filesystem::path& path, Row* header)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::vector<Row> rows;
    std::size_t pos = 0;
    Row row;
    bool first = true;
    while (next_record(text, pos, row)) {
        if (row.size() == 1 && row[0].empty()) continue;
        if (first && header) {
            *header = row;
        } else {
            rows.push_back(row);
        }
        first = false;
    }
    return rows;
}

Writer::Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc)
{
    if (!out_) throw Error("cannot write " + path.string());
}

Writer& Writer::row(std::initializer_list<std::string_view> fields)
{
    bool first = true;
    for (auto f : fields) {
        if (!first) out_ << ',';
        out_ << escape(f);
        first = false;
    }
    out_ << '\n';
    return *this;
}

Writer& Writer::row(const Row& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape(fields[i]);
    }
    out_ << '\n';
    return *this;
}

}  // namespace ctpath::csv

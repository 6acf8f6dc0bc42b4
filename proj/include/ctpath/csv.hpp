#ifndef CTPATH_CSV_HPP
#define CTPATH_CSV_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ctpath::csv {

using Row = std::vector<std::string>;

/// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Splits one logical record. Embedded line breaks inside quotes are kept.
Row parse_line(std::string_view line);

/// Reads all records; the header row is returned separately when requested.
std::vector<Row> read_file(const std::filesystem::path& path, Row* header = nullptr);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);

    Writer& row(std::initializer_list<std::string_view> fields);
    Writer& row(const Row& fields);

private:
    std::ofstream out_;
};

}  // namespace ctpath::csv

#endif  // CTPATH_CSV_HPP

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ccrm/error.hpp"

namespace ccrm {

class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, std::string message);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::string file_;
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

namespace tsv {

struct Row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

struct Table {
  std::string source;  // file name, used in error messages
  std::vector<std::string> header;
  std::vector<Row> rows;
};

// Splits text into tab-separated rows. The first line is the header. Every row
// must have as many fields as the header. Trailing '\r' is tolerated.
Table parse(std::string_view text, std::string source = "<memory>");

// As parse(), and additionally checks the header against `expected`.
Table parse(std::string_view text, std::span<const std::string_view> expected,
            std::string source = "<memory>");

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string join(std::span<const std::string> fields, char sep = '\t');
std::vector<std::string> split(std::string_view text, char sep);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
double parse_double(const Row& row, std::size_t column, const std::string& source);
unsigned long long parse_unsigned(const Row& row, std::size_t column, const std::string& source);

}  // namespace tsv
}  // namespace ccrm

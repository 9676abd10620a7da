#include "ccrm/tsv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace ccrm {

ParseError::ParseError(std::string file, std::size_t line, std::size_t column, std::string message)
    : Error(fmt::format("{}:{}:{}: {}", file, line, column, message)),
      file_(std::move(file)),
      line_(line),
      column_(column),
      message_(std::move(message)) {}

namespace tsv {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string join(std::span<const std::string> fields, char sep) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(sep);
    out += fields[i];
  }
  return out;
}

Table parse(std::string_view text, std::string source) {
  Table table;
  table.source = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      table.header = split(line, '\t');
      continue;
    }
    if (line.empty()) continue;
    Row row{line_no, split(line, '\t')};
    if (row.fields.size() != table.header.size()) {
      throw ParseError(table.source, line_no, std::min(row.fields.size(), table.header.size()) + 1,
                       fmt::format("expected {} fields, found {}", table.header.size(), row.fields.size()));
    }
    table.rows.push_back(std::move(row));
  }
  if (line_no == 0) {
    throw ParseError(table.source, 1, 1, "missing header row");
  }
  return table;
}

Table parse(std::string_view text, std::span<const std::string_view> expected, std::string source) {
  auto table = parse(text, std::move(source));
  bool ok = table.header.size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = table.header[i] == expected[i];
  if (!ok) {
    std::vector<std::string> names(expected.begin(), expected.end());
    throw ParseError(table.source, 1, 1, fmt::format("header must be '{}'", join(names, ' ')));
  }
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IOError(fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError(fmt::format("cannot write {}", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IOError(fmt::format("write failed for {}", path.string()));
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(const Row& row, std::size_t column, const std::string& source) {
  const auto& f = row.fields.at(column);
  double value = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
    throw ParseError(source, row.line, column + 1, fmt::format("not a number: '{}'", f));
  }
  return value;
}

unsigned long long parse_unsigned(const Row& row, std::size_t column, const std::string& source) {
  const auto& f = row.fields.at(column);
  unsigned long long value = 0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc{} || ptr != f.data() + f.size() || f.empty()) {
    throw ParseError(source, row.line, column + 1, fmt::format("not a nonnegative integer: '{}'", f));
  }
  return value;
}

}  // namespace tsv
}  // namespace ccrm

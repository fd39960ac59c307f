// src/csv.cc

// Copyright 2026 The phonoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "phonoprobe/csv.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "phonoprobe/error.h"

namespace phonoprobe {

namespace fs = std::filesystem;

std::size_t Table::column(std::string_view col) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == col) return i;
  throw Error(ErrorKind::kMalformedManifest,
              "table '" + name + "' has no column '" + std::string(col) + "'");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

void append_field(std::string &out, const std::string &field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) {
    out += field;
    return;
  }
  out += '"';
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void append_row(std::string &out, const std::vector<std::string> &row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    append_field(out, row[i]);
  }
  out += '\n';
}

}  // namespace

std::string to_csv(const Table &table) {
  std::string out;
  append_row(out, table.header);
  for (const auto &row : table.rows) append_row(out, row);
  return out;
}

void write_csv(const Table &table, const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path file = dir / (table.name + ".csv");
  std::ofstream out(file, std::ios::binary);
  out << to_csv(table);
  if (!out) throw Error(ErrorKind::kIoFailure, "cannot write " + file.string());
}

Table parse_csv(std::string_view text, std::string name) {
  Table table;
  table.name = std::move(name);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw Error(ErrorKind::kMalformedManifest,
                  "row " + std::to_string(r) + " of '" + table.name + "' has " +
                      std::to_string(records[r].size()) + " fields, expected " +
                      std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

Table read_csv(const fs::path &file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingManifest, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), file.stem().string());
}

}  // namespace phonoprobe

// include/phonoprobe/csv.h

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

#ifndef PHONOPROBE_CSV_H_
#define PHONOPROBE_CSV_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phonoprobe {

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws MalformedManifest if absent.
  std::size_t column(std::string_view name) const;
};

/// "%.9g"; integers and strings go through std::string directly.
std::string format_real(double v);

/// Quotes fields containing comma, quote or newline (RFC 4180).
std::string to_csv(const Table &table);
/// Writes <dir>/<table.name>.csv. Throws IoFailure.
void write_csv(const Table &table, const std::filesystem::path &dir);

Table parse_csv(std::string_view text, std::string name = {});
/// Throws MissingManifest if the file is absent.
Table read_csv(const std::filesystem::path &file);

}  // namespace phonoprobe

#endif  // PHONOPROBE_CSV_H_

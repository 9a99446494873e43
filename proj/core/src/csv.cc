// Copyright 2026 The ldpmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpmd/csv.h"

#include <charconv>
#include <cmath>
#include <fstream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"

namespace ldpmd {

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

std::optional<double> ParseDouble(absl::string_view field) {
  field = absl::StripAsciiWhitespace(field);
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto result =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (result.ec != std::errc() || result.ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::vector<std::string> SplitRecord(absl::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && absl::StripAsciiWhitespace(current).empty()) {
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == delimiter) {
      fields.push_back(was_quoted
                           ? current
                           : std::string(absl::StripAsciiWhitespace(current)));
      current.clear();
      was_quoted = false;
    } else if (!was_quoted) {
      current.push_back(c);
    }
  }
  fields.push_back(was_quoted ? current
                              : std::string(absl::StripAsciiWhitespace(current)));
  return fields;
}

absl::StatusOr<std::vector<std::vector<std::string>>> ReadRecords(
    const std::string& path, char delimiter) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("FileNotFound: ", path));
  std::vector<std::vector<std::string>> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    records.push_back(SplitRecord(line, delimiter));
  }
  if (in.bad()) {
    return absl::UnavailableError(absl::StrCat("IoError: reading ", path));
  }
  return records;
}

absl::Status WriteFile(const std::string& path, absl::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(
        absl::StrCat("IoError: cannot open ", path, " for writing"));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    return absl::UnavailableError(absl::StrCat("IoError: writing ", path));
  }
  return absl::OkStatus();
}

}  // namespace ldpmd

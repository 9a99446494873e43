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

// Minimal delimited-text helpers shared by dataset loading, population files,
// report streams and result tables.

#ifndef LDPMD_CSV_H_
#define LDPMD_CSV_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace ldpmd {

// Shortest decimal string that parses back to exactly `value`.
std::string FormatDouble(double value);

// Parses a whole field as a finite double. Surrounding blanks are ignored.
std::optional<double> ParseDouble(absl::string_view field);

// Splits one record. Double-quoted fields may contain the delimiter and ""
// escapes; unquoted fields are trimmed of blanks.
std::vector<std::string> SplitRecord(absl::string_view line, char delimiter);

// Reads all non-blank records. NotFound when the file cannot be opened.
absl::StatusOr<std::vector<std::vector<std::string>>> ReadRecords(
    const std::string& path, char delimiter);

// Writes `content` to `path`, replacing it. Unavailable on I/O failure.
absl::Status WriteFile(const std::string& path, absl::string_view content);

}  // namespace ldpmd

#endif  // LDPMD_CSV_H_

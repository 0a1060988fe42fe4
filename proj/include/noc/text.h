// Copyright 2026 The NOC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOC_TEXT_H_
#define NOC_TEXT_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noc {

std::vector<std::string> SplitWhitespace(std::string_view line);
// Splits on `delim`, keeping empty fields.
std::vector<std::string> Split(std::string_view line, char delim);
std::string Join(std::span<const std::string> parts, std::string_view sep);
std::string ToLower(std::string_view s);

// Parses a '.'-decimal float; throws FormatError mentioning `context`.
double ParseDouble(std::string_view text, std::string_view context);
std::vector<double> ParseDoubles(std::string_view text, std::string_view context);
// Shortest text that parses back to the same double.
std::string FormatDouble(double value);

// Reads a whole text file into lines (without trailing '\n'); IoError if the
// file cannot be opened.
std::vector<std::string> ReadLines(const std::filesystem::path& path);
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace noc

#endif  // NOC_TEXT_H_

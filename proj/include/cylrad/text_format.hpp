// Copyright 2026 The cylrad Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cylrad {

/// One `key = value` line of a plain-text config or scenario file.
struct KeyValueLine {
  int line = 0;
  std::string key;
  std::string value;
};

/// Splits a stream into key/value lines. Blank lines and `#` comments are
/// skipped; a non-empty line without `=` raises InputError tagged with the
/// source name and line number.
std::vector<KeyValueLine> parse_key_values(std::istream& is, const std::string& source);

/// `source:line: message` formatting used by every diagnostic.
std::string where(const std::string& source, int line);

double parse_double(const std::string& text, const std::string& context);
long long parse_int(const std::string& text, const std::string& context);
std::uint64_t parse_uint64(const std::string& text, const std::string& context);
std::vector<double> parse_double_list(const std::string& text, const std::string& context);

std::string format_double(double value);

/// 64-bit FNV-1a over a byte range; used for checksums in provenance files.
unsigned long long fnv1a64(const void* data, std::size_t size,
                           unsigned long long seed = 0xcbf29ce484222325ULL);

}  // namespace cylrad

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

#include "cylrad/text_format.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>

#include "cylrad/errors.hpp"

namespace cylrad {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line);
}

std::vector<KeyValueLine> parse_key_values(std::istream& is, const std::string& source) {
  std::vector<KeyValueLine> out;
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(where(source, line_no) + ": expected 'key = value', got '" + line + "'");
    }
    KeyValueLine kv{line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (kv.key.empty()) throw InputError(where(source, line_no) + ": empty key");
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_double(const std::string& text, const std::string& context) {
  // std::from_chars for double is not available in every libstdc++ we target.
  std::istringstream iss(text);
  iss.imbue(std::locale::classic());
  double value = 0.0;
  iss >> value;
  if (!iss || !(iss >> std::ws).eof()) {
    throw InputError(context + ": expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_int(const std::string& text, const std::string& context) {
  long long value = 0;
  const auto* begin = text.data();
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError(context + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t parse_uint64(const std::string& text, const std::string& context) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError(context + ": expected a non-negative 64-bit integer, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& context) {
  std::vector<double> values;
  std::string item;
  std::istringstream iss(text);
  while (std::getline(iss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) throw InputError(context + ": empty list element");
    values.push_back(parse_double(t, context));
  }
  return values;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

unsigned long long fnv1a64(const void* data, std::size_t size, unsigned long long seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  unsigned long long h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cylrad

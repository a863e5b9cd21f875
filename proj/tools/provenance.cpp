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

#include "provenance.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "cylrad/errors.hpp"
#include "cylrad/text_format.hpp"

namespace cylrad::cli {

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "' for checksumming");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", fnv1a64(bytes.data(), bytes.size()));
  return buf;
}

void write_provenance(const std::string& path, const Provenance& p) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << "# cylrad " << CYLRAD_VERSION << " provenance\n";
  out << "# command: " << p.command_line << "\n";
  if (p.scenario && p.scenario->seed) out << "# seed: " << *p.scenario->seed << "\n";
  for (const auto& f : p.inputs) out << "# input: " << f << " fnv1a64=" << file_checksum(f) << "\n";
  for (const auto& f : p.outputs) out << "# output: " << f << " fnv1a64=" << file_checksum(f) << "\n";
  if (p.scenario) write_scenario(out, *p.scenario);
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace cylrad::cli

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

#include <string>
#include <vector>

#include "cylrad/scenario.hpp"

namespace cylrad::cli {

/// FNV-1a 64 of a whole file, as 16 hex digits.
std::string file_checksum(const std::string& path);

struct Provenance {
  std::string command_line;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  /// When set, the sidecar body is this scenario in canonical form, so the
  /// sidecar can be fed back to the same command.
  const Scenario* scenario = nullptr;
};

/// Writes `path`: comment lines (tool version, command, checksums) followed
/// by the scenario, if any.
void write_provenance(const std::string& path, const Provenance& p);

}  // namespace cylrad::cli

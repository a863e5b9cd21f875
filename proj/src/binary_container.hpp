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

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "cylrad/errors.hpp"

namespace cylrad::detail {

static_assert(std::endian::native == std::endian::little,
              "binary containers are written in host order; big-endian hosts need byte swapping");

/// 96-byte header shared by cube and heatmap files.
struct ContainerHeader {
  std::array<char, 4> magic{};
  std::uint32_t version = 1;
  std::array<std::uint32_t, 3> dims{};
  std::uint32_t flags = 0;
  std::array<double, 9> params{};
};

inline constexpr std::size_t kHeaderBytes = 96;
inline constexpr std::uint32_t kContainerVersion = 1;

inline void write_header(std::ostream& os, const ContainerHeader& h) {
  std::array<char, kHeaderBytes> buf{};
  std::memcpy(buf.data(), h.magic.data(), 4);
  std::memcpy(buf.data() + 4, &h.version, 4);
  std::memcpy(buf.data() + 8, h.dims.data(), 12);
  std::memcpy(buf.data() + 20, &h.flags, 4);
  std::memcpy(buf.data() + 24, h.params.data(), 72);
  os.write(buf.data(), buf.size());
}

inline ContainerHeader read_header(std::istream& is, const std::array<char, 4>& expected_magic) {
  std::array<char, kHeaderBytes> buf{};
  if (!is.read(buf.data(), buf.size())) throw InputError("truncated container header");
  ContainerHeader h;
  std::memcpy(h.magic.data(), buf.data(), 4);
  std::memcpy(&h.version, buf.data() + 4, 4);
  std::memcpy(h.dims.data(), buf.data() + 8, 12);
  std::memcpy(&h.flags, buf.data() + 20, 4);
  std::memcpy(h.params.data(), buf.data() + 24, 72);
  if (h.magic != expected_magic) {
    throw InputError("bad magic '" + std::string(h.magic.data(), 4) + "', expected '" +
                     std::string(expected_magic.data(), 4) + "'");
  }
  if (h.version != kContainerVersion) {
    throw InputError("unsupported container version " + std::to_string(h.version));
  }
  return h;
}

}  // namespace cylrad::detail

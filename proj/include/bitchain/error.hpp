/* Copyright 2026 The bitchain Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bitchain {

enum class Errc {
  syntax,
  undefined_label,
  too_many_imports,
  verify_failed,
  duplicate_profile,
  empty_archive,
  bad_magic,
  unsupported_version,
  length_overflow,
  truncated,
  malformed,
  no_matching_variant,
  unresolved_capability,
  profile_mismatch,
  invalid_profile,
  oversize,
  no_credit,
  unknown_endpoint,
  remote_bounds,
  endpoint_down,
  frame_corrupt,
  channel_corrupt,
  not_found,
  type_collision,
  dispatch,
  hostcall,
  timeout,
  io,
  invalid_argument,
  oracle_mismatch,
};

std::string_view to_string(Errc code) noexcept;

// All recoverable failures in the runtime are reported as Error. The code is
// stable; the message is for humans.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

} // namespace bitchain

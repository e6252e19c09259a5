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

#include "bitchain/error.hpp"

namespace bitchain {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
  case Errc::syntax: return "syntax error";
  case Errc::undefined_label: return "undefined label";
  case Errc::too_many_imports: return "too many imports";
  case Errc::verify_failed: return "verify failed";
  case Errc::duplicate_profile: return "duplicate profile";
  case Errc::empty_archive: return "empty archive";
  case Errc::bad_magic: return "bad magic";
  case Errc::unsupported_version: return "unsupported version";
  case Errc::length_overflow: return "length overflow";
  case Errc::truncated: return "truncated";
  case Errc::malformed: return "malformed";
  case Errc::no_matching_variant: return "no matching variant";
  case Errc::unresolved_capability: return "unresolved capability";
  case Errc::profile_mismatch: return "profile mismatch";
  case Errc::invalid_profile: return "invalid profile";
  case Errc::oversize: return "oversize";
  case Errc::no_credit: return "no credit";
  case Errc::unknown_endpoint: return "unknown endpoint";
  case Errc::remote_bounds: return "remote bounds";
  case Errc::endpoint_down: return "endpoint down";
  case Errc::frame_corrupt: return "frame corrupt";
  case Errc::channel_corrupt: return "channel corrupt";
  case Errc::not_found: return "not found";
  case Errc::type_collision: return "type collision";
  case Errc::dispatch: return "dispatch error";
  case Errc::hostcall: return "hostcall failure";
  case Errc::timeout: return "timeout";
  case Errc::io: return "io error";
  case Errc::invalid_argument: return "invalid argument";
  case Errc::oracle_mismatch: return "oracle mismatch";
  }
  return "unknown error";
}

} // namespace bitchain

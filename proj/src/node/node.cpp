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

#include "bitchain/node/node.hpp"

#include "bitchain/pcode/verifier.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>

namespace bitchain::node {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point since) {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count());
}

ByteVec read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(Errc::not_found, "cannot open " + path.string());
  return ByteVec(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

net::NodeId node_arg(std::uint64_t v) {
  if (v > std::numeric_limits<net::NodeId>::max())
    throw Error(Errc::unknown_endpoint, "node " + std::to_string(v));
  return static_cast<net::NodeId>(v);
}

bool deployment_error(Errc c) {
  return c == Errc::no_matching_variant || c == Errc::profile_mismatch || c == Errc::unresolved_capability;
}

} // namespace

std::filesystem::path default_ifunc_dir() {
  if (const char* dir = std::getenv("BITCHAIN_IFUNC_DIR"); dir && *dir)
    return dir;
  return ".";
}

Node::Node(net::Transport& transport, NodeConfig config)
    : transport_(transport), config_(std::move(config)), profile_(pcode::TargetProfile::named(config_.profile)),
      epochs_(transport.node_count(), 0), env_(std::make_unique<exec::HostEnv>()) {
  env_->node_id = transport_.self();
  env_->services = this;
  const char* log = std::getenv("BITCHAIN_LOG");
  log_ = log && *log && std::string_view(log) != "0";
}

Node::~Node() = default;

IfuncHandle Node::register_ifunc(const std::string& name) { return register_ifunc(name, config_.ifunc_dir); }

IfuncHandle Node::register_ifunc(const std::string& name, const std::filesystem::path& dir) {
  auto path = dir / (name + ".pbca");
  if (!std::filesystem::is_regular_file(path))
    throw Error(Errc::not_found, "no ifunc archive at " + path.string());
  ByteVec bytes = read_file(path);
  std::map<std::string, ByteVec> prelinked;
  const std::string prefix = name + ".pbin.";
  for (const auto& ent : std::filesystem::directory_iterator(dir)) {
    auto file = ent.path().filename().string();
    if (ent.is_regular_file() && file.size() > prefix.size() && file.compare(0, prefix.size(), prefix) == 0)
      prelinked.emplace(file.substr(prefix.size()), read_file(ent.path()));
  }
  return register_archive(name, bytes, std::move(prelinked));
}

IfuncHandle Node::register_archive(const std::string& name, ByteSpan archive_bytes,
                                   std::map<std::string, ByteVec> prelinked) {
  auto pkg = std::make_shared<Package>();
  pkg->archive = pcode::parse_archive(archive_bytes);
  bool any_ok = false;
  std::string why;
  for (const auto& v : pkg->archive.variants) {
    auto r = pcode::verify(v.blob);
    any_ok = any_ok || r.ok();
    if (!r.ok())
      why = v.profile_name + ": " + r.summary();
  }
  if (!any_ok)
    throw Error(Errc::verify_failed, name + " has no verifiable variant (" + why + ")");
  for (const auto& [profile, bytes] : prelinked) {
    auto img = pcode::decode_prelinked(bytes);
    if (img.profile_name != profile)
      throw Error(Errc::malformed, name + ": image for '" + img.profile_name + "' stored as '" + profile + "'");
  }
  pkg->archive_bytes.assign(archive_bytes.begin(), archive_bytes.end());
  pkg->digest = fnv1a64(archive_bytes);
  pkg->prelinked = std::move(prelinked);

  const std::uint64_t type_id = type_id_of(name);
  auto it = types_.find(type_id);
  if (it != types_.end()) {
    TypeEntry& e = it->second;
    if (e.package) {
      if (e.package->digest != pkg->digest)
        throw Error(Errc::type_collision, "'" + name + "' is already registered with different code");
      return {name, type_id, e.package};
    }
    if (e.received_mode == wire::Mode::Portable && fnv1a64(e.side_buffer) != pkg->digest)
      throw Error(Errc::type_collision, "'" + name + "' was received with different code");
    e.name = name;
    e.package = pkg;
    return {name, type_id, pkg};
  }
  TypeEntry e;
  e.name = name;
  e.package = pkg;
  e.pure = pkg->pure();
  e.registered_ns = transport_.now_ns();
  types_.emplace(type_id, std::move(e));
  return {name, type_id, pkg};
}

void Node::deregister_ifunc(std::uint64_t type_id) {
  types_.erase(type_id);
  for (auto it = sent_.begin(); it != sent_.end();)
    it = it->first == type_id ? sent_.erase(it) : std::next(it);
  for (auto it = last_frame_.begin(); it != last_frame_.end();)
    it = it->first.first == type_id ? last_frame_.erase(it) : std::next(it);
}

std::uint64_t Node::compile_count(std::uint64_t type_id) const {
  auto it = compiles_.find(type_id);
  return it == compiles_.end() ? 0 : it->second;
}

std::uint64_t Node::prelinked_load_count(std::uint64_t type_id) const {
  auto it = loads_.find(type_id);
  return it == loads_.end() ? 0 : it->second;
}

wire::MessageFrame Node::create_message(const IfuncHandle& h, ByteSpan payload, wire::Mode mode,
                                        const std::string& target_profile) const {
  if (!h.package)
    throw Error(Errc::invalid_argument, "empty ifunc handle");
  ByteSpan code;
  if (mode == wire::Mode::Portable) {
    code = h.package->archive_bytes;
  } else if (mode == wire::Mode::Prelinked) {
    const std::string& want = target_profile.empty() ? profile_.name : target_profile;
    auto it = h.package->prelinked.find(want);
    if (it == h.package->prelinked.end())
      throw Error(Errc::not_found, "'" + h.name + "' has no prelinked image for " + want);
    code = it->second;
  } else {
    throw Error(Errc::invalid_argument, "ifunc messages use mode 1 or 2; use am_send for active messages");
  }
  wire::FrameHeader hdr;
  hdr.type_id = h.type_id;
  hdr.mode = mode;
  hdr.flags = h.package->pure() ? wire::kFlagPure : 0;
  hdr.src_node = id();
  hdr.payload_len = static_cast<std::uint32_t>(payload.size());
  hdr.code_len = static_cast<std::uint32_t>(code.size());
  if (wire::full_len(hdr) > transport_.channel_config().slot_size)
    throw Error(Errc::oversize, "frame of " + std::to_string(wire::full_len(hdr)) + " bytes exceeds slot size " +
                                    std::to_string(transport_.channel_config().slot_size));
  return wire::MessageFrame(hdr, payload, code);
}

wire::MessageFrame Node::frame_for(std::uint64_t type_id, ByteSpan payload, wire::Mode mode) const {
  auto it = types_.find(type_id);
  if (it == types_.end())
    throw Error(Errc::dispatch, "type " + std::to_string(type_id) + " is not registered on node " +
                                    std::to_string(id()));
  const TypeEntry& e = it->second;
  if (e.package)
    return create_message({e.name, type_id, e.package}, payload, mode);
  if (e.received_mode != mode)
    throw Error(Errc::dispatch, "type " + std::to_string(type_id) + " was received as " +
                                    std::string(wire::to_string(e.received_mode)) + ", cannot forward as " +
                                    std::string(wire::to_string(mode)));
  wire::FrameHeader hdr;
  hdr.type_id = type_id;
  hdr.mode = mode;
  hdr.flags = e.pure ? wire::kFlagPure : 0;
  hdr.src_node = id();
  hdr.payload_len = static_cast<std::uint32_t>(payload.size());
  hdr.code_len = static_cast<std::uint32_t>(e.side_buffer.size());
  if (wire::full_len(hdr) > transport_.channel_config().slot_size)
    throw Error(Errc::oversize, "frame exceeds slot size");
  return wire::MessageFrame(hdr, payload, e.side_buffer);
}

void Node::sync_epoch(net::NodeId endpoint) {
  std::uint64_t now = transport_.epoch(endpoint);
  if (epochs_.at(endpoint) == now)
    return;
  epochs_[endpoint] = now;
  for (auto it = sent_.begin(); it != sent_.end();)
    it = it->second == endpoint ? sent_.erase(it) : std::next(it);
}

net::SendToken Node::send_ifunc(net::NodeId endpoint, const wire::MessageFrame& frame) {
  if (!frame.valid() || frame.header().mode == wire::Mode::ActiveMessage)
    throw Error(Errc::invalid_argument, "send_ifunc needs an ifunc frame");
  if (endpoint >= transport_.node_count())
    throw Error(Errc::unknown_endpoint, "node " + std::to_string(endpoint));
  transport_.connect(endpoint);
  sync_epoch(endpoint);
  const auto key = std::make_pair(frame.header().type_id, endpoint);
  const bool cached = config_.caching && sent_.count(key) > 0;
  ByteSpan bytes = cached ? frame.truncated() : frame.bytes();
  net::SendToken token = transport_.put(endpoint, bytes);
  if (cached) {
    ++counters_.truncated_sends;
  } else {
    ++counters_.full_sends;
    if (config_.caching)
      sent_.insert(key);
  }
  counters_.wire_bytes += bytes.size();
  if (config_.caching)
    last_frame_[key] = frame;
  return token;
}

void Node::am_register(std::uint32_t index, AmHandler handler) {
  if (index == kNakIndex)
    throw Error(Errc::invalid_argument, "handler index 0xFFFFFFFF is reserved");
  if (!handler)
    throw Error(Errc::invalid_argument, "empty handler");
  am_[index] = std::move(handler);
}

net::SendToken Node::am_send(net::NodeId endpoint, std::uint32_t index, ByteSpan payload) {
  wire::FrameHeader hdr;
  hdr.mode = wire::Mode::ActiveMessage;
  hdr.src_node = id();
  hdr.payload_len = static_cast<std::uint32_t>(payload.size());
  hdr.code_len = index;
  ByteVec bytes = wire::encode_frame(hdr, payload, {});
  net::SendToken token = transport_.put(endpoint, bytes);
  ++counters_.am_sends;
  counters_.wire_bytes += bytes.size();
  return token;
}

std::size_t Node::poll(std::size_t max_events) {
  transport_.progress();
  const std::size_t n = transport_.node_count();
  std::size_t handled = 0;
  bool any = true;
  while (handled < max_events && any) {
    any = false;
    for (std::size_t k = 0; k < n && handled < max_events; ++k) {
      auto src = static_cast<net::NodeId>((next_src_ + k) % n);
      if (src == id())
        continue;
      if (handle_slot(src)) {
        ++handled;
        any = true;
      }
    }
    next_src_ = (next_src_ + 1) % n;
  }
  return handled;
}

void Node::drop_slot(net::NodeId src, const std::string& why) {
  if (log_)
    fmt::print(stderr, "[node {}] dropped message from {}: {}\n", id(), src, why);
  transport_.release_head(src);
}

void Node::send_nak(net::NodeId dst, std::uint64_t type_id) {
  std::uint8_t payload[8];
  store_le<std::uint64_t>(payload, type_id);
  try {
    am_send(dst, kNakIndex, payload);
    ++counters_.naks_sent;
  } catch (const Error& e) {
    if (log_)
      fmt::print(stderr, "[node {}] resend request to {} failed: {}\n", id(), dst, e.what());
  }
}

void Node::on_nak(net::NodeId src, ByteSpan payload) {
  if (payload.size() != 8) {
    ++counters_.dispatch_errors;
    return;
  }
  ++counters_.naks_received;
  const auto key = std::make_pair(load_le<std::uint64_t>(payload.data()), src);
  sent_.erase(key);
  auto it = last_frame_.find(key);
  if (it == last_frame_.end())
    return;
  wire::MessageFrame frame = it->second;
  try {
    send_ifunc(src, frame);
    ++counters_.resends;
  } catch (const Error& e) {
    if (log_)
      fmt::print(stderr, "[node {}] resend to {} failed: {}\n", id(), src, e.what());
  }
}

std::uint64_t Node::ensure_compiled(TypeEntry& e, std::uint64_t type_id, wire::Mode mode) {
  if (e.fn)
    return 0;
  auto t0 = Clock::now();
  const ByteVec* image = nullptr;
  if (mode == wire::Mode::Prelinked) {
    if (!e.side_buffer.empty() && e.received_mode == wire::Mode::Prelinked)
      image = &e.side_buffer;
    else if (e.package)
      if (auto it = e.package->prelinked.find(profile_.name); it != e.package->prelinked.end())
        image = &it->second;
  }
  if (image) {
    auto img = pcode::decode_prelinked(*image);
    e.fn = std::make_shared<pcode::CompiledFunction>(
        pcode::load_prelinked(img, profile_, config_.capabilities, type_id));
    ++loads_[type_id];
  } else {
    pcode::FatArchive parsed;
    const pcode::FatArchive* archive = nullptr;
    if (e.package) {
      archive = &e.package->archive;
    } else if (e.received_mode == wire::Mode::Portable) {
      parsed = pcode::parse_archive(e.side_buffer);
      archive = &parsed;
    } else {
      throw Error(Errc::dispatch, "no portable code for type " + std::to_string(type_id));
    }
    const auto& blob = pcode::select_variant(*archive, profile_);
    e.fn = std::make_shared<pcode::CompiledFunction>(pcode::compile(blob, profile_, config_.capabilities, type_id));
    ++compiles_[type_id];
  }
  return elapsed_ns(t0);
}

void Node::run(std::uint64_t type_id, TypeEntry& e, const wire::FrameView& view, net::NodeId src,
               std::uint64_t compile_ns, std::uint64_t started_ns, Clock::time_point lookup_start) {
  auto fn = e.fn;
  env_->current_type = type_id;
  current_mode_ = view.header.mode;
  exec::ExitStatus status = exec::execute(*fn, view.payload, region(), *env_, config_.fuel);
  std::uint64_t total_ns = elapsed_ns(lookup_start);
  env_->current_type.reset();
  ++counters_.executions;
  if (status.trap) {
    ++counters_.traps;
    if (log_)
      fmt::print(stderr, "[node {}] type {:#x} trapped at pc {}: {} {}\n", id(), type_id, status.trap->pc,
                 exec::to_string(status.trap->kind), status.trap->detail);
  }
  if (on_execute) {
    ExecRecord rec;
    rec.type_id = type_id;
    rec.src = src;
    rec.mode = view.header.mode;
    rec.status = std::move(status);
    rec.started_ns = started_ns;
    rec.compile_ns = compile_ns;
    rec.handle_ns = total_ns > compile_ns ? total_ns - compile_ns : 0;
    rec.payload = view.payload;
    on_execute(rec);
  }
}

bool Node::handle_slot(net::NodeId src) {
  ByteSpan slot = transport_.head_slot(src);
  auto t0 = Clock::now();
  wire::Delivery d = wire::detect_delivery(slot, false);
  if (d.state == wire::DeliveryState::NotYet)
    return false;
  if (d.state == wire::DeliveryState::Corrupt) {
    if (!transport_.head_settled(src))
      return false;
    ++counters_.corrupt_frames;
    drop_slot(src, d.reason);
    return true;
  }
  const std::uint64_t started = transport_.now_ns();
  const wire::FrameHeader h = d.view.header;

  if (h.mode == wire::Mode::ActiveMessage) {
    if (h.am_index() == kNakIndex) {
      on_nak(src, d.view.payload);
    } else if (auto it = am_.find(h.am_index()); it != am_.end()) {
      ++counters_.am_dispatches;
      it->second(*this, AmMessage{src, d.view.payload});
      if (on_execute) {
        ExecRecord rec;
        rec.am_index = h.am_index();
        rec.src = src;
        rec.mode = wire::Mode::ActiveMessage;
        rec.status = exec::ExitStatus::halted(0);
        rec.started_ns = started;
        rec.handle_ns = elapsed_ns(t0);
        rec.payload = d.view.payload;
        on_execute(rec);
      }
    } else {
      ++counters_.dispatch_errors;
      if (log_)
        fmt::print(stderr, "[node {}] no active-message handler {}\n", id(), h.am_index());
    }
    transport_.release_head(src);
    return true;
  }

  std::uint64_t compile_ns = 0;
  auto it = types_.find(h.type_id);
  wire::FrameView view = d.view;
  if (it == types_.end()) {
    wire::Delivery full = wire::detect_delivery(slot, true);
    if (full.state == wire::DeliveryState::NotYet) {
      if (!transport_.head_settled(src))
        return false;
      // Truncated frame for a type this node never saw: ask for the code.
      ++counters_.corrupt_frames;
      send_nak(src, h.type_id);
      drop_slot(src, "truncated frame for unknown type");
      return true;
    }
    if (full.state == wire::DeliveryState::Corrupt) {
      ++counters_.corrupt_frames;
      drop_slot(src, full.reason);
      return true;
    }
    view = full.view;
    TypeEntry e;
    e.received_mode = h.mode;
    e.side_buffer.assign(view.code_section.begin(), view.code_section.end());
    e.pure = h.pure();
    e.registered_ns = started;
    try {
      compile_ns = ensure_compiled(e, h.type_id, h.mode);
    } catch (const Error& err) {
      if (deployment_error(err.code()))
        ++counters_.variant_mismatches;
      else
        ++counters_.corrupt_frames;
      drop_slot(src, err.what());
      return true;
    }
    ++counters_.auto_registrations;
    it = types_.emplace(h.type_id, std::move(e)).first;
  } else {
    try {
      compile_ns = ensure_compiled(it->second, h.type_id, h.mode);
    } catch (const Error& err) {
      if (deployment_error(err.code()))
        ++counters_.variant_mismatches;
      else
        ++counters_.dispatch_errors;
      drop_slot(src, err.what());
      return true;
    }
  }
  run(h.type_id, it->second, view, src, compile_ns, started, t0);
  transport_.release_head(src);
  return true;
}

void Node::send_self(std::uint64_t dest_node, ByteSpan payload) {
  if (!env_->current_type)
    throw Error(Errc::hostcall, "send_self outside an ifunc");
  send_ifunc(node_arg(dest_node), frame_for(*env_->current_type, payload, current_mode_));
}

void Node::send(std::uint64_t type_id, std::uint64_t dest_node, ByteSpan payload) {
  send_ifunc(node_arg(dest_node), frame_for(type_id, payload, current_mode_));
}

ByteVec Node::mem_get(std::uint64_t node, std::uint64_t remote_off, std::uint64_t len) {
  if (len > std::numeric_limits<std::uint32_t>::max())
    throw Error(Errc::remote_bounds, "get length " + std::to_string(len));
  return transport_.get(node_arg(node), remote_off, static_cast<std::uint32_t>(len));
}

void Node::mem_put(std::uint64_t node, ByteSpan bytes, std::uint64_t remote_off) {
  transport_.put_region(node_arg(node), bytes, remote_off);
}

ByteVec Node::get(net::NodeId endpoint, std::uint64_t remote_off, std::uint32_t len) {
  return transport_.get(endpoint, remote_off, len);
}

void Node::put(net::NodeId endpoint, ByteSpan bytes, std::uint64_t remote_off) {
  transport_.put_region(endpoint, bytes, remote_off);
}

void Node::flush(net::NodeId endpoint) { transport_.flush(endpoint); }

} // namespace bitchain::node

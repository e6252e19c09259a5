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

#include "bitchain/net/tcp.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace bitchain::net {

namespace {

constexpr std::uint8_t kHello = 'H';
constexpr std::uint8_t kPut = 'P';
constexpr std::uint8_t kCredit = 'C';
constexpr std::uint8_t kGetReq = 0x47;
constexpr std::uint8_t kGetResp = 0x72;
constexpr std::uint8_t kWrite = 'W';
constexpr std::uint8_t kFlush = 'F';
constexpr std::uint8_t kFlushAck = 'f';
constexpr char kHelloMagic[4] = {'B', 'T', 'C', 'H'};
constexpr std::uint32_t kMaxTransfer = 64u << 20;
constexpr NodeId kUnknownPeer = ~NodeId{0};

struct HostPort {
  std::string host;
  std::string port;
};

HostPort split_address(const std::string& addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string::npos || colon + 1 == addr.size())
    throw Error(Errc::invalid_argument, "address must be host:port, got '" + addr + "'");
  return {addr.substr(0, colon), addr.substr(colon + 1)};
}

addrinfo* resolve(const std::string& addr, bool passive) {
  auto hp = split_address(addr);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive)
    hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  int rc = ::getaddrinfo(hp.host.empty() ? nullptr : hp.host.c_str(), hp.port.c_str(), &hints, &res);
  if (rc != 0 || !res)
    throw Error(Errc::io, "cannot resolve '" + addr + "': " + ::gai_strerror(rc));
  return res;
}

bool read_exact(int fd, void* buf, std::size_t n) {
  auto* p = static_cast<std::uint8_t*>(buf);
  while (n > 0) {
    ssize_t r = ::recv(fd, p, n, 0);
    if (r == 0)
      return false;
    if (r < 0) {
      if (errno == EINTR)
        continue;
      return false;
    }
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

bool write_all(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR)
        continue;
      return false;
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
  return true;
}

void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

} // namespace

std::vector<std::uint16_t> reserve_ports(std::size_t n) {
  std::vector<int> fds;
  std::vector<std::uint16_t> ports;
  for (std::size_t i = 0; i < n; ++i) {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
      throw Error(Errc::io, std::string("socket: ") + std::strerror(errno));
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    sa.sin_port = 0;
    socklen_t sl = sizeof sa;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0 ||
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &sl) != 0) {
      ::close(fd);
      throw Error(Errc::io, std::string("bind: ") + std::strerror(errno));
    }
    fds.push_back(fd);
    ports.push_back(ntohs(sa.sin_port));
  }
  for (int fd : fds)
    ::close(fd);
  return ports;
}

struct TcpTransport::Conn {
  int fd = -1;
  NodeId peer = kUnknownPeer;
  std::uint64_t id = 0;
  bool outbound = false;
  bool write_failed = false; // owner thread only
  std::atomic<bool> open{true};

  ~Conn() {
    if (fd >= 0)
      ::close(fd);
  }
  void shut() {
    open = false;
    ::shutdown(fd, SHUT_RDWR);
  }
};

struct TcpTransport::Event {
  enum class Kind { Hello, Put, Credit, GetReq, GetResp, Write, Flush, FlushAck, Closed, Corrupt };
  Event(Kind k, std::shared_ptr<Conn> c) : kind(k), conn(std::move(c)) {}
  Kind kind;
  std::shared_ptr<Conn> conn;
  std::uint32_t a = 0;
  std::uint64_t off = 0;
  std::uint32_t len = 0;
  std::uint8_t status = 0;
  ByteVec data;
  std::string reason;
};

TcpTransport::TcpTransport(NodeId self, PeerList peers, NetConfig config)
    : self_(self), peers_(std::move(peers)), config_(config), start_(std::chrono::steady_clock::now()) {
  if (self_ >= peers_.size())
    throw Error(Errc::unknown_endpoint, "self id " + std::to_string(self_) + " not in peer list");
  if (config_.channel.slots == 0 || config_.channel.slot_size == 0)
    throw Error(Errc::invalid_argument, "slots and slot size must be positive");
  out_.resize(peers_.size());
  in_.resize(peers_.size());
  for (auto& in : in_) {
    in.slots.assign(config_.channel.slots, ByteVec(config_.channel.slot_size, 0));
    in.filled.assign(config_.channel.slots, false);
  }

  addrinfo* res = resolve(peers_[self_], true);
  listen_fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  int rc = listen_fd_ < 0 ? -1 : ::bind(listen_fd_, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0 || ::listen(listen_fd_, 64) != 0) {
    std::string why = std::strerror(errno);
    if (listen_fd_ >= 0)
      ::close(listen_fd_);
    throw Error(Errc::io, "listen on " + peers_[self_] + ": " + why);
  }
  acceptor_ = std::thread([this] { accept_loop(); });
}

TcpTransport::~TcpTransport() {
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
    for (auto& c : conns_)
      c->shut();
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  acceptor_.join();
  ::close(listen_fd_);
  {
    std::lock_guard lock(mu_);
    threads.swap(threads_);
  }
  for (auto& t : threads)
    t.join();
}

void TcpTransport::check_peer(NodeId id) const {
  if (id >= peers_.size())
    throw Error(Errc::unknown_endpoint, "node " + std::to_string(id));
}

void TcpTransport::accept_loop() {
  for (;;) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED)
        continue;
      return;
    }
    set_nodelay(fd);
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(fd);
      return;
    }
    auto conn = std::make_shared<Conn>();
    conn->fd = fd;
    conn->id = next_conn_id_++;
    conns_.push_back(conn);
    threads_.emplace_back([this, conn] { read_loop(conn); });
  }
}

void TcpTransport::push(Event ev) {
  {
    std::lock_guard lock(mu_);
    inbox_.push_back(std::move(ev));
  }
  cv_.notify_all();
}

void TcpTransport::read_loop(std::shared_ptr<Conn> conn) {
  using K = Event::Kind;
  const int fd = conn->fd;
  auto corrupt = [&](std::string why) {
    Event ev(K::Corrupt, conn);
    ev.reason = std::move(why);
    push(std::move(ev));
    conn->shut();
  };

  if (!conn->outbound) {
    std::uint8_t hello[9];
    if (!read_exact(fd, hello, sizeof hello)) {
      conn->shut();
      return;
    }
    NodeId src = load_le<std::uint32_t>(hello + 1);
    if (hello[0] != kHello || std::memcmp(hello + 5, kHelloMagic, 4) != 0 || src >= peers_.size() || src == self_)
      return corrupt("bad hello");
    conn->peer = src;
    push(Event(K::Hello, conn));
  }

  const auto& cc = config_.channel;
  for (;;) {
    std::uint8_t type;
    if (!read_exact(fd, &type, 1))
      break;
    std::uint8_t hdr[17];
    Event ev(K::Closed, conn);
    bool ok = true;
    if (!conn->outbound && type == kPut) {
      ok = read_exact(fd, hdr, 8);
      if (!ok)
        break;
      ev.kind = K::Put;
      ev.a = load_le<std::uint32_t>(hdr);
      std::uint32_t len = load_le<std::uint32_t>(hdr + 4);
      if (ev.a >= cc.slots || len == 0 || len > cc.slot_size)
        return corrupt("PUT slot " + std::to_string(ev.a) + " len " + std::to_string(len));
      ev.data.resize(len);
      ok = read_exact(fd, ev.data.data(), len);
    } else if (!conn->outbound && type == kGetReq) {
      ok = read_exact(fd, hdr, 16);
      ev.kind = K::GetReq;
      ev.a = load_le<std::uint32_t>(hdr);
      ev.off = load_le<std::uint64_t>(hdr + 4);
      ev.len = load_le<std::uint32_t>(hdr + 12);
      if (ok && ev.len > kMaxTransfer)
        return corrupt("GET length");
    } else if (!conn->outbound && type == kWrite) {
      ok = read_exact(fd, hdr, 12);
      if (!ok)
        break;
      ev.kind = K::Write;
      ev.off = load_le<std::uint64_t>(hdr);
      std::uint32_t len = load_le<std::uint32_t>(hdr + 8);
      if (len > kMaxTransfer)
        return corrupt("write length");
      ev.data.resize(len);
      ok = read_exact(fd, ev.data.data(), len);
    } else if (!conn->outbound && type == kFlush) {
      ok = read_exact(fd, hdr, 4);
      ev.kind = K::Flush;
      ev.a = load_le<std::uint32_t>(hdr);
    } else if (conn->outbound && type == kCredit) {
      ok = read_exact(fd, hdr, 4);
      ev.kind = K::Credit;
      ev.a = load_le<std::uint32_t>(hdr);
      if (ok && ev.a >= cc.slots)
        return corrupt("credit for slot " + std::to_string(ev.a));
    } else if (conn->outbound && type == kGetResp) {
      ok = read_exact(fd, hdr, 9);
      if (!ok)
        break;
      ev.kind = K::GetResp;
      ev.a = load_le<std::uint32_t>(hdr);
      ev.status = hdr[4];
      std::uint32_t len = load_le<std::uint32_t>(hdr + 5);
      if (len > kMaxTransfer)
        return corrupt("GET response length");
      ev.data.resize(len);
      ok = read_exact(fd, ev.data.data(), len);
    } else if (conn->outbound && type == kFlushAck) {
      ok = read_exact(fd, hdr, 5);
      ev.kind = K::FlushAck;
      ev.a = load_le<std::uint32_t>(hdr);
      ev.status = hdr[4];
    } else {
      return corrupt("unexpected message type 0x" + [&] {
        static const char* hex = "0123456789abcdef";
        return std::string{hex[type >> 4], hex[type & 15]};
      }());
    }
    if (!ok)
      break;
    push(std::move(ev));
  }
  conn->open = false;
  push(Event(K::Closed, conn));
}

void TcpTransport::send_on(const std::shared_ptr<Conn>& conn, ByteSpan bytes) {
  if (!conn || !conn->open || !write_all(conn->fd, bytes.data(), bytes.size())) {
    NodeId peer = conn ? conn->peer : kUnknownPeer;
    if (conn)
      conn->shut();
    throw Error(Errc::endpoint_down, "stream to node " + std::to_string(peer) + " is closed");
  }
}

TcpTransport::Outbound& TcpTransport::connected(NodeId dst) {
  Outbound& o = out_[dst];
  if (o.conn && o.conn->open)
    return o;
  o.conn.reset();

  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.connect_timeout_ms);
  addrinfo* res = resolve(peers_[dst], false);
  int fd = -1;
  std::string why;
  for (;;) {
    fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0)
      break;
    why = std::strerror(errno);
    if (fd >= 0)
      ::close(fd);
    fd = -1;
    if (std::chrono::steady_clock::now() >= deadline)
      break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ::freeaddrinfo(res);
  if (fd < 0)
    throw Error(Errc::endpoint_down, "connect to node " + std::to_string(dst) + " at " + peers_[dst] + ": " + why);
  set_nodelay(fd);

  auto conn = std::make_shared<Conn>();
  conn->fd = fd;
  conn->peer = dst;
  conn->outbound = true;
  {
    std::lock_guard lock(mu_);
    conn->id = next_conn_id_++;
    conns_.push_back(conn);
  }
  std::uint8_t hello[9];
  hello[0] = kHello;
  store_le<std::uint32_t>(hello + 1, self_);
  std::memcpy(hello + 5, kHelloMagic, 4);
  send_on(conn, hello);
  {
    std::lock_guard lock(mu_);
    threads_.emplace_back([this, conn] { read_loop(conn); });
  }
  o.conn = conn;
  o.credits = config_.channel.slots;
  o.next_slot = 0;
  ++o.epoch;
  return o;
}

template <typename Pred>
void TcpTransport::await(NodeId dst, Pred done, const char* what) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(config_.io_timeout_ms);
  for (;;) {
    progress();
    if (done())
      return;
    if (!out_[dst].conn)
      throw Error(Errc::endpoint_down, std::string(what) + ": node " + std::to_string(dst) + " disconnected");
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline)
      throw Error(Errc::timeout, std::string(what) + ": no answer from node " + std::to_string(dst));
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, std::min<std::chrono::steady_clock::duration>(deadline - now, std::chrono::milliseconds(50)),
                 [&] { return !inbox_.empty(); });
  }
}

SendToken TcpTransport::put(NodeId dst, ByteSpan bytes) {
  check_peer(dst);
  if (dst == self_)
    throw Error(Errc::unknown_endpoint, "node " + std::to_string(self_) + " has no channel to itself");
  if (bytes.empty())
    throw Error(Errc::invalid_argument, "zero-byte PUT");
  if (bytes.size() > config_.channel.slot_size)
    throw Error(Errc::oversize, std::to_string(bytes.size()) + " bytes > slot size " +
                                    std::to_string(config_.channel.slot_size));
  progress();
  Outbound* o = &connected(dst);
  if (o->credits == 0 && config_.channel.credit_policy == CreditPolicy::block) {
    await(dst, [&] { return out_[dst].credits > 0; }, "credit wait");
    o = &connected(dst);
  }
  if (o->credits == 0)
    throw Error(Errc::no_credit, "channel " + std::to_string(self_) + "->" + std::to_string(dst));

  ByteVec msg(9 + bytes.size());
  msg[0] = kPut;
  store_le<std::uint32_t>(msg.data() + 1, o->next_slot);
  store_le<std::uint32_t>(msg.data() + 5, static_cast<std::uint32_t>(bytes.size()));
  std::copy(bytes.begin(), bytes.end(), msg.begin() + 9);
  try {
    send_on(o->conn, msg);
  } catch (const Error&) {
    o->conn.reset();
    throw;
  }
  --o->credits;
  o->next_slot = (o->next_slot + 1) % config_.channel.slots;
  ++counters_.puts;
  counters_.put_bytes += bytes.size();
  std::uint64_t t = now_ns();
  return {counters_.puts, static_cast<std::uint32_t>(bytes.size()), t, t};
}

std::uint32_t TcpTransport::credits(NodeId dst) const {
  check_peer(dst);
  if (dst == self_)
    return 0;
  const Outbound& o = out_[dst];
  // A channel that was never opened starts with a full ring.
  return o.conn ? o.credits : config_.channel.slots;
}

void TcpTransport::progress() {
  std::deque<Event> batch;
  {
    std::lock_guard lock(mu_);
    batch.swap(inbox_);
  }
  for (auto& ev : batch)
    handle(ev);
}

void TcpTransport::fault(NodeId peer, const std::string& why) {
  ++counters_.corrupt_channels;
  last_fault_ = "channel from node " + (peer == kUnknownPeer ? std::string("?") : std::to_string(peer)) + ": " + why;
}

void TcpTransport::handle(Event& ev) {
  using K = Event::Kind;
  const auto& conn = ev.conn;
  const NodeId peer = conn->peer;
  switch (ev.kind) {
  case K::Hello: {
    Inbound& in = in_[peer];
    if (in.conn && in.conn != conn)
      in.conn->shut();
    for (auto& s : in.slots)
      std::fill(s.begin(), s.end(), std::uint8_t{0});
    std::fill(in.filled.begin(), in.filled.end(), false);
    in.head = 0;
    in.conn = conn;
    break;
  }
  case K::Put: {
    Inbound& in = in_[peer];
    if (in.conn != conn)
      break;
    if (in.filled[ev.a]) {
      fault(peer, "PUT into occupied slot " + std::to_string(ev.a));
      conn->shut();
      in.conn.reset();
      break;
    }
    std::copy(ev.data.begin(), ev.data.end(), in.slots[ev.a].begin());
    in.filled[ev.a] = true;
    break;
  }
  case K::Credit: {
    Outbound& o = out_[peer];
    if (o.conn == conn && o.credits < config_.channel.slots)
      ++o.credits;
    break;
  }
  case K::GetReq: {
    bool ok = ev.off <= region_.size() && ev.len <= region_.size() - ev.off;
    std::uint32_t n = ok ? ev.len : 0;
    ByteVec msg(10 + n);
    msg[0] = kGetResp;
    store_le<std::uint32_t>(msg.data() + 1, ev.a);
    msg[5] = ok ? 0 : 1;
    store_le<std::uint32_t>(msg.data() + 6, n);
    if (ok)
      std::copy_n(region_.begin() + static_cast<std::ptrdiff_t>(ev.off), n, msg.begin() + 10);
    try {
      send_on(conn, msg);
    } catch (const Error&) {
    }
    break;
  }
  case K::GetResp: responses_[ev.a] = {ev.status, std::move(ev.data)}; break;
  case K::Write:
    if (ev.off <= region_.size() && ev.data.size() <= region_.size() - ev.off)
      std::copy(ev.data.begin(), ev.data.end(), region_.begin() + static_cast<std::ptrdiff_t>(ev.off));
    else
      conn->write_failed = true;
    break;
  case K::Flush: {
    std::uint8_t msg[6];
    msg[0] = kFlushAck;
    store_le<std::uint32_t>(msg + 1, ev.a);
    msg[5] = conn->write_failed ? 1 : 0;
    conn->write_failed = false;
    try {
      send_on(conn, msg);
    } catch (const Error&) {
    }
    break;
  }
  case K::FlushAck: flush_acks_[ev.a] = ev.status; break;
  case K::Corrupt:
    fault(peer, ev.reason);
    [[fallthrough]];
  case K::Closed:
    conn->shut();
    if (peer != kUnknownPeer) {
      if (in_[peer].conn == conn)
        in_[peer].conn.reset();
      if (out_[peer].conn == conn)
        out_[peer].conn.reset();
    }
    break;
  }
}

ByteSpan TcpTransport::head_slot(NodeId src) {
  check_peer(src);
  Inbound& in = in_[src];
  return in.slots[in.head];
}

void TcpTransport::release_head(NodeId src) {
  check_peer(src);
  Inbound& in = in_[src];
  std::uint32_t slot = in.head;
  std::fill(in.slots[slot].begin(), in.slots[slot].end(), std::uint8_t{0});
  in.filled[slot] = false;
  in.head = (in.head + 1) % config_.channel.slots;
  if (!in.conn)
    return;
  std::uint8_t msg[5];
  msg[0] = kCredit;
  store_le<std::uint32_t>(msg + 1, slot);
  try {
    send_on(in.conn, msg);
  } catch (const Error&) {
    in.conn.reset();
  }
}

ByteVec TcpTransport::get(NodeId dst, std::uint64_t remote_off, std::uint32_t len) {
  check_peer(dst);
  ByteVec out;
  if (dst == self_) {
    if (remote_off > region_.size() || len > region_.size() - remote_off)
      throw Error(Errc::remote_bounds, "get [" + std::to_string(remote_off) + ", +" + std::to_string(len) + ")");
    out.assign(region_.begin() + static_cast<std::ptrdiff_t>(remote_off),
               region_.begin() + static_cast<std::ptrdiff_t>(remote_off + len));
  } else {
    Outbound& o = connected(dst);
    std::uint32_t req = next_req_++;
    std::uint8_t msg[17];
    msg[0] = kGetReq;
    store_le<std::uint32_t>(msg + 1, req);
    store_le<std::uint64_t>(msg + 5, remote_off);
    store_le<std::uint32_t>(msg + 13, len);
    send_on(o.conn, msg);
    await(dst, [&] { return responses_.count(req) > 0; }, "get");
    auto node = responses_.extract(req);
    if (node.mapped().first != 0)
      throw Error(Errc::remote_bounds, "get [" + std::to_string(remote_off) + ", +" + std::to_string(len) +
                                           ") on node " + std::to_string(dst));
    out = std::move(node.mapped().second);
  }
  ++counters_.gets;
  counters_.get_bytes += len;
  return out;
}

void TcpTransport::put_region(NodeId dst, ByteSpan bytes, std::uint64_t remote_off) {
  check_peer(dst);
  if (dst == self_) {
    if (remote_off > region_.size() || bytes.size() > region_.size() - remote_off)
      throw Error(Errc::remote_bounds, "put at " + std::to_string(remote_off));
    std::copy(bytes.begin(), bytes.end(), region_.begin() + static_cast<std::ptrdiff_t>(remote_off));
  } else {
    Outbound& o = connected(dst);
    ByteVec msg(13 + bytes.size());
    msg[0] = kWrite;
    store_le<std::uint64_t>(msg.data() + 1, remote_off);
    store_le<std::uint32_t>(msg.data() + 9, static_cast<std::uint32_t>(bytes.size()));
    std::copy(bytes.begin(), bytes.end(), msg.begin() + 13);
    send_on(o.conn, msg);
  }
  ++counters_.region_puts;
  counters_.region_put_bytes += bytes.size();
}

void TcpTransport::flush(NodeId dst) {
  check_peer(dst);
  if (dst == self_)
    return;
  Outbound& o = connected(dst);
  std::uint32_t id = next_req_++;
  std::uint8_t msg[5];
  msg[0] = kFlush;
  store_le<std::uint32_t>(msg + 1, id);
  send_on(o.conn, msg);
  await(dst, [&] { return flush_acks_.count(id) > 0; }, "flush");
  std::uint8_t status = flush_acks_[id];
  flush_acks_.erase(id);
  if (status != 0)
    throw Error(Errc::remote_bounds, "an earlier region write to node " + std::to_string(dst) + " was out of bounds");
}

std::uint64_t TcpTransport::now_ns() const {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_).count());
}

void TcpTransport::connect(NodeId dst) {
  check_peer(dst);
  if (dst != self_) {
    progress();
    connected(dst);
  }
}

std::uint64_t TcpTransport::epoch(NodeId peer) const {
  check_peer(peer);
  return out_[peer].epoch;
}

void TcpTransport::wait_activity(std::uint32_t timeout_us) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, std::chrono::microseconds(timeout_us), [&] { return !inbox_.empty(); });
}

bool TcpTransport::peer_connected(NodeId src) const {
  check_peer(src);
  return in_[src].conn != nullptr;
}

} // namespace bitchain::net

// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "bicache/simd/kernels.hpp"

namespace bicache {

TraceError::TraceError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

constexpr std::uint64_t kFullSectorMask = ~std::uint64_t{0};

std::uint64_t byte_mask(std::uint32_t first, std::uint32_t count) {
  return count >= 64 ? kFullSectorMask : ((std::uint64_t{1} << count) - 1) << first;
}

// Walks the byte ranges of the accesses in order, producing one SectorAccess
// per maximal run in the same sector.
class SectorRunBuilder {
 public:
  SectorRunBuilder(Intent intent, Origin origin, std::vector<SectorAccess>& out)
      : intent_(intent), origin_(origin), out_(out) {}

  void add(std::uint32_t addr, std::uint32_t size) {
    std::uint64_t a = addr;
    const std::uint64_t end = std::uint64_t{addr} + size;
    while (a < end) {
      const std::uint32_t sector = static_cast<std::uint32_t>(a >> kSectorShift);
      const std::uint32_t off = static_cast<std::uint32_t>(a & (kSectorBytes - 1));
      const std::uint32_t take = static_cast<std::uint32_t>(std::min<std::uint64_t>(end - a, kSectorBytes - off));
      if (!open_ || sector != sector_) {
        flush();
        open_ = true;
        sector_ = sector;
        mask_ = 0;
      }
      mask_ |= byte_mask(off, take);
      a += take;
    }
  }

  void flush() {
    if (!open_) return;
    SectorAccess s;
    s.sector_base = PhysAddr(sector_ << kSectorShift);
    s.intent = intent_;
    s.origin = origin_;
    s.full_sector_write = intent_ == Intent::write && mask_ == kFullSectorMask;
    out_.push_back(s);
    open_ = false;
  }

 private:
  Intent intent_;
  Origin origin_;
  std::vector<SectorAccess>& out_;
  bool open_ = false;
  std::uint32_t sector_ = 0;
  std::uint64_t mask_ = 0;
};

Intent intent_of(MemOp op) { return op == MemOp::store ? Intent::write : Intent::read; }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

std::uint64_t parse_uint(std::string_view tok, int base, std::size_t line_no, const char* what) {
  if (base == 16 && tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X')) tok.remove_prefix(2);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v, base);
  if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty())
    throw TraceError(line_no, std::string("bad ") + what + " '" + std::string(tok) + "'");
  return v;
}

std::uint32_t parse_addr(std::string_view tok, std::size_t line_no) {
  const std::uint64_t v = parse_uint(tok, 16, line_no, "address");
  if (v > 0xFFFFFFFFull) throw TraceError(line_no, "address " + std::string(tok) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

void check_size(std::uint64_t size, std::size_t line_no) {
  if (size == 0 || size > 64 || (size & (size - 1)) != 0)
    throw TraceError(line_no, "access size must be a power of two between 1 and 64");
}

}  // namespace

std::vector<SectorAccess> coalesce(const VectorMemEvent& ev) {
  std::vector<SectorAccess> out;
  out.reserve(ev.elem_addrs.size());
  const Intent intent = intent_of(ev.op);
  std::uint32_t misalign = 0;
  for (const std::uint32_t a : ev.elem_addrs) misalign |= a & (ev.elem_size - 1);

  if (misalign != 0 || ev.elem_size > kSectorBytes) {
    SectorRunBuilder b(intent, Origin::vector, out);
    for (const std::uint32_t a : ev.elem_addrs) b.add(a, ev.elem_size);
    b.flush();
    return out;
  }

  // Naturally aligned elements never straddle a sector.
  thread_local std::vector<std::uint32_t> bases;
  bases.resize(ev.elem_addrs.size());
  simd::sector_bases(ev.elem_addrs, bases);
  const std::uint64_t elem_mask = byte_mask(0, ev.elem_size);
  std::size_t i = 0;
  while (i < bases.size()) {
    std::uint64_t mask = 0;
    std::size_t j = i;
    for (; j < bases.size() && bases[j] == bases[i]; ++j) mask |= elem_mask << (ev.elem_addrs[j] - bases[i]);
    SectorAccess s;
    s.sector_base = PhysAddr(bases[i]);
    s.intent = intent;
    s.origin = Origin::vector;
    s.full_sector_write = intent == Intent::write && mask == kFullSectorMask;
    out.push_back(s);
    i = j;
  }
  return out;
}

std::vector<SectorAccess> split_scalar(const ScalarMemEvent& ev) {
  std::vector<SectorAccess> out;
  SectorRunBuilder b(intent_of(ev.op), Origin::scalar, out);
  b.add(ev.addr, ev.size);
  b.flush();
  return out;
}

void write_event(std::ostream& os, const TraceEvent& ev) {
  char buf[32];
  auto hex = [&](std::uint32_t v) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v, 16);
    os << "0x";
    os.write(buf, r.ptr - buf);
  };
  if (const auto* c = std::get_if<ComputeEvent>(&ev)) {
    os << "C " << c->latency << '\n';
  } else if (const auto* s = std::get_if<ScalarMemEvent>(&ev)) {
    os << (s->op == MemOp::load ? "SL " : "SS ");
    hex(s->addr);
    os << ' ' << s->size << '\n';
  } else {
    const auto& v = std::get<VectorMemEvent>(ev);
    os << (v.op == MemOp::load ? "VL " : "VS ") << v.elem_size;
    for (const std::uint32_t a : v.elem_addrs) {
      os << ' ';
      hex(a);
    }
    os << '\n';
  }
}

TraceEvent parse_event_line(std::string_view line, std::size_t line_no) {
  const auto toks = split_ws(line);
  if (toks.empty()) throw TraceError(line_no, "empty event");
  const std::string_view op = toks[0];
  if (op == "C") {
    if (toks.size() != 2) throw TraceError(line_no, "C takes one operand");
    return ComputeEvent{parse_uint(toks[1], 10, line_no, "cycle count")};
  }
  if (op == "SL" || op == "SS") {
    if (toks.size() != 3) throw TraceError(line_no, std::string(op) + " takes an address and a size");
    const std::uint64_t size = parse_uint(toks[2], 10, line_no, "size");
    check_size(size, line_no);
    return ScalarMemEvent{op == "SL" ? MemOp::load : MemOp::store, parse_addr(toks[1], line_no),
                          static_cast<std::uint32_t>(size)};
  }
  if (op == "VL" || op == "VS") {
    if (toks.size() < 3) throw TraceError(line_no, std::string(op) + " needs an element size and addresses");
    VectorMemEvent v;
    v.op = op == "VL" ? MemOp::load : MemOp::store;
    const std::uint64_t size = parse_uint(toks[1], 10, line_no, "element size");
    check_size(size, line_no);
    v.elem_size = static_cast<std::uint32_t>(size);
    v.elem_addrs.reserve(toks.size() - 2);
    for (std::size_t i = 2; i < toks.size(); ++i) v.elem_addrs.push_back(parse_addr(toks[i], line_no));
    return v;
  }
  throw TraceError(line_no, "unknown event '" + std::string(op) + "'");
}

void read_trace(std::istream& is, const TraceSink& sink) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    sink(parse_event_line(body, line_no));
  }
}

void read_trace_file(const std::filesystem::path& path, const TraceSink& sink) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  read_trace(in, sink);
}

std::vector<TraceEvent> load_trace_file(const std::filesystem::path& path) {
  std::vector<TraceEvent> out;
  read_trace_file(path, [&](const TraceEvent& e) { out.push_back(e); });
  return out;
}

}  // namespace bicache

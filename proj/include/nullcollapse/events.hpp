#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nullcollapse {

// Field values on the first 2n labelled links; bit a-1 holds the value on l_a.
struct FieldConfig {
  std::uint64_t bits = 0;
  int extent = 0;

  static FieldConfig parse(const std::string& s) {
    if (s.size() % 2 != 0) throw std::invalid_argument("field config \"" + s + "\" has odd length");
    if (s.size() > 64) throw std::invalid_argument("field config too long");
    FieldConfig c;
    c.extent = static_cast<int>(s.size() / 2);
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (s[a] == '1') c.bits |= std::uint64_t{1} << a;
      else if (s[a] != '0') throw std::invalid_argument("field config \"" + s + "\" must be 0/1");
    }
    return c;
  }

  int link_count() const { return 2 * extent; }
  int value(int a) const { return static_cast<int>((bits >> (a - 1)) & 1U); }  // a is 1-based

  // Values on l_{2i-1}, l_{2i} packed as bit0 + 2 bit1 (i is 1-based).
  int vertex_outcome(int i) const { return static_cast<int>((bits >> (2 * (i - 1))) & 3U); }

  FieldConfig restricted(int m) const {
    if (m > extent) throw std::invalid_argument("cannot restrict to a larger extent");
    return FieldConfig{m == 0 ? 0 : bits & low_mask(m), m};
  }

  FieldConfig extended(int outcome) const {
    return FieldConfig{bits | (static_cast<std::uint64_t>(outcome & 3) << (2 * extent)), extent + 1};
  }

  std::string str() const {
    std::string s(link_count(), '0');
    for (int a = 0; a < link_count(); ++a)
      if ((bits >> a) & 1U) s[a] = '1';
    return s;
  }

  static std::uint64_t low_mask(int m) { return m >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * m)) - 1; }

  bool operator==(const FieldConfig&) const = default;
};

// All 4^n configurations at extent n, in increasing bit order.
inline std::vector<FieldConfig> all_configs(int n) {
  std::vector<FieldConfig> out;
  out.reserve(std::size_t{1} << (2 * n));
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << (2 * n)); ++b) out.push_back(FieldConfig{b, n});
  return out;
}

inline int hamming(const FieldConfig& a, const FieldConfig& b) {
  if (a.extent != b.extent)
    throw std::invalid_argument("hamming distance needs equal extents (" + std::to_string(a.extent) +
                                " vs " + std::to_string(b.extent) + ")");
  return __builtin_popcountll(a.bits ^ b.bits);
}

// A finite disjoint union of cylinder sets over a product of `factors` copies
// of the history space (1 for Omega_q or Omega_c, 2 for Omega_q x Omega_c or
// Omega_q x Omega_e), all represented at one extent.
//
// A cylinder key packs the per-factor configs: factor f occupies bits
// [2 extent f, 2 extent (f+1)).
class Event {
 public:
  static constexpr int kMaxKeys = 1 << 24;

  Event() = default;
  Event(int factors, int extent, std::vector<std::uint64_t> keys)
      : factors_(factors), extent_(extent), keys_(std::move(keys)) {
    if (factors < 1 || factors > 2) throw std::invalid_argument("events support 1 or 2 factors");
    if (extent < 0 || 2 * extent * factors > 48) throw std::invalid_argument("event extent out of range");
    std::sort(keys_.begin(), keys_.end());
    keys_.erase(std::unique(keys_.begin(), keys_.end()), keys_.end());
    for (auto k : keys_)
      if (2 * extent * factors < 64 && (k >> (2 * extent * factors)) != 0)
        throw std::invalid_argument("cylinder key exceeds event extent");
  }

  static Event omega(int factors = 1) { return Event(factors, 0, {0}); }
  static Event empty(int factors = 1) { return Event(factors, 0, {}); }

  int factors() const { return factors_; }
  int extent() const { return extent_; }
  const std::vector<std::uint64_t>& keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }
  bool is_empty() const { return keys_.empty(); }

  std::uint64_t cylinder_count_at_extent() const { return std::uint64_t{1} << (2 * extent_ * factors_); }

  FieldConfig part(std::uint64_t key, int factor) const { return unpack(key, factor, extent_); }

  static FieldConfig unpack(std::uint64_t key, int factor, int extent) {
    return FieldConfig{(key >> (2 * extent * factor)) & FieldConfig::low_mask(extent), extent};
  }
  static std::uint64_t pack(const FieldConfig& a) { return a.bits; }
  static std::uint64_t pack(const FieldConfig& a, const FieldConfig& b) {
    if (a.extent != b.extent) throw std::invalid_argument("joint cylinder needs equal extents");
    return a.bits | (b.bits << (2 * a.extent));
  }

  // Membership of a history, given by its restriction(s) to some extent >= ours.
  bool contains(const FieldConfig& h) const {
    require_factors(1);
    return std::binary_search(keys_.begin(), keys_.end(), h.restricted(extent_).bits);
  }
  bool contains(const FieldConfig& h0, const FieldConfig& h1) const {
    require_factors(2);
    return std::binary_search(keys_.begin(), keys_.end(), pack(h0.restricted(extent_), h1.restricted(extent_)));
  }

  void require_factors(int f) const {
    if (factors_ != f)
      throw std::invalid_argument("event has " + std::to_string(factors_) + " factor(s), expected " +
                                  std::to_string(f));
  }

  // Equality of the underlying sets of histories.
  friend bool operator==(const Event& a, const Event& b);

 private:
  int factors_ = 1;
  int extent_ = 0;
  std::vector<std::uint64_t> keys_;
};

inline Event cylinder(const FieldConfig& c) { return Event(1, c.extent, {c.bits}); }
inline Event cylinder(const FieldConfig& q, const FieldConfig& c) { return Event(2, q.extent, {Event::pack(q, c)}); }

// Same set of histories at extent m; each cylinder splits into 4^(m-n) per factor.
inline Event refine(const Event& e, int m) {
  if (m < e.extent())
    throw std::invalid_argument("cannot refine extent " + std::to_string(e.extent()) + " down to " +
                                std::to_string(m));
  if (m == e.extent()) return e;
  const int f = e.factors();
  const std::uint64_t per_factor = std::uint64_t{1} << (2 * (m - e.extent()));
  std::uint64_t children = 1;
  for (int k = 0; k < f; ++k) children *= per_factor;
  if (e.size() * children > static_cast<std::uint64_t>(Event::kMaxKeys))
    throw std::length_error("refinement would exceed the event size limit");
  std::vector<std::uint64_t> out;
  out.reserve(e.size() * children);
  const int shift = 2 * e.extent();
  for (auto key : e.keys()) {
    for (std::uint64_t child = 0; child < children; ++child) {
      std::uint64_t packed = 0;
      std::uint64_t rest = child;
      for (int k = 0; k < f; ++k) {
        const std::uint64_t tail = rest % per_factor;
        rest /= per_factor;
        const std::uint64_t bits = Event::unpack(key, k, e.extent()).bits | (tail << shift);
        packed |= bits << (2 * m * k);
      }
      out.push_back(packed);
    }
  }
  return Event(f, m, std::move(out));
}

// Minimal-extent representation: repeatedly merge complete sibling blocks.
inline Event canonical(const Event& e) {
  if (e.is_empty()) return Event::empty(e.factors());
  Event cur = e;
  const int f = e.factors();
  const std::uint64_t block = std::uint64_t{1} << (2 * f);
  while (cur.extent() > 0) {
    const int n = cur.extent();
    std::vector<std::uint64_t> parents;
    parents.reserve(cur.size());
    for (auto key : cur.keys()) {
      std::uint64_t p = 0;
      for (int k = 0; k < f; ++k) p |= Event::unpack(key, k, n).restricted(n - 1).bits << (2 * (n - 1) * k);
      parents.push_back(p);
    }
    std::vector<std::uint64_t> sorted = parents;
    std::sort(sorted.begin(), sorted.end());
    bool complete = true;
    std::vector<std::uint64_t> unique;
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      if (j - i != block) {
        complete = false;
        break;
      }
      unique.push_back(sorted[i]);
      i = j;
    }
    if (!complete) break;
    cur = Event(f, n - 1, std::move(unique));
  }
  return cur;
}

inline int time_extent(const Event& e) { return canonical(e).extent(); }

inline bool operator==(const Event& a, const Event& b) {
  if (a.factors() != b.factors()) return false;
  const Event ca = canonical(a);
  const Event cb = canonical(b);
  return ca.extent() == cb.extent() && ca.keys() == cb.keys();
}

namespace detail {
inline std::pair<Event, Event> common_extent(const Event& a, const Event& b) {
  if (a.factors() != b.factors()) throw std::invalid_argument("events live on different history spaces");
  const int m = std::max(a.extent(), b.extent());
  return {refine(a, m), refine(b, m)};
}
}  // namespace detail

inline Event union_of(const Event& a, const Event& b) {
  auto [ra, rb] = detail::common_extent(a, b);
  std::vector<std::uint64_t> out;
  std::set_union(ra.keys().begin(), ra.keys().end(), rb.keys().begin(), rb.keys().end(), std::back_inserter(out));
  return canonical(Event(ra.factors(), ra.extent(), std::move(out)));
}

inline Event intersect(const Event& a, const Event& b) {
  auto [ra, rb] = detail::common_extent(a, b);
  std::vector<std::uint64_t> out;
  std::set_intersection(ra.keys().begin(), ra.keys().end(), rb.keys().begin(), rb.keys().end(),
                        std::back_inserter(out));
  return canonical(Event(ra.factors(), ra.extent(), std::move(out)));
}

inline Event complement(const Event& a) {
  const std::uint64_t total = a.cylinder_count_at_extent();
  if (total > static_cast<std::uint64_t>(Event::kMaxKeys))
    throw std::length_error("complement would exceed the event size limit");
  std::vector<std::uint64_t> out;
  out.reserve(total - a.size());
  auto it = a.keys().begin();
  for (std::uint64_t k = 0; k < total; ++k) {
    if (it != a.keys().end() && *it == k) {
      ++it;
      continue;
    }
    out.push_back(k);
  }
  return canonical(Event(a.factors(), a.extent(), std::move(out)));
}

inline bool disjoint(const Event& a, const Event& b) { return intersect(a, b).is_empty(); }

// F x G on the product space.
inline Event product(const Event& q, const Event& c) {
  q.require_factors(1);
  c.require_factors(1);
  const int m = std::max(q.extent(), c.extent());
  const Event rq = refine(q, m);
  const Event rc = refine(c, m);
  if (rq.size() * rc.size() > static_cast<std::size_t>(Event::kMaxKeys))
    throw std::length_error("product event too large");
  std::vector<std::uint64_t> out;
  out.reserve(rq.size() * rc.size());
  for (auto kq : rq.keys())
    for (auto kc : rc.keys()) out.push_back(kq | (kc << (2 * m)));
  return Event(2, m, std::move(out));
}

// Text form: "<extent>:<cyl>,<cyl>,..." where a cylinder is its bit-string
// (joint cylinders "q|c"), the extent-0 cylinder is "-", and an empty list is
// the empty event. Omega is "0:-".
inline std::string to_text(const Event& e) {
  std::string s = std::to_string(e.extent()) + ":";
  bool first = true;
  for (auto key : e.keys()) {
    if (!first) s += ',';
    first = false;
    if (e.extent() == 0) {
      s += e.factors() == 1 ? "-" : "-|-";
      continue;
    }
    s += e.part(key, 0).str();
    if (e.factors() == 2) s += "|" + e.part(key, 1).str();
  }
  return s;
}

inline Event event_from_text(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("event text needs '<extent>:'");
  int extent = 0;
  try {
    std::size_t used = 0;
    extent = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("bad event extent in \"" + text + "\"");
  }
  std::vector<std::string> parts;
  std::string body = text.substr(colon + 1);
  for (std::size_t pos = 0; !body.empty() && pos <= body.size();) {
    const auto next = body.find(',', pos);
    parts.push_back(body.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  int factors = 0;
  std::vector<std::uint64_t> keys;
  for (const auto& p : parts) {
    const auto bar = p.find('|');
    const int f = bar == std::string::npos ? 1 : 2;
    if (factors != 0 && f != factors) throw std::invalid_argument("mixed cylinder kinds in \"" + text + "\"");
    factors = f;
    auto parse_one = [&](const std::string& s) {
      const FieldConfig c = s == "-" ? FieldConfig{} : FieldConfig::parse(s);
      if (c.extent != extent) throw std::invalid_argument("cylinder \"" + s + "\" does not match extent");
      return c;
    };
    if (f == 1) keys.push_back(parse_one(p).bits);
    else keys.push_back(Event::pack(parse_one(p.substr(0, bar)), parse_one(p.substr(bar + 1))));
  }
  return Event(factors == 0 ? 1 : factors, extent, std::move(keys));
}

}  // namespace nullcollapse

#pragma once

// GF(2^m) arithmetic, the AGHP small-bias set construction, exhaustive bias
// measurement, and the strongly-XOR-universal family h_i(k) = i*k over
// GF(2^{2n}).

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "entroq/pauli.hpp"

namespace entroq {

namespace gf2detail {

inline int poly_degree(uint64_t p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

// Remainder of polynomial division over GF(2).
inline uint64_t poly_mod(uint64_t p, uint64_t q) {
  const int dq = poly_degree(q);
  while (poly_degree(p) >= dq) p ^= q << (poly_degree(p) - dq);
  return p;
}

// Carry-less (polynomial) product.
inline uint64_t clmul(uint64_t x, uint64_t y) {
  uint64_t acc = 0;
  while (y) {
    if (y & 1) acc ^= x;
    x <<= 1;
    y >>= 1;
  }
  return acc;
}

// Exhaustive factor search; valid for degrees up to 16.
inline bool is_irreducible(uint64_t p) {
  const int m = poly_degree(p);
  if (m < 1 || m > 16) return false;
  for (int d = 1; d <= m / 2; ++d)
    for (uint64_t q = uint64_t(1) << d; q < (uint64_t(1) << (d + 1)); ++q)
      if (poly_mod(p, q) == 0) return false;
  return true;
}

}  // namespace gf2detail

// Fixed moduli: the lexicographically smallest irreducible polynomial of each
// degree, so sets and hash families are reproducible across runs and
// implementations. Degree 3 is x^3+x+1, degree 4 is x^4+x+1, degree 8 is
// x^8+x^4+x^3+x+1.
inline constexpr std::array<uint32_t, 17> kDefaultModulus = {
    0,       0x2,    0x7,    0xb,    0x13,   0x25,   0x43,    0x83,   0x11b,
    0x203,   0x409,  0x805,  0x1009, 0x201b, 0x4021, 0x8003,  0x1002b};

// Finite field GF(2^m) defined by an irreducible modulus polynomial.
class GFField {
 public:
  explicit GFField(int degree)
      : GFField(degree, degree >= 1 && degree <= 16 ? kDefaultModulus[size_t(degree)] : 0) {}

  GFField(int degree, uint32_t modulus) : degree_(degree), modulus_(modulus) {
    if (degree < 1 || degree > 16)
      throw std::invalid_argument("field degree must be in 1..16");
    if (gf2detail::poly_degree(modulus) != degree)
      throw std::invalid_argument("modulus degree must match field degree");
    if (!gf2detail::is_irreducible(modulus))
      throw std::invalid_argument("modulus polynomial is reducible");
  }

  int degree() const { return degree_; }
  uint32_t modulus() const { return modulus_; }
  uint32_t order() const { return uint32_t(1) << degree_; }

  uint32_t mul(uint32_t x, uint32_t y) const {
    if (x >= order() || y >= order()) throw std::invalid_argument("element out of field");
    return uint32_t(gf2detail::poly_mod(gf2detail::clmul(x, y), modulus_));
  }

  uint32_t add(uint32_t x, uint32_t y) const { return x ^ y; }

  // x^e with x^0 = 1 (including 0^0 = 1, the powering convention used by
  // the small-bias construction).
  uint32_t pow(uint32_t x, uint32_t e) const {
    uint32_t acc = 1;
    uint32_t base = x;
    while (e) {
      if (e & 1) acc = mul(acc, base);
      base = mul(base, base);
      e >>= 1;
    }
    return acc;
  }

 private:
  int degree_;
  uint32_t modulus_;
};

inline uint32_t gf_mul(const GFField& f, uint32_t x, uint32_t y) { return f.mul(x, y); }

// Finite multiset of n-bit strings with a certified bias parameter.
struct DeltaBiasedSet {
  int n = 0;                       // string length in bits
  std::vector<uint32_t> strings;   // kept with multiplicity
  double delta_bound = 1.0;        // certified upper bound on the bias
  std::string provenance;          // "AGHP(m)" or "explicit"

  BitString string_at(size_t i) const { return BitString(n, strings[i]); }
};

// Defining quantity of a small-bias set: max over s' != 0 of
// | mean over s of (-1)^{s . s'} |. Exhaustive, so n is capped at 16.
inline double measure_bias(const std::vector<uint32_t>& strings, int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("bias measurement supports n in 1..16");
  if (strings.empty()) throw std::invalid_argument("empty set");
  double worst = 0;
  for (uint32_t sp = 1; sp < (uint32_t(1) << n); ++sp) {
    int64_t sum = 0;
    for (uint32_t s : strings) sum += (std::popcount(s & sp) & 1) ? -1 : 1;
    worst = std::max(worst, std::abs(double(sum)) / double(strings.size()));
  }
  return worst;
}

inline double measure_bias(const DeltaBiasedSet& set) {
  return measure_bias(set.strings, set.n);
}

// Powering construction over GF(2^m): one string r_{x,y} per field pair
// (x, y), with bit i of r_{x,y} = <bits(x^i), bits(y)> mod 2. Yields
// |S| = 2^{2m} strings with bias at most (n-1)/2^m.
inline DeltaBiasedSet aghp_construct(int n, double delta) {
  if (n < 1) throw std::invalid_argument("string length must be >= 1");
  if (!(delta > 0.0) || delta > 1.0) throw std::invalid_argument("delta must be in (0, 1]");

  int m = 1;
  if (n > 1) {
    m = int(std::ceil(std::log2(double(n - 1) / delta)));
    if (m < 1) m = 1;
  }
  if (m > 16) throw std::invalid_argument("set too large for desk scale");

  GFField field(m);
  const uint32_t q = field.order();
  DeltaBiasedSet out;
  out.n = n;
  out.delta_bound = double(n - 1) / double(uint64_t(1) << m);
  out.provenance = "AGHP(" + std::to_string(m) + ")";
  out.strings.reserve(size_t(q) * size_t(q));

  for (uint32_t x = 0; x < q; ++x) {
    // powers x^0 .. x^{n-1}
    std::vector<uint32_t> xp(static_cast<size_t>(n), 0);
    xp[0] = 1;
    for (int i = 1; i < n; ++i) xp[size_t(i)] = field.mul(xp[size_t(i - 1)], x);
    for (uint32_t y = 0; y < q; ++y) {
      uint32_t r = 0;
      for (int i = 0; i < n; ++i) {
        const int bit = std::popcount(xp[size_t(i)] & y) & 1;
        r |= uint32_t(bit) << (n - 1 - i);  // bit i leftmost-first
      }
      out.strings.push_back(r);
    }
  }
  return out;
}

inline DeltaBiasedSet explicit_set(int n, std::vector<uint32_t> strings, double bound) {
  DeltaBiasedSet out;
  out.n = n;
  out.strings = std::move(strings);
  out.delta_bound = bound;
  out.provenance = "explicit";
  return out;
}

// All strings of length n: bias exactly 0 (the full Pauli pad key set).
inline DeltaBiasedSet full_set(int n) {
  if (n < 1 || n > 16) throw std::invalid_argument("n out of range");
  std::vector<uint32_t> strings(size_t(1) << n);
  for (uint32_t s = 0; s < (uint32_t(1) << n); ++s) strings[s] = s;
  return explicit_set(n, std::move(strings), 0.0);
}

// hex import/export, one string per line, for cross-checking sets between
// implementations.
inline std::string set_to_hex_lines(const DeltaBiasedSet& set) {
  std::ostringstream os;
  const int width = (set.n + 3) / 4;
  for (uint32_t s : set.strings)
    os << std::hex << std::setw(width) << std::setfill('0') << s << "\n";
  return os.str();
}

inline DeltaBiasedSet set_from_hex_lines(int n, const std::string& text, double bound) {
  std::vector<uint32_t> strings;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    strings.push_back(uint32_t(std::stoul(line, nullptr, 16)));
    if (strings.back() >= (uint32_t(1) << n))
      throw std::invalid_argument("hex string exceeds declared width");
  }
  return explicit_set(n, std::move(strings), bound);
}

// Family h_i(k) = i * k over GF(2^width), indexed by every field element
// including zero. Strongly XOR-universal: for fixed x != y, h_i(x) + h_i(y)
// = i * (x + y) sweeps the field exactly once as i does.
class XorUniversalFamily {
 public:
  explicit XorUniversalFamily(int width) : width_(width), field_(width) {
    if (width < 1 || width > 16) throw std::invalid_argument("family width out of range");
  }

  int width() const { return width_; }
  uint32_t index_count() const { return field_.order(); }
  const GFField& field() const { return field_; }

  uint32_t eval(uint32_t index, uint32_t key) const { return field_.mul(index, key); }

 private:
  int width_;
  GFField field_;
};

inline uint32_t xu_eval(const XorUniversalFamily& fam, uint32_t i, uint32_t k) {
  return fam.eval(i, k);
}

// Exhaustive check of the strongly-XOR-universal property: every difference
// value is hit exactly once. Meant for width <= 8.
inline bool xu_exhaustive_uniformity_check(const XorUniversalFamily& fam) {
  const uint32_t q = fam.index_count();
  for (uint32_t x = 0; x < q; ++x)
    for (uint32_t y = 0; y < q; ++y) {
      if (x == y) continue;
      std::vector<int> hits(q, 0);
      for (uint32_t i = 0; i < q; ++i) hits[fam.eval(i, x) ^ fam.eval(i, y)] += 1;
      for (uint32_t a = 0; a < q; ++a)
        if (hits[a] != 1) return false;
    }
  return true;
}

}  // namespace entroq

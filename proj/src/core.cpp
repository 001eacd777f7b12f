#include "sierpoly/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace sierpoly {

PolygonSpec make_spec(int r) {
  if (r < 3) throw InvalidSideCount(r);
  if (r % 4 == 0) throw MultipleOfFour(r);
  int f = 1;
  while (4 * f <= r) ++f;
  return PolygonSpec{r, f, 2 * f};
}

// ---------------------------------------------------------------------------
// Address
// ---------------------------------------------------------------------------

void validate_address(const PolygonSpec& spec, const Address& a) {
  if (a.empty()) throw Error("empty address");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.at(i) >= spec.r)
      throw Error("address letter " + std::to_string(int(a.at(i))) +
                  " out of range for r=" + std::to_string(spec.r));
}

std::string Address::str(const PolygonSpec& spec) const {
  std::string out;
  if (spec.r <= 10) {
    for (char c : letters_) out.push_back(static_cast<char>('0' + c));
  } else {
    out.push_back('[');
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i) out.push_back(',');
      out += std::to_string(int(letters_[i]));
    }
    out.push_back(']');
  }
  return out;
}

Address Address::parse(const std::string& text, const PolygonSpec& spec) {
  Address a;
  if (spec.r <= 10) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c < '0' || c > '9') throw ParseError("expected digit", i);
      a.push_back(static_cast<Letter>(c - '0'));
    }
  } else {
    if (text.empty() || text.front() != '[' || text.back() != ']')
      throw ParseError("expected bracketed letter list", 0);
    std::size_t i = 1;
    while (i < text.size() - 1) {
      std::size_t j = i;
      while (j < text.size() - 1 && text[j] != ',') ++j;
      try {
        a.push_back(static_cast<Letter>(std::stoi(text.substr(i, j - i))));
      } catch (const std::exception&) {
        throw ParseError("expected integer letter", i);
      }
      i = j + 1;
    }
  }
  validate_address(spec, a);
  return a;
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

namespace {
inline int mod(int x, int r) { return ((x % r) + r) % r; }
}  // namespace

std::optional<Address> gluing_partner(const PolygonSpec& spec, const Address& a) {
  const int r = spec.r;
  const Letter c = a.first();
  std::size_t run = 1;
  while (run < a.size() && a.at(run) == c) ++run;
  if (run == a.size()) return std::nullopt;  // constant word: a corner, never glued
  const Letter b = a.at(run);
  const int off = mod(int(c) - int(b), r);
  Letter run_letter, next_letter;
  if (off == spec.f % r) {
    run_letter = static_cast<Letter>(mod(int(b) + 1 + spec.ftilde, r));
    next_letter = static_cast<Letter>(mod(int(b) + 1, r));
  } else if (off == spec.ftilde % r) {
    run_letter = static_cast<Letter>(mod(int(b) - 1 + spec.f, r));
    next_letter = static_cast<Letter>(mod(int(b) - 1, r));
  } else {
    return std::nullopt;
  }
  std::string out(a.raw());
  for (std::size_t i = 0; i < run; ++i) out[i] = static_cast<char>(run_letter);
  out[run] = static_cast<char>(next_letter);
  return Address(std::move(out));
}

VertexId canonical(const PolygonSpec& spec, const Address& a) {
  auto p = gluing_partner(spec, a);
  if (!p) return VertexId{a, 1};
  return VertexId{std::min(a, *p), 2};
}

std::vector<Address> class_members(const PolygonSpec& spec, const Address& a) {
  auto p = gluing_partner(spec, a);
  if (!p) return {a};
  std::vector<Address> out{a, *p};
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Dihedral group
// ---------------------------------------------------------------------------

Letter apply_dihedral(const PolygonSpec& spec, const DihedralElement& g, Letter x) {
  int v = g.reflect ? g.shift - int(x) : g.shift + int(x);
  return static_cast<Letter>(mod(v, spec.r));
}

Address apply_dihedral(const PolygonSpec& spec, const DihedralElement& g, const Address& a) {
  Address out = a;
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, apply_dihedral(spec, g, a.at(i)));
  return out;
}

DihedralElement dihedral_identity() { return DihedralElement{0, false}; }

DihedralElement dihedral_compose(const PolygonSpec& spec, const DihedralElement& g1,
                                 const DihedralElement& g2) {
  // (g2 after g1)(x): rotation/reflection composition in D_r
  DihedralElement out;
  out.reflect = g1.reflect != g2.reflect;
  int s = g2.reflect ? g2.shift - g1.shift : g2.shift + g1.shift;
  out.shift = mod(s, spec.r);
  return out;
}

DihedralElement dihedral_inverse(const PolygonSpec& spec, const DihedralElement& g) {
  if (g.reflect) return g;  // reflections are involutions
  return DihedralElement{mod(-g.shift, spec.r), false};
}

std::vector<DihedralElement> dihedral_elements(const PolygonSpec& spec) {
  std::vector<DihedralElement> out;
  out.reserve(2 * spec.r);
  for (int s = 0; s < spec.r; ++s) out.push_back({s, false});
  for (int s = 0; s < spec.r; ++s) out.push_back({s, true});
  return out;
}

// ---------------------------------------------------------------------------
// BasepointSeq
// ---------------------------------------------------------------------------

BasepointSeq::BasepointSeq(Address preperiod, Address period)
    : pre_(std::move(preperiod)), per_(std::move(period)) {
  if (per_.empty()) throw Error("sequence period must be nonempty");
  normalize();
}

BasepointSeq BasepointSeq::eventually_constant(const Address& w) {
  if (w.empty()) throw Error("empty word for eventually constant sequence");
  return BasepointSeq(w.prefix(w.size() - 1), Address({int(w.last())}));
}

void BasepointSeq::normalize() {
  // primitive period: smallest divisor-length d with per = q^(n/d)
  const std::size_t n = per_.size();
  for (std::size_t d = 1; d <= n / 2; ++d) {
    if (n % d) continue;
    bool rep = true;
    for (std::size_t i = d; i < n && rep; ++i) rep = per_.at(i) == per_.at(i - d);
    if (rep) {
      per_ = per_.prefix(d);
      break;
    }
  }
  // minimal preperiod: absorb trailing letters that match the period tail
  while (!pre_.empty() && pre_.last() == per_.last()) {
    pre_.pop_back();
    std::string rot(per_.raw());
    std::rotate(rot.rbegin(), rot.rbegin() + 1, rot.rend());
    per_ = Address(std::move(rot));
  }
}

Letter BasepointSeq::letter(std::size_t i) const {
  if (i < pre_.size()) return pre_.at(i);
  return per_.at((i - pre_.size()) % per_.size());
}

Address BasepointSeq::prefix(std::size_t k) const {
  Address out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(letter(i));
  return out;
}

bool BasepointSeq::eventually_constant_letter(Letter* out) const {
  if (per_.size() != 1) return false;
  if (out) *out = per_.at(0);
  return true;
}

BasepointSeq BasepointSeq::drop(std::size_t n) const {
  if (n < pre_.size()) return BasepointSeq(pre_.suffix_from(n), per_);
  std::size_t phase = (n - pre_.size()) % per_.size();
  std::string rot(per_.raw());
  std::rotate(rot.begin(), rot.begin() + phase, rot.end());
  return BasepointSeq(Address(), Address(std::move(rot)));
}

BasepointSeq BasepointSeq::with_prefix_replaced(const Address& word) const {
  BasepointSeq tail = drop(word.size());
  Address pre = word;
  for (std::size_t i = 0; i < tail.pre_.size(); ++i) pre.push_back(tail.pre_.at(i));
  return BasepointSeq(pre, tail.per_);
}

bool BasepointSeq::operator<(const BasepointSeq& o) const {
  std::size_t horizon =
      pre_.size() + o.pre_.size() + std::lcm(per_.size(), o.per_.size());
  for (std::size_t i = 0; i < horizon; ++i) {
    if (letter(i) != o.letter(i)) return letter(i) < o.letter(i);
  }
  return false;  // equal
}

std::string BasepointSeq::str(const PolygonSpec& spec) const {
  std::string pre = pre_.empty() ? std::string() : pre_.str(spec);
  return pre + "(" + per_.str(spec) + ")*";
}

BasepointSeq BasepointSeq::parse(const std::string& text, const PolygonSpec& spec) {
  if (text.empty()) throw ParseError("empty sequence", 0);
  const std::size_t open = text.find('(');
  if (open != std::string::npos) {
    const std::size_t close = text.find(')', open);
    if (close == std::string::npos) throw ParseError("missing ')'", text.size());
    if (close + 1 >= text.size() || text[close + 1] != '*')
      throw ParseError("expected '*' after ')'", close + 1);
    if (close + 2 != text.size()) throw ParseError("trailing characters", close + 2);
    Address pre = open == 0 ? Address()
                            : Address::parse(text.substr(0, open), spec);
    if (close == open + 1) throw ParseError("empty period", open + 1);
    Address per = Address::parse(text.substr(open + 1, close - open - 1), spec);
    if (!pre.empty()) validate_address(spec, pre);
    return BasepointSeq(pre, per);
  }
  if (text.back() == '*') {
    // "W*" is (W)^inf
    Address per = Address::parse(text.substr(0, text.size() - 1), spec);
    return BasepointSeq(Address(), per);
  }
  // bare word: w . (last letter)^inf
  Address w = Address::parse(text, spec);
  return eventually_constant(w);
}

void validate_sequence(const PolygonSpec& spec, const BasepointSeq& xi) {
  for (std::size_t i = 0; i < xi.period().size(); ++i)
    if (xi.period().at(i) >= spec.r) throw Error("sequence letter out of range");
  for (std::size_t i = 0; i < xi.preperiod().size(); ++i)
    if (xi.preperiod().at(i) >= spec.r) throw Error("sequence letter out of range");
}

std::optional<std::size_t> cofinal(const BasepointSeq& xi, const BasepointSeq& eta) {
  const std::size_t start = std::max(xi.preperiod().size(), eta.preperiod().size());
  const std::size_t L = std::lcm(xi.period().size(), eta.period().size());
  for (std::size_t i = start; i < start + L; ++i)
    if (xi.letter(i) != eta.letter(i)) return std::nullopt;
  // scan back for the least agreement index
  std::size_t n = start;
  while (n > 0 && xi.letter(n - 1) == eta.letter(n - 1)) --n;
  return n + 1;  // 1-based
}

BasepointSeq apply_dihedral(const PolygonSpec& spec, const DihedralElement& g,
                            const BasepointSeq& xi) {
  return BasepointSeq(apply_dihedral(spec, g, xi.preperiod()),
                      apply_dihedral(spec, g, xi.period()));
}

std::optional<BasepointSeq> gluing_partner(const PolygonSpec& spec, const BasepointSeq& xi) {
  const Letter c = xi.letter(0);
  Letter cl;
  if (xi.eventually_constant_letter(&cl) && cl == c && xi.preperiod().empty())
    return std::nullopt;  // constant sequence: infinite run
  std::size_t run = 1;
  while (xi.letter(run) == c) ++run;
  // a run never extends past preperiod + one full period
  const Letter b = xi.letter(run);
  const int off = mod(int(c) - int(b), spec.r);
  Letter run_letter, next_letter;
  if (off == spec.f % spec.r) {
    run_letter = static_cast<Letter>(mod(int(b) + 1 + spec.ftilde, spec.r));
    next_letter = static_cast<Letter>(mod(int(b) + 1, spec.r));
  } else if (off == spec.ftilde % spec.r) {
    run_letter = static_cast<Letter>(mod(int(b) - 1 + spec.f, spec.r));
    next_letter = static_cast<Letter>(mod(int(b) - 1, spec.r));
  } else {
    return std::nullopt;
  }
  Address word;
  for (std::size_t i = 0; i < run; ++i) word.push_back(run_letter);
  word.push_back(next_letter);
  return xi.with_prefix_replaced(word);
}

}  // namespace sierpoly

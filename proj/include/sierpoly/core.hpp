#ifndef SIERPOLY_CORE_HPP
#define SIERPOLY_CORE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sierpoly {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidSideCount : public Error {
public:
  explicit InvalidSideCount(int r)
      : Error("invalid side count r=" + std::to_string(r) + ": need r >= 3") {}
};

class MultipleOfFour : public Error {
public:
  explicit MultipleOfFour(int r)
      : Error("r must not be a multiple of 4 (got r=" + std::to_string(r) + ")") {}
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

// ---------------------------------------------------------------------------
// PolygonSpec
// ---------------------------------------------------------------------------

/// Polygon side count r with its gluing offsets f = min{i : 4i > r} and
/// ftilde = 2f. Valid for r >= 3, r not a multiple of 4.
struct PolygonSpec {
  int r = 0;
  int f = 0;
  int ftilde = 0;

  bool operator==(const PolygonSpec&) const = default;
};

PolygonSpec make_spec(int r);

// ---------------------------------------------------------------------------
// Address
// ---------------------------------------------------------------------------

using Letter = std::uint8_t;

/// A finite word over {0..r-1}. letters()[0] is the finest cycle position;
/// the last letter is the coarsest copy index (a vertex v of the i-th copy
/// is written v followed by i).
class Address {
public:
  Address() = default;
  explicit Address(std::string letters) : letters_(std::move(letters)) {}
  Address(std::initializer_list<int> ls) {
    letters_.reserve(ls.size());
    for (int x : ls) letters_.push_back(static_cast<char>(x));
  }

  static Address constant(Letter c, std::size_t k) {
    return Address(std::string(k, static_cast<char>(c)));
  }

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter at(std::size_t i) const { return static_cast<Letter>(letters_[i]); }
  Letter first() const { return at(0); }
  Letter last() const { return at(letters_.size() - 1); }

  void set(std::size_t i, Letter v) { letters_[i] = static_cast<char>(v); }
  void push_back(Letter v) { letters_.push_back(static_cast<char>(v)); }
  void pop_back() { letters_.pop_back(); }

  /// First k letters.
  Address prefix(std::size_t k) const { return Address(letters_.substr(0, k)); }
  /// Letters from index i (0-based) to the end.
  Address suffix_from(std::size_t i) const { return Address(letters_.substr(i)); }
  Address appended(Letter v) const {
    Address a = *this;
    a.push_back(v);
    return a;
  }
  /// Drop the last (coarsest) letter.
  Address parent_copy() const { return prefix(letters_.size() - 1); }

  const std::string& raw() const { return letters_; }

  auto operator<=>(const Address&) const = default;

  /// Digits for r <= 10, bracketed comma list otherwise.
  std::string str(const PolygonSpec& spec) const;
  static Address parse(const std::string& text, const PolygonSpec& spec);

private:
  std::string letters_;  // one letter per byte
};

struct AddressHash {
  std::size_t operator()(const Address& a) const {
    return std::hash<std::string>{}(a.raw());
  }
};

/// Throws if any letter is out of range or the word is empty.
void validate_address(const PolygonSpec& spec, const Address& a);

// ---------------------------------------------------------------------------
// Gluing arithmetic
// ---------------------------------------------------------------------------

/// The unique other member of a's identification class, if any. Looks at the
/// maximal initial constant run c^(l-1) and the next letter b: offsets
/// (c-b) = f and (c-b) = 2f mod r mark the two gluing forms of the level-l
/// rule; the suffix is carried unchanged. Involution on its domain.
std::optional<Address> gluing_partner(const PolygonSpec& spec, const Address& a);

/// Canonical representative of a gluing class plus its size (1 or 2).
struct VertexId {
  Address canonical;
  int class_size = 1;

  bool operator==(const VertexId& o) const { return canonical == o.canonical; }
  auto operator<=>(const VertexId& o) const { return canonical <=> o.canonical; }
};

struct VertexIdHash {
  std::size_t operator()(const VertexId& v) const {
    return AddressHash{}(v.canonical);
  }
};

/// Lexicographic minimum of {a, partner(a)}.
VertexId canonical(const PolygonSpec& spec, const Address& a);

/// Both member addresses of a's class, sorted (1 or 2 entries).
std::vector<Address> class_members(const PolygonSpec& spec, const Address& a);

// ---------------------------------------------------------------------------
// Dihedral group
// ---------------------------------------------------------------------------

/// x -> shift + x (rotation) or shift - x (reflection), mod r.
struct DihedralElement {
  int shift = 0;
  bool reflect = false;

  bool operator==(const DihedralElement&) const = default;
};

Letter apply_dihedral(const PolygonSpec& spec, const DihedralElement& g, Letter x);
Address apply_dihedral(const PolygonSpec& spec, const DihedralElement& g, const Address& a);

DihedralElement dihedral_identity();
/// first `this` then `g2`: result(x) = g2(g1(x)).
DihedralElement dihedral_compose(const PolygonSpec& spec, const DihedralElement& g1,
                                 const DihedralElement& g2);
DihedralElement dihedral_inverse(const PolygonSpec& spec, const DihedralElement& g);
/// All 2r elements: rotations first, then reflections, by shift.
std::vector<DihedralElement> dihedral_elements(const PolygonSpec& spec);

// ---------------------------------------------------------------------------
// BasepointSeq: eventually periodic infinite sequences
// ---------------------------------------------------------------------------

/// An infinite sequence xi = preperiod . period^inf, kept in normal form:
/// the period is primitive and the preperiod is minimal. Letters are
/// 1-indexed in the notation x_1 x_2 ... ; accessors here are 0-based.
class BasepointSeq {
public:
  BasepointSeq() = default;
  BasepointSeq(Address preperiod, Address period);

  /// w followed by the constant repetition of its last letter.
  static BasepointSeq eventually_constant(const Address& w);
  static BasepointSeq constant(Letter j) {
    return BasepointSeq(Address(), Address({static_cast<int>(j)}));
  }

  const Address& preperiod() const { return pre_; }
  const Address& period() const { return per_; }

  Letter letter(std::size_t i) const;           // 0-based
  Address prefix(std::size_t k) const;          // xi[k], k >= 1
  bool eventually_constant_letter(Letter* out = nullptr) const;

  /// Sequence with the first `n` letters removed.
  BasepointSeq drop(std::size_t n) const;
  /// word . (this sequence after position word.size()).
  BasepointSeq with_prefix_replaced(const Address& word) const;

  bool operator==(const BasepointSeq& o) const {
    return pre_ == o.pre_ && per_ == o.per_;
  }
  bool operator<(const BasepointSeq& o) const;   // lexicographic on letters

  std::string str(const PolygonSpec& spec) const;   // canonical "w(p)*"
  static BasepointSeq parse(const std::string& text, const PolygonSpec& spec);

private:
  void normalize();
  Address pre_;
  Address per_;   // nonempty
};

void validate_sequence(const PolygonSpec& spec, const BasepointSeq& xi);

/// Agreement index: least 1-based N with xi_i = eta_i for all i >= N,
/// or nullopt if the sequences are not cofinal.
std::optional<std::size_t> cofinal(const BasepointSeq& xi, const BasepointSeq& eta);

BasepointSeq apply_dihedral(const PolygonSpec& spec, const DihedralElement& g,
                            const BasepointSeq& xi);

/// Gluing partner of an infinite sequence (same initial-run rule with an
/// infinite suffix), if any.
std::optional<BasepointSeq> gluing_partner(const PolygonSpec& spec, const BasepointSeq& xi);

}  // namespace sierpoly

#endif

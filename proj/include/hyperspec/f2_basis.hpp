#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperspec/half_int.hpp"
#include "hyperspec/wigner.hpp"

namespace hyperspec {

/// LS term of a two-electron f^2 configuration, optionally with J attached.
struct TermLabel {
  HalfInt S;
  int L = 0;
  std::optional<HalfInt> J;
  std::string label;

  bool operator==(const TermLabel& o) const {
    return S == o.S && L == o.L && J == o.J;
  }
};

namespace f2 {

inline constexpr int kOrbitalL = 3;      // single-electron l for f electrons
inline constexpr int kBasisSize = 91;    // sum of (2J+1) over all f^2 multiplets

/// Pauli-allowed terms of f^2 (L+S even): 1S, 3P, 1D, 3F, 1G, 3H, 1I.
inline const std::vector<TermLabel>& terms() {
  static const std::vector<TermLabel> t = [] {
    const char* names[] = {"1S", "3P", "1D", "3F", "1G", "3H", "1I"};
    std::vector<TermLabel> v;
    for (int L = 0; L <= 6; ++L) {
      TermLabel term;
      term.S = HalfInt::from_int(L % 2 == 0 ? 0 : 1);
      term.L = L;
      term.label = names[L];
      v.push_back(term);
    }
    return v;
  }();
  return t;
}

inline int term_index(const TermLabel& t) {
  if (t.L < 0 || t.L > 6) throw std::invalid_argument("invalid f2 term: L=" + std::to_string(t.L));
  const TermLabel& ref = terms()[t.L];
  if (t.S != ref.S)
    throw std::invalid_argument("term " + std::to_string(t.L) + " with 2S=" +
                                std::to_string(t.S.twice) + " is not Pauli-allowed in f2");
  if (t.J) {
    const HalfInt L = HalfInt::from_int(t.L);
    if (!triangle_ok(t.S, L, *t.J))
      throw std::invalid_argument("J outside |L-S|..L+S for term " + t.label);
  }
  return t.L;
}

/// One |SLJM> basis state, referring to a term by index.
struct SljmState {
  int term = 0;   // index into terms()
  HalfInt J;
  HalfInt M;
};

/// Multiplet (term + J) with its basis offset and block size.
struct Multiplet {
  TermLabel term;
  int offset = 0;  // first index in the canonical basis
  int size = 0;    // 2J+1
  std::string name() const {
    return term.label + (term.J ? term.J->str() : "");
  }
};

/// Canonical ordered |SLJM> basis of f^2: 91 states sorted by (L, S, J, M_J).
inline const std::vector<SljmState>& basis() {
  static const std::vector<SljmState> b = [] {
    std::vector<SljmState> v;
    for (const auto& t : terms()) {
      const HalfInt L = HalfInt::from_int(t.L);
      for (int tJ = std::abs(L.twice - t.S.twice); tJ <= L.twice + t.S.twice; tJ += 2) {
        for (int tM = -tJ; tM <= tJ; tM += 2) {
          v.push_back({term_index(t), HalfInt(tJ), HalfInt(tM)});
        }
      }
    }
    return v;
  }();
  return b;
}

/// Multiplet table in basis order (13 entries for f^2).
inline const std::vector<Multiplet>& multiplets() {
  static const std::vector<Multiplet> m = [] {
    std::vector<Multiplet> v;
    const auto& b = basis();
    for (int i = 0; i < static_cast<int>(b.size());) {
      Multiplet mp;
      mp.term = terms()[b[i].term];
      mp.term.J = b[i].J;
      mp.offset = i;
      mp.size = b[i].J.twice + 1;
      v.push_back(mp);
      i += mp.size;
    }
    return v;
  }();
  return m;
}

inline int multiplet_index(const std::string& name) {
  const auto& mps = multiplets();
  for (int i = 0; i < static_cast<int>(mps.size()); ++i)
    if (mps[i].name() == name) return i;
  throw std::invalid_argument("unknown f2 multiplet: " + name);
}

/// Clebsch-Gordan decomposition of a basis state into |S M_S>|L M_L>.
struct ProductComponent {
  HalfInt MS;
  HalfInt ML;
  double coeff;
};

inline std::vector<ProductComponent> product_decomposition(const SljmState& s) {
  const TermLabel& t = terms()[s.term];
  const HalfInt S = t.S;
  const HalfInt L = HalfInt::from_int(t.L);
  std::vector<ProductComponent> out;
  for (int tMS = -S.twice; tMS <= S.twice; tMS += 2) {
    const int tML = s.M.twice - tMS;
    if (std::abs(tML) > L.twice) continue;
    const double c = clebsch_gordan(S, HalfInt(tMS), L, HalfInt(tML), s.J, s.M);
    if (c != 0.0) out.push_back({HalfInt(tMS), HalfInt(tML), c});
  }
  return out;
}

}  // namespace f2
}  // namespace hyperspec

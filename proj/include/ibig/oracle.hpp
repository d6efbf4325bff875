#pragma once
// Exact Dempster combination over an explicit power set. Only for small
// frames: it is the reference the hierarchical approximation is checked
// against, not part of the consultation path.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ibig/common.hpp"

namespace ibig {

inline constexpr int default_oracle_leaf_limit = 12;

// Focal sets as bit masks over the frame's leaves; the empty set never
// carries mass.
struct OracleAssignment {
  int frame_size = 0;
  std::map<std::uint32_t, double> masses;

  std::uint32_t theta() const { return frame_size >= 32 ? ~0u : (1u << frame_size) - 1u; }

  double operator[](std::uint32_t focus) const {
    auto it = masses.find(focus);
    return it == masses.end() ? 0.0 : it->second;
  }

  static OracleAssignment vacuous(int frame_size) {
    OracleAssignment a{frame_size, {}};
    a.masses[a.theta()] = 1.0;
    return a;
  }

  // Mass on one focus, the rest on theta.
  static OracleAssignment simple_support(int frame_size, std::uint32_t focus, double mass) {
    OracleAssignment a{frame_size, {}};
    if (focus == a.theta()) {
      a.masses[focus] = 1.0;
      return a;
    }
    a.masses[focus] = mass;
    a.masses[a.theta()] = 1.0 - mass;
    return a;
  }
};

inline OracleAssignment dempster(const OracleAssignment& a, const OracleAssignment& b) {
  if (a.frame_size != b.frame_size) throw DomainError("assignments over different frames");
  OracleAssignment out{a.frame_size, {}};
  for (const auto& [fa, ma] : a.masses) {
    for (const auto& [fb, mb] : b.masses) {
      const std::uint32_t meet = fa & fb;
      if (meet != 0) out.masses[meet] += ma * mb;
    }
  }
  // 1 - conflict, summed from the surviving products: subtracting a conflict
  // near 1 would cancel most significant digits.
  double remaining = 0.0;
  for (const auto& [focus, m] : out.masses) remaining += m;
  if (!(remaining > underflow_guard)) throw ConflictError("total conflict: K undefined");
  for (auto& [focus, m] : out.masses) m /= remaining;
  return out;
}

// Left fold of Dempster's rule. An empty list has no frame and is rejected.
inline OracleAssignment oracle_combine(std::span<const OracleAssignment> assignments,
                                       int leaf_limit = default_oracle_leaf_limit) {
  if (assignments.empty()) throw DomainError("nothing to combine");
  const int size = assignments.front().frame_size;
  if (size > leaf_limit || size > 31)
    throw SizeError("frame of " + std::to_string(size) + " leaves exceeds oracle limit " + std::to_string(leaf_limit));
  OracleAssignment acc = assignments.front();
  for (std::size_t i = 1; i < assignments.size(); ++i) acc = dempster(acc, assignments[i]);
  return acc;
}

inline OracleAssignment oracle_combine(const std::vector<OracleAssignment>& assignments,
                                       int leaf_limit = default_oracle_leaf_limit) {
  return oracle_combine(std::span<const OracleAssignment>(assignments), leaf_limit);
}

inline double oracle_belief(const OracleAssignment& a, std::uint32_t set) {
  double b = 0.0;
  for (const auto& [focus, m] : a.masses)
    if ((focus & ~set) == 0) b += m;
  return b;
}

}  // namespace ibig

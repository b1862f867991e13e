#pragma once
// Multiset and lexicographic extensions over index-addressed sequences.

#include <cstddef>
#include <optional>
#include <vector>

namespace hoterm {

/// Witness for M >_mul N: N = (M \ Y) + Z with Y nonempty and each z in Z below some y in Y.
struct MulWitness {
  std::vector<int> removed;  // indices of Y in M (0-based)
  std::vector<int> assign;   // per element of N: i >= 0 equal to M[i] (i not in Y); -(i+1) dominated by M[i] in Y
};

/// `eq(i, j)` must be an equivalence between M[i] and N[j]; `dom(i, j)` decides M[i] > N[j].
/// Tries every nonempty Y; the equality matching on M \ Y is greedy, which is exact for an equivalence.
template <class Eq, class Dom>
std::optional<MulWitness> mul_extension(std::size_t n, std::size_t m, Eq&& eq, Dom&& dom) {
  if (n == 0 || n >= 8 * sizeof(unsigned long)) return std::nullopt;
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    MulWitness w;
    w.assign.assign(m, -1);
    std::vector<bool> used(m, false);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (mask >> i & 1) {
        w.removed.push_back(static_cast<int>(i));
        continue;
      }
      ok = false;
      for (std::size_t j = 0; j < m; ++j)
        if (!used[j] && eq(i, j)) {
          used[j] = true;
          w.assign[j] = static_cast<int>(i);
          ok = true;
          break;
        }
    }
    if (!ok) continue;
    for (std::size_t j = 0; j < m && ok; ++j) {
      if (used[j]) continue;
      ok = false;
      for (int y : w.removed)
        if (dom(static_cast<std::size_t>(y), j)) {
          w.assign[j] = -(y + 1);
          ok = true;
          break;
        }
    }
    if (ok) return w;
  }
  return std::nullopt;
}

/// Every i <= min(n, m) (0-based: i < min) with M[j] = N[j] for j < i and dom(i, i).
template <class Eq, class Dom>
std::vector<int> lex_candidates(std::size_t n, std::size_t m, Eq&& eq, Dom&& dom) {
  std::vector<int> out;
  std::size_t k = n < m ? n : m;
  for (std::size_t i = 0; i < k; ++i) {
    if (dom(i, i)) out.push_back(static_cast<int>(i));
    if (!eq(i, i)) break;
  }
  return out;
}

}  // namespace hoterm

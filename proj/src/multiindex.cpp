#include "hodgelab/multiindex.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>

#include "hodgelab/errors.hpp"

namespace hodgelab {

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<int> elements(Mask m) {
  std::vector<int> out;
  for (int i = 0; m >> i; ++i)
    if (m & (1u << i)) out.push_back(i);
  return out;
}

const std::vector<Mask>& subsets(int n, int k) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<Mask>> cache;
  if (n < 0 || n > 16) fail(ErrorCode::Unsupported, "multi-index dimension out of range");
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<Mask> out;
  if (k >= 0 && k <= n) {
    for (Mask m = 0; m < (1u << n); ++m)
      if (popcount(m) == k) out.push_back(m);
    std::sort(out.begin(), out.end(), [](Mask a, Mask b) { return elements(a) < elements(b); });
  }
  return cache.emplace(key, std::move(out)).first->second;
}

int subset_index(int n, Mask m) {
  const auto& s = subsets(n, popcount(m));
  auto it = std::find(s.begin(), s.end(), m);
  if (it == s.end()) fail(ErrorCode::ShapeMismatch, "multi-index outside range");
  return static_cast<int>(it - s.begin());
}

int merge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (int x : elements(a)) inversions += popcount(b & ((1u << x) - 1u));
  return (inversions & 1) ? -1 : 1;
}

}  // namespace hodgelab

#pragma once

#include <bit>
#include <vector>

namespace hodgelab {

// Increasing multi-indices over {0..n-1} are stored as bitmasks.
using Mask = unsigned;

inline int popcount(Mask m) { return std::popcount(m); }

int binom(int n, int k);

// Subsets of size k in lexicographic order of their sorted element lists.
const std::vector<Mask>& subsets(int n, int k);

// Position of m inside subsets(n, popcount(m)).
int subset_index(int n, Mask m);

// Sign of moving index a to the front of the sorted set m (a not in m).
inline int front_sign(Mask m, int a) { return (popcount(m & ((1u << a) - 1u)) & 1) ? -1 : 1; }

// dz^A ^ dz^B = merge_sign(A, B) dz^(A|B) for disjoint A, B.
int merge_sign(Mask a, Mask b);

std::vector<int> elements(Mask m);

}  // namespace hodgelab

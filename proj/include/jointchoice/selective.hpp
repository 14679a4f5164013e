#pragma once

// Selective families of dimension subsets. A family is selective when every
// dimension q can be isolated as the intersection of some members; taking all
// members containing q is enough, since adding members to an isolating
// subfamily only shrinks the intersection and q stays inside. The minimum
// size is governed by the central binomial coefficient, and a smallest family
// is assembled from half-size index subsets.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"

namespace jointchoice {

// Exact integer binomial coefficient. Multiply-then-divide stays exact at
// every step because each prefix is itself a binomial coefficient.
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i);
    r /= static_cast<std::uint64_t>(i);
  }
  return r;
}

// Least n with C(n, floor(n/2)) >= n_dims.
inline int sel_size(int n_dims) {
  if (n_dims < 1)
    throw Error(Errc::EmptySubset, "need at least one dimension");
  int n = 1;
  while (binomial(n, n / 2) < static_cast<std::uint64_t>(n_dims)) ++n;
  return n;
}

// A verified selective family: members plus, per dimension, the index set of
// members containing it (whose intersection is exactly that singleton).
struct SelectiveFamily {
  int n_dims = 0;
  std::vector<DimSubset> members;
  std::vector<std::vector<int>> index;
};

struct SelectivityWitness {
  int q = 0;                   // dimension that cannot be isolated
  std::vector<int> index_set;  // members containing q (may be empty)
  DimSubset intersection;      // their intersection; none() when no member
};

using SelectivityCheck = std::variant<SelectiveFamily, SelectivityWitness>;

inline SelectivityCheck check_selective(std::vector<DimSubset> members, int n_dims) {
  if (n_dims < 1 || n_dims > kMaxDimensions)
    throw Error(Errc::TooManyDimensions,
                "dimension count must be between 1 and " +
                    std::to_string(kMaxDimensions));
  const DimSubset full = DimSubset::full(n_dims);
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (members[i].empty())
      throw Error(Errc::EmptyMember,
                  "family member " + std::to_string(i) + " is empty");
    if (!members[i].subset_of(full))
      throw Error(Errc::UnknownDimension,
                  "family member " + std::to_string(i) +
                      " mentions missing dimensions");
    for (std::size_t j = 0; j < i; ++j)
      if (members[i] == members[j])
        throw Error(Errc::DuplicateMember,
                    "family member " + std::to_string(i) +
                        " duplicates member " + std::to_string(j));
  }
  SelectiveFamily F;
  F.n_dims = n_dims;
  F.members = std::move(members);
  for (int q = 0; q < n_dims; ++q) {
    std::vector<int> index;
    DimSubset meet = full;
    for (std::size_t i = 0; i < F.members.size(); ++i)
      if (F.members[i].contains(q)) {
        index.push_back(static_cast<int>(i));
        meet = meet & F.members[i];
      }
    if (index.empty())
      return SelectivityWitness{q, {}, DimSubset::none()};
    if (meet != DimSubset::single(q))
      return SelectivityWitness{q, std::move(index), meet};
    F.index.push_back(std::move(index));
  }
  return F;
}

inline bool is_selective(const std::vector<DimSubset>& members, int n_dims) {
  return std::holds_alternative<SelectiveFamily>(check_selective(members, n_dims));
}

inline const std::vector<int>& index_sets(const SelectiveFamily& F, int q) {
  if (q < 0 || q >= F.n_dims)
    throw Error(Errc::UnknownDimension,
                "dimension " + std::to_string(q) + " is out of range");
  return F.index[static_cast<std::size_t>(q)];
}

// Builds a selective family of the minimum size. Dimension q is mapped to
// the q-th half-size subset of {0,...,n-1} in colexicographic order, and
// member p collects the dimensions whose subset contains p.
inline SelectiveFamily minimal_selective_family(int n_dims) {
  if (n_dims < 1 || n_dims > kMaxDimensions)
    throw Error(Errc::TooManyDimensions,
                "dimension count must be between 1 and " +
                    std::to_string(kMaxDimensions));
  std::vector<DimSubset> members;
  if (n_dims == 1) {
    members.push_back(DimSubset::single(0));
  } else {
    const int n = sel_size(n_dims);
    const int k = n / 2;
    std::vector<int> sub(k);
    for (int i = 0; i < k; ++i) sub[i] = i;
    std::vector<std::uint32_t> f;
    for (int q = 0; q < n_dims; ++q) {
      std::uint32_t mask = 0;
      for (int v : sub) mask |= std::uint32_t{1} << v;
      f.push_back(mask);
      int i = 0;
      while (i + 1 < k && sub[i] + 1 == sub[i + 1]) ++i;
      ++sub[i];
      for (int j = 0; j < i; ++j) sub[j] = j;
    }
    for (int p = 0; p < n; ++p) {
      DimSubset S;
      for (int q = 0; q < n_dims; ++q)
        if ((f[q] >> p) & 1u) S.mask |= std::uint32_t{1} << q;
      if (!S.empty()) members.push_back(S);
    }
  }
  auto checked = check_selective(std::move(members), n_dims);
  if (!std::holds_alternative<SelectiveFamily>(checked))
    throw Error(Errc::InternalSelectivityFailure,
                "constructed family failed verification for " +
                    std::to_string(n_dims) + " dimensions");
  return std::get<SelectiveFamily>(std::move(checked));
}

}  // namespace jointchoice

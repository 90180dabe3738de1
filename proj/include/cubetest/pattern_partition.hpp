#pragma once

// Random equi-partitions of the pattern space {0,1}^q without materializing it.
//
// Only patterns that some coordinate actually exhibits (at most n of them)
// matter to the tester, so a part is stored as its exact slot count plus the
// occupied patterns it holds. Splitting a part places each occupied pattern at
// a uniformly random distinct slot, which has the same distribution as
// shuffling all 2^q patterns and cutting the shuffled list.

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cubetest/influence.hpp"

namespace cubetest {

// Column pattern (x^(1)_i, ..., x^(q)_i) as a '0'/'1' string of length q.
using Pattern = std::string;
using SlotCount = boost::multiprecision::cpp_int;

struct PatternPart {
  SlotCount slots = 0;
  std::vector<Pattern> occupied;  // sorted
};

SlotCount pattern_space_size(std::size_t q);

// Uniform integer in [0, bound); bound must be positive.
SlotCount uniform_below(const SlotCount& bound, Rng& rng);

// Cuts `part` into `count` parts of sizes ceil(s/count) or floor(s/count),
// the first (s mod count) parts taking the larger size.
std::vector<PatternPart> equi_split(const PatternPart& part, std::size_t count, Rng& rng);

// Halving rounds needed to bring a part of `size` slots down to one slot.
std::size_t rounds_to_singletons(const SlotCount& size);

}  // namespace cubetest

#include "cubetest/pattern_partition.hpp"

#include <algorithm>

#include "cubetest/errors.hpp"

namespace cubetest {

SlotCount pattern_space_size(std::size_t q) {
  SlotCount size = 1;
  size <<= static_cast<unsigned>(q);
  return size;
}

SlotCount uniform_below(const SlotCount& bound, Rng& rng) {
  if (bound <= 0) throw InputError("uniform_below needs a positive bound");
  if (bound == 1) return 0;
  const SlotCount top = bound - 1;
  const std::size_t bits = boost::multiprecision::msb(top) + 1;
  while (true) {
    SlotCount draw = 0;
    for (std::size_t filled = 0; filled < bits; filled += 64) {
      draw <<= 64;
      draw |= SlotCount(rng());
    }
    const std::size_t excess = (bits + 63) / 64 * 64 - bits;
    draw >>= static_cast<unsigned>(excess);
    if (draw < bound) return draw;
  }
}

std::vector<PatternPart> equi_split(const PatternPart& part, std::size_t count, Rng& rng) {
  if (count == 0) throw InputError("equi_split needs at least one part");
  std::vector<PatternPart> out(count);
  const SlotCount base = part.slots / count;
  const auto extra = static_cast<std::size_t>(part.slots % count);
  std::vector<SlotCount> free(count);
  for (std::size_t j = 0; j < count; ++j) {
    out[j].slots = base + (j < extra ? 1 : 0);
    free[j] = out[j].slots;
  }
  if (part.occupied.size() > part.slots) throw InputError("more occupied patterns than slots");
  SlotCount remaining = part.slots;
  for (const auto& pattern : part.occupied) {
    SlotCount u = uniform_below(remaining, rng);
    std::size_t j = 0;
    while (u >= free[j]) {
      u -= free[j];
      ++j;
    }
    out[j].occupied.push_back(pattern);
    free[j] -= 1;
    remaining -= 1;
  }
  for (auto& p : out) std::sort(p.occupied.begin(), p.occupied.end());
  return out;
}

std::size_t rounds_to_singletons(const SlotCount& size) {
  if (size <= 1) return 0;
  return boost::multiprecision::msb(SlotCount(size - 1)) + 1;
}

}  // namespace cubetest

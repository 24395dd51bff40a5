#include "classifier/pairs.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "core/rng.hpp"

namespace tubeloc::classifier {

std::uint64_t positive_pair_pool_size(const std::vector<int>& zone_sizes) {
  std::uint64_t total = 0;
  for (int m : zone_sizes) {
    if (m < 0)
      throw std::invalid_argument("positive_pair_pool_size: negative zone size");
    total += std::uint64_t(m) * (m - 1) / 2;
  }
  return total;
}

std::vector<PairSample> generate_pairs(const std::vector<std::shared_ptr<const Raster>>& images,
                                       const std::vector<int>& zone_of_image, int count,
                                       std::uint64_t seed) {
  if (images.size() != zone_of_image.size())
    throw std::invalid_argument("generate_pairs: images/zones size mismatch");
  if (count <= 0 || count % 2 != 0)
    throw std::invalid_argument("generate_pairs: count must be positive and even");

  std::map<int, std::vector<int>> members;
  for (std::size_t i = 0; i < zone_of_image.size(); ++i)
    members[zone_of_image[i]].push_back(static_cast<int>(i));
  for (const auto& [zone, m] : members)
    if (m.size() < 2)
      throw std::invalid_argument("generate_pairs: zone " + std::to_string(zone) +
                                  " has fewer than 2 images");

  std::vector<int> zone_sizes;
  std::vector<const std::vector<int>*> zone_members;
  for (const auto& [zone, m] : members) {
    zone_sizes.push_back(static_cast<int>(m.size()));
    zone_members.push_back(&m);
  }
  const std::uint64_t pos_pool = positive_pair_pool_size(zone_sizes);
  const std::uint64_t half = static_cast<std::uint64_t>(count) / 2;
  if (half > pos_pool)
    throw std::invalid_argument("generate_pairs: count exceeds the positive-pair pool");

  auto rng = make_rng(mix_seed(seed, 0x9A125));
  std::set<std::pair<int, int>> used;
  std::vector<PairSample> out;
  out.reserve(count);

  auto make_pair_sample = [&](int a, int b, int label) {
    if (a > b) std::swap(a, b);
    if (!used.insert({a, b}).second) return false;
    PairSample p;
    p.image_a = images[a];
    p.image_b = images[b];
    p.index_a = a;
    p.index_b = b;
    p.label = label;
    out.push_back(std::move(p));
    return true;
  };

  // Positive pairs: zone weighted by its pair count, then a uniform member pair.
  std::vector<std::uint64_t> cumulative;
  std::uint64_t acc = 0;
  for (int m : zone_sizes) {
    acc += std::uint64_t(m) * (m - 1) / 2;
    cumulative.push_back(acc);
  }
  std::uniform_int_distribution<std::uint64_t> pick_pair(0, pos_pool - 1);
  std::uint64_t emitted = 0;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 1000 * half + 1000;
  while (emitted < half) {
    if (++attempts > max_attempts)
      throw std::runtime_error("generate_pairs: positive-pair sampling stalled");
    const std::uint64_t r = pick_pair(rng);
    const std::size_t z =
        std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin();
    const auto& m = *zone_members[z];
    std::uniform_int_distribution<int> pick_member(0, static_cast<int>(m.size()) - 1);
    int a = pick_member(rng), b = pick_member(rng);
    while (b == a) b = pick_member(rng);
    if (make_pair_sample(m[a], m[b], 0)) ++emitted;
  }

  // Negative pairs: uniform cross-zone image pairs.
  const bool single_zone = members.size() < 2;
  std::uniform_int_distribution<int> pick_image(0, static_cast<int>(images.size()) - 1);
  emitted = 0;
  attempts = 0;
  while (!single_zone && emitted < half) {
    if (++attempts > max_attempts)
      throw std::runtime_error("generate_pairs: negative-pair sampling stalled");
    const int a = pick_image(rng), b = pick_image(rng);
    if (a == b || zone_of_image[a] == zone_of_image[b]) continue;
    if (make_pair_sample(a, b, 1)) ++emitted;
  }
  if (single_zone)
    throw std::invalid_argument("generate_pairs: need >= 2 zones for negative pairs");
  return out;
}

}  // namespace tubeloc::classifier

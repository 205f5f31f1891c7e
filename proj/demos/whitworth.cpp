// Jeffrey conditioning on Whitworth's three horses.
#include <cstdio>

#include "pkin/pk.hpp"

int main() {
  const pkin::DiscreteDistribution prior{{"A", 0.5}, {"B", 0.25}, {"C", 0.25}};
  const pkin::Partition partition{{"A", "A"}, {"B", "not A"}, {"C", "not A"}};

  for (double p_a : {0.5, 2.0 / 3.0, 0.9, 1.0}) {
    const pkin::DiscreteDistribution evidence{{"A", p_a}, {"not A", 1.0 - p_a}};
    const auto post = pkin::discrete_pk_update(prior, partition, evidence);
    std::printf("P(A) -> %.4f :", p_a);
    for (const auto& [horse, p] : post) std::printf("  %s=%.4f", horse.c_str(), p);
    std::printf("\n");
  }
}

#pragma once

#include <initializer_list>
#include <random>

#include "oracle/dense_poly.hpp"
#include "sle/jet.hpp"

namespace sle::test {

struct T {
  int i, j, k;
  long num;
  long den = 1;
};

inline Coeff frac(long num, long den = 1) {
  Coeff r(num, den);
  r.canonicalize();
  return r;
}

inline Jet poly(int degree, std::initializer_list<T> terms) {
  Jet j(degree);
  for (const auto& t : terms) j.add_to({t.i, t.j, t.k}, frac(t.num, t.den));
  return j;
}

inline oracle::DensePoly dense(const Jet& j, int max_degree) {
  oracle::DensePoly p(max_degree);
  for (const auto& [e, c] : j.terms()) p.at(e.x, e.y, e.z) = c;
  return p;
}

/// Random jet with small rational coefficients on roughly half the monomials.
inline Jet random_jet(std::mt19937& rng, int degree) {
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  std::bernoulli_distribution keep(0.5);
  Jet j(degree);
  for (int i = 0; i <= degree; ++i)
    for (int k = 0; i + k <= degree; ++k)
      for (int l = 0; i + k + l <= degree; ++l)
        if (keep(rng)) j.add_to({i, k, l}, frac(num(rng), den(rng)));
  return j;
}

inline Jet v0_seed(int degree = 4) {
  return poly(degree, {{0, 4, 0, -1, 3}, {0, 2, 2, 5}, {4, 0, 0, -1}, {2, 0, 2, 7}, {0, 0, 4, -1, 3},
                       {0, 2, 1, 2}, {2, 0, 1, -2}, {0, 2, 0, 1, 2}, {2, 0, 0, 1, 2}});
}

}  // namespace sle::test

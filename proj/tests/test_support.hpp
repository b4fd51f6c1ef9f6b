#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "banditlab/environment.hpp"

namespace banditlab::testing {

// Mean of N(mu, sigma^2) conditioned on [lo, hi] by composite Simpson
// integration of x phi and phi; independent of the library's closed form.
inline double simpson_truncated_mean(double mu, double sigma, double lo, double hi, int panels = 20000) {
  auto pdf = [&](double x) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z);
  };
  const double h = (hi - lo) / panels;
  long double num = 0.0L;
  long double den = 0.0L;
  for (int k = 0; k <= panels; ++k) {
    const double x = lo + h * k;
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    num += w * x * pdf(x);
    den += w * pdf(x);
  }
  return static_cast<double>(num / den);
}

// Direct scan of {(s, j) : s + d_s^j = t} for every t.
inline std::vector<std::set<std::pair<Round, int>>> brute_force_deliveries(const DelaySchedule& delays) {
  std::vector<std::set<std::pair<Round, int>>> out(static_cast<std::size_t>(delays.horizon()) + 1);
  for (Round t = 1; t <= delays.horizon(); ++t) {
    for (Round s = 1; s <= delays.horizon(); ++s) {
      for (int j = 0; j < delays.num_users(); ++j) {
        if (s + delays.delay(s, j) == t) out[static_cast<std::size_t>(t)].insert({s, j});
      }
    }
  }
  return out;
}

inline DelaySchedule delays_from_function(int num_users, Round horizon, int d_max, auto&& fn) {
  std::vector<int> table;
  for (Round t = 1; t <= horizon; ++t) {
    for (int j = 0; j < num_users; ++j) table.push_back(fn(t, j));
  }
  return DelaySchedule(num_users, horizon, d_max, std::move(table));
}

}  // namespace banditlab::testing

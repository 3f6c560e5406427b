#include "capsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

namespace capsim {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Rational pow_rational(const Rational& base, int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Probability of exactly i singly-occupied sub-channels when v vehicles pick
// uniformly among c sub-channels. Entries for i >= 1 recurse into strictly
// smaller (c - i, v - i) tables; i = 0 closes the distribution to mass one.
class SingletonTables {
 public:
  const std::vector<Rational>& table(int c, int v) {
    auto key = std::make_pair(c, v);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    std::vector<Rational> p(static_cast<std::size_t>(c) + 1, Rational(0));
    const int imax = std::min(c, v);
    Rational tail = 0;
    for (int i = imax; i >= 1; --i) {
      Rational exclusion = 1;
      if (c - i >= 1 && v - i >= 1) {
        const auto& sub = table(c - i, v - i);
        Rational s = 0;
        for (int k = 1; k <= c - i; ++k) s += sub[static_cast<std::size_t>(k)];
        exclusion -= s;
      }
      Rational val = Rational(binomial(c, i)) * Rational(binomial(v, i));
      val *= pow_rational(Rational(c - i, c), v - i);
      val *= pow_rational(Rational(1, c), i);
      BigInt fact = 1;
      for (int f = 2; f <= i; ++f) fact *= f;
      val *= Rational(fact);
      val *= exclusion;
      p[static_cast<std::size_t>(i)] = val;
      tail += val;
    }
    p[0] = Rational(1) - tail;
    return cache_.emplace(key, std::move(p)).first->second;
  }

 private:
  std::map<std::pair<int, int>, std::vector<Rational>> cache_;
};

// Probability of exactly i empty sub-channels; the vehicle count does not
// shrink in the recursion, only the sub-channel count does.
class EmptyTables {
 public:
  const std::vector<Rational>& table(int c, int v) {
    auto key = std::make_pair(c, v);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;

    std::vector<Rational> p(static_cast<std::size_t>(c) + 1, Rational(0));
    Rational tail = 0;
    for (int i = c; i >= 1; --i) {
      Rational occupied_part = pow_rational(Rational(c - i, c), v);
      if (occupied_part == 0) continue;
      Rational exclusion = 1;
      if (c - i >= 1) {
        const auto& sub = table(c - i, v);
        Rational s = 0;
        for (int k = 1; k <= c - i; ++k) s += sub[static_cast<std::size_t>(k)];
        exclusion -= s;
      }
      p[static_cast<std::size_t>(i)] = Rational(binomial(c, i)) * occupied_part * exclusion;
      tail += p[static_cast<std::size_t>(i)];
    }
    p[0] = Rational(1) - tail;
    return cache_.emplace(key, std::move(p)).first->second;
  }

 private:
  std::map<std::pair<int, int>, std::vector<Rational>> cache_;
};

Rational expectation(const std::vector<Rational>& p) {
  Rational b = 0;
  for (std::size_t i = 1; i < p.size(); ++i) b += Rational(static_cast<int>(i)) * p[i];
  return b;
}

} // namespace

double aoi_static(const StaticAnalysisInput& in) {
  if (in.n_subch < 1 || in.rri_ms < 1)
    throw std::invalid_argument("aoi_static: invalid grid parameters");
  const double c = in.c();
  if (c <= 1) throw std::invalid_argument("aoi_static: c must exceed 1");
  const double n = in.n_subch;
  const double a = in.rri_ms;
  const double t = in.t_fix_ms;
  return (n - 1) * (t + a) / (2 * (c - 1)) + (c - n) * (a - 1) / (2 * (c - 1));
}

double aoi_ideal(int rri_ms) {
  if (rri_ms < 1) throw std::invalid_argument("aoi_ideal: rri must be >= 1");
  return (rri_ms - 1) / 2.0;
}

OptimalRri optimal_rri(double t_upd_ms, int n_subch, int t_ost_ms) {
  if (t_ost_ms < 1 || t_upd_ms < t_ost_ms)
    throw std::invalid_argument("optimal_rri: require t_upd >= t_ost >= 1");
  const double n = n_subch;
  OptimalRri out;
  out.theoretical_ms = (1.0 + std::sqrt(n * (n - 1) * (t_upd_ms + 1))) / n;

  double best = std::numeric_limits<double>::infinity();
  for (int a = t_ost_ms; a <= static_cast<int>(t_upd_ms); a += t_ost_ms) {
    StaticAnalysisInput in{n_subch, a, t_upd_ms};
    if (in.c() <= 1) continue;
    const double val = aoi_static(in);
    if (val < best) {
      best = val;
      out.practical_ms = a;
    }
  }
  if (out.practical_ms == 0)
    throw std::invalid_argument("optimal_rri: no feasible RRI (degenerate grid)");
  return out;
}

OccupancyDistribution occupancy_distribution(int c, int v) {
  if (c < 1 || v < 1) throw std::invalid_argument("occupancy_distribution: need c >= 1, v >= 1");
  if (c > 400 || v > 400)
    throw std::invalid_argument("occupancy_distribution: arguments beyond exact-recursion range");

  SingletonTables singles;
  EmptyTables empties;
  const auto& p1 = singles.table(c, v);
  const auto& p0 = empties.table(c, v);

  OccupancyDistribution out;
  out.c = c;
  out.v = v;
  out.p1.resize(p1.size());
  out.p0.resize(p0.size());
  for (std::size_t i = 0; i < p1.size(); ++i) out.p1[i] = static_cast<double>(p1[i]);
  for (std::size_t i = 0; i < p0.size(); ++i) out.p0[i] = static_cast<double>(p0[i]);
  out.b1 = static_cast<double>(expectation(p1));
  out.b0 = static_cast<double>(expectation(p0));
  return out;
}

double reselect_count(const std::vector<std::int64_t>& hist) {
  std::int64_t channels = 0;
  std::int64_t packets = 0;
  for (std::size_t j = 2; j < hist.size(); ++j) {
    channels += hist[j];
    packets += static_cast<std::int64_t>(j) * hist[j];
  }
  if (channels == 0) return 0.0;
  if (channels < 3) return 0.5 * static_cast<double>(packets);
  return 3.0 * static_cast<double>(packets) / (2.0 * static_cast<double>(channels));
}

ConvergenceMargin convergence_margin(int c, int v) {
  if (v < 2 || v >= c)
    throw std::invalid_argument("convergence_margin: require 2 <= v < c");

  SingletonTables singles;
  ConvergenceMargin out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.all_positive = true;

  const int nrs_max = (v + 1) / 2;
  for (int n0 = 2; n0 <= c - 1; ++n0) {
    for (int nrs = 1; nrs <= nrs_max; ++nrs) {
      const Rational b1 = expectation(singles.table(n0, nrs));
      const double val = static_cast<double>(b1);
      if (val <= 0) out.all_positive = false;
      if (val < out.min_value) {
        out.min_value = val;
        out.argmin_free_subch = n0;
        out.argmin_reselectors = nrs;
      }
    }
  }
  return out;
}

double collision_count_per_rri(const DynamicAnalysisInput& in) {
  if (in.x < 0 || in.y < 0) throw std::invalid_argument("collision_count_per_rri: negative rate");
  if (in.x == 0) return 0.0;
  const double c = in.base.c();
  const double a = in.base.rri_ms;
  const double arrivals_per_rri = in.x * in.v0 * a / 1000.0;
  const int ar = static_cast<int>(std::ceil(arrivals_per_rri));
  if (ar == 0) return 0.0;
  const double le = in.y * in.v0 * a / 1000.0;

  const auto occ = occupancy_distribution(in.base.c(), ar);
  const double stay = (in.v0 - le) / c;
  const double inner = ar - occ.b1 + occ.b1 * stay + stay * (c - occ.b0);
  return inner * arrivals_per_rri / ar;
}

double aoi_dynamic(const DynamicAnalysisInput& in) {
  if (in.v0 < 2) throw std::invalid_argument("aoi_dynamic: v0 must be >= 2");
  if (in.v0 > in.base.c()) throw std::invalid_argument("aoi_dynamic: v0 must be <= c");
  const double base = aoi_static(in.base);
  if (in.x == 0 && in.y == 0) return base;
  const double c = in.base.c();
  const double a = in.base.rri_ms;
  const double ncol = collision_count_per_rri(in);
  return base + (c - in.base.n_subch) * a / ((in.v0 - 1) * (c - 1)) * ncol;
}

SetExpectations set_expectations(int n_subch, int rri_ms, int v) {
  if (v < 2) throw std::invalid_argument("set_expectations: v must be >= 2");
  const double c = static_cast<double>(n_subch) * rri_ms;
  if (v > c) throw std::invalid_argument("set_expectations: v must be <= c");
  if (rri_ms < 2)
    throw std::invalid_argument("set_expectations: rri must be >= 2");
  const double n = n_subch;
  const double a = rri_ms;
  SetExpectations e;
  e.same_subframe = (n - 1) * (v - 1) / (c - 1);
  e.other_subframe = (c - n) * (v - 1) / (c - 1);
  e.transmitting_now = v / a;
  e.idle_now = (a - 1) * v / a;
  e.other_subframe_tx = (c - n) * (v - 1) / ((c - 1) * a);
  e.other_subframe_idle = (c - n) * (v - 1) * (a - 2) / ((c - 1) * (a - 1));
  return e;
}

} // namespace capsim

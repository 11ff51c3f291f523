#include "mlrfe/random_instance.hpp"

#include <algorithm>
#include <random>

namespace mlrfe {

ProblemIR random_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };

  const int inputs = pick(1, options.max_inputs);
  const int binaries = pick(0, options.max_binaries);
  const int interps = inputs >= 2 && uni(0, 1) < 0.5 ? 2 : 1;
  const bool gated = binaries > 0 && uni(0, 1) < 0.5;

  ProblemBuilder b;
  std::vector<int> x;
  std::vector<std::vector<double>> axes;
  for (int j = 0; j < inputs; ++j) {
    const int k = pick(2, options.max_breakpoints);
    std::vector<double> axis{uni(0.0, 1.0)};
    for (int p = 1; p < k; ++p) axis.push_back(axis.back() + uni(0.3, 1.5));
    axes.push_back(axis);
  }
  std::vector<int> ys;
  // the first interpolant takes the leading inputs, the second the rest
  const int split = interps == 2 ? pick(1, inputs - 1) : inputs;
  for (int j = 0; j < inputs; ++j) {
    const bool switched = gated && j < split;
    const double lo = switched ? std::min(0.0, axes[j].front()) : axes[j].front();
    x.push_back(b.add_continuous("x" + std::to_string(j), lo, axes[j].back()));
  }
  for (int l = 0; l < binaries; ++l) ys.push_back(b.add_binary("y" + std::to_string(l)));

  std::vector<int> outs;
  std::vector<LookupTable> tables;
  for (int i = 0; i < interps; ++i) {
    const int first = i == 0 ? 0 : split;
    const int last = i == 0 ? split : inputs;
    std::vector<std::vector<double>> gaxes(axes.begin() + first, axes.begin() + last);
    Grid g = make_grid(gaxes);
    std::vector<double> vals(g.num_points());
    for (auto& v : vals) v = uni(-5.0, 5.0);
    auto t = make_table(g, vals);
    const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    const bool switched = gated && i == 0;
    const double flo = switched ? std::min(0.0, *mn) : *mn;
    const double fhi = switched ? std::max(0.0, *mx) : *mx;
    const int f = b.add_continuous("f" + std::to_string(i), flo, fhi);
    std::vector<int> in(x.begin() + first, x.begin() + last);
    std::optional<int> act;
    if (switched) act = ys[0];
    b.add_interpolant("g" + std::to_string(i), in, {{t, f}}, act);
    outs.push_back(f);
    tables.push_back(std::move(t));
  }

  // Reference point that every generated row admits.
  const int nvars = static_cast<int>(b.description().variables.size());
  std::vector<double> ref(nvars, 0.0);
  for (int y : ys) ref[y] = pick(0, 1);
  const bool on = !gated || ref[ys[0]] > 0.5;
  for (int j = 0; j < inputs; ++j) {
    const bool off = gated && j < split && !on;
    ref[x[j]] = off ? 0.0 : uni(axes[j].front(), axes[j].back());
  }
  for (int i = 0; i < interps; ++i) {
    const int first = i == 0 ? 0 : split;
    const int last = i == 0 ? split : inputs;
    std::vector<double> p;
    for (int j = first; j < last; ++j) p.push_back(ref[x[j]]);
    const bool off = gated && i == 0 && !on;
    ref[outs[i]] = off ? 0.0 : interpolate(tables[i], p);
  }

  std::vector<int> pool = x;
  pool.insert(pool.end(), outs.begin(), outs.end());
  pool.insert(pool.end(), ys.begin(), ys.end());
  const int rows = pick(0, 2);
  for (int r = 0; r < rows; ++r) {
    std::vector<LinTerm> terms;
    double act = 0.0;
    for (int v : pool) {
      if (uni(0, 1) < 0.35) continue;
      const double c = uni(-1.0, 1.0);
      terms.push_back({c, v});
      act += c * ref[v];
    }
    if (terms.empty()) continue;
    const double slack = uni(0.0, 1.0);
    if (uni(0, 1) < 0.5) {
      b.add_constraint("r" + std::to_string(r), terms, RowSense::Le, act + slack);
    } else {
      b.add_constraint("r" + std::to_string(r), terms, RowSense::Ge, act - slack);
    }
  }
  if (uni(0, 1) < options.infeasible_rate) {
    const auto& v = tables[interps - 1].values;
    const double mn = *std::min_element(v.begin(), v.end());
    b.add_constraint("unreachable", {{1.0, outs[interps - 1]}}, RowSense::Le, mn - 1.0);
    // keep the row unsatisfiable even when the interpolant is switched off
    if (gated && interps == 1) {
      b.add_constraint("unreachable_on", {{1.0, ys[0]}}, RowSense::Ge, 1.0);
    }
  }

  std::vector<LinTerm> obj;
  for (int f : outs) obj.push_back({uni(0.2, 1.5) * (uni(0, 1) < 0.8 ? 1.0 : -1.0), f});
  for (int v : x) {
    if (uni(0, 1) < 0.5) obj.push_back({uni(-1.0, 1.0), v});
  }
  for (int y : ys) obj.push_back({uni(-1.0, 1.0), y});
  b.minimize(obj);
  return b.build();
}

}  // namespace mlrfe

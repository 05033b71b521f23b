#include "prederr/separability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "prederr/simplex.hpp"

namespace prederr {

namespace {

std::size_t common_dim(std::span<const Point> a, std::span<const Point> b) {
  std::optional<std::size_t> d;
  for (auto set : {a, b})
    for (const auto &p : set) {
      if (!d)
        d = p.size();
      else if (*d != p.size())
        throw DimensionMismatch("points of dimension " + std::to_string(*d) +
                                " and " + std::to_string(p.size()));
    }
  return d.value_or(0);
}

// Affine map of the joint bounding box onto [0,1]^d: x' = (x - lo) / span.
struct UnitBox {
  std::vector<double> lo, span;

  UnitBox(std::span<const Point> a, std::span<const Point> b, std::size_t d)
      : lo(d, std::numeric_limits<double>::infinity()), span(d, 1.0) {
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (auto set : {a, b})
      for (const auto &p : set)
        for (std::size_t j = 0; j < d; ++j) {
          lo[j] = std::min(lo[j], p[j]);
          hi[j] = std::max(hi[j], p[j]);
        }
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(lo[j]))
        lo[j] = 0.0;
      double s = hi[j] - lo[j];
      span[j] = s > 0 ? s : 1.0;
    }
  }

  Point map(const Point &p) const {
    Point q(p.size());
    for (std::size_t j = 0; j < p.size(); ++j)
      q[j] = (p[j] - lo[j]) / span[j];
    return q;
  }

  // Hyperplane in box coordinates -> same values in original coordinates.
  LinearHypothesis unmap(const LinearHypothesis &h) const {
    LinearHypothesis out{std::vector<double>(h.w.size()), h.b};
    for (std::size_t j = 0; j < h.w.size(); ++j) {
      out.w[j] = h.w[j] / span[j];
      out.b -= out.w[j] * lo[j];
    }
    return out;
  }
};

double affine(const LinearHypothesis &h, const Point &p) {
  double z = h.b;
  for (std::size_t j = 0; j < p.size(); ++j)
    z += h.w[j] * p[j];
  return z;
}

// Rescale (w, b) so the closest positive sits at +1 and the closest negative
// at -1. Returns nullopt if the hyperplane does not strictly separate.
std::optional<LinearHypothesis> normalize_margin(LinearHypothesis h,
                                                 std::span<const Point> pos,
                                                 std::span<const Point> neg) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto &p : pos)
    lo = std::min(lo, affine(h, p) - h.b);
  for (const auto &q : neg)
    hi = std::max(hi, affine(h, q) - h.b);
  if (!(lo > hi))
    return std::nullopt;
  double s = 2.0 / (lo - hi);
  for (auto &w : h.w)
    w *= s;
  h.b = -s * (lo + hi) / 2.0;
  return h;
}

Point to_point(std::span<const double> v) { return Point(v.begin(), v.end()); }

} // namespace

SeparabilityVerdict strictly_separable(std::span<const Point> positives,
                                       std::span<const Point> negatives) {
  const std::size_t d = common_dim(positives, negatives);
  if (positives.empty() || negatives.empty()) {
    double b = positives.empty() ? -2.0 : 2.0;
    return {true, LinearHypothesis{std::vector<double>(d, 0.0), b}};
  }

  UnitBox box(positives, negatives, d);
  std::vector<Point> pos, neg;
  for (const auto &p : positives)
    pos.push_back(box.map(p));
  for (const auto &q : negatives)
    neg.push_back(box.map(q));

  // Variables: w+ (d), w- (d), b+, b-, surplus per point.
  // Positive p:  p.(w+ - w-) + (b+ - b-) - s =  1
  // Negative q: -q.(w+ - w-) - (b+ - b-) - s =  1
  const std::size_t m = pos.size() + neg.size();
  const std::size_t nvar = 2 * d + 2 + m;
  DenseMatrix a(m, nvar);
  std::vector<double> rhs(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const bool is_pos = i < pos.size();
    const Point &p = is_pos ? pos[i] : neg[i - pos.size()];
    const double sgn = is_pos ? 1.0 : -1.0;
    for (std::size_t j = 0; j < d; ++j) {
      a(i, j) = sgn * p[j];
      a(i, d + j) = -sgn * p[j];
    }
    a(i, 2 * d) = sgn;
    a(i, 2 * d + 1) = -sgn;
    a(i, 2 * d + 2 + i) = -1.0;
  }

  auto lp = solve_phase_one(a, rhs, kSeparabilityTolerance);
  if (!lp.feasible)
    return {false, std::nullopt};

  LinearHypothesis h{std::vector<double>(d), lp.x[2 * d] - lp.x[2 * d + 1]};
  for (std::size_t j = 0; j < d; ++j)
    h.w[j] = lp.x[j] - lp.x[d + j];
  auto polished = normalize_margin(h, pos, neg);
  if (!polished)
    return {false, std::nullopt};
  auto witness = normalize_margin(box.unmap(*polished), positives, negatives);
  if (!witness)
    witness = box.unmap(*polished);
  return {true, std::move(witness)};
}

SeparabilityVerdict strictly_separable(const FeaturizedTrainingSet &rows) {
  std::vector<Point> pos, neg;
  for (std::size_t i = 0; i < rows.size(); ++i)
    (rows.label(i) == Label::one ? pos : neg).push_back(to_point(rows.row(i)));
  if (pos.empty() && neg.empty())
    return {true, LinearHypothesis{std::vector<double>(rows.dim(), 0.0), -2.0}};
  return strictly_separable(pos, neg);
}

bool rows_separable(const FeaturizedTrainingSet &rows,
                    std::span<const std::size_t> subset) {
  std::vector<Point> pos, neg;
  for (auto i : subset)
    (rows.label(i) == Label::one ? pos : neg).push_back(to_point(rows.row(i)));
  if (pos.empty() || neg.empty())
    return true;
  return strictly_separable(pos, neg).separable;
}

namespace {

// Least-squares solve of a small dense system by modified Gram-Schmidt.
// Returns nullopt when the columns are (numerically) dependent.
std::optional<std::vector<double>> solve_independent(const DenseMatrix &a,
                                                     const std::vector<double> &rhs) {
  const std::size_t m = a.rows, k = a.cols;
  std::vector<std::vector<double>> q(k, std::vector<double>(m));
  DenseMatrix r(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    double original = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      q[j][i] = a(i, j);
      original += a(i, j) * a(i, j);
    }
    for (std::size_t p = 0; p < j; ++p) {
      double dot = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        dot += q[p][i] * q[j][i];
      r(p, j) = dot;
      for (std::size_t i = 0; i < m; ++i)
        q[j][i] -= dot * q[p][i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      norm += q[j][i] * q[j][i];
    norm = std::sqrt(norm);
    if (norm <= 1e-10 * (std::sqrt(original) + 1.0))
      return std::nullopt;
    r(j, j) = norm;
    for (std::size_t i = 0; i < m; ++i)
      q[j][i] /= norm;
  }
  std::vector<double> qtb(k, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < m; ++i)
      qtb[j] += q[j][i] * rhs[i];
  std::vector<double> c(k, 0.0);
  for (std::size_t j = k; j-- > 0;) {
    double s = qtb[j];
    for (std::size_t p = j + 1; p < k; ++p)
      s -= r(j, p) * c[p];
    c[j] = s / r(j, j);
  }
  return c;
}

} // namespace

bool hulls_intersect(std::span<const Point> positives,
                     std::span<const Point> negatives) {
  const std::size_t d = common_dim(positives, negatives);
  const std::size_t n = positives.size() + negatives.size();
  if (n > kHullOracleMaxPoints || d > kHullOracleMaxDim)
    throw OracleCapExceeded("hull oracle is capped at " +
                            std::to_string(kHullOracleMaxPoints) +
                            " points in dimension <= " +
                            std::to_string(kHullOracleMaxDim));
  if (positives.empty() || negatives.empty())
    return false;

  UnitBox box(positives, negatives, d);
  // Column per point: (p, 1, 0) for positives, (-q, 0, 1) for negatives.
  // A common point of the hulls is a nonnegative solution of A c = (0, 1, 1).
  const std::size_t m = d + 2;
  std::vector<std::vector<double>> cols;
  for (const auto &p : positives) {
    auto x = box.map(p);
    x.push_back(1.0);
    x.push_back(0.0);
    cols.push_back(std::move(x));
  }
  for (const auto &q : negatives) {
    auto x = box.map(q);
    for (auto &v : x)
      v = -v;
    x.push_back(0.0);
    x.push_back(1.0);
    cols.push_back(std::move(x));
  }
  std::vector<double> rhs(m, 0.0);
  rhs[d] = 1.0;
  rhs[d + 1] = 1.0;

  const std::size_t npos = positives.size();
  for (std::size_t k = 2; k <= std::min(m, n); ++k) {
    auto hit = kernels::serial::first_combination(
        n, k, [&](std::span<const std::size_t> support) {
          bool has_pos = false, has_neg = false;
          for (auto c : support)
            (c < npos ? has_pos : has_neg) = true;
          if (!has_pos || !has_neg)
            return false;
          DenseMatrix a(m, support.size());
          for (std::size_t j = 0; j < support.size(); ++j)
            for (std::size_t i = 0; i < m; ++i)
              a(i, j) = cols[support[j]][i];
          auto c = solve_independent(a, rhs);
          if (!c)
            return false;
          for (double v : *c)
            if (v < -kSeparabilityTolerance)
              return false;
          double residual = 0.0;
          for (std::size_t i = 0; i < m; ++i) {
            double s = -rhs[i];
            for (std::size_t j = 0; j < support.size(); ++j)
              s += a(i, j) * (*c)[j];
            residual += s * s;
          }
          return std::sqrt(residual) <= kSeparabilityTolerance;
        });
    if (hit)
      return true;
  }
  return false;
}

std::optional<KirchbergerWitness>
kirchberger_witness(std::span<const LabeledPoint> points, std::size_t dim,
                    std::uint64_t budget) {
  std::vector<const LabeledPoint *> sorted;
  for (const auto &p : points) {
    if (p.x.size() != dim)
      throw DimensionMismatch("labeled point '" + p.id + "' has dimension " +
                              std::to_string(p.x.size()) + ", expected " +
                              std::to_string(dim));
    sorted.push_back(&p);
  }
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto *a, const auto *b) { return a->id < b->id; });

  FeaturizedTrainingSet rows(dim);
  for (const auto *p : sorted)
    rows.add_row(p->x, p->y, p->id);
  return kirchberger_witness(rows, budget);
}

std::optional<KirchbergerWitness>
kirchberger_witness(const FeaturizedTrainingSet &rows, std::uint64_t budget) {
  const std::size_t n = rows.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i)
    all[i] = i;
  if (rows_separable(rows, all))
    return std::nullopt;

  auto nonseparable = [&](std::span<const std::size_t> s) {
    return !rows_separable(rows, s);
  };
  auto to_ids = [&](const std::vector<std::size_t> &idx, bool minimum) {
    KirchbergerWitness w{{}, minimum};
    for (auto i : idx)
      w.ids.push_back(rows.id(i));
    return w;
  };

  try {
    if (auto found = minimum_subset(n, rows.dim() + 2, budget, nonseparable, 2))
      return to_ids(*found, true);
  } catch (const BudgetExceeded &) {
  }
  // Over budget, or the size bound was missed numerically.
  return to_ids(shrink_greedy(n, nonseparable), false);
}

} // namespace prederr

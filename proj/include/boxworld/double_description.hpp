#pragma once

// Double description method for a pointed polyhedral cone {x : A x >= 0}.
//
// The cone must be full-dimensional in the sense that A has full column
// rank (the cone is then pointed). Constraints are inserted in row order,
// starting from the simplicial cone of the first linearly independent rows.
// Adjacency is decided combinatorially: two rays are adjacent when no third
// ray is tight on every constraint both are tight on, and the common tight
// set has at least dim - 2 members.

#include <boxworld/budget.hpp>
#include <boxworld/errors.hpp>
#include <boxworld/linalg.hpp>

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <vector>

namespace boxworld {

template <typename Scalar>
struct ConeRay {
  VectorX<Scalar> direction;
  boost::dynamic_bitset<> tight;  // over all rows of A
};

namespace detail {

template <typename Scalar>
void normalize_ray(VectorX<Scalar>& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (v(k) == Scalar(0)) continue;
    const Scalar s = v(k) > Scalar(0) ? v(k) : Scalar(-v(k));
    v /= s;
    return;
  }
}

}  // namespace detail

/// Extreme rays of {x : A x >= 0}, each normalized so its first nonzero
/// coordinate has absolute value 1. Order is deterministic for a given A.
template <typename Scalar>
std::vector<ConeRay<Scalar>> extreme_rays(const MatrixX<Scalar>& a, BudgetMeter& meter) {
  const Eigen::Index m = a.rows();
  const Eigen::Index dim = a.cols();
  const Scalar zero(0);

  // Initial simplicial cone from the first independent rows.
  std::vector<Eigen::Index> basis_rows;
  linalg::IncrementalBasis<Scalar> basis(dim);
  for (Eigen::Index r = 0; r < m && !basis.full(); ++r)
    if (basis.try_add(a.row(r).transpose())) basis_rows.push_back(r);
  if (!basis.full()) throw DimensionError("constraint matrix does not have full column rank");

  MatrixX<Scalar> b(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) b.row(k) = a.row(basis_rows[k]);
  const auto binv = linalg::inverse(b);
  if (!binv) throw ConstructionBug("initial basis is singular");

  boost::dynamic_bitset<> processed(m);
  for (auto r : basis_rows) processed.set(r);

  auto tight_set = [&](const VectorX<Scalar>& v) {
    boost::dynamic_bitset<> t(m);
    for (Eigen::Index r = 0; r < m; ++r)
      if (processed.test(r) && a.row(r).dot(v) == zero) t.set(r);
    return t;
  };

  std::vector<ConeRay<Scalar>> rays;
  for (Eigen::Index k = 0; k < dim; ++k) {
    VectorX<Scalar> v = binv->col(k);
    detail::normalize_ray(v);
    rays.push_back({v, tight_set(v)});
  }

  for (Eigen::Index r = 0; r < m; ++r) {
    if (processed.test(r)) continue;
    const auto row = a.row(r);
    std::vector<Scalar> val(rays.size());
    std::vector<std::size_t> pos, neg, nul;
    for (std::size_t k = 0; k < rays.size(); ++k) {
      val[k] = row.dot(rays[k].direction);
      if (val[k] > zero) pos.push_back(k);
      else if (val[k] < zero) neg.push_back(k);
      else nul.push_back(k);
    }
    processed.set(r);

    std::vector<ConeRay<Scalar>> next;
    next.reserve(pos.size() + nul.size());
    for (auto k : pos) next.push_back(rays[k]);
    for (auto k : nul) {
      next.push_back(rays[k]);
      next.back().tight.set(r);
    }
    if (!neg.empty()) {
      for (auto p : pos) {
        for (auto n : neg) {
          meter.count_nodes();
          const auto common = rays[p].tight & rays[n].tight;
          if (static_cast<Eigen::Index>(common.count()) < dim - 2) continue;
          bool adjacent = true;
          for (std::size_t k = 0; k < rays.size() && adjacent; ++k) {
            if (k == p || k == n) continue;
            if (common.is_subset_of(rays[k].tight)) adjacent = false;
          }
          if (!adjacent) continue;
          VectorX<Scalar> v = val[p] * rays[n].direction - val[n] * rays[p].direction;
          detail::normalize_ray(v);
          auto t = common;
          t.set(r);
          next.push_back({std::move(v), std::move(t)});
          meter.check_rays(next.size());
        }
      }
    }
    rays = std::move(next);
    meter.check_rays(rays.size());
  }
  return rays;
}

}  // namespace boxworld

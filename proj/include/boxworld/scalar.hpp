#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Core>

#include <string>

namespace boxworld {

/// Exact rational scalar. Expression templates are disabled so the type
/// composes cleanly with Eigen's own expression machinery.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorQ = VectorX<Rational>;
using MatrixQ = MatrixX<Rational>;

inline bool is_integral(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

inline std::string to_string(const Rational& q) { return q.str(); }

}  // namespace boxworld

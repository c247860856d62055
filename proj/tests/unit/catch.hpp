#pragma once

#ifdef UMBILIC_CATCH_AMALGAMATED
#include <catch_amalgamated.hpp>
#else
#include <catch2/catch_approx.hpp>
#include <catch2/catch_test_macros.hpp>
#include <catch2/generators/catch_generators.hpp>
#include <catch2/matchers/catch_matchers_floating_point.hpp>
#include <catch2/matchers/catch_matchers_string.hpp>
#endif

#include <Eigen/Dense>

namespace test {

inline double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace test

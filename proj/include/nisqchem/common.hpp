#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace nisqchem {

using Real = double;
using Complex = std::complex<double>;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kHartreeToKcalPerMol = 627.509474;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs body(i) for i in [0, n). Results must be written to index-addressed
/// slots so the outcome does not depend on scheduling. The first exception
/// thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Worker count used by parallel_for (hardware concurrency, at least 1).
std::size_t worker_count();

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

}  // namespace nisqchem

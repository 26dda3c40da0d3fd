#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace interplab {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Norm { L1, L2, Linf };

inline Norm dual_norm(Norm n) {
  switch (n) {
    case Norm::L1: return Norm::Linf;
    case Norm::Linf: return Norm::L1;
    default: return Norm::L2;
  }
}

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    default: return "linf";
  }
}

Norm parse_norm(const std::string& s);

template <typename Derived>
double norm_value(Norm n, const Eigen::MatrixBase<Derived>& v) {
  switch (n) {
    case Norm::L1: return v.template lpNorm<1>();
    case Norm::L2: return v.norm();
    default: return v.template lpNorm<Eigen::Infinity>();
  }
}

// Extended real with explicit -inf/+inf tags; serialized output never carries
// floating-point infinities.
struct ExtReal {
  enum Tag { NegInf, Finite, PosInf } tag = Finite;
  double value = 0.0;

  static ExtReal neg_inf() { return {NegInf, 0.0}; }
  static ExtReal pos_inf() { return {PosInf, 0.0}; }
  static ExtReal finite(double v) { return {Finite, v}; }
  bool is_finite() const { return tag == Finite; }

  // Order of the extended real line.
  bool operator<(const ExtReal& o) const {
    if (tag != o.tag) return tag < o.tag;
    return tag == Finite && value < o.value;
  }
  bool greater_than(double t) const {
    return tag == PosInf || (tag == Finite && value > t);
  }
  bool at_least(double t) const {
    return tag == PosInf || (tag == Finite && value >= t);
  }
};

struct LabError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : LabError { using LabError::LabError; };
struct NoInterpolator : LabError { using LabError::LabError; };
struct IllConditioned : LabError { using LabError::LabError; };
struct NotConverged : LabError { using LabError::LabError; };
struct Infeasible : LabError { using LabError::LabError; };
struct UnsupportedNorm : LabError { using LabError::LabError; };
struct ZeroVector : LabError { using LabError::LabError; };
struct ZeroCovariance : LabError { using LabError::LabError; };
struct SingularCovariance : LabError { using LabError::LabError; };
struct DeltaOutOfRange : LabError { using LabError::LabError; };
struct BTooSmall : LabError { using LabError::LabError; };
struct KOutOfRange : LabError { using LabError::LabError; };
struct DegenerateTail : LabError { using LabError::LabError; };
struct NotDiagonal : LabError { using LabError::LabError; };
struct UnsupportedForE4 : LabError { using LabError::LabError; };
struct EmptySequence : LabError { using LabError::LabError; };
struct ConfigError : LabError { using LabError::LabError; };

// Runs fn(i) for i in [0, count) on up to n_threads workers. Tasks are
// independent; results must be written to per-index slots so that the
// outcome does not depend on scheduling.
void parallel_for(Index count, int n_threads, const std::function<void(Index)>& fn);

int default_thread_count();

}  // namespace interplab

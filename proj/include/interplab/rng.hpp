#pragma once

#include <cstdint>
#include <initializer_list>

#include <Eigen/Dense>

namespace interplab {

// Counter-based generator: the i-th output is splitmix64(key + i*GOLDEN),
// so streams can be split freely and replayed independently of thread
// scheduling. Gaussians come from Box-Muller on consecutive counter pairs;
// both halves of the pair are consumed, which fixes the byte-level output
// for a given (key, draw sequence).
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z);

  // Hash-chains labels onto a master seed; used to derive per-trial and
  // per-chunk substreams that agree between serial and parallel runs.
  static std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64();
  double next_unit();    // [0, 1)
  double next_unit_pos();  // (0, 1]
  double next_gauss();

  Eigen::VectorXd gauss_vector(Eigen::Index n);
  void fill_gauss(Eigen::Ref<Eigen::MatrixXd> m);

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace interplab

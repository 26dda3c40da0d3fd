#include "interplab/rng.hpp"

#include <cmath>

namespace interplab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t Rng::mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::uint64_t Rng::derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t key = mix(master + kGolden);
  for (std::uint64_t label : path) {
    key = mix(key ^ mix(label + kGolden));
  }
  return key;
}

std::uint64_t Rng::next_u64() {
  ++ctr_;
  return mix(key_ + ctr_ * kGolden);
}

double Rng::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_unit_pos() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::next_gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = next_unit_pos();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = kTwoPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Eigen::VectorXd Rng::gauss_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = next_gauss();
  return v;
}

void Rng::fill_gauss(Eigen::Ref<Eigen::MatrixXd> m) {
  // Row-major fill so each design row consumes a contiguous block of draws.
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = next_gauss();
}

}  // namespace interplab

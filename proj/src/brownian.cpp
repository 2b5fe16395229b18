#include "cbf/brownian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cbf/philox.hpp"

namespace cbf {

WZLevel WZLevel::make(int n, double horizon) {
  if (n < 1 || n > 40) throw std::invalid_argument("wz level: n must lie in [1, 40]");
  if (!(horizon > 0.0)) throw std::invalid_argument("wz level: horizon must be positive");
  return {n, std::ldexp(horizon, -n)};
}

BrownianPath::BrownianPath(double horizon, int max_level, std::uint64_t seed, Eigen::MatrixXd fine)
    : horizon_(horizon), max_level_(max_level), seed_(seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("brownian path: horizon must be positive");
  if (max_level < 1 || max_level > 30) throw std::invalid_argument("brownian path: level must lie in [1, 30]");
  if (fine.rows() < 1) throw std::invalid_argument("brownian path: k_dim must be >= 1");
  if (fine.cols() != (Eigen::Index(1) << max_level)) {
    throw std::invalid_argument("brownian path: increment count must be 2^max_level");
  }
  levels_.resize(max_level + 1);
  levels_[max_level] = std::move(fine);
  for (int l = max_level - 1; l >= 0; --l) {
    const Eigen::MatrixXd& child = levels_[l + 1];
    Eigen::MatrixXd parent(child.rows(), child.cols() / 2);
    for (Eigen::Index j = 0; j < parent.cols(); ++j) parent.col(j) = child.col(2 * j) + child.col(2 * j + 1);
    levels_[l] = std::move(parent);
  }
}

double BrownianPath::value_at(int level, int k, long j) const {
  const Eigen::MatrixXd& inc = levels_.at(level);
  if (j <= 0) return 0.0;
  j = std::min<long>(j, inc.cols());
  double s = 0.0;
  for (long i = 0; i < j; ++i) s += inc(k, i);
  return s;
}

BrownianPath sample_path(std::uint64_t seed, double horizon, int max_level, int k_dim) {
  if (k_dim < 1) throw std::invalid_argument("sample_path: k_dim must be >= 1");
  if (max_level < 1 || max_level > 30) throw std::invalid_argument("sample_path: level must lie in [1, 30]");
  if (!(horizon > 0.0)) throw std::invalid_argument("sample_path: horizon must be positive");
  const long cells = 1L << max_level;
  const double scale = std::sqrt(std::ldexp(horizon, -max_level));
  Eigen::MatrixXd fine(k_dim, cells);
  for (int k = 0; k < k_dim; ++k) {
    for (long j = 0; j < cells; ++j) fine(k, j) = scale * normal_pair(seed, std::uint64_t(j), std::uint64_t(k))[0];
  }
  return BrownianPath(horizon, max_level, seed, std::move(fine));
}

Eigen::VectorXd wz_derivative_cell(const BrownianPath& path, const WZLevel& lvl, long cell) {
  if (lvl.n > path.max_level()) throw std::invalid_argument("wz_derivative: level exceeds path resolution");
  if (lvl.n > path.k_dim()) throw std::invalid_argument("wz_derivative: level exceeds the noise dimension");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(path.k_dim());
  const long cells = 1L << lvl.n;
  if (cell <= 0 || cell > cells) return out;
  for (int k = 0; k < lvl.n; ++k) out(k) = path.increment(lvl.n, k, cell - 1) / lvl.sigma;
  return out;
}

Eigen::VectorXd wz_derivative(const BrownianPath& path, const WZLevel& lvl, double t) {
  if (t > path.horizon()) {
    if (lvl.n > path.max_level()) throw std::invalid_argument("wz_derivative: level exceeds path resolution");
    return Eigen::VectorXd::Zero(path.k_dim());
  }
  if (t < 0.0) throw std::invalid_argument("wz_derivative: time must be non-negative");
  return wz_derivative_cell(path, lvl, static_cast<long>(std::floor(t / lvl.sigma)));
}

namespace {

constexpr char kMagic[4] = {'C', 'B', 'F', 'W'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw std::runtime_error("read_path: truncated input");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_path(std::ostream& out, const BrownianPath& path) {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<double>(out, path.horizon());
  put<std::uint32_t>(out, std::uint32_t(path.max_level()));
  put<std::uint32_t>(out, std::uint32_t(path.k_dim()));
  put<std::uint64_t>(out, path.seed());
  const Eigen::MatrixXd& fine = path.level(path.max_level());
  for (Eigen::Index k = 0; k < fine.rows(); ++k) {
    for (Eigen::Index j = 0; j < fine.cols(); ++j) put<double>(out, fine(k, j));
  }
  if (!out) throw std::runtime_error("write_path: I/O failure");
}

BrownianPath read_path(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("read_path: bad magic");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw std::runtime_error("read_path: unsupported version " + std::to_string(version));
  const auto horizon = get<double>(in);
  const auto level = get<std::uint32_t>(in);
  const auto k_dim = get<std::uint32_t>(in);
  const auto seed = get<std::uint64_t>(in);
  if (level < 1 || level > 30 || k_dim < 1) throw std::runtime_error("read_path: corrupt header");
  Eigen::MatrixXd fine(k_dim, Eigen::Index(1) << level);
  for (Eigen::Index k = 0; k < fine.rows(); ++k) {
    for (Eigen::Index j = 0; j < fine.cols(); ++j) fine(k, j) = get<double>(in);
  }
  return BrownianPath(horizon, int(level), seed, std::move(fine));
}

}  // namespace cbf

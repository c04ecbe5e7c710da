#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullcollapse {

using cplx = std::complex<double>;

// Row-major small matrices.
using Mat2 = std::array<cplx, 4>;
using Mat4 = std::array<cplx, 16>;

inline constexpr double kOperatorTolerance = 1e-12;

// Dense state on a register of qubits. Basis index bit k is the value of
// qubit k; for a surface state qubit k is slot k.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(int qubits) : qubits_(qubits), amps_(std::size_t{1} << qubits, cplx{}) {
    if (qubits < 0 || qubits > 30) throw std::invalid_argument("unsupported qubit count");
  }
  StateVector(int qubits, std::vector<cplx> amps) : qubits_(qubits), amps_(std::move(amps)) {
    if (amps_.size() != (std::size_t{1} << qubits))
      throw std::invalid_argument("amplitude count " + std::to_string(amps_.size()) +
                                  " does not match 2^" + std::to_string(qubits));
  }

  static StateVector basis(int qubits, std::uint64_t index) {
    StateVector s(qubits);
    s.amps_.at(index) = 1.0;
    return s;
  }

  int qubits() const { return qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  StateVector& operator+=(const StateVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += o.amps_[i];
    return *this;
  }
  StateVector& operator*=(cplx s) {
    for (auto& a : amps_) a *= s;
    return *this;
  }

  // Appends `extra` qubits in |0> above the existing ones.
  StateVector extended(int extra) const {
    StateVector out(qubits_ + extra);
    std::copy(amps_.begin(), amps_.end(), out.amps_.begin());
    return out;
  }

  void check_same(const StateVector& o) const {
    if (o.qubits_ != qubits_) throw std::invalid_argument("state dimension mismatch");
  }

 private:
  int qubits_ = 0;
  std::vector<cplx> amps_;
};

using SurfaceState = StateVector;

inline cplx inner_product(const StateVector& a, const StateVector& b) {
  a.check_same(b);
  cplx s{};
  for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double max_abs_difference(const StateVector& a, const StateVector& b) {
  a.check_same(b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Local operator application

inline void check_qubit(const StateVector& s, int q) {
  if (q < 0 || q >= s.qubits())
    throw std::out_of_range("qubit/slot " + std::to_string(q) + " outside register of " +
                            std::to_string(s.qubits()));
}

inline void apply_one(StateVector& s, int q, const Mat2& m) {
  check_qubit(s, q);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    if (i & bit) continue;
    const cplx a0 = s[i];
    const cplx a1 = s[i | bit];
    s[i] = m[0] * a0 + m[1] * a1;
    s[i | bit] = m[2] * a0 + m[3] * a1;
  }
}

// Local basis index on (qa, qb) is bit(qa) + 2 bit(qb).
inline void apply_two(StateVector& s, int qa, int qb, const Mat4& m) {
  check_qubit(s, qa);
  check_qubit(s, qb);
  if (qa == qb) throw std::invalid_argument("two-qubit operator needs distinct qubits");
  const std::size_t ba = std::size_t{1} << qa;
  const std::size_t bb = std::size_t{1} << qb;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    if (i & (ba | bb)) continue;
    const std::size_t idx[4] = {i, i | ba, i | bb, i | ba | bb};
    cplx in[4];
    for (int k = 0; k < 4; ++k) in[k] = s[idx[k]];
    for (int r = 0; r < 4; ++r) {
      cplx acc{};
      for (int k = 0; k < 4; ++k) acc += m[4 * r + k] * in[k];
      s[idx[r]] = acc;
    }
  }
}

// Zeroes every amplitude whose qubit q differs from `value`.
inline void project(StateVector& s, int q, int value) {
  check_qubit(s, q);
  const std::size_t bit = std::size_t{1} << q;
  for (std::size_t i = 0; i < s.dimension(); ++i)
    if (((i & bit) != 0) != (value != 0)) s[i] = 0.0;
}

// ---------------------------------------------------------------------------
// Matrix helpers

template <std::size_t D>
std::array<cplx, D * D> adjoint(const std::array<cplx, D * D>& m) {
  std::array<cplx, D * D> out{};
  for (std::size_t r = 0; r < D; ++r)
    for (std::size_t c = 0; c < D; ++c) out[c * D + r] = std::conj(m[r * D + c]);
  return out;
}

template <std::size_t D>
std::array<cplx, D * D> multiply(const std::array<cplx, D * D>& a, const std::array<cplx, D * D>& b) {
  std::array<cplx, D * D> out{};
  for (std::size_t r = 0; r < D; ++r)
    for (std::size_t c = 0; c < D; ++c)
      for (std::size_t k = 0; k < D; ++k) out[r * D + c] += a[r * D + k] * b[k * D + c];
  return out;
}

template <std::size_t D>
std::array<cplx, D * D> identity_matrix() {
  std::array<cplx, D * D> out{};
  for (std::size_t i = 0; i < D; ++i) out[i * D + i] = 1.0;
  return out;
}

template <std::size_t N>
double max_abs_difference(const std::array<cplx, N>& a, const std::array<cplx, N>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// max |U^dagger U - I|
template <std::size_t D>
double unitarity_defect(const std::array<cplx, D * D>& u) {
  return max_abs_difference(multiply<D>(adjoint<D>(u), u), identity_matrix<D>());
}

// ---------------------------------------------------------------------------
// Coupling strength of the partial collapse

class Coupling {
 public:
  Coupling() = default;
  explicit Coupling(double x) : x_(x) {
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("coupling X must lie in [0, 1], got " + std::to_string(x));
  }
  double value() const { return x_; }

 private:
  double x_ = 0.0;
};

// ---------------------------------------------------------------------------
// Operators

// R_i acting on (left ingoing slot, right ingoing slot) of a vertex.
struct VertexUnitary {
  Mat4 matrix = identity_matrix<4>();

  static VertexUnitary from_matrix(const Mat4& m) {
    const double defect = unitarity_defect<4>(m);
    if (defect > kOperatorTolerance)
      throw std::invalid_argument("vertex matrix is not unitary (defect " + std::to_string(defect) + ")");
    return VertexUnitary{m};
  }
};

struct LinkOperator {
  Mat2 matrix{};
};

inline LinkOperator make_projector(int value) {
  if (value != 0 && value != 1) throw std::invalid_argument("field value must be 0 or 1");
  LinkOperator op;
  op.matrix[value == 0 ? 0 : 3] = 1.0;
  return op;
}

// J(0) = (|0><0| + X|1><1|)/sqrt(1+X^2), J(1) = (X|0><0| + |1><1|)/sqrt(1+X^2)
inline LinkOperator make_kraus(int value, Coupling coupling) {
  if (value != 0 && value != 1) throw std::invalid_argument("field value must be 0 or 1");
  const double x = coupling.value();
  const double s = 1.0 / std::sqrt(1.0 + x * x);
  LinkOperator op;
  op.matrix[0] = (value == 0 ? 1.0 : x) * s;
  op.matrix[3] = (value == 0 ? x : 1.0) * s;
  return op;
}

inline void apply_link_operator(StateVector& s, int slot, const LinkOperator& op) {
  apply_one(s, slot, op.matrix);
}

// U_a on (field qubit, environment qubit); local index = field + 2 env.
struct PartialMeasurementUnitary {
  Mat4 matrix{};
};

inline PartialMeasurementUnitary make_partial_measurement(Coupling coupling) {
  const double x = coupling.value();
  const double s = 1.0 / std::sqrt(1.0 + x * x);
  PartialMeasurementUnitary u;
  auto set = [&](int row, int col, double v) { u.matrix[4 * row + col] = v * s; };
  // column |0>_q|0>_e -> |0>_q (|0>_e + X|1>_e)
  set(0, 0, 1.0);
  set(2, 0, x);
  // column |1>_q|0>_e -> |1>_q (X|0>_e + |1>_e)
  set(1, 1, x);
  set(3, 1, 1.0);
  // column |0>_q|1>_e -> |0>_q (X|0>_e - |1>_e)
  set(0, 2, x);
  set(2, 2, -1.0);
  // column |1>_q|1>_e -> |1>_q (|0>_e - X|1>_e)
  set(1, 3, 1.0);
  set(3, 3, -x);
  return u;
}

// ---------------------------------------------------------------------------
// Vertex unitary presets

inline VertexUnitary identity_unitary() { return VertexUnitary{}; }

inline VertexUnitary swap_unitary() {
  Mat4 m{};
  m[0 * 4 + 0] = 1.0;
  m[1 * 4 + 2] = 1.0;
  m[2 * 4 + 1] = 1.0;
  m[3 * 4 + 3] = 1.0;
  return VertexUnitary{m};
}

inline Mat2 rotation_y(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return Mat2{c, -s, s, c};
}

// a (x) b with a on the left-slot qubit (low bit), b on the right-slot qubit.
inline Mat4 kron_local(const Mat2& a, const Mat2& b) {
  Mat4 m{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[4 * r + c] = a[2 * (r & 1) + (c & 1)] * b[2 * (r >> 1) + (c >> 1)];
  return m;
}

inline VertexUnitary rotation_unitary(double theta_left, double theta_right) {
  return VertexUnitary{kron_local(rotation_y(theta_left), rotation_y(theta_right))};
}

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index + 1) * 0xd1b54a32d192ed03ULL);
}

// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix, with
// Box-Muller normals drawn from mt19937_64.
inline VertexUnitary random_unitary(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto normal = [&]() {
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  std::array<std::array<cplx, 4>, 4> cols{};
  for (auto& col : cols)
    for (auto& z : col) z = cplx(normal(), normal());
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < j; ++k) {
      cplx p{};
      for (int i = 0; i < 4; ++i) p += std::conj(cols[k][i]) * cols[j][i];
      for (int i = 0; i < 4; ++i) cols[j][i] -= p * cols[k][i];
    }
    double nrm = 0.0;
    for (int i = 0; i < 4; ++i) nrm += std::norm(cols[j][i]);
    nrm = std::sqrt(nrm);
    for (int i = 0; i < 4; ++i) cols[j][i] /= nrm;
  }
  Mat4 m{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[4 * r + c] = cols[c][r];
  return VertexUnitary{m};
}

// ---------------------------------------------------------------------------
// Initial states on the 2N-slot initial surface

// bits[k] is the field value on slot k.
inline SurfaceState basis_initial_state(const std::string& bits, int width) {
  const int slots = 2 * width;
  if (static_cast<int>(bits.size()) != slots)
    throw std::invalid_argument("initial bit-string needs " + std::to_string(slots) + " characters");
  std::uint64_t index = 0;
  for (int k = 0; k < slots; ++k) {
    if (bits[k] == '1') index |= std::uint64_t{1} << k;
    else if (bits[k] != '0') throw std::invalid_argument("initial bit-string must be 0/1");
  }
  return StateVector::basis(slots, index);
}

inline SurfaceState explicit_initial_state(std::vector<cplx> amps, int width) {
  const int slots = 2 * width;
  if (amps.size() != (std::size_t{1} << slots))
    throw std::invalid_argument("initial state needs 2^" + std::to_string(slots) + " amplitudes, got " +
                                std::to_string(amps.size()));
  StateVector s(slots, std::move(amps));
  if (std::abs(s.norm_squared() - 1.0) > kOperatorTolerance)
    throw std::invalid_argument("initial state is not normalized (norm^2 = " +
                                std::to_string(s.norm_squared()) + ")");
  return s;
}

}  // namespace nullcollapse

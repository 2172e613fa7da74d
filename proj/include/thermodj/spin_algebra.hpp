// Copyright 2026 The thermodj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace thermodj {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Coefficients below this magnitude are dropped from an OperatorSum.
inline constexpr double kPruneTolerance = 1e-12;
/// Default tolerance for matrix identities, unitarity and Hermiticity checks.
inline constexpr double kCompareTolerance = 1e-10;
/// Largest spin count the dense backend accepts (dimension 4096).
inline constexpr int kMaxDenseSpins = 12;

/// Single-spin factor of a product operator. E is the identity factor.
/// The enumerator order is the canonical sort order of terms.
enum class Axis : std::uint8_t { E = 0, X = 1, Y = 2, Z = 3 };

using AxisString = std::vector<Axis>;

inline char axis_char(Axis a) {
  switch (a) {
    case Axis::E: return 'e';
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

namespace detail {

inline void check_spin_count(int m) {
  if (m < 1 || m > kMaxDenseSpins) {
    throw std::invalid_argument("spin count " + std::to_string(m) + " outside [1, " +
                                std::to_string(kMaxDenseSpins) + "]");
  }
}

// Spin l (1-indexed) is bit (m - l) of a basis index, so spin 1 is the most
// significant bit of |s1 s2 ... sm>.
inline std::uint32_t spin_bit(int m, int spin) { return std::uint32_t{1} << (m - spin); }

struct PauliMasks {
  std::uint32_t x = 0;  // spins carrying X or Y
  std::uint32_t z = 0;  // spins carrying Z or Y
  int weight = 0;
};

inline PauliMasks masks_of(const AxisString& axes) {
  const int m = static_cast<int>(axes.size());
  PauliMasks pm;
  for (int l = 1; l <= m; ++l) {
    const auto bit = spin_bit(m, l);
    switch (axes[l - 1]) {
      case Axis::E: break;
      case Axis::X: pm.x |= bit; ++pm.weight; break;
      case Axis::Y: pm.x |= bit; pm.z |= bit; ++pm.weight; break;
      case Axis::Z: pm.z |= bit; ++pm.weight; break;
    }
  }
  return pm;
}

inline AxisString axes_of(int m, std::uint32_t xmask, std::uint32_t zmask) {
  AxisString axes(m, Axis::E);
  for (int l = 1; l <= m; ++l) {
    const auto bit = spin_bit(m, l);
    const bool x = xmask & bit, z = zmask & bit;
    axes[l - 1] = x ? (z ? Axis::Y : Axis::X) : (z ? Axis::Z : Axis::E);
  }
  return axes;
}

// i^k for k taken mod 4.
inline Complex i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// In-place fast Walsh-Hadamard transform: v[z] <- sum_k (-1)^{popcount(k&z)} v[k].
template <typename T>
void walsh_hadamard(std::vector<T>& v) {
  for (std::size_t h = 1; h < v.size(); h <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const T a = v[j], b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

inline std::string format_real(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

/// coefficient times the tensor product of per-spin factors; X/Y/Z factors
/// carry the 1/2 of the spin operators (I_z = sigma_z / 2), E is the identity.
struct ProductOperatorTerm {
  Complex coefficient{1.0, 0.0};
  AxisString axes;
};

/// Weighted sum of product operators over a fixed number of spins. Terms are
/// unique per axis string, ordered lexicographically with E < X < Y < Z, and
/// pruned when their magnitude falls below kPruneTolerance.
class OperatorSum {
 public:
  explicit OperatorSum(int num_spins) : num_spins_(num_spins) {
    if (num_spins < 1) throw std::invalid_argument("OperatorSum needs at least one spin");
  }

  OperatorSum(int num_spins, std::span<const ProductOperatorTerm> terms) : OperatorSum(num_spins) {
    for (const auto& t : terms) add(t);
  }

  static OperatorSum identity(int num_spins, Complex c = 1.0) {
    OperatorSum s(num_spins);
    s.add(AxisString(num_spins, Axis::E), c);
    return s;
  }

  /// Single-spin operator I_{spin,axis} with the given coefficient.
  static OperatorSum spin(int num_spins, int spin, Axis axis, Complex c = 1.0) {
    OperatorSum s(num_spins);
    s.add(single_axes(num_spins, spin, axis), c);
    return s;
  }

  static AxisString single_axes(int num_spins, int spin, Axis axis) {
    if (spin < 1 || spin > num_spins) {
      throw std::invalid_argument("spin " + std::to_string(spin) + " out of range 1.." +
                                  std::to_string(num_spins));
    }
    AxisString axes(num_spins, Axis::E);
    axes[spin - 1] = axis;
    return axes;
  }

  void add(const ProductOperatorTerm& t) { add(t.axes, t.coefficient); }

  void add(const AxisString& axes, Complex c) {
    if (static_cast<int>(axes.size()) != num_spins_) {
      throw std::invalid_argument("term has " + std::to_string(axes.size()) + " axes, expected " +
                                  std::to_string(num_spins_));
    }
    auto [it, inserted] = terms_.try_emplace(axes, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kPruneTolerance) terms_.erase(it);
  }

  int num_spins() const { return num_spins_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<AxisString, Complex>& terms() const { return terms_; }

  Complex coefficient(const AxisString& axes) const {
    auto it = terms_.find(axes);
    return it == terms_.end() ? Complex{} : it->second;
  }

  std::vector<ProductOperatorTerm> to_terms() const {
    std::vector<ProductOperatorTerm> out;
    out.reserve(terms_.size());
    for (const auto& [axes, c] : terms_) out.push_back({c, axes});
    return out;
  }

  /// Copy with the all-identity term removed.
  OperatorSum traceless_part() const {
    OperatorSum out = *this;
    out.terms_.erase(AxisString(num_spins_, Axis::E));
    return out;
  }

  OperatorSum& operator+=(const OperatorSum& o) {
    if (o.num_spins_ != num_spins_) throw std::invalid_argument("spin count mismatch in sum");
    for (const auto& [axes, c] : o.terms_) add(axes, c);
    return *this;
  }
  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
  friend OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a += b * Complex{-1.0}; }
  friend OperatorSum operator*(const OperatorSum& a, Complex s) {
    OperatorSum out(a.num_spins_);
    for (const auto& [axes, c] : a.terms_) out.add(axes, c * s);
    return out;
  }
  friend OperatorSum operator*(Complex s, const OperatorSum& a) { return a * s; }

  /// True when every coefficient agrees with `o` within `tol`.
  bool approx_equal(const OperatorSum& o, double tol = kCompareTolerance) const {
    if (o.num_spins_ != num_spins_) return false;
    for (const auto& [axes, c] : terms_)
      if (std::abs(c - o.coefficient(axes)) > tol) return false;
    for (const auto& [axes, c] : o.terms_)
      if (std::abs(c - coefficient(axes)) > tol) return false;
    return true;
  }

  /// Human-readable form such as "I1x*I4z + 2*I1x*I2z*I4z".
  std::string to_string() const;

 private:
  int num_spins_;
  std::map<AxisString, Complex> terms_;
};

/// Product-operator label of an axis string, e.g. "I1x*I4z"; "1" for identity.
inline std::string axes_label(const AxisString& axes) {
  std::string out;
  for (std::size_t l = 0; l < axes.size(); ++l) {
    if (axes[l] == Axis::E) continue;
    if (!out.empty()) out += '*';
    out += 'I' + std::to_string(l + 1) + axis_char(axes[l]);
  }
  return out.empty() ? "1" : out;
}

inline std::string OperatorSum::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [axes, c] : terms_) {
    const std::string label = axes_label(axes);
    const bool identity = label == "1";
    std::string coeff;
    bool negative = false;
    if (std::abs(c.imag()) < kPruneTolerance) {
      negative = c.real() < 0;
      const double mag = std::abs(c.real());
      if (std::abs(mag - 1.0) > kPruneTolerance || identity) coeff = detail::format_real(mag);
    } else {
      coeff = "(" + detail::format_real(c.real()) + (c.imag() < 0 ? "-" : "+") +
              detail::format_real(std::abs(c.imag())) + "i)";
    }
    if (out.empty()) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    if (identity) {
      out += coeff;
    } else {
      out += coeff.empty() ? label : coeff + "*" + label;
    }
  }
  return out;
}

/// Explicit 2^m x 2^m matrix in the computational basis |0...0> .. |1...1>,
/// spin 1 being the most significant bit.
class DenseOperator {
 public:
  DenseOperator(int num_spins, Matrix m) : num_spins_(num_spins), mat_(std::move(m)) {
    detail::check_spin_count(num_spins);
    const Eigen::Index dim = Eigen::Index{1} << num_spins;
    if (mat_.rows() != dim || mat_.cols() != dim) {
      throw std::invalid_argument("matrix shape does not match 2^" + std::to_string(num_spins));
    }
  }

  /// Wraps a square matrix whose dimension must be a power of two.
  static DenseOperator from_matrix(Matrix m) {
    const auto dim = static_cast<std::uint64_t>(m.rows());
    if (m.rows() != m.cols() || dim < 2 || !std::has_single_bit(dim)) {
      throw std::invalid_argument("dimension " + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()) + " is not a power-of-two square");
    }
    return DenseOperator(std::countr_zero(dim), std::move(m));
  }

  static DenseOperator identity(int num_spins) {
    detail::check_spin_count(num_spins);
    const Eigen::Index dim = Eigen::Index{1} << num_spins;
    return DenseOperator(num_spins, Matrix::Identity(dim, dim));
  }

  static DenseOperator diagonal(int num_spins, const Eigen::VectorXcd& d) {
    detail::check_spin_count(num_spins);
    return DenseOperator(num_spins, d.asDiagonal().toDenseMatrix());
  }

  int num_spins() const { return num_spins_; }
  Eigen::Index dim() const { return mat_.rows(); }
  const Matrix& matrix() const { return mat_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return mat_(r, c); }

  DenseOperator adjoint() const { return {num_spins_, mat_.adjoint()}; }
  Complex trace() const { return mat_.trace(); }

  friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
    if (a.num_spins_ != b.num_spins_) throw std::invalid_argument("dimension mismatch in product");
    return {a.num_spins_, a.mat_ * b.mat_};
  }
  friend DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
    if (a.num_spins_ != b.num_spins_) throw std::invalid_argument("dimension mismatch in sum");
    return {a.num_spins_, a.mat_ + b.mat_};
  }
  friend DenseOperator operator*(Complex s, const DenseOperator& a) { return {a.num_spins_, s * a.mat_}; }

  double max_abs_diff(const DenseOperator& o) const {
    if (o.num_spins_ != num_spins_) throw std::invalid_argument("dimension mismatch in comparison");
    return (mat_ - o.mat_).cwiseAbs().maxCoeff();
  }

  bool is_unitary(double tol = kCompareTolerance) const {
    return (mat_.adjoint() * mat_ - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
  }
  bool is_hermitian(double tol = kCompareTolerance) const {
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }
  bool is_diagonal(double tol = kCompareTolerance) const {
    Matrix off = mat_;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= tol;
  }

 private:
  int num_spins_;
  Matrix mat_;
};

/// Dense realization of one product-operator term over m spins.
inline DenseOperator term_to_matrix(const ProductOperatorTerm& term, int m) {
  if (static_cast<int>(term.axes.size()) != m) {
    throw std::invalid_argument("term has " + std::to_string(term.axes.size()) +
                                " axes but the system has " + std::to_string(m) + " spins");
  }
  detail::check_spin_count(m);
  const auto pm = detail::masks_of(term.axes);
  const int ny = std::popcount(pm.x & pm.z);
  // P|k> = i^ny (-1)^{popcount(k & z)} |k ^ x>, scaled by 2^-weight.
  const Complex base = term.coefficient * detail::i_pow(ny) * std::ldexp(1.0, -pm.weight);
  const std::uint32_t dim = std::uint32_t{1} << m;
  Matrix out = Matrix::Zero(dim, dim);
  for (std::uint32_t k = 0; k < dim; ++k) {
    out(k ^ pm.x, k) = (std::popcount(k & pm.z) & 1) ? -base : base;
  }
  return {m, std::move(out)};
}

inline DenseOperator to_dense(const OperatorSum& s) {
  detail::check_spin_count(s.num_spins());
  const Eigen::Index dim = Eigen::Index{1} << s.num_spins();
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& [axes, c] : s.terms()) out += term_to_matrix({c, axes}, s.num_spins()).matrix();
  return {s.num_spins(), std::move(out)};
}

/// Expands a dense operator over the product-operator basis. Each coefficient
/// is Tr(B^dag A) / Tr(B^dag B); one Walsh-Hadamard pass per X/Y pattern.
inline OperatorSum matrix_to_terms(const DenseOperator& a) {
  const int m = a.num_spins();
  const std::uint32_t dim = std::uint32_t{1} << m;
  OperatorSum out(m);
  std::vector<Complex> v(dim);
  for (std::uint32_t xm = 0; xm < dim; ++xm) {
    for (std::uint32_t k = 0; k < dim; ++k) v[k] = a(k ^ xm, k);
    detail::walsh_hadamard(v);
    for (std::uint32_t zm = 0; zm < dim; ++zm) {
      if (std::abs(v[zm]) < kPruneTolerance) continue;
      const int ny = std::popcount(xm & zm);
      const int weight = std::popcount(xm | zm);
      // Tr(P^dag A) = conj(i^ny) * v[zm]; Pauli coefficient /N; 2^weight for the 1/2 factors.
      const Complex c = std::conj(detail::i_pow(ny)) * v[zm] * std::ldexp(1.0, weight - m);
      out.add(detail::axes_of(m, xm, zm), c);
    }
  }
  return out;
}

/// U A U^dag.
inline DenseOperator conjugate(const DenseOperator& u, const DenseOperator& a) {
  if (u.num_spins() != a.num_spins()) throw std::invalid_argument("dimension mismatch in conjugation");
  if (!u.is_unitary()) throw std::invalid_argument("conjugating operator is not unitary");
  return {a.num_spins(), u.matrix() * a.matrix() * u.matrix().adjoint()};
}

/// Tr(A rho) for Hermitian A and a unit-trace Hermitian rho.
inline double expectation(const DenseOperator& a, const DenseOperator& rho) {
  if (a.num_spins() != rho.num_spins()) throw std::invalid_argument("dimension mismatch in expectation");
  if (!a.is_hermitian()) throw std::invalid_argument("observable is not Hermitian");
  if (!rho.is_hermitian()) throw std::invalid_argument("density operator is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > kCompareTolerance) {
    throw std::invalid_argument("density operator trace is not 1");
  }
  const Complex v = a.matrix().cwiseProduct(rho.matrix().transpose()).sum();
  if (std::abs(v.imag()) > kCompareTolerance) {
    throw std::logic_error("expectation has imaginary residue " + detail::format_real(v.imag()));
  }
  return v.real();
}

/// exp(-i H tau) for a sum of Z-strings, evaluated on the diagonal.
inline DenseOperator exp_commuting_zsum(const OperatorSum& h, double tau) {
  const int m = h.num_spins();
  detail::check_spin_count(m);
  const std::uint32_t dim = std::uint32_t{1} << m;
  Eigen::VectorXd energy = Eigen::VectorXd::Zero(dim);
  for (const auto& [axes, c] : h.terms()) {
    if (std::any_of(axes.begin(), axes.end(), [](Axis a) { return a == Axis::X || a == Axis::Y; })) {
      throw std::invalid_argument("term " + axes_label(axes) + " is not a Z-string");
    }
    if (std::abs(c.imag()) > kPruneTolerance) {
      throw std::invalid_argument("term " + axes_label(axes) + " has a non-real coefficient");
    }
    const auto pm = detail::masks_of(axes);
    const double e = c.real() * std::ldexp(1.0, -pm.weight);
    for (std::uint32_t k = 0; k < dim; ++k) energy[k] += (std::popcount(k & pm.z) & 1) ? -e : e;
  }
  Eigen::VectorXcd d(dim);
  for (std::uint32_t k = 0; k < dim; ++k) d[k] = std::polar(1.0, -energy[k] * tau);
  return DenseOperator::diagonal(m, d);
}

/// 2x2 matrix of exp(-i angle (cos(phase) I_x + sin(phase) I_y)).
inline Eigen::Matrix2cd transverse_rotation_2x2(double angle, double phase) {
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  const Complex minus_i_s{0.0, -s};
  Eigen::Matrix2cd g;
  g << c, minus_i_s * std::polar(1.0, -phase), minus_i_s * std::polar(1.0, phase), c;
  return g;
}

/// 2x2 matrix of exp(-i angle I_z).
inline Eigen::Matrix2cd z_rotation_2x2(double angle) {
  Eigen::Matrix2cd g = Eigen::Matrix2cd::Zero();
  g(0, 0) = std::polar(1.0, -angle / 2);
  g(1, 1) = std::polar(1.0, angle / 2);
  return g;
}

/// Left-multiplies `u` (2^m rows) in place by a single-spin gate on `spin`.
inline void apply_single_spin(Matrix& u, int m, int spin, const Eigen::Matrix2cd& g) {
  const auto bit = detail::spin_bit(m, spin);
  const auto dim = static_cast<std::uint32_t>(u.rows());
  for (std::uint32_t r0 = 0; r0 < dim; ++r0) {
    if (r0 & bit) continue;
    const std::uint32_t r1 = r0 | bit;
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      const Complex a = u(r0, c), b = u(r1, c);
      u(r0, c) = g(0, 0) * a + g(0, 1) * b;
      u(r1, c) = g(1, 0) * a + g(1, 1) * b;
    }
  }
}

/// exp(-i angle I_{spin,axis}) over m spins.
inline DenseOperator spin_rotation(int m, int spin, Axis axis, double angle) {
  if (spin < 1 || spin > m) throw std::invalid_argument("rotation spin out of range");
  DenseOperator id = DenseOperator::identity(m);
  Matrix u = id.matrix();
  switch (axis) {
    case Axis::X: apply_single_spin(u, m, spin, transverse_rotation_2x2(angle, 0.0)); break;
    case Axis::Y: apply_single_spin(u, m, spin, transverse_rotation_2x2(angle, std::numbers::pi / 2)); break;
    case Axis::Z: apply_single_spin(u, m, spin, z_rotation_2x2(angle)); break;
    case Axis::E: break;
  }
  return {m, std::move(u)};
}

/// Conjugates a product-operator sum by a unitary through the dense backend.
inline OperatorSum conjugate_terms(const DenseOperator& u, const OperatorSum& s) {
  return matrix_to_terms(conjugate(u, to_dense(s)));
}

/// Parses literals such as "2*I1x*I4z - 0.5*I1x + 4 I1z I2z I3z" over m spins.
/// A bare number denotes a multiple of the identity.
inline OperatorSum parse_operator_sum(std::string_view text, int m) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("operator literal: " + why + " at position " + std::to_string(pos));
  };
  auto skip = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  OperatorSum out(m);
  bool first = true;
  skip();
  if (pos == text.size()) fail("empty expression");
  while (true) {
    skip();
    double sign = 1.0;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      sign = text[pos] == '-' ? -1.0 : 1.0;
      ++pos;
    } else if (!first) {
      fail("expected '+' or '-'");
    }
    first = false;
    double coeff = sign;
    AxisString axes(m, Axis::E);
    bool any_factor = false;
    while (true) {
      skip();
      if (pos >= text.size()) break;
      const char ch = text[pos];
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
        std::size_t used = 0;
        double v = 0;
        try {
          v = std::stod(std::string(text.substr(pos)), &used);
        } catch (const std::exception&) {
          fail("bad number");
        }
        coeff *= v;
        pos += used;
      } else if (ch == 'I') {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) fail("expected spin index after 'I'");
        const int spin = std::stoi(std::string(text.substr(start, pos - start)));
        if (spin < 1 || spin > m) fail("spin " + std::to_string(spin) + " out of range");
        if (pos >= text.size()) fail("expected axis x, y or z");
        const char ax = static_cast<char>(std::tolower(static_cast<unsigned char>(text[pos])));
        Axis axis = Axis::E;
        if (ax == 'x') axis = Axis::X;
        else if (ax == 'y') axis = Axis::Y;
        else if (ax == 'z') axis = Axis::Z;
        else fail("expected axis x, y or z");
        if (axes[spin - 1] != Axis::E) fail("spin " + std::to_string(spin) + " repeated in one product");
        axes[spin - 1] = axis;
        ++pos;
      } else {
        fail(std::string("unexpected character '") + ch + "'");
      }
      any_factor = true;
      skip();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        skip();
        if (pos >= text.size()) fail("expected a factor after '*'");
        continue;
      }
      if (pos < text.size() && (text[pos] == 'I' || std::isdigit(static_cast<unsigned char>(text[pos]))))
        continue;
      break;
    }
    if (!any_factor) fail("expected a term");
    out.add(axes, coeff);
    skip();
    if (pos >= text.size()) break;
  }
  return out;
}

/// Spin count, per-spin resonance offsets (Hz) and the symmetric scalar
/// coupling matrix J (Hz). Spins are addressed 1..m.
class SpinSystem {
 public:
  SpinSystem() = default;

  SpinSystem(std::vector<std::string> labels, std::vector<double> offsets_hz, Eigen::MatrixXd couplings_hz,
             std::vector<std::string> nuclei = {})
      : labels_(std::move(labels)),
        offsets_(std::move(offsets_hz)),
        j_(std::move(couplings_hz)),
        nuclei_(std::move(nuclei)) {
    const auto m = labels_.size();
    if (m == 0) throw std::invalid_argument("spin system has no spins");
    if (offsets_.size() != m) throw std::invalid_argument("offset count does not match spin count");
    if (static_cast<std::size_t>(j_.rows()) != m || static_cast<std::size_t>(j_.cols()) != m) {
      throw std::invalid_argument("coupling matrix shape does not match spin count");
    }
    if (nuclei_.empty()) nuclei_.assign(m, "");
    if (nuclei_.size() != m) throw std::invalid_argument("nucleus count does not match spin count");
    for (std::size_t k = 0; k < m; ++k) {
      if (!std::isfinite(offsets_[k])) throw std::invalid_argument("non-finite offset for spin " + labels_[k]);
      if (j_(k, k) != 0.0) throw std::invalid_argument("coupling matrix has a non-zero diagonal");
      for (std::size_t l = 0; l < m; ++l) {
        if (!std::isfinite(j_(k, l)) || j_(k, l) != j_(l, k)) {
          throw std::invalid_argument("coupling matrix is not symmetric and finite");
        }
      }
    }
  }

  /// m uncoupled spins labelled "1".."m" with zero offsets.
  static SpinSystem uncoupled(int m) {
    std::vector<std::string> labels;
    for (int l = 1; l <= m; ++l) labels.push_back(std::to_string(l));
    return {labels, std::vector<double>(m, 0.0), Eigen::MatrixXd::Zero(m, m)};
  }

  int num_spins() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& nucleus(int spin) const { return nuclei_.at(check(spin) - 1); }
  double offset_hz(int spin) const { return offsets_.at(check(spin) - 1); }
  double coupling_hz(int k, int l) const { return j_(check(k) - 1, check(l) - 1); }
  bool coupled(int k, int l) const { return k != l && coupling_hz(k, l) != 0.0; }
  const Eigen::MatrixXd& couplings() const { return j_; }

  /// Copy with one extra spin appended, coupled to the existing spins by `j_hz`.
  SpinSystem with_extra_spin(const std::string& label, double offset_hz, std::span<const double> j_hz,
                             const std::string& nucleus = "") const {
    const int m = num_spins();
    if (static_cast<int>(j_hz.size()) != m) throw std::invalid_argument("need one coupling per existing spin");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m + 1, m + 1);
    j.topLeftCorner(m, m) = j_;
    for (int k = 0; k < m; ++k) j(k, m) = j(m, k) = j_hz[k];
    auto labels = labels_;
    labels.push_back(label);
    auto offsets = offsets_;
    offsets.push_back(offset_hz);
    auto nuclei = nuclei_;
    nuclei.push_back(nucleus);
    return {labels, offsets, j, nuclei};
  }

  /// Resolves a label or a 1-based index written as text.
  int index_of(std::string_view label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k)
      if (labels_[k] == label) return static_cast<int>(k) + 1;
    if (!label.empty() && std::all_of(label.begin(), label.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const int k = std::stoi(std::string(label));
      if (k >= 1 && k <= num_spins()) return k;
    }
    throw std::invalid_argument("unknown spin label '" + std::string(label) + "'");
  }

 private:
  int check(int spin) const {
    if (spin < 1 || spin > num_spins()) throw std::invalid_argument("spin " + std::to_string(spin) + " out of range");
    return spin;
  }

  std::vector<std::string> labels_;
  std::vector<double> offsets_;
  Eigen::MatrixXd j_;
  std::vector<std::string> nuclei_;
};

}  // namespace thermodj

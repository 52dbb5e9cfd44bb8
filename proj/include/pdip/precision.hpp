#pragma once

#include <cmath>
#include <compare>
#include <ostream>

namespace pdip::precision {

enum class Mode { kNative, kEmulated };

// Arithmetic model for the whole pipeline. In emulated mode every elementary
// result is rounded to nearest-even at `mantissa_bits` significand bits
// (implicit bit included), so the unit roundoff is 2^-mantissa_bits.
struct PrecisionConfig {
  int mantissa_bits = 53;
  Mode mode = Mode::kNative;

  static PrecisionConfig native() { return {}; }
  // Throws std::invalid_argument outside [11, 53].
  static PrecisionConfig emulated(int bits);
  // Native for 53 bits, emulated otherwise.
  static PrecisionConfig with_bits(int bits);

  double unit_roundoff() const { return std::ldexp(1.0, -mantissa_bits); }
  bool rounds() const { return mode == Mode::kEmulated && mantissa_bits < 53; }

  friend bool operator==(const PrecisionConfig&, const PrecisionConfig&) = default;
};

inline constexpr int kMinMantissaBits = 11;
inline constexpr int kMaxMantissaBits = 53;

// Round a double to `bits` significand bits, ties to even. Non-finite values
// and zero pass through unchanged.
double round_to_bits(double x, int bits);

enum class Op { kAdd, kSub, kMul, kDiv };

// fl(x op y) under `cfg`.
double rounded(Op op, double x, double y, const PrecisionConfig& cfg);
double rounded_sqrt(double x, const PrecisionConfig& cfg);

// Configuration governing `Real` arithmetic on the calling thread.
const PrecisionConfig& active();

// Installs `cfg` as the active configuration for the lifetime of the guard.
// Guards nest; the previous configuration is restored on destruction.
class Scope {
 public:
  explicit Scope(const PrecisionConfig& cfg);
  ~Scope();
  Scope(const Scope&) = delete;
  Scope& operator=(const Scope&) = delete;

 private:
  PrecisionConfig saved_;
};

// A double whose arithmetic is rounded under the active configuration.
// Construction from a double also rounds, so every value entering the
// pipeline is representable at the active precision.
class Real {
 public:
  constexpr Real() = default;
  Real(double v) : v_(fit(v)) {}  // NOLINT(google-explicit-constructor)

  // Wraps `v` without rounding; used where the value is known representable.
  static constexpr Real exact(double v) {
    Real r;
    r.v_ = v;
    return r;
  }

  constexpr double value() const { return v_; }
  explicit constexpr operator double() const { return v_; }

  friend Real operator+(Real a, Real b) { return exact(rounded(Op::kAdd, a.v_, b.v_, active())); }
  friend Real operator-(Real a, Real b) { return exact(rounded(Op::kSub, a.v_, b.v_, active())); }
  friend Real operator*(Real a, Real b) { return exact(rounded(Op::kMul, a.v_, b.v_, active())); }
  friend Real operator/(Real a, Real b) { return exact(rounded(Op::kDiv, a.v_, b.v_, active())); }
  friend constexpr Real operator-(Real a) { return exact(-a.v_); }

  Real& operator+=(Real b) { return *this = *this + b; }
  Real& operator-=(Real b) { return *this = *this - b; }
  Real& operator*=(Real b) { return *this = *this * b; }
  Real& operator/=(Real b) { return *this = *this / b; }

  friend constexpr bool operator==(Real a, Real b) { return a.v_ == b.v_; }
  friend constexpr auto operator<=>(Real a, Real b) { return a.v_ <=> b.v_; }

  friend std::ostream& operator<<(std::ostream& os, Real r) { return os << r.v_; }

 private:
  static double fit(double v);
  double v_ = 0.0;
};

inline Real abs(Real x) { return Real::exact(std::fabs(x.value())); }
inline Real sqrt(Real x) { return Real::exact(rounded_sqrt(x.value(), active())); }
inline bool isfinite(Real x) { return std::isfinite(x.value()); }

}  // namespace pdip::precision

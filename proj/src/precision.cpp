#include "pdip/precision.hpp"

#include <stdexcept>
#include <string>

namespace pdip::precision {
namespace {

thread_local PrecisionConfig g_active{};

}  // namespace

PrecisionConfig PrecisionConfig::emulated(int bits) {
  if (bits < kMinMantissaBits || bits > kMaxMantissaBits) {
    throw std::invalid_argument("mantissa bits must lie in [11, 53], got " + std::to_string(bits));
  }
  return PrecisionConfig{bits, Mode::kEmulated};
}

PrecisionConfig PrecisionConfig::with_bits(int bits) {
  if (bits == kMaxMantissaBits) return native();
  return emulated(bits);
}

double round_to_bits(double x, int bits) {
  if (bits >= kMaxMantissaBits || x == 0.0 || !std::isfinite(x)) return x;
  int exponent = 0;
  std::frexp(x, &exponent);  // |x| = f * 2^exponent, f in [0.5, 1)
  // Scaling by a power of two is exact away from the subnormal range; the
  // scaled magnitude lies in [2^(bits-1), 2^bits) so nearbyint drops exactly
  // the surplus bits. The default rounding mode is ties-to-even.
  const int shift = bits - exponent;
  return std::ldexp(std::nearbyint(std::ldexp(x, shift)), -shift);
}

double rounded(Op op, double x, double y, const PrecisionConfig& cfg) {
  double r = 0.0;
  switch (op) {
    case Op::kAdd: r = x + y; break;
    case Op::kSub: r = x - y; break;
    case Op::kMul: r = x * y; break;
    case Op::kDiv: r = x / y; break;
  }
  return cfg.rounds() ? round_to_bits(r, cfg.mantissa_bits) : r;
}

double rounded_sqrt(double x, const PrecisionConfig& cfg) {
  const double r = std::sqrt(x);
  return cfg.rounds() ? round_to_bits(r, cfg.mantissa_bits) : r;
}

const PrecisionConfig& active() { return g_active; }

Scope::Scope(const PrecisionConfig& cfg) : saved_(g_active) { g_active = cfg; }
Scope::~Scope() { g_active = saved_; }

double Real::fit(double v) {
  const PrecisionConfig& cfg = g_active;
  return cfg.rounds() ? round_to_bits(v, cfg.mantissa_bits) : v;
}

}  // namespace pdip::precision

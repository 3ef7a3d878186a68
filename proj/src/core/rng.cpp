#include "rng.hpp"

#include <cmath>
#include <limits>

namespace msbif {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> philox_round(
    const std::array<std::uint32_t, 4>& ctr,
    const std::array<std::uint32_t, 2>& key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
  mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

double inverse_normal_cdf(double p) {
  // Wichura's algorithm AS 241, routine PPND16.
  static constexpr double a[8] = {
      3.3871328727963666080e0,  1.3314166789178437745e2,
      1.9715909503065514427e3,  1.3731693765509461125e4,
      4.5921953931549871457e4,  6.7265770927008700853e4,
      3.3430575583588128105e4,  2.5090809287301226727e3};
  static constexpr double b[8] = {
      1.0,                      4.2313330701600911252e1,
      6.8718700749205790830e2,  5.3941960214247511077e3,
      2.1213794301586595867e4,  3.9307895800092710610e4,
      2.8729085735721942674e4,  5.2264952788528545610e3};
  static constexpr double c[8] = {
      1.42343711074968357734e0,  4.63033784615654529590e0,
      5.76949722146069140550e0,  3.64784832476320460504e0,
      1.27045825245236838258e0,  2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[8] = {
      1.0,                       2.05319162663775882187e0,
      1.67638483018380384940e0,  6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2,
      5.47593808499534494600e-4, 1.05075007164441684324e-9};
  static constexpr double e[8] = {
      6.65790464350110377720e0,  5.46378491116411436990e0,
      1.78482653991729133580e0,  2.96560571828504891230e-1,
      2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[8] = {
      1.0,                       5.99832206555887937690e-1,
      1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5,
      1.42151175831644588870e-7, 2.04426310338993978564e-15};

  auto poly = [](const double (&coef)[8], double x) {
    double v = coef[7];
    for (int i = 6; i >= 0; --i) v = v * x + coef[i];
    return v;
  };

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, r) / poly(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  if (r <= 0.0)
    return q < 0.0 ? -std::numeric_limits<double>::infinity()
                   : std::numeric_limits<double>::infinity();
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = poly(c, r) / poly(d, r);
  } else {
    r -= 5.0;
    value = poly(e, r) / poly(f, r);
  }
  return q < 0.0 ? -value : value;
}

double PathNoise::uniform(std::uint32_t step_index, std::uint32_t slot) const {
  // One Philox block yields two 64-bit words; `slot` picks within the block.
  const std::uint32_t block = slot / 2;
  const auto words = philox4x32({path_lo_, path_hi_, step_index, block}, key_);
  const std::uint32_t lo = words[(slot % 2) * 2];
  const std::uint32_t hi = words[(slot % 2) * 2 + 1];
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(hi) << 32) | static_cast<std::uint64_t>(lo);
  // 53 significant bits, offset by half an ulp to stay inside (0,1).
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

void PathNoise::normals(std::uint32_t step_index, double* out,
                        std::size_t count) const {
  for (std::size_t k = 0; k + 1 < count; k += 2) {
    const std::uint32_t block = static_cast<std::uint32_t>(k / 2);
    const auto words = philox4x32({path_lo_, path_hi_, step_index, block}, key_);
    const std::uint64_t bits0 = (static_cast<std::uint64_t>(words[1]) << 32) |
                                static_cast<std::uint64_t>(words[0]);
    const std::uint64_t bits1 = (static_cast<std::uint64_t>(words[3]) << 32) |
                                static_cast<std::uint64_t>(words[2]);
    out[k] = inverse_normal_cdf((static_cast<double>(bits0 >> 11) + 0.5) *
                                0x1.0p-53);
    out[k + 1] = inverse_normal_cdf((static_cast<double>(bits1 >> 11) + 0.5) *
                                    0x1.0p-53);
  }
  if (count % 2 == 1) out[count - 1] = normal(step_index, static_cast<std::uint32_t>(count - 1));
}

}  // namespace msbif

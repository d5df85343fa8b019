// SPDX-License-Identifier: Apache-2.0
#pragma once

// Secret error functions: i.i.d. integer draws per grid cell (centered binomial or
// truncated discrete Gaussian) times a scale, derived from (seed, nonce) so that
// sender and receiver regenerate the same error without exchanging it.

#include <illposed/common.hpp>
#include <illposed/function_space.hpp>
#include <illposed/xof.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace illposed {

enum class ErrorDistribution : std::uint8_t {
   centered_binomial = 0x01,
   discrete_gaussian = 0x02,
};

/// Minimum total error entropy per message, in bits.
inline constexpr double key_space_floor_bits = 128.0;

struct ErrorParams {
   ErrorDistribution distribution = ErrorDistribution::centered_binomial;
   unsigned eta = 2;     // centered binomial
   double sigma = 1.0;   // discrete Gaussian
   double scale = 0.5;
   std::size_t n = 256;

   static ErrorParams binomial(unsigned eta, double scale, std::size_t n) {
      return {ErrorDistribution::centered_binomial, eta, 0.0, scale, n};
   }

   static ErrorParams gaussian(double sigma, double scale, std::size_t n) {
      return {ErrorDistribution::discrete_gaussian, 0, sigma, scale, n};
   }

   bool operator==(const ErrorParams&) const = default;
};

/// Probability mass over the integer support [-bound, bound]; index 0 is -bound.
struct IntegerLaw {
   int bound = 0;
   std::vector<double> pmf;
};

inline IntegerLaw integer_law(const ErrorParams& p) {
   IntegerLaw law;
   if(p.distribution == ErrorDistribution::centered_binomial) {
      law.bound = static_cast<int>(p.eta);
      const int m = 2 * static_cast<int>(p.eta);
      // difference of two Binomial(eta, 1/2) equals Binomial(2 eta, 1/2) - eta
      double c = 1.0;
      for(int j = 0; j <= m; ++j) {
         law.pmf.push_back(c * std::ldexp(1.0, -m));
         c = c * static_cast<double>(m - j) / static_cast<double>(j + 1);
      }
   } else {
      law.bound = static_cast<int>(std::floor(6.0 * p.sigma));
      double total = 0.0;
      for(int x = -law.bound; x <= law.bound; ++x) {
         const double w = std::exp(-static_cast<double>(x) * x / (2.0 * p.sigma * p.sigma));
         law.pmf.push_back(w);
         total += w;
      }
      for(auto& w : law.pmf) {
         w /= total;
      }
   }
   return law;
}

/// Shannon entropy of one draw, in bits.
inline double entropy_per_point(const ErrorParams& p) {
   double h = 0.0;
   for(double q : integer_law(p).pmf) {
      if(q > 0.0) {
         h -= q * std::log2(q);
      }
   }
   return h;
}

/// Throws Error naming the violated constraint.
inline void validate(const ErrorParams& p) {
   detail::require(p.n >= 1, "error params: grid size must be positive");
   detail::require(p.scale > 0.0 && std::isfinite(p.scale), "error params: scale must be positive");
   if(p.distribution == ErrorDistribution::centered_binomial) {
      detail::require(p.eta >= 1 && p.eta <= 32, "error params: eta must lie in 1..32");
   } else {
      detail::require(p.sigma > 0.0 && p.sigma <= 1e4, "error params: sigma must be positive");
   }
   const double bits = entropy_per_point(p) * static_cast<double>(p.n);
   if(bits < key_space_floor_bits) {
      throw Error("error params: error entropy " + std::to_string(bits) + " bits is below the " +
                  std::to_string(key_space_floor_bits) + "-bit key-space floor (raise n or the noise width)");
   }
}

using ErrorSeed = std::array<std::uint8_t, 32>;
using Nonce = std::array<std::uint8_t, 16>;

struct ErrorKey {
   ErrorSeed seed{};
   ErrorParams params;

   bool operator==(const ErrorKey&) const = default;
};

namespace detail {

class BitStream {
public:
   explicit BitStream(Rng& rng) : m_rng(rng) {}

   unsigned bit() {
      if(m_left == 0) {
         m_byte = m_rng.next_byte();
         m_left = 8;
      }
      const unsigned b = m_byte & 1U;
      m_byte >>= 1;
      --m_left;
      return b;
   }

private:
   Rng& m_rng;
   std::uint8_t m_byte = 0;
   int m_left = 0;
};

}  // namespace detail

/// n independent draws times the scale. Consumes a fixed number of stream bytes for fixed
/// (distribution, n), so changing only the scale rescales the same integer draws.
inline GridFunction sample_error(const ErrorParams& p, Rng& rng) {
   std::vector<double> v(p.n);
   if(p.distribution == ErrorDistribution::centered_binomial) {
      detail::BitStream bits(rng);
      for(auto& x : v) {
         int acc = 0;
         for(unsigned i = 0; i < p.eta; ++i) {
            acc += static_cast<int>(bits.bit());
         }
         for(unsigned i = 0; i < p.eta; ++i) {
            acc -= static_cast<int>(bits.bit());
         }
         x = p.scale * acc;
      }
   } else {
      const IntegerLaw law = integer_law(p);
      std::vector<double> cdf(law.pmf.size());
      double run = 0.0;
      for(std::size_t i = 0; i < cdf.size(); ++i) {
         run += law.pmf[i];
         cdf[i] = run;
      }
      for(auto& x : v) {
         const double u = rng.uniform01();
         std::size_t idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
         idx = std::min(idx, cdf.size() - 1);
         x = p.scale * (static_cast<int>(idx) - law.bound);
      }
   }
   return GridFunction(std::move(v));
}

/// Synchronized generator: the same (seed, nonce) always yields the same error.
inline GridFunction derive_error(const ErrorKey& key, const Nonce& nonce) {
   Rng stream("illposed.error", domain_input("seed+nonce", key.seed, nonce));
   return sample_error(key.params, stream);
}

// Key file: "IPK1" | 0x01 | dist u8 | width f64 (eta or sigma) | scale f64 | n u32 | seed[32]

inline Bytes serialize_error_key(const ErrorKey& key) {
   ByteWriter w;
   w.magic("IPK1");
   w.u8(0x01);
   w.u8(static_cast<std::uint8_t>(key.params.distribution));
   w.f64(key.params.distribution == ErrorDistribution::centered_binomial ? static_cast<double>(key.params.eta)
                                                                          : key.params.sigma);
   w.f64(key.params.scale);
   w.u32(static_cast<std::uint32_t>(key.params.n));
   w.raw(key.seed);
   return std::move(w).bytes();
}

inline ErrorKey parse_error_key(std::span<const std::uint8_t> data) {
   ByteReader r(data);
   r.expect_magic("IPK1");
   if(r.u8() != 0x01) {
      throw FormatError("unsupported key file version");
   }
   ErrorKey key;
   const std::uint8_t dist = r.u8();
   const double width = r.f64();
   key.params.scale = r.f64();
   key.params.n = r.u32();
   if(dist == static_cast<std::uint8_t>(ErrorDistribution::centered_binomial)) {
      key.params.distribution = ErrorDistribution::centered_binomial;
      if(!(width >= 1.0 && width <= 32.0 && width == std::floor(width))) {
         throw FormatError("key file: invalid eta");
      }
      key.params.eta = static_cast<unsigned>(width);
      key.params.sigma = 0.0;
   } else if(dist == static_cast<std::uint8_t>(ErrorDistribution::discrete_gaussian)) {
      key.params.distribution = ErrorDistribution::discrete_gaussian;
      key.params.sigma = width;
      key.params.eta = 0;
   } else {
      throw FormatError("key file: unknown distribution id " + std::to_string(dist));
   }
   const auto seed = r.raw(32);
   std::copy(seed.begin(), seed.end(), key.seed.begin());
   r.expect_end();
   try {
      validate(key.params);
   } catch(const Error& e) {
      throw FormatError(std::string("key file: ") + e.what());
   }
   return key;
}

}  // namespace illposed

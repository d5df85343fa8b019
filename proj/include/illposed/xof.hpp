// SPDX-License-Identifier: Apache-2.0
#pragma once

// SHAKE-256 expansion and the deterministic random source built on it.
// Every bit of randomness in the library flows through here.

#include <illposed/common.hpp>

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string_view>

namespace illposed {

/// SHAKE-256(input) truncated to out_len bytes.
inline Bytes xof_expand(std::span<const std::uint8_t> input, std::size_t out_len) {
   detail::require(out_len >= 1, "xof_expand: out_len must be positive");
   std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
   Bytes out(out_len);
   if(!ctx || EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), input.data(), input.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1) {
      throw Error("SHAKE-256 failed in libcrypto");
   }
   return out;
}

/// Label-prefixed, length-framed input, so that different uses of one seed never share a stream.
inline Bytes domain_input(std::string_view label, std::span<const std::uint8_t> a,
                          std::span<const std::uint8_t> b = {}) {
   ByteWriter w;
   w.u8(static_cast<std::uint8_t>(label.size()));
   w.magic(label);
   w.u32(static_cast<std::uint32_t>(a.size()));
   w.raw(a);
   w.u32(static_cast<std::uint32_t>(b.size()));
   w.raw(b);
   return std::move(w).bytes();
}

/// Deterministic byte stream: block i is SHAKE-256(seed || i_le64), 1 KiB per block.
/// Satisfies UniformRandomBitGenerator so it plugs into <random> where convenient.
class Rng {
public:
   using result_type = std::uint64_t;

   explicit Rng(std::span<const std::uint8_t> seed) : m_seed(seed.begin(), seed.end()) {}

   explicit Rng(std::string_view label, std::span<const std::uint8_t> seed) :
         m_seed(domain_input(label, seed)) {}

   /// Child stream with its own domain label; the parent stream is not advanced.
   Rng derive(std::string_view label, std::uint64_t index = 0) const {
      ByteWriter w;
      w.u64(index);
      return Rng(domain_input(label, m_seed, w.bytes()));
   }

   static constexpr result_type min() { return 0; }
   static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

   result_type operator()() {
      std::uint64_t v = 0;
      for(int i = 0; i < 8; ++i) {
         v |= static_cast<std::uint64_t>(next_byte()) << (8 * i);
      }
      return v;
   }

   std::uint8_t next_byte() {
      if(m_pos == m_block.size()) {
         refill();
      }
      return m_block[m_pos++];
   }

   void fill(std::span<std::uint8_t> out) {
      for(auto& b : out) {
         b = next_byte();
      }
   }

   template <std::size_t N>
   std::array<std::uint8_t, N> bytes() {
      std::array<std::uint8_t, N> out{};
      fill(out);
      return out;
   }

   /// Uniform in [0, bound) by rejection.
   std::uint64_t uniform_below(std::uint64_t bound) {
      detail::require(bound >= 1, "uniform_below: bound must be positive");
      const std::uint64_t limit = max() - (max() % bound + 1) % bound;
      for(;;) {
         const std::uint64_t x = (*this)();
         if(x <= limit) {
            return x % bound;
         }
      }
   }

   /// Uniform double in [0, 1) with 53 random bits.
   double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

   /// Standard normal via Box-Muller (no cached second value, so draws are position-independent).
   double normal() {
      const double u1 = 1.0 - uniform01();
      const double u2 = uniform01();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
   }

private:
   void refill() {
      ByteWriter w;
      w.raw(m_seed);
      w.u64(m_counter++);
      m_block = xof_expand(w.bytes(), 1024);
      m_pos = 0;
   }

   Bytes m_seed;
   Bytes m_block;
   std::size_t m_pos = 0;
   std::uint64_t m_counter = 0;
};

/// Fresh seed from the operating system, for keys created without an explicit seed.
inline Bytes os_entropy(std::size_t len) {
   std::random_device rd;
   Bytes out(len);
   for(auto& b : out) {
      b = static_cast<std::uint8_t>(rd());
   }
   return out;
}

}  // namespace illposed

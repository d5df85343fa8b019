// SPDX-License-Identifier: Apache-2.0
#pragma once

// Desk-scale lattice KEM standing in for a production KEM (e.g. ML-KEM).
//
// Ring-LWE over Z_q[X]/(X^256 + 1), q = 3329, centered binomial noise eta = 2,
// schoolbook negacyclic products. The shared secret is a uniform 256-bit string
// carried one bit per coefficient at amplitude round(q/2). There is no FO
// transform, no compression and no implicit rejection, so this KEM is only
// passively secure; it exists to make the hybrid construction runnable.

#include <illposed/common.hpp>
#include <illposed/xof.hpp>

#include <array>
#include <bit>
#include <cstdlib>
#include <concepts>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace illposed {

using SharedSecret = std::array<std::uint8_t, 32>;

template <typename K>
struct KemKeyPair {
   typename K::PublicKey pk;
   typename K::SecretKey sk;
};

/// The three-operation contract the hybrid scheme relies on, plus ciphertext bytes.
template <typename K>
concept KeyEncapsulation = requires(Rng& rng, const typename K::PublicKey& pk, const typename K::SecretKey& sk,
                                    const typename K::Ciphertext& ct, std::span<const std::uint8_t> bytes) {
   { K::keygen(rng) } -> std::same_as<KemKeyPair<K>>;
   { K::encaps(pk, rng) } -> std::same_as<std::pair<SharedSecret, typename K::Ciphertext>>;
   { K::decaps(sk, ct) } -> std::same_as<SharedSecret>;
   { K::serialize_ciphertext(ct) } -> std::same_as<Bytes>;
   { K::parse_ciphertext(bytes) } -> std::same_as<typename K::Ciphertext>;
};

class RingLweKem {
public:
   static constexpr std::uint16_t q = 3329;
   static constexpr std::size_t degree = 256;
   static constexpr unsigned eta = 2;
   static constexpr std::uint8_t param_id = 0x01;

   using Poly = std::vector<std::uint16_t>;

   struct PublicKey {
      std::array<std::uint8_t, 32> seed_a{};
      Poly b;
      bool operator==(const PublicKey&) const = default;
   };

   struct SecretKey {
      Poly s;
      bool operator==(const SecretKey&) const = default;
   };

   struct Ciphertext {
      Poly u;
      Poly v;
      bool operator==(const Ciphertext&) const = default;
   };

   static Poly expand_a(std::span<const std::uint8_t> seed) {
      Rng rng("illposed.kem.a", seed);
      Poly a(degree);
      for(auto& c : a) {
         c = static_cast<std::uint16_t>(rng.uniform_below(q));
      }
      return a;
   }

   /// Coefficients drawn from the centered binomial law, reduced into [0, q).
   static Poly sample_small(Rng& rng) {
      Poly p(degree);
      for(auto& c : p) {
         const std::uint8_t byte = rng.next_byte();
         const int a = std::popcount(static_cast<unsigned>(byte & 0x03));
         const int b = std::popcount(static_cast<unsigned>((byte >> 2) & 0x03));
         c = reduce(a - b);
      }
      return p;
   }

   static std::uint16_t reduce(long long x) {
      long long r = x % q;
      if(r < 0) {
         r += q;
      }
      return static_cast<std::uint16_t>(r);
   }

   /// Representative in (-q/2, q/2].
   static int centered(std::uint16_t x) {
      return x > q / 2 ? static_cast<int>(x) - q : static_cast<int>(x);
   }

   static Poly add(const Poly& a, const Poly& b) {
      Poly r(degree);
      for(std::size_t i = 0; i < degree; ++i) {
         r[i] = reduce(static_cast<long long>(a[i]) + b[i]);
      }
      return r;
   }

   static Poly sub(const Poly& a, const Poly& b) {
      Poly r(degree);
      for(std::size_t i = 0; i < degree; ++i) {
         r[i] = reduce(static_cast<long long>(a[i]) - b[i]);
      }
      return r;
   }

   /// Product in Z_q[X]/(X^256 + 1).
   static Poly mul(const Poly& a, const Poly& b) {
      std::vector<long long> acc(degree, 0);
      for(std::size_t i = 0; i < degree; ++i) {
         for(std::size_t j = 0; j < degree; ++j) {
            const long long p = static_cast<long long>(a[i]) * b[j];
            const std::size_t k = i + j;
            if(k < degree) {
               acc[k] += p;
            } else {
               acc[k - degree] -= p;
            }
         }
      }
      Poly r(degree);
      for(std::size_t i = 0; i < degree; ++i) {
         r[i] = reduce(acc[i]);
      }
      return r;
   }

   static KemKeyPair<RingLweKem> keygen(Rng& rng) {
      KemKeyPair<RingLweKem> kp;
      kp.pk.seed_a = rng.bytes<32>();
      kp.sk.s = sample_small(rng);
      const Poly e = sample_small(rng);
      kp.pk.b = add(mul(expand_a(kp.pk.seed_a), kp.sk.s), e);
      return kp;
   }

   static std::pair<SharedSecret, Ciphertext> encaps(const PublicKey& pk, Rng& rng) {
      check(pk);
      const SharedSecret key = rng.bytes<32>();
      const Poly r = sample_small(rng);
      const Poly e1 = sample_small(rng);
      const Poly e2 = sample_small(rng);
      Ciphertext ct;
      ct.u = add(mul(expand_a(pk.seed_a), r), e1);
      Poly v = add(mul(pk.b, r), e2);
      for(std::size_t i = 0; i < degree; ++i) {
         if((key[i / 8] >> (i % 8)) & 1U) {
            v[i] = reduce(static_cast<long long>(v[i]) + (q + 1) / 2);
         }
      }
      ct.v = std::move(v);
      return {key, std::move(ct)};
   }

   /// Bit i is 1 when the centered coefficient of v - s*u exceeds q/4 in magnitude.
   static SharedSecret decaps(const SecretKey& sk, const Ciphertext& ct) {
      if(ct.u.size() != degree || ct.v.size() != degree) {
         throw Error("KEM ciphertext must hold " + std::to_string(degree) + " + " + std::to_string(degree) +
                     " coefficients");
      }
      detail::require(sk.s.size() == degree, "KEM secret key has the wrong length");
      const Poly w = sub(ct.v, mul(sk.s, ct.u));
      SharedSecret key{};
      for(std::size_t i = 0; i < degree; ++i) {
         if(std::abs(centered(w[i])) > q / 4) {
            key[i / 8] = static_cast<std::uint8_t>(key[i / 8] | (1U << (i % 8)));
         }
      }
      return key;
   }

   // Files: "IPQ1" | 0x01 version | param id | kind (0x01 pk, 0x02 sk, 0x03 ct) | payload
   //   pk payload: seed_a[32] | b: 256 x u16 LE
   //   sk payload: s: 256 x u16 LE
   //   ct payload: u: 256 x u16 LE | v: 256 x u16 LE

   static Bytes serialize_public_key(const PublicKey& pk) {
      ByteWriter w = header(0x01);
      w.raw(pk.seed_a);
      write_poly(w, pk.b);
      return std::move(w).bytes();
   }

   static Bytes serialize_secret_key(const SecretKey& sk) {
      ByteWriter w = header(0x02);
      write_poly(w, sk.s);
      return std::move(w).bytes();
   }

   static Bytes serialize_ciphertext(const Ciphertext& ct) {
      ByteWriter w = header(0x03);
      write_poly(w, ct.u);
      write_poly(w, ct.v);
      return std::move(w).bytes();
   }

   static PublicKey parse_public_key(std::span<const std::uint8_t> data) {
      ByteReader r(data);
      expect_header(r, 0x01);
      PublicKey pk;
      const auto seed = r.raw(32);
      std::copy(seed.begin(), seed.end(), pk.seed_a.begin());
      pk.b = read_poly(r);
      r.expect_end();
      return pk;
   }

   static SecretKey parse_secret_key(std::span<const std::uint8_t> data) {
      ByteReader r(data);
      expect_header(r, 0x02);
      SecretKey sk{read_poly(r)};
      r.expect_end();
      return sk;
   }

   static Ciphertext parse_ciphertext(std::span<const std::uint8_t> data) {
      ByteReader r(data);
      expect_header(r, 0x03);
      Ciphertext ct;
      ct.u = read_poly(r);
      ct.v = read_poly(r);
      r.expect_end();
      return ct;
   }

private:
   static void check(const PublicKey& pk) {
      detail::require(pk.b.size() == degree, "KEM public key has the wrong length");
   }

   static ByteWriter header(std::uint8_t kind) {
      ByteWriter w;
      w.magic("IPQ1");
      w.u8(0x01);
      w.u8(param_id);
      w.u8(kind);
      return w;
   }

   static void expect_header(ByteReader& r, std::uint8_t kind) {
      r.expect_magic("IPQ1");
      if(r.u8() != 0x01) {
         throw FormatError("unsupported KEM object version");
      }
      if(r.u8() != param_id) {
         throw FormatError("unknown KEM parameter set");
      }
      if(r.u8() != kind) {
         throw FormatError("KEM object has the wrong kind");
      }
   }

   static void write_poly(ByteWriter& w, const Poly& p) {
      for(auto c : p) {
         w.u16(c);
      }
   }

   static Poly read_poly(ByteReader& r) {
      Poly p(degree);
      for(auto& c : p) {
         c = r.u16();
         if(c >= q) {
            throw FormatError("KEM coefficient out of range");
         }
      }
      return p;
   }
};

static_assert(KeyEncapsulation<RingLweKem>);

}  // namespace illposed

// SPDX-License-Identifier: Apache-2.0
#pragma once

// KEM-DEM public-key encryption:
//   (K', C1) = encaps(pk)
//   K        = SHAKE-256(K', 32)            -> seed of the symmetric error key
//   nonce    = SHAKE-256(K' || 0x01, 16)
//   C2       = sym_encrypt((K, params), msg, scheme, nonce)
// One message per encapsulation, so no error function is ever reused.
// Security inherits from the KEM only when the KEM itself is CCA-secure.

#include <illposed/common.hpp>
#include <illposed/encoding.hpp>
#include <illposed/error_sampler.hpp>
#include <illposed/kem.hpp>
#include <illposed/symmetric_scheme.hpp>
#include <illposed/xof.hpp>

#include <cstdint>

namespace illposed {

/// Symmetric error law used by the hybrid scheme; the grid size comes from the encoding scheme.
struct HybridConfig {
   ErrorDistribution distribution = ErrorDistribution::centered_binomial;
   unsigned eta = 2;
   double sigma = 1.0;
   double scale = 0.5;

   ErrorParams params(std::size_t n) const {
      if(distribution == ErrorDistribution::centered_binomial) {
         return ErrorParams::binomial(eta, scale, n);
      }
      return ErrorParams::gaussian(sigma, scale, n);
   }
};

template <KeyEncapsulation K>
struct HybridCiphertext {
   typename K::Ciphertext c1;
   SymCiphertext c2;
};

struct DerivedSymmetricKey {
   ErrorKey key;
   Nonce nonce{};
};

inline DerivedSymmetricKey derive_symmetric_key(const SharedSecret& kem_secret, const ErrorParams& params) {
   DerivedSymmetricKey d;
   const Bytes k = xof_expand(kem_secret, 32);
   std::copy(k.begin(), k.end(), d.key.seed.begin());
   d.key.params = params;
   Bytes nonce_input(kem_secret.begin(), kem_secret.end());
   nonce_input.push_back(0x01);
   const Bytes nonce = xof_expand(nonce_input, 16);
   std::copy(nonce.begin(), nonce.end(), d.nonce.begin());
   return d;
}

template <KeyEncapsulation K>
KemKeyPair<K> pke_keygen(Rng& rng) {
   return K::keygen(rng);
}

/// Symmetric half of encryption for an already encapsulated secret. Lets tests pin K'.
template <KeyEncapsulation K>
HybridCiphertext<K> pke_encrypt_with_secret(const SharedSecret& kem_secret, typename K::Ciphertext c1,
                                            const Message& msg, const EncodingScheme& scheme,
                                            const HybridConfig& config = {}) {
   const auto derived = derive_symmetric_key(kem_secret, config.params(scheme.grid_size()));
   return {std::move(c1), sym_encrypt(derived.key, msg, scheme, derived.nonce)};
}

template <KeyEncapsulation K>
HybridCiphertext<K> pke_encrypt(const typename K::PublicKey& pk, const Message& msg, const EncodingScheme& scheme,
                                Rng& rng, const HybridConfig& config = {}) {
   validate(config.params(scheme.grid_size()));
   auto [secret, c1] = K::encaps(pk, rng);
   return pke_encrypt_with_secret<K>(secret, std::move(c1), msg, scheme, config);
}

/// A wrong secret key silently yields an unrelated message; nothing is authenticated.
template <KeyEncapsulation K>
Message pke_decrypt(const typename K::SecretKey& sk, const HybridCiphertext<K>& ct,
                    const HybridConfig& config = {}) {
   const SharedSecret secret = K::decaps(sk, ct.c1);
   const auto derived = derive_symmetric_key(secret, config.params(ct.c2.n));
   // the nonce is rebuilt from K'; the copy in the C2 header is not trusted
   SymCiphertext c2 = ct.c2;
   c2.nonce = derived.nonce;
   return sym_decrypt(derived.key, c2);
}

// Hybrid file: "IPH1" | 0x01 | len(C1) u32 | C1 bytes | C2 (symmetric ciphertext format)

template <KeyEncapsulation K>
Bytes serialize_hybrid_ciphertext(const HybridCiphertext<K>& ct) {
   const Bytes c1 = K::serialize_ciphertext(ct.c1);
   ByteWriter w;
   w.magic("IPH1");
   w.u8(0x01);
   w.u32(static_cast<std::uint32_t>(c1.size()));
   w.raw(c1);
   write_sym_ciphertext(w, ct.c2);
   return std::move(w).bytes();
}

template <KeyEncapsulation K>
HybridCiphertext<K> parse_hybrid_ciphertext(std::span<const std::uint8_t> data) {
   ByteReader r(data);
   r.expect_magic("IPH1");
   if(r.u8() != 0x01) {
      throw FormatError("unsupported hybrid ciphertext version");
   }
   const std::uint32_t len = r.u32();
   HybridCiphertext<K> ct{K::parse_ciphertext(r.raw(len)), read_sym_ciphertext(r)};
   r.expect_end();
   return ct;
}

}  // namespace illposed

// SPDX-License-Identifier: Apache-2.0
#pragma once

// Noise-masked cipher over the integral operator:
//   encrypt  C = S(encode(msg)) + E(seed, nonce)
//   decrypt  msg = decode(S^-1(C - E(seed, nonce)))
// There is no authentication: any well-formed ciphertext decrypts to some message.

#include <illposed/common.hpp>
#include <illposed/encoding.hpp>
#include <illposed/error_sampler.hpp>
#include <illposed/function_space.hpp>
#include <illposed/hso_operator.hpp>
#include <illposed/xof.hpp>

#include <cstdint>
#include <string>

namespace illposed {

struct SymCiphertext {
   std::uint32_t n = 0;
   std::uint32_t t = 0;
   std::uint8_t encoding_id = 0;
   Nonce nonce{};
   GridFunction body = GridFunction::zero(1);

   EncodingScheme scheme() const {
      return EncodingScheme(encoding_kind_from_id(encoding_id), t, n);
   }

   bool operator==(const SymCiphertext&) const = default;
};

/// Fresh seed drawn from rng; rejects parameter sets below the key-space floor.
inline ErrorKey sym_keygen(const ErrorParams& params, Rng& rng) {
   validate(params);
   ErrorKey key;
   key.params = params;
   key.seed = rng.bytes<32>();
   return key;
}

namespace detail {

inline void check_header(const SymCiphertext& ct) {
   if(ct.body.size() != ct.n) {
      throw FormatError("ciphertext body has " + std::to_string(ct.body.size()) + " samples, header says " +
                        std::to_string(ct.n));
   }
   try {
      (void)ct.scheme();
   } catch(const FormatError&) {
      throw;
   } catch(const Error& e) {
      throw FormatError(std::string("ciphertext header: ") + e.what());
   }
}

}  // namespace detail

/// Encryption with a caller-chosen error function. Test and experiment hook: it lets
/// experiments force E = 0 or reuse one E across messages, which the keyed API never does.
inline SymCiphertext sym_encrypt_with_error(const Message& msg, const EncodingScheme& scheme,
                                            const GridFunction& error, const Nonce& nonce) {
   detail::require_dims(error.size(), scheme.grid_size(), "sym_encrypt_with_error");
   const auto sys = hso_system(scheme.grid_size());
   SymCiphertext ct;
   ct.n = static_cast<std::uint32_t>(scheme.grid_size());
   ct.t = static_cast<std::uint32_t>(scheme.message_bits());
   ct.encoding_id = scheme.id();
   ct.nonce = nonce;
   ct.body = apply(sys->op, encode(msg, scheme)) + error;
   return ct;
}

/// The nonce must be fresh for each message under one key; the function itself is deterministic.
inline SymCiphertext sym_encrypt(const ErrorKey& key, const Message& msg, const EncodingScheme& scheme,
                                 const Nonce& nonce) {
   detail::require_dims(scheme.grid_size(), key.params.n, "sym_encrypt (scheme grid vs key grid)");
   validate(key.params);
   return sym_encrypt_with_error(msg, scheme, derive_error(key, nonce), nonce);
}

/// Full-spectrum inversion of C - E followed by decoding.
inline Message sym_decrypt_with_error(const SymCiphertext& ct, const GridFunction& error) {
   detail::check_header(ct);
   const auto sys = hso_system(ct.n);
   return decode(naive_inverse_apply(sys->factors, ct.body - error), ct.scheme());
}

inline Message sym_decrypt(const ErrorKey& key, const SymCiphertext& ct) {
   detail::check_header(ct);
   detail::require_dims(ct.n, key.params.n, "sym_decrypt (ciphertext grid vs key grid)");
   return sym_decrypt_with_error(ct, derive_error(key, ct.nonce));
}

// Ciphertext file: "IPC1" | 0x01 | n u32 | t u32 | encoding u8 | nonce[16] | grid function

inline void write_sym_ciphertext(ByteWriter& w, const SymCiphertext& ct) {
   w.magic("IPC1");
   w.u8(0x01);
   w.u32(ct.n);
   w.u32(ct.t);
   w.u8(ct.encoding_id);
   w.raw(ct.nonce);
   write_grid_function(w, ct.body);
}

inline Bytes serialize_sym_ciphertext(const SymCiphertext& ct) {
   ByteWriter w;
   write_sym_ciphertext(w, ct);
   return std::move(w).bytes();
}

inline SymCiphertext read_sym_ciphertext(ByteReader& r) {
   r.expect_magic("IPC1");
   if(r.u8() != 0x01) {
      throw FormatError("unsupported ciphertext version");
   }
   SymCiphertext ct;
   ct.n = r.u32();
   ct.t = r.u32();
   ct.encoding_id = r.u8();
   const auto nonce = r.raw(16);
   std::copy(nonce.begin(), nonce.end(), ct.nonce.begin());
   ct.body = read_grid_function(r);
   detail::check_header(ct);
   return ct;
}

inline SymCiphertext parse_sym_ciphertext(std::span<const std::uint8_t> data) {
   ByteReader r(data);
   auto ct = read_sym_ciphertext(r);
   r.expect_end();
   return ct;
}

}  // namespace illposed

// SPDX-License-Identifier: Apache-2.0
//
// Public-key encryption of one 32-bit message, then the same ciphertext body
// attacked without the key.

#include <illposed/illposed.hpp>

#include <cstdio>

int main() {
   using namespace illposed;

   const Bytes seed{0x42};
   Rng rng("demo.hybrid", seed);

   const auto kp = pke_keygen<RingLweKem>(rng);
   const auto msg = Message::from_hex("deadbeef");
   const auto scheme = EncodingScheme::map2(msg.size(), 256);

   const auto ct = pke_encrypt<RingLweKem>(kp.pk, msg, scheme, rng);
   const auto recovered = pke_decrypt<RingLweKem>(kp.sk, ct);
   std::printf("message    %s\nrecovered  %s\n", msg.to_hex().c_str(), recovered.to_hex().c_str());

   const auto sys = hso_system(256);
   const auto naive = attack_naive(ct.c2, sys->factors, msg);
   std::printf("naive attack: %s (bit accuracy %.3f, reconstruction error %.3g)\n", naive.recovered.to_hex().c_str(),
               *naive.bit_accuracy, *naive.residual_norm);
   return recovered == msg ? 0 : 1;
}

// SPDX-License-Identifier: Apache-2.0
#include <illposed/hybrid_pke.hpp>

#include <gtest/gtest.h>

using namespace illposed;

namespace {

// Trivially insecure KEM: the ciphertext is the secret XOR the public key. It satisfies the
// contract, so the hybrid layer must work with it unchanged.
struct MockKem {
   struct PublicKey {
      SharedSecret mask{};
   };
   struct SecretKey {
      SharedSecret mask{};
   };
   struct Ciphertext {
      SharedSecret masked{};
      bool operator==(const Ciphertext&) const = default;
   };

   static KemKeyPair<MockKem> keygen(Rng& rng) {
      const auto m = rng.bytes<32>();
      return {{m}, {m}};
   }

   static std::pair<SharedSecret, Ciphertext> encaps(const PublicKey& pk, Rng& rng) {
      const auto k = rng.bytes<32>();
      Ciphertext ct;
      for(std::size_t i = 0; i < 32; ++i) {
         ct.masked[i] = k[i] ^ pk.mask[i];
      }
      return {k, ct};
   }

   static SharedSecret decaps(const SecretKey& sk, const Ciphertext& ct) {
      SharedSecret k{};
      for(std::size_t i = 0; i < 32; ++i) {
         k[i] = ct.masked[i] ^ sk.mask[i];
      }
      return k;
   }

   static Bytes serialize_ciphertext(const Ciphertext& ct) { return Bytes(ct.masked.begin(), ct.masked.end()); }

   static Ciphertext parse_ciphertext(std::span<const std::uint8_t> b) {
      if(b.size() != 32) {
         throw FormatError("mock ciphertext must be 32 bytes");
      }
      Ciphertext ct;
      std::copy(b.begin(), b.end(), ct.masked.begin());
      return ct;
   }

   // a change to C1 that must alter the decapsulated secret
   static void tamper(Ciphertext& ct, Rng& rng) { ct.masked[rng.uniform_below(32)] ^= 0x01; }
};

static_assert(KeyEncapsulation<MockKem>);

struct RealKem : RingLweKem {
   static void tamper(Ciphertext& ct, Rng& rng) {
      const std::size_t pos = rng.uniform_below(degree);
      ct.v[pos] = reduce(static_cast<long long>(ct.v[pos]) + q / 2);
   }
};

template <typename T>
class HybridTest : public ::testing::Test {};

using Kems = ::testing::Types<RingLweKem, MockKem>;

struct KemName {
   template <typename T>
   static std::string GetName(int) {
      return std::is_same_v<T, RingLweKem> ? "RingLwe" : "Mock";
   }
};

TYPED_TEST_SUITE(HybridTest, Kems, KemName);

template <typename K>
void tamper(typename K::Ciphertext& ct, Rng& rng) {
   if constexpr(std::is_same_v<K, RingLweKem>) {
      RealKem::tamper(ct, rng);
   } else {
      K::tamper(ct, rng);
   }
}

const EncodingScheme default_scheme = EncodingScheme::map2(32, 256);

}  // namespace

TYPED_TEST(HybridTest, KeygenDelegatesAndIsDeterministic) {
   using K = TypeParam;
   Rng a(Bytes{1}), b(Bytes{1}), c(Bytes{2});
   const auto k1 = pke_keygen<K>(a);
   const auto k2 = pke_keygen<K>(b);
   const auto k3 = pke_keygen<K>(c);
   Rng probe(Bytes{3});
   const auto [secret, ct] = K::encaps(k1.pk, probe);
   EXPECT_EQ(K::decaps(k2.sk, ct), secret);
   EXPECT_NE(K::decaps(k3.sk, ct), secret);
}

TYPED_TEST(HybridTest, FiveHundredRoundtrips) {
   using K = TypeParam;
   Rng rng(Bytes{4});
   const auto kp = pke_keygen<K>(rng);
   for(int i = 0; i < 500; ++i) {
      const auto msg = Message::random(32, rng);
      const auto ct = pke_encrypt<K>(kp.pk, msg, default_scheme, rng);
      ASSERT_EQ(pke_decrypt<K>(kp.sk, ct), msg) << i;
      if(i % 50 == 0) {
         const auto bytes = serialize_hybrid_ciphertext<K>(ct);
         ASSERT_EQ(pke_decrypt<K>(kp.sk, parse_hybrid_ciphertext<K>(bytes)), msg);
      }
   }
}

TYPED_TEST(HybridTest, OtherConfigurations) {
   using K = TypeParam;
   Rng rng(Bytes{5});
   const auto kp = pke_keygen<K>(rng);
   HybridConfig gauss;
   gauss.distribution = ErrorDistribution::discrete_gaussian;
   gauss.sigma = 1.5;
   struct Case {
      EncodingScheme scheme;
      HybridConfig cfg;
   };
   for(const auto& c : {Case{EncodingScheme::map2(64, 512), {}}, Case{EncodingScheme::map2(16, 256), gauss},
                        Case{EncodingScheme::map1(EncodingKind::map1_haar, 8, 256), {}}}) {
      for(int i = 0; i < 50; ++i) {
         const auto msg = Message::random(c.scheme.message_bits(), rng);
         ASSERT_EQ(pke_decrypt<K>(kp.sk, pke_encrypt<K>(kp.pk, msg, c.scheme, rng, c.cfg), c.cfg), msg);
      }
   }
}

TYPED_TEST(HybridTest, EncryptionIsProbabilistic) {
   using K = TypeParam;
   Rng rng(Bytes{6});
   const auto kp = pke_keygen<K>(rng);
   const auto msg = Message::random(32, rng);
   const auto a = pke_encrypt<K>(kp.pk, msg, default_scheme, rng);
   const auto b = pke_encrypt<K>(kp.pk, msg, default_scheme, rng);
   EXPECT_NE(K::serialize_ciphertext(a.c1), K::serialize_ciphertext(b.c1));
   EXPECT_NE(a.c2.body, b.c2.body);
   EXPECT_NE(a.c2.nonce, b.c2.nonce);
}

TYPED_TEST(HybridTest, PinnedSecretGivesDeterministicC2) {
   using K = TypeParam;
   Rng rng(Bytes{7});
   const auto kp = pke_keygen<K>(rng);
   const auto [secret, c1] = K::encaps(kp.pk, rng);
   const auto msg = Message::random(32, rng);
   const auto x = pke_encrypt_with_secret<K>(secret, c1, msg, default_scheme);
   const auto y = pke_encrypt_with_secret<K>(secret, c1, msg, default_scheme);
   EXPECT_EQ(serialize_sym_ciphertext(x.c2), serialize_sym_ciphertext(y.c2));

   // C2 is exactly sym_encrypt under the XOF-derived seed and nonce
   const Bytes seed = xof_expand(secret, 32);
   Bytes nonce_in(secret.begin(), secret.end());
   nonce_in.push_back(0x01);
   const Bytes nonce = xof_expand(nonce_in, 16);
   ErrorKey key;
   std::copy(seed.begin(), seed.end(), key.seed.begin());
   key.params = ErrorParams::binomial(2, 0.5, 256);
   Nonce n{};
   std::copy(nonce.begin(), nonce.end(), n.begin());
   EXPECT_EQ(x.c2, sym_encrypt(key, msg, default_scheme, n));
}

TYPED_TEST(HybridTest, TamperedC1BreaksRecovery) {
   using K = TypeParam;
   Rng rng(Bytes{8});
   const auto kp = pke_keygen<K>(rng);
   int broken = 0;
   for(int i = 0; i < 100; ++i) {
      const auto msg = Message::random(32, rng);
      auto ct = pke_encrypt<K>(kp.pk, msg, default_scheme, rng);
      tamper<K>(ct.c1, rng);
      broken += pke_decrypt<K>(kp.sk, ct) != msg;
   }
   EXPECT_GE(broken, 99);
}

TYPED_TEST(HybridTest, WrongSecretKeyIsChance) {
   using K = TypeParam;
   Rng rng(Bytes{9});
   const auto kp = pke_keygen<K>(rng);
   const auto other = pke_keygen<K>(rng);
   double acc = 0;
   for(int i = 0; i < 100; ++i) {
      const auto msg = Message::random(32, rng);
      acc += bit_accuracy(pke_decrypt<K>(other.sk, pke_encrypt<K>(kp.pk, msg, default_scheme, rng)), msg);
   }
   EXPECT_GE(acc / 100, 0.4);
   EXPECT_LE(acc / 100, 0.6);
}

TYPED_TEST(HybridTest, FileFormat) {
   using K = TypeParam;
   Rng rng(Bytes{10});
   const auto kp = pke_keygen<K>(rng);
   const auto ct = pke_encrypt<K>(kp.pk, Message::random(32, rng), default_scheme, rng);
   const auto bytes = serialize_hybrid_ciphertext<K>(ct);
   const auto c1 = K::serialize_ciphertext(ct.c1);
   EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "IPH1");
   EXPECT_EQ(bytes[4], 0x01);
   ByteReader r(std::span<const std::uint8_t>(bytes).subspan(5));
   EXPECT_EQ(r.u32(), c1.size());
   EXPECT_TRUE(std::equal(c1.begin(), c1.end(), bytes.begin() + 9));
   const auto c2 = serialize_sym_ciphertext(ct.c2);
   EXPECT_EQ(bytes.size(), 9 + c1.size() + c2.size());
   EXPECT_TRUE(std::equal(c2.begin(), c2.end(), bytes.begin() + 9 + static_cast<std::ptrdiff_t>(c1.size())));

   auto bad = bytes;
   bad[5] ^= 1;
   EXPECT_THROW(parse_hybrid_ciphertext<K>(bad), FormatError);
   bad = bytes;
   bad.push_back(0);
   EXPECT_THROW(parse_hybrid_ciphertext<K>(bad), FormatError);
   bad = bytes;
   bad[0] = 'J';
   EXPECT_THROW(parse_hybrid_ciphertext<K>(bad), FormatError);
}

TEST(HybridConfig, Validation) {
   Rng rng(Bytes{11});
   const auto kp = pke_keygen<RingLweKem>(rng);
   EXPECT_THROW(pke_encrypt<RingLweKem>(kp.pk, Message::random(8, rng), EncodingScheme::map2(8, 32), rng), Error);
}

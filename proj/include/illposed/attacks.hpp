// SPDX-License-Identifier: Apache-2.0
#pragma once

// Key-less recovery experiments against the symmetric cipher: naive inversion,
// regularized inversion (Tikhonov, truncated SVD), error reuse and known plaintext.
// These measure behaviour empirically; they prove nothing about security.

#include <illposed/common.hpp>
#include <illposed/encoding.hpp>
#include <illposed/error_sampler.hpp>
#include <illposed/hso_operator.hpp>
#include <illposed/symmetric_scheme.hpp>
#include <illposed/xof.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace illposed {

struct NaiveInverse {};

struct Tikhonov {
   double alpha = 1.0;
};

struct Tsvd {
   std::size_t k = 1;
};

class RegularizationMethod {
public:
   using Variant = std::variant<NaiveInverse, Tikhonov, Tsvd>;

   template <typename M>
      requires std::is_constructible_v<Variant, M>
   RegularizationMethod(M method) : m_v(method) {  // NOLINT(google-explicit-constructor)
      if(auto* t = std::get_if<Tikhonov>(&m_v)) {
         detail::require(t->alpha > 0.0 && !std::isnan(t->alpha), "Tikhonov alpha must be positive");
      }
      if(auto* t = std::get_if<Tsvd>(&m_v)) {
         detail::require(t->k >= 1, "TSVD truncation level must be positive");
      }
   }

   /// "naive", "tsvd:K" or "tikhonov:ALPHA".
   static RegularizationMethod parse(std::string_view s) {
      if(s == "naive") {
         return NaiveInverse{};
      }
      const auto colon = s.find(':');
      if(colon != std::string_view::npos) {
         const auto name = s.substr(0, colon);
         const std::string arg(s.substr(colon + 1));
         try {
            std::size_t used = 0;
            if(name == "tsvd") {
               const long long k = std::stoll(arg, &used);
               if(used == arg.size() && k >= 1) {
                  return Tsvd{static_cast<std::size_t>(k)};
               }
            } else if(name == "tikhonov") {
               const double a = std::stod(arg, &used);
               if(used == arg.size()) {
                  return Tikhonov{a};
               }
            }
         } catch(const std::logic_error&) {
         }
      }
      throw Error("unknown attack method \"" + std::string(s) + "\" (naive | tsvd:K | tikhonov:ALPHA)");
   }

   const Variant& variant() const { return m_v; }

   std::string describe() const {
      if(std::holds_alternative<NaiveInverse>(m_v)) {
         return "naive";
      }
      if(auto* t = std::get_if<Tsvd>(&m_v)) {
         return "tsvd:" + std::to_string(t->k);
      }
      std::ostringstream os;
      os.precision(17);
      os << "tikhonov:" << std::get<Tikhonov>(m_v).alpha;
      return os.str();
   }

   /// Reconstruction of psi from data by filtering the singular expansion.
   GridFunction invert(const SvdFactors& f, const GridFunction& data) const {
      if(auto* t = std::get_if<Tsvd>(&m_v)) {
         detail::require(t->k <= f.size(), "TSVD truncation level exceeds grid size");
         return naive_inverse_apply(f, data, t->k);
      }
      if(auto* t = std::get_if<Tikhonov>(&m_v)) {
         const double alpha = t->alpha;
         return spectral_filter_apply(f, data, [alpha](double s, std::size_t) { return s / (s * s + alpha); });
      }
      return naive_inverse_apply(f, data);
   }

private:
   Variant m_v;
};

struct AttackReport {
   Message recovered = Message(std::vector<std::uint8_t>{0});
   std::optional<double> bit_accuracy;   // against the true message, when supplied
   std::optional<double> residual_norm;  // ||reconstruction - encode(truth)||, when truth supplied
   double data_misfit = 0.0;             // ||S(reconstruction) - C||
   std::string method;
};

inline AttackReport attack_regularized(const SymCiphertext& ct, const SvdFactors& f,
                                       const RegularizationMethod& method,
                                       const std::optional<Message>& truth = std::nullopt) {
   detail::check_header(ct);
   detail::require_dims(f.size(), ct.n, "attack");
   const auto scheme = ct.scheme();
   const GridFunction recon = method.invert(f, ct.body);

   AttackReport rep;
   rep.method = method.describe();
   rep.recovered = decode(recon, scheme);
   const auto sys = hso_system(ct.n);
   rep.data_misfit = norm(apply(sys->op, recon) - ct.body);
   if(truth) {
      rep.bit_accuracy = bit_accuracy(rep.recovered, *truth);
      rep.residual_norm = norm(recon - encode(*truth, scheme));
   }
   return rep;
}

/// Ciphertext-only attack: invert without the key and decode.
inline AttackReport attack_naive(const SymCiphertext& ct, const SvdFactors& f,
                                 const std::optional<Message>& truth = std::nullopt) {
   return attack_regularized(ct, f, NaiveInverse{}, truth);
}

/// C1 - C2. Under a reused error this is exactly S(encode(m1) - encode(m2)).
inline GridFunction error_reuse_diff(const SymCiphertext& ct1, const SymCiphertext& ct2) {
   detail::require_dims(ct1.body.size(), ct2.body.size(), "error_reuse_diff");
   return ct1.body - ct2.body;
}

/// Per-interval mean of a Map2 difference function rounded to {-1, 0, 1}.
inline std::vector<int> decode_map2_difference(const GridFunction& u, const EncodingScheme& scheme) {
   detail::require(!scheme.is_map1(), "difference decoding needs a Map2 scheme");
   detail::require_dims(u.size(), scheme.grid_size(), "decode_map2_difference");
   const std::size_t t = scheme.message_bits();
   const std::size_t cells = u.size() / t;
   std::vector<int> out(t);
   for(std::size_t j = 0; j < t; ++j) {
      double sum = 0.0;
      for(std::size_t c = 0; c < cells; ++c) {
         sum += u[j * cells + c];
      }
      const double mean = sum / static_cast<double>(cells);
      out[j] = mean >= 0.5 ? 1 : (mean <= -0.5 ? -1 : 0);
   }
   return out;
}

inline std::vector<int> bit_difference(const Message& a, const Message& b) {
   detail::require_dims(a.size(), b.size(), "bit_difference");
   std::vector<int> out(a.size());
   for(std::size_t i = 0; i < a.size(); ++i) {
      out[i] = static_cast<int>(a[i]) - static_cast<int>(b[i]);
   }
   return out;
}

struct KnownPlaintextReport {
   std::size_t queries = 0;
   bool errors_pairwise_distinct = true;
   double min_pairwise_distance = 0.0;  // grid norm between recovered errors
   std::size_t heldout_trials = 0;
   double heldout_mean_accuracy = 0.0;  // decrypting fresh ciphertexts with the first leaked error
   std::vector<GridFunction> recovered_errors;
};

/// Encrypts each query under a fresh nonce, recovers E_k = C_k - S(encode(m_k)) and checks
/// whether the first leaked error helps on fresh (message, nonce) pairs.
inline KnownPlaintextReport known_plaintext_experiment(const ErrorKey& key, const std::vector<Message>& queries,
                                                       const EncodingScheme& scheme, Rng& rng,
                                                       std::size_t heldout_trials = 100) {
   KnownPlaintextReport rep;
   rep.queries = queries.size();
   if(queries.empty()) {
      return rep;
   }
   const auto sys = hso_system(scheme.grid_size());
   for(const auto& q : queries) {
      const auto ct = sym_encrypt(key, q, scheme, rng.bytes<16>());
      rep.recovered_errors.push_back(ct.body - apply(sys->op, encode(q, scheme)));
   }
   rep.min_pairwise_distance = std::numeric_limits<double>::infinity();
   for(std::size_t i = 0; i < rep.recovered_errors.size(); ++i) {
      for(std::size_t j = 0; j < i; ++j) {
         const double d = norm(rep.recovered_errors[i] - rep.recovered_errors[j]);
         rep.min_pairwise_distance = std::min(rep.min_pairwise_distance, d);
         if(d == 0.0) {
            rep.errors_pairwise_distinct = false;
         }
      }
   }
   if(rep.recovered_errors.size() < 2) {
      rep.min_pairwise_distance = 0.0;
   }
   rep.heldout_trials = heldout_trials;
   double acc = 0.0;
   for(std::size_t i = 0; i < heldout_trials; ++i) {
      const Message fresh = Message::random(scheme.message_bits(), rng);
      const auto ct = sym_encrypt(key, fresh, scheme, rng.bytes<16>());
      acc += bit_accuracy(sym_decrypt_with_error(ct, rep.recovered_errors.front()), fresh);
   }
   if(heldout_trials > 0) {
      rep.heldout_mean_accuracy = acc / static_cast<double>(heldout_trials);
   }
   return rep;
}

struct SweepConfig {
   std::size_t n = 256;
   std::size_t t = 8;
   unsigned eta = 2;
   std::vector<std::size_t> truncation_levels{4, 8, 16, 32, 64, 128, 256};
   std::vector<double> scales{0.01, 0.1, 0.5};
   std::size_t trials = 200;
};

/// accuracy[i][j]: mean bit accuracy of TSVD at truncation_levels[i] and scales[j].
struct SweepTable {
   SweepConfig config;
   std::vector<std::vector<double>> accuracy;
};

/// TSVD accuracy over a (truncation, noise scale) grid. Each trial fixes its message, key seed
/// and nonce across all scales, so the scales differ only in the magnitude of the same error.
inline SweepTable regularization_sweep(const SweepConfig& cfg, std::span<const std::uint8_t> seed) {
   const auto scheme = EncodingScheme::map2(cfg.t, cfg.n);
   const auto sys = hso_system(cfg.n);
   const Rng base("illposed.sweep", seed);
   SweepTable table;
   table.config = cfg;
   table.accuracy.assign(cfg.truncation_levels.size(), std::vector<double>(cfg.scales.size(), 0.0));
   for(std::size_t trial = 0; trial < cfg.trials; ++trial) {
      Rng rng = base.derive("trial", trial);
      const Message msg = Message::random(cfg.t, rng);
      const ErrorSeed key_seed = rng.bytes<32>();
      const Nonce nonce = rng.bytes<16>();
      for(std::size_t j = 0; j < cfg.scales.size(); ++j) {
         const ErrorKey key{key_seed, ErrorParams::binomial(cfg.eta, cfg.scales[j], cfg.n)};
         const auto ct = sym_encrypt(key, msg, scheme, nonce);
         for(std::size_t i = 0; i < cfg.truncation_levels.size(); ++i) {
            const auto rep = attack_regularized(ct, sys->factors, Tsvd{cfg.truncation_levels[i]}, msg);
            table.accuracy[i][j] += *rep.bit_accuracy;
         }
      }
   }
   for(auto& row : table.accuracy) {
      for(auto& a : row) {
         a /= static_cast<double>(cfg.trials);
      }
   }
   return table;
}

}  // namespace illposed

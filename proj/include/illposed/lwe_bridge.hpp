// SPDX-License-Identifier: Apache-2.0
#pragma once

// Matrix-form LWE b = A s + e (mod q), an exhaustive solver that doubles as a
// verification oracle at toy sizes, and the LWE / integral-operator comparison report.

#include <illposed/common.hpp>
#include <illposed/hso_operator.hpp>
#include <illposed/xof.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace illposed {

enum class LweErrorShape { uniform, centered_binomial };

struct LweParams {
   std::uint32_t q = 17;
   std::size_t m = 3;   // secret dimension (row length of A)
   std::size_t n = 12;  // number of samples
   std::uint32_t error_bound = 1;
   LweErrorShape shape = LweErrorShape::uniform;
};

inline bool is_prime(std::uint64_t q) {
   if(q < 2) {
      return false;
   }
   for(std::uint64_t d = 2; d * d <= q; ++d) {
      if(q % d == 0) {
         return false;
      }
   }
   return true;
}

inline void validate(const LweParams& p) {
   detail::require(is_prime(p.q), "LWE modulus " + std::to_string(p.q) + " is not prime");
   detail::require(p.m >= 1 && p.n >= p.m, "LWE needs n >= m >= 1");
   detail::require(4ULL * p.error_bound < p.q, "LWE error bound must be below q/4");
}

/// Representative in (-q/2, q/2].
inline std::int64_t centered_mod(std::int64_t x, std::uint32_t q) {
   std::int64_t r = x % static_cast<std::int64_t>(q);
   if(r < 0) {
      r += q;
   }
   return 2 * r > static_cast<std::int64_t>(q) ? r - q : r;
}

struct LweInstance {
   LweParams params;
   std::vector<std::vector<std::uint32_t>> a;  // n rows of length m
   std::vector<std::uint32_t> b;
   std::vector<std::uint32_t> s;  // hidden witness
   std::vector<std::int64_t> e;   // hidden witness, centered
};

inline std::vector<std::uint32_t> lwe_multiply(const std::vector<std::vector<std::uint32_t>>& a,
                                               const std::vector<std::uint32_t>& s, std::uint32_t q) {
   std::vector<std::uint32_t> out(a.size());
   for(std::size_t j = 0; j < a.size(); ++j) {
      detail::require_dims(a[j].size(), s.size(), "lwe_multiply");
      std::uint64_t acc = 0;
      for(std::size_t i = 0; i < s.size(); ++i) {
         acc = (acc + static_cast<std::uint64_t>(a[j][i]) * s[i]) % q;
      }
      out[j] = static_cast<std::uint32_t>(acc);
   }
   return out;
}

/// Instance from explicit parts; b is computed, e is stored centered.
inline LweInstance lwe_instance(const LweParams& params, std::vector<std::vector<std::uint32_t>> a,
                                std::vector<std::uint32_t> s, std::vector<std::int64_t> e) {
   validate(params);
   detail::require_dims(a.size(), params.n, "lwe_instance (rows)");
   detail::require_dims(s.size(), params.m, "lwe_instance (secret)");
   detail::require_dims(e.size(), params.n, "lwe_instance (error)");
   LweInstance inst{params, std::move(a), {}, std::move(s), {}};
   inst.b = lwe_multiply(inst.a, inst.s, params.q);
   for(std::size_t j = 0; j < params.n; ++j) {
      inst.e.push_back(centered_mod(e[j], params.q));
      inst.b[j] = static_cast<std::uint32_t>((static_cast<std::int64_t>(inst.b[j]) + inst.e[j] + params.q) % params.q);
   }
   return inst;
}

inline LweInstance lwe_gen(const LweParams& params, Rng& rng) {
   validate(params);
   std::vector<std::vector<std::uint32_t>> a(params.n, std::vector<std::uint32_t>(params.m));
   for(auto& row : a) {
      for(auto& x : row) {
         x = static_cast<std::uint32_t>(rng.uniform_below(params.q));
      }
   }
   std::vector<std::uint32_t> s(params.m);
   for(auto& x : s) {
      x = static_cast<std::uint32_t>(rng.uniform_below(params.q));
   }
   std::vector<std::int64_t> e(params.n);
   for(auto& x : e) {
      if(params.shape == LweErrorShape::uniform) {
         x = static_cast<std::int64_t>(rng.uniform_below(2ULL * params.error_bound + 1)) - params.error_bound;
      } else {
         std::int64_t acc = 0;
         for(std::uint32_t i = 0; i < params.error_bound; ++i) {
            acc += static_cast<std::int64_t>(rng() & 1U) - static_cast<std::int64_t>(rng() & 1U);
         }
         x = acc;
      }
   }
   return lwe_instance(params, std::move(a), std::move(s), std::move(e));
}

/// Rank of A over the prime field Z_q.
inline std::size_t rank_mod_q(std::vector<std::vector<std::uint32_t>> a, std::uint32_t q) {
   auto pow_mod = [q](std::uint64_t base, std::uint64_t exp) {
      std::uint64_t r = 1;
      base %= q;
      while(exp > 0) {
         if(exp & 1U) {
            r = r * base % q;
         }
         base = base * base % q;
         exp >>= 1;
      }
      return r;
   };
   std::size_t rank = 0;
   const std::size_t cols = a.empty() ? 0 : a.front().size();
   for(std::size_t c = 0; c < cols && rank < a.size(); ++c) {
      std::size_t pivot = rank;
      while(pivot < a.size() && a[pivot][c] == 0) {
         ++pivot;
      }
      if(pivot == a.size()) {
         continue;
      }
      std::swap(a[pivot], a[rank]);
      const std::uint64_t inv = pow_mod(a[rank][c], q - 2);
      for(std::size_t r = 0; r < a.size(); ++r) {
         if(r == rank || a[r][c] == 0) {
            continue;
         }
         const std::uint64_t f = a[r][c] * inv % q;
         for(std::size_t k = c; k < cols; ++k) {
            a[r][k] = static_cast<std::uint32_t>((a[r][k] + q - f * a[rank][k] % q) % q);
         }
      }
      ++rank;
   }
   return rank;
}

inline constexpr std::uint64_t brute_force_limit = 10'000'000;

/// Every s' in Z_q^m whose centered residues b - A s' all lie within [-error_bound, error_bound].
inline std::vector<std::vector<std::uint32_t>> lwe_brute_force(const std::vector<std::vector<std::uint32_t>>& a,
                                                               const std::vector<std::uint32_t>& b,
                                                               std::uint32_t q, std::uint32_t error_bound) {
   detail::require_dims(a.size(), b.size(), "lwe_brute_force");
   detail::require(!a.empty(), "lwe_brute_force: no samples");
   const std::size_t m = a.front().size();
   std::uint64_t space = 1;
   for(std::size_t i = 0; i < m; ++i) {
      space *= q;
      if(space > brute_force_limit) {
         throw Error("lwe_brute_force: q^m exceeds " + std::to_string(brute_force_limit) +
                     " candidates; choose a smaller modulus or dimension");
      }
   }
   std::vector<std::vector<std::uint32_t>> out;
   std::vector<std::uint32_t> cand(m, 0);
   for(std::uint64_t idx = 0; idx < space; ++idx) {
      std::uint64_t x = idx;
      for(std::size_t i = 0; i < m; ++i) {
         cand[m - 1 - i] = static_cast<std::uint32_t>(x % q);
         x /= q;
      }
      bool ok = true;
      for(std::size_t j = 0; j < a.size() && ok; ++j) {
         std::int64_t acc = 0;
         for(std::size_t i = 0; i < m; ++i) {
            acc = (acc + static_cast<std::int64_t>(a[j][i]) * cand[i]) % q;
         }
         ok = std::abs(centered_mod(static_cast<std::int64_t>(b[j]) - acc, q)) <= error_bound;
      }
      if(ok) {
         out.push_back(cand);
      }
   }
   return out;
}

struct LweTrialRow {
   std::size_t trial = 0;
   std::size_t candidates = 0;
   bool unique = false;
   bool recovered = false;  // candidate set is exactly {s}
   bool witness_contained = false;
};

/// Independent instances from per-trial sub-streams of the seed.
inline std::vector<LweTrialRow> lwe_demo(const LweParams& params, std::size_t trials,
                                         std::span<const std::uint8_t> seed) {
   const Rng base("illposed.lwe", seed);
   std::vector<LweTrialRow> rows;
   for(std::size_t t = 0; t < trials; ++t) {
      Rng rng = base.derive("trial", t);
      const auto inst = lwe_gen(params, rng);
      const auto cands = lwe_brute_force(inst.a, inst.b, params.q, params.error_bound);
      LweTrialRow row;
      row.trial = t;
      row.candidates = cands.size();
      row.unique = cands.size() == 1;
      row.witness_contained = std::find(cands.begin(), cands.end(), inst.s) != cands.end();
      row.recovered = row.unique && row.witness_contained;
      rows.push_back(row);
   }
   return rows;
}

struct OperatorSummary {
   DecayClassification decay;
   AmplificationReport amplification;
};

/// Four-row correspondence between an LWE instance family and the discretized integral operator,
/// filled with measured values. Missing operator data is marked rather than omitted.
struct AnalogyReport {
   std::uint32_t q = 0;
   std::uint64_t m = 0;
   std::uint64_t n = 0;
   std::uint32_t error_bound = 0;
   std::uint64_t trials = 0;
   std::uint64_t unique_trials = 0;
   double mean_candidates = 0.0;
   bool witness_always_contained = true;

   bool has_operator = false;
   std::uint64_t grid_n = 0;
   std::string decay_kind;
   double decay_exponent = 0.0;
   double decay_rate = 0.0;
   double fit_quality = 0.0;
   std::uint64_t fit_from = 0;
   std::uint64_t fit_to = 0;
   double amplification_factor = 0.0;
   double noise_norm = 0.0;
   std::uint64_t amplification_trials = 0;

   struct Row {
      std::string label;
      std::string lwe;
      std::string op;
      bool operator==(const Row&) const = default;
   };

   std::vector<Row> rows() const {
      auto g = [](double v) {
         char buf[32];
         std::snprintf(buf, sizeof buf, "%.4g", v);
         return std::string(buf);
      };
      const std::string missing = "missing";
      const std::string status = unique_trials == trials ? "unique recovery in every trial"
                                                         : std::to_string(unique_trials) + "/" +
                                                              std::to_string(trials) + " trials unique";
      std::vector<Row> r;
      r.push_back({"Dimension",
                   "finite: Z_" + std::to_string(q) + "^" + std::to_string(m) + ", " + std::to_string(n) +
                      " samples",
                   has_operator ? "L2[0,1] discretized on " + std::to_string(grid_n) + " midpoints" : missing});
      r.push_back({"Data", "b = A s + e (mod q), |e_j| <= " + std::to_string(error_bound),
                   has_operator ? "Phi = S(Psi) + E, Gaussian E of mean norm " + g(noise_norm) : missing});
      r.push_back({"Solution",
                   "exhaustive search: " + status + ", mean candidate set " + g(mean_candidates),
                   has_operator ? "naive inverse amplifies noise by " + g(amplification_factor) + " on average" +
                                     " over " + std::to_string(amplification_trials) + " trials"
                                : missing});
      r.push_back({"Noise", "discrete, deliberate mask bounded by " + std::to_string(error_bound),
                   has_operator ? decay_kind + " decay, exponent " + g(decay_exponent) + ", rate " +
                                     g(decay_rate) + " (R^2 " + g(fit_quality) + ", k=" +
                                     std::to_string(fit_from) + ".." + std::to_string(fit_to) + ")"
                                : missing});
      return r;
   }

   std::string to_text() const {
      std::ostringstream os;
      os << "Parameter | LWE problem | Inverse problem for the integral operator\n";
      os << "----------+-------------+------------------------------------------\n";
      for(const auto& row : rows()) {
         os << row.label << " | " << row.lwe << " | " << row.op << "\n";
      }
      return os.str();
   }

   std::map<std::string, std::string> to_map() const {
      auto num = [](double v) {
         char buf[40];
         std::snprintf(buf, sizeof buf, "%.17g", v);
         return std::string(buf);
      };
      std::map<std::string, std::string> kv{
         {"lwe.q", std::to_string(q)},
         {"lwe.m", std::to_string(m)},
         {"lwe.n", std::to_string(n)},
         {"lwe.error_bound", std::to_string(error_bound)},
         {"lwe.trials", std::to_string(trials)},
         {"lwe.unique_trials", std::to_string(unique_trials)},
         {"lwe.mean_candidates", num(mean_candidates)},
         {"lwe.witness_always_contained", witness_always_contained ? "1" : "0"},
         {"op.present", has_operator ? "1" : "0"},
      };
      if(has_operator) {
         kv["op.n"] = std::to_string(grid_n);
         kv["op.decay.kind"] = decay_kind;
         kv["op.decay.exponent"] = num(decay_exponent);
         kv["op.decay.rate"] = num(decay_rate);
         kv["op.decay.fit_quality"] = num(fit_quality);
         kv["op.decay.from"] = std::to_string(fit_from);
         kv["op.decay.to"] = std::to_string(fit_to);
         kv["op.amp.factor"] = num(amplification_factor);
         kv["op.amp.noise_norm"] = num(noise_norm);
         kv["op.amp.trials"] = std::to_string(amplification_trials);
      }
      const auto r = rows();
      for(std::size_t i = 0; i < r.size(); ++i) {
         const std::string p = "row." + std::to_string(i + 1) + ".";
         kv[p + "label"] = r[i].label;
         kv[p + "lwe"] = r[i].lwe;
         kv[p + "operator"] = r[i].op;
      }
      return kv;
   }

   std::string to_kv() const {
      std::string out;
      for(const auto& [k, v] : to_map()) {
         out += k + "=" + v + "\n";
      }
      return out;
   }

   /// Inverse of to_kv; row.* lines are derived data and are ignored on input.
   static AnalogyReport from_kv(std::string_view text) {
      std::map<std::string, std::string> kv;
      std::istringstream is{std::string(text)};
      std::string line;
      while(std::getline(is, line)) {
         if(line.empty() || line.front() == '#') {
            continue;
         }
         const auto eq = line.find('=');
         if(eq == std::string::npos) {
            throw FormatError("analogy report line without '=': " + line);
         }
         kv[line.substr(0, eq)] = line.substr(eq + 1);
      }
      auto get = [&kv](const std::string& k) -> const std::string& {
         auto it = kv.find(k);
         if(it == kv.end()) {
            throw FormatError("analogy report lacks key " + k);
         }
         return it->second;
      };
      auto u64 = [&](const std::string& k) { return static_cast<std::uint64_t>(std::stoull(get(k))); };
      auto f64 = [&](const std::string& k) { return std::strtod(get(k).c_str(), nullptr); };
      AnalogyReport r;
      r.q = static_cast<std::uint32_t>(u64("lwe.q"));
      r.m = u64("lwe.m");
      r.n = u64("lwe.n");
      r.error_bound = static_cast<std::uint32_t>(u64("lwe.error_bound"));
      r.trials = u64("lwe.trials");
      r.unique_trials = u64("lwe.unique_trials");
      r.mean_candidates = f64("lwe.mean_candidates");
      r.witness_always_contained = get("lwe.witness_always_contained") == "1";
      r.has_operator = get("op.present") == "1";
      if(r.has_operator) {
         r.grid_n = u64("op.n");
         r.decay_kind = get("op.decay.kind");
         r.decay_exponent = f64("op.decay.exponent");
         r.decay_rate = f64("op.decay.rate");
         r.fit_quality = f64("op.decay.fit_quality");
         r.fit_from = u64("op.decay.from");
         r.fit_to = u64("op.decay.to");
         r.amplification_factor = f64("op.amp.factor");
         r.noise_norm = f64("op.amp.noise_norm");
         r.amplification_trials = u64("op.amp.trials");
      }
      return r;
   }

   bool operator==(const AnalogyReport&) const = default;
};

inline AnalogyReport analogy_report(const LweParams& lwe, const std::vector<LweTrialRow>& lwe_trials,
                                    const std::optional<OperatorSummary>& op) {
   AnalogyReport r;
   r.q = lwe.q;
   r.m = lwe.m;
   r.n = lwe.n;
   r.error_bound = lwe.error_bound;
   r.trials = lwe_trials.size();
   double cand = 0.0;
   for(const auto& row : lwe_trials) {
      r.unique_trials += row.unique;
      cand += static_cast<double>(row.candidates);
      r.witness_always_contained = r.witness_always_contained && row.witness_contained;
   }
   r.mean_candidates = lwe_trials.empty() ? 0.0 : cand / static_cast<double>(lwe_trials.size());
   if(op) {
      r.has_operator = true;
      r.grid_n = op->amplification.n;
      r.decay_kind = to_string(op->decay.kind);
      r.decay_exponent = op->decay.decay_exponent;
      r.decay_rate = op->decay.decay_rate;
      r.fit_quality = op->decay.fit_quality;
      r.fit_from = op->decay.fit_range.first;
      r.fit_to = op->decay.fit_range.second;
      r.amplification_factor = op->amplification.amplification_factor;
      r.noise_norm = op->amplification.noise_norm;
      r.amplification_trials = op->amplification.trials_with_noise;
   }
   return r;
}

}  // namespace illposed

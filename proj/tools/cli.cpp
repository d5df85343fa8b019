// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <illposed/illposed.hpp>

#if __has_include(<CLI11.hpp>)
   #include <CLI11.hpp>
#else
   #include <CLI/CLI.hpp>
#endif

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

namespace illposed::cli {

namespace {

Bytes read_file(const std::string& path) {
   std::ifstream in(path, std::ios::binary);
   if(!in) {
      throw Error("cannot open " + path);
   }
   return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
   std::ofstream o(path, std::ios::binary | std::ios::trunc);
   if(!o) {
      throw Error("cannot write " + path);
   }
   o.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
   if(!o) {
      throw Error("write failed for " + path);
   }
}

void write_text(const std::string& path, const std::string& text) {
   write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

/// Text output goes to the --out file when given, else to stdout.
void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
   if(out_path.empty()) {
      out << text;
   } else {
      write_text(out_path, text);
   }
}

std::string num(double v) {
   char buf[40];
   std::snprintf(buf, sizeof buf, "%.17g", v);
   return buf;
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_hex(const std::string& hex, const char* what) {
   const Bytes b = from_hex(hex);
   if(b.size() != N) {
      throw Error(std::string(what) + " must be " + std::to_string(N) + " bytes (" + std::to_string(2 * N) +
                  " hex digits)");
   }
   std::array<std::uint8_t, N> out{};
   std::copy(b.begin(), b.end(), out.begin());
   return out;
}

/// Master seed; without --seed, key generation falls back to OS entropy.
Bytes seed_bytes(const std::string& hex, bool allow_entropy) {
   if(hex.empty()) {
      if(!allow_entropy) {
         throw Error("--seed is required");
      }
      return os_entropy(32);
   }
   return from_hex(hex);
}

std::vector<double> read_spectrum_csv(const std::string& path) {
   std::ifstream in(path);
   if(!in) {
      throw Error("cannot open " + path);
   }
   std::vector<double> values;
   std::string line;
   while(std::getline(in, line)) {
      if(line.empty() || line.front() == '#' || line.starts_with("k,")) {
         continue;
      }
      const auto comma = line.find(',');
      if(comma == std::string::npos) {
         throw FormatError("spectrum CSV line without a comma: " + line);
      }
      const std::size_t k = std::stoull(line.substr(0, comma));
      if(k != values.size() + 1) {
         throw FormatError("spectrum CSV rows must list k = 1, 2, ... in order");
      }
      values.push_back(std::stod(line.substr(comma + 1)));
   }
   return values;
}

struct Options {
   std::string seed;
   std::string out;
   std::size_t n = 256;
   std::size_t t = 0;
   std::string encoding = "map2";
   std::string msg;
   std::string key_path;
   std::string in_path;
   std::string nonce;
   std::string dist = "binomial";
   unsigned eta = 2;
   double sigma = 1.0;
   double scale = 0.5;
   std::size_t trials = 100;
   std::string method = "naive";
   std::string csv;
   std::size_t from = 5;
   std::size_t to = 50;
   std::uint32_t q = 17;
   std::size_t lwe_m = 3;
   std::size_t lwe_n = 12;
   std::uint32_t ebound = 1;
   std::size_t amp_trials = 100;
   double amp_sigma = 1e-3;
   bool no_operator = false;
   std::string pk_path;
   std::string sk_path;
   std::string out_pk;
   std::string out_sk;
};

ErrorParams error_params(const Options& o) {
   ErrorParams p;
   if(o.dist == "binomial") {
      p = ErrorParams::binomial(o.eta, o.scale, o.n);
   } else if(o.dist == "gaussian") {
      p = ErrorParams::gaussian(o.sigma, o.scale, o.n);
   } else {
      throw Error("unknown distribution \"" + o.dist + "\" (binomial | gaussian)");
   }
   validate(p);
   return p;
}

Message parse_message(const Options& o) {
   return Message::from_hex(o.msg, o.t);
}

EncodingScheme scheme_for(const Options& o, std::size_t t) {
   return EncodingScheme(encoding_kind_from_string(o.encoding), t, o.n);
}

int cmd_spectrum(const Options& o, std::ostream& out) {
   const auto sys = hso_system(o.n);
   std::string text = "k,s_k\n";
   for(std::size_t k = 1; k <= sys->factors.size(); ++k) {
      text += std::to_string(k) + "," + num(sys->factors.singular_values(static_cast<Eigen::Index>(k - 1))) + "\n";
   }
   emit(o.out, text, out);
   return 0;
}

int cmd_classify(const Options& o, std::ostream& out) {
   const auto values = read_spectrum_csv(o.csv);
   const auto c = classify_decay(values, {o.from, o.to});
   std::string text;
   text += "kind=" + std::string(to_string(c.kind)) + "\n";
   text += "decay_exponent=" + num(c.decay_exponent) + "\n";
   text += "decay_rate=" + num(c.decay_rate) + "\n";
   text += "fit_quality=" + num(c.fit_quality) + "\n";
   text += "mild_r2=" + num(c.mild_r2) + "\n";
   text += "severe_r2=" + num(c.severe_r2) + "\n";
   text += "low_confidence=" + std::string(c.low_confidence ? "1" : "0") + "\n";
   text += "fit_from=" + std::to_string(c.fit_range.first) + "\n";
   text += "fit_to=" + std::to_string(c.fit_range.second) + "\n";
   emit(o.out, text, out);
   return 0;
}

int cmd_amplify(const Options& o, std::ostream& out) {
   const Bytes seed = seed_bytes(o.seed.empty() ? "00" : o.seed, false);
   const auto sys = hso_system(o.n);
   const auto rep =
      noise_amplification_experiment(sys->op, sys->factors, GridFunction::constant(o.n, 1.0), o.sigma, o.trials, seed);
   std::string text;
   text += "seed=" + to_hex(seed) + "\n";
   text += "n=" + std::to_string(rep.n) + "\n";
   text += "sigma=" + num(o.sigma) + "\n";
   text += "trials=" + std::to_string(rep.trials) + "\n";
   text += "trials_with_noise=" + std::to_string(rep.trials_with_noise) + "\n";
   text += "noise_norm=" + num(rep.noise_norm) + "\n";
   text += "naive_error_norm=" + num(rep.naive_error_norm) + "\n";
   text += "naive_error_norm_max=" + num(rep.naive_error_norm_max) + "\n";
   text += "amplification_factor=" + num(rep.amplification_factor) + "\n";
   text += "amplification_max=" + num(rep.amplification_max) + "\n";
   text += "amplification_min=" + num(rep.amplification_min) + "\n";
   text += "inverse_smallest_singular_value=" + num(1.0 / sys->factors.singular_values(sys->factors.singular_values.size() - 1)) + "\n";
   emit(o.out, text, out);
   return 0;
}

int cmd_encode(const Options& o, std::ostream& out) {
   const Message msg = parse_message(o);
   const auto u = encode(msg, scheme_for(o, msg.size()));
   std::string text = "i,y,value\n";
   for(std::size_t i = 0; i < u.size(); ++i) {
      text += std::to_string(i) + "," + num(GridFunction::midpoint(i, u.size())) + "," + num(u[i]) + "\n";
   }
   emit(o.out, text, out);
   return 0;
}

int cmd_keygen_sym(const Options& o) {
   detail::require(!o.out.empty(), "keygen-sym needs --out");
   Rng rng("illposed.cli.keygen-sym", seed_bytes(o.seed, true));
   write_file(o.out, serialize_error_key(sym_keygen(error_params(o), rng)));
   return 0;
}

int cmd_encrypt_sym(const Options& o) {
   detail::require(!o.out.empty(), "encrypt-sym needs --out");
   const ErrorKey key = parse_error_key(read_file(o.key_path));
   const Message msg = parse_message(o);
   Options so = o;
   so.n = key.params.n;
   const auto ct = sym_encrypt(key, msg, scheme_for(so, msg.size()), fixed_hex<16>(o.nonce, "--nonce"));
   write_file(o.out, serialize_sym_ciphertext(ct));
   return 0;
}

int cmd_decrypt_sym(const Options& o, std::ostream& out) {
   const ErrorKey key = parse_error_key(read_file(o.key_path));
   const auto ct = parse_sym_ciphertext(read_file(o.in_path));
   emit(o.out, sym_decrypt(key, ct).to_hex() + "\n", out);
   return 0;
}

int cmd_attack(const Options& o, std::ostream& out) {
   const Bytes seed = seed_bytes(o.seed.empty() ? "00" : o.seed, false);
   const auto method = RegularizationMethod::parse(o.method);
   const std::size_t t = o.t == 0 ? 32 : o.t;
   const auto scheme = scheme_for(o, t);
   const auto params = error_params(o);
   const auto sys = hso_system(o.n);
   const Rng base("illposed.cli.attack", seed);

   std::string text = "# seed=" + to_hex(seed) + " n=" + std::to_string(o.n) + " t=" + std::to_string(t) +
                      " encoding=" + to_string(scheme.kind()) + " dist=" + o.dist + " scale=" + num(o.scale) + "\n";
   text += "trial,method,bit_accuracy,residual\n";
   double sum = 0.0;
   for(std::size_t i = 0; i < o.trials; ++i) {
      Rng rng = base.derive("trial", i);
      const ErrorKey key = sym_keygen(params, rng);
      const Message msg = Message::random(t, rng);
      const auto ct = sym_encrypt(key, msg, scheme, rng.bytes<16>());
      const auto rep = attack_regularized(ct, sys->factors, method, msg);
      sum += *rep.bit_accuracy;
      text += std::to_string(i) + "," + rep.method + "," + num(*rep.bit_accuracy) + "," + num(*rep.residual_norm) + "\n";
   }
   if(o.trials > 0) {
      text += "# mean_bit_accuracy=" + num(sum / static_cast<double>(o.trials)) + "\n";
   }
   emit(o.out, text, out);
   return 0;
}

LweParams lwe_params(const Options& o) {
   LweParams p;
   p.q = o.q;
   p.m = o.lwe_m;
   p.n = o.lwe_n;
   p.error_bound = o.ebound;
   validate(p);
   return p;
}

int cmd_lwe_demo(const Options& o, std::ostream& out) {
   const Bytes seed = seed_bytes(o.seed.empty() ? "00" : o.seed, false);
   const auto params = lwe_params(o);
   std::string text = "# seed=" + to_hex(seed) + " q=" + std::to_string(params.q) + " m=" + std::to_string(params.m) +
                      " n=" + std::to_string(params.n) + " ebound=" + std::to_string(params.error_bound) + "\n";
   text += "trial,candidates,unique,recovered\n";
   for(const auto& row : lwe_demo(params, o.trials, seed)) {
      text += std::to_string(row.trial) + "," + std::to_string(row.candidates) + "," + (row.unique ? "1" : "0") +
              "," + (row.recovered ? "1" : "0") + "\n";
   }
   emit(o.out, text, out);
   return 0;
}

int cmd_analogy(const Options& o, std::ostream& out) {
   const Bytes seed = seed_bytes(o.seed.empty() ? "00" : o.seed, false);
   const auto params = lwe_params(o);
   const auto rows = lwe_demo(params, o.trials, seed);
   std::optional<OperatorSummary> summary;
   if(!o.no_operator) {
      const auto sys = hso_system(o.n);
      std::vector<double> sv(sys->factors.singular_values.data(),
                             sys->factors.singular_values.data() + sys->factors.singular_values.size());
      OperatorSummary s;
      s.decay = classify_decay(sv, default_fit_range(o.n));
      s.amplification = noise_amplification_experiment(sys->op, sys->factors, GridFunction::constant(o.n, 1.0),
                                                        o.amp_sigma, o.amp_trials, seed);
      summary = s;
   }
   const auto report = analogy_report(params, rows, summary);
   const std::string text = "# seed=" + to_hex(seed) + "\n" + report.to_text() + "\n# machine-readable\n" + report.to_kv();
   emit(o.out, text, out);
   return 0;
}

int cmd_kem_keygen(const Options& o) {
   detail::require(!o.out_pk.empty() && !o.out_sk.empty(), "kem-keygen needs --out-pk and --out-sk");
   Rng rng("illposed.cli.kem-keygen", seed_bytes(o.seed, true));
   const auto kp = pke_keygen<RingLweKem>(rng);
   write_file(o.out_pk, RingLweKem::serialize_public_key(kp.pk));
   write_file(o.out_sk, RingLweKem::serialize_secret_key(kp.sk));
   return 0;
}

int cmd_pke_encrypt(const Options& o) {
   detail::require(!o.out.empty(), "pke-encrypt needs --out");
   const auto pk = RingLweKem::parse_public_key(read_file(o.pk_path));
   const Message msg = parse_message(o);
   Rng rng("illposed.cli.pke-encrypt", seed_bytes(o.seed, true));
   HybridConfig cfg;
   cfg.scale = o.scale;
   cfg.eta = o.eta;
   const auto ct = pke_encrypt<RingLweKem>(pk, msg, scheme_for(o, msg.size()), rng, cfg);
   write_file(o.out, serialize_hybrid_ciphertext(ct));
   return 0;
}

int cmd_pke_decrypt(const Options& o, std::ostream& out) {
   const auto sk = RingLweKem::parse_secret_key(read_file(o.sk_path));
   const auto ct = parse_hybrid_ciphertext<RingLweKem>(read_file(o.in_path));
   HybridConfig cfg;
   cfg.scale = o.scale;
   cfg.eta = o.eta;
   emit(o.out, pke_decrypt<RingLweKem>(sk, ct, cfg).to_hex() + "\n", out);
   return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
   CLI::App app{"Ill-posed inverse problem cipher laboratory"};
   app.set_config("--config", "", "Read options from a TOML/INI file");
   app.require_subcommand(1);
   Options o;

   auto seed_opt = [&o](CLI::App* sc) { sc->add_option("--seed", o.seed, "Master seed (hex)"); };
   auto out_opt = [&o](CLI::App* sc, bool required = false) {
      auto* opt = sc->add_option("--out", o.out, "Output path");
      if(required) {
         opt->required();
      }
   };
   auto grid_opt = [&o](CLI::App* sc) { sc->add_option("--n", o.n, "Grid size")->check(CLI::PositiveNumber); };
   auto msg_opts = [&o](CLI::App* sc) {
      sc->add_option("--msg", o.msg, "Message bits as hex")->required();
      sc->add_option("--t", o.t, "Message length in bits (default: 4 per hex digit)");
   };
   auto enc_opt = [&o](CLI::App* sc) {
      sc->add_option("--encoding", o.encoding, "map2 | map1-fourier | map1-haar");
   };
   auto err_opts = [&o](CLI::App* sc) {
      sc->add_option("--dist", o.dist, "binomial | gaussian");
      sc->add_option("--eta", o.eta, "Centered binomial parameter");
      sc->add_option("--sigma", o.sigma, "Discrete Gaussian width");
      sc->add_option("--scale", o.scale, "Grid value per integer error unit");
   };
   auto lwe_opts = [&o](CLI::App* sc, const std::string& samples_flag) {
      sc->add_option("--q", o.q, "Prime modulus");
      sc->add_option("--m", o.lwe_m, "Secret dimension");
      sc->add_option(samples_flag, o.lwe_n, "Sample count");
      sc->add_option("--ebound", o.ebound, "Error bound");
      sc->add_option("--trials", o.trials, "Trials");
   };

   auto* spectrum = app.add_subcommand("spectrum", "Singular values of the discretized operator as CSV");
   grid_opt(spectrum);
   out_opt(spectrum);

   auto* classify = app.add_subcommand("classify", "Classify singular value decay from a spectrum CSV");
   classify->add_option("--csv", o.csv, "Spectrum CSV")->required();
   classify->add_option("--from", o.from, "First index (1-based)");
   classify->add_option("--to", o.to, "Last index (inclusive)");
   out_opt(classify);

   auto* amplify = app.add_subcommand("amplify", "Noise amplification of naive inversion");
   grid_opt(amplify);
   amplify->add_option("--sigma", o.sigma, "Gaussian noise standard deviation")->required();
   amplify->add_option("--trials", o.trials, "Trials");
   seed_opt(amplify);
   out_opt(amplify);

   auto* enc = app.add_subcommand("encode", "Grid function encoding of a message as CSV");
   msg_opts(enc);
   grid_opt(enc);
   enc_opt(enc);
   out_opt(enc);

   auto* keygen_sym = app.add_subcommand("keygen-sym", "Create a symmetric error key file");
   grid_opt(keygen_sym);
   err_opts(keygen_sym);
   seed_opt(keygen_sym);
   out_opt(keygen_sym, true);

   auto* encrypt_sym = app.add_subcommand("encrypt-sym", "Encrypt a message under a key file");
   encrypt_sym->add_option("--key", o.key_path, "Key file")->required();
   msg_opts(encrypt_sym);
   encrypt_sym->add_option("--nonce", o.nonce, "16-byte nonce (hex)")->required();
   enc_opt(encrypt_sym);
   out_opt(encrypt_sym, true);

   auto* decrypt_sym = app.add_subcommand("decrypt-sym", "Decrypt a ciphertext file");
   decrypt_sym->add_option("--key", o.key_path, "Key file")->required();
   decrypt_sym->add_option("--in", o.in_path, "Ciphertext file")->required();
   out_opt(decrypt_sym);

   auto* attack = app.add_subcommand("attack", "Key-less recovery trials as CSV");
   attack->add_option("--method", o.method, "naive | tsvd:K | tikhonov:ALPHA");
   attack->add_option("--trials", o.trials, "Trials");
   grid_opt(attack);
   attack->add_option("--t", o.t, "Message length in bits (default 32)");
   enc_opt(attack);
   err_opts(attack);
   seed_opt(attack);
   out_opt(attack);

   auto* lwe = app.add_subcommand("lwe-demo", "Exhaustive LWE recovery trials as CSV");
   lwe_opts(lwe, "--n");
   seed_opt(lwe);
   out_opt(lwe);

   auto* analogy = app.add_subcommand("analogy", "LWE versus integral operator comparison report");
   lwe_opts(analogy, "--lwe-n");
   analogy->add_option("--grid-n", o.n, "Operator grid size");
   analogy->add_option("--amp-trials", o.amp_trials, "Amplification trials");
   analogy->add_option("--amp-sigma", o.amp_sigma, "Amplification noise level");
   analogy->add_flag("--no-operator", o.no_operator, "Report the LWE side only");
   seed_opt(analogy);
   out_opt(analogy, true);

   auto* kem_keygen = app.add_subcommand("kem-keygen", "Create a KEM key pair");
   kem_keygen->add_option("--out-pk", o.out_pk, "Public key file")->required();
   kem_keygen->add_option("--out-sk", o.out_sk, "Secret key file")->required();
   seed_opt(kem_keygen);

   auto* pke_enc = app.add_subcommand("pke-encrypt", "Hybrid public-key encryption");
   pke_enc->add_option("--pk", o.pk_path, "Public key file")->required();
   msg_opts(pke_enc);
   grid_opt(pke_enc);
   enc_opt(pke_enc);
   pke_enc->add_option("--eta", o.eta, "Centered binomial parameter");
   pke_enc->add_option("--scale", o.scale, "Error scale");
   seed_opt(pke_enc);
   out_opt(pke_enc, true);

   auto* pke_dec = app.add_subcommand("pke-decrypt", "Hybrid public-key decryption");
   pke_dec->add_option("--sk", o.sk_path, "Secret key file")->required();
   pke_dec->add_option("--in", o.in_path, "Hybrid ciphertext file")->required();
   pke_dec->add_option("--eta", o.eta, "Centered binomial parameter");
   pke_dec->add_option("--scale", o.scale, "Error scale");
   out_opt(pke_dec);

   std::vector<std::string> argv_store{"illposed-cli"};
   argv_store.insert(argv_store.end(), args.begin(), args.end());
   std::vector<const char*> argv;
   for(const auto& a : argv_store) {
      argv.push_back(a.c_str());
   }
   try {
      app.parse(static_cast<int>(argv.size()), argv.data());
   } catch(const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
   }

   const std::map<CLI::App*, std::function<int()>> dispatch{
      {spectrum, [&] { return cmd_spectrum(o, out); }},
      {classify, [&] { return cmd_classify(o, out); }},
      {amplify, [&] { return cmd_amplify(o, out); }},
      {enc, [&] { return cmd_encode(o, out); }},
      {keygen_sym, [&] { return cmd_keygen_sym(o); }},
      {encrypt_sym, [&] { return cmd_encrypt_sym(o); }},
      {decrypt_sym, [&] { return cmd_decrypt_sym(o, out); }},
      {attack, [&] { return cmd_attack(o, out); }},
      {lwe, [&] { return cmd_lwe_demo(o, out); }},
      {analogy, [&] { return cmd_analogy(o, out); }},
      {kem_keygen, [&] { return cmd_kem_keygen(o); }},
      {pke_enc, [&] { return cmd_pke_encrypt(o); }},
      {pke_dec, [&] { return cmd_pke_decrypt(o, out); }},
   };
   try {
      for(const auto& [sc, fn] : dispatch) {
         if(sc->parsed()) {
            return fn();
         }
      }
   } catch(const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
   }
   return 2;
}

}  // namespace illposed::cli

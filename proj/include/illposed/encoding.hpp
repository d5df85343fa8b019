// SPDX-License-Identifier: Apache-2.0
#pragma once

// Injective embeddings of bit strings into the grid space:
//   Map1: message number k -> k-th orthonormal basis function (Fourier or Haar)
//   Map2: bit j -> constant value on the j-th of t equal subintervals

#include <illposed/common.hpp>
#include <illposed/function_space.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace illposed {

class Message {
public:
   explicit Message(std::vector<std::uint8_t> bits) : m_bits(std::move(bits)) {
      detail::require(!m_bits.empty(), "message needs at least one bit");
      for(std::size_t i = 0; i < m_bits.size(); ++i) {
         detail::require(m_bits[i] <= 1, "message bit " + std::to_string(i) + " is not 0/1");
      }
   }

   /// Big-endian bits of `value`, t of them.
   static Message from_value(std::uint64_t value, std::size_t t) {
      detail::require(t >= 1 && t <= 64, "from_value supports 1..64 bits");
      std::vector<std::uint8_t> bits(t);
      for(std::size_t i = 0; i < t; ++i) {
         bits[i] = static_cast<std::uint8_t>((value >> (t - 1 - i)) & 1U);
      }
      return Message(std::move(bits));
   }

   /// Each hex digit contributes four bits, most significant first. When t is given the
   /// string must supply at least t bits and the leading t are kept.
   static Message from_hex(std::string_view hex, std::size_t t = 0) {
      if(hex.starts_with("0x") || hex.starts_with("0X")) {
         hex.remove_prefix(2);
      }
      std::vector<std::uint8_t> bits;
      for(std::size_t i = 0; i < hex.size(); ++i) {
         const int d = hex_digit(hex[i]);
         if(d < 0) {
            throw Error("invalid hex digit in message at offset " + std::to_string(i));
         }
         for(int b = 3; b >= 0; --b) {
            bits.push_back(static_cast<std::uint8_t>((d >> b) & 1));
         }
      }
      if(t != 0) {
         detail::require(bits.size() >= t, "message hex supplies fewer than t bits");
         bits.resize(t);
      }
      return Message(std::move(bits));
   }

   static Message random(std::size_t t, auto& rng) {
      std::vector<std::uint8_t> bits(t);
      for(auto& b : bits) {
         b = static_cast<std::uint8_t>(rng() & 1U);
      }
      return Message(std::move(bits));
   }

   /// Hex with the final digit zero-padded when t is not a multiple of four.
   std::string to_hex() const {
      static constexpr char digits[] = "0123456789abcdef";
      std::string out;
      for(std::size_t i = 0; i < m_bits.size(); i += 4) {
         int d = 0;
         for(std::size_t j = 0; j < 4; ++j) {
            d = (d << 1) | (i + j < m_bits.size() ? m_bits[i + j] : 0);
         }
         out.push_back(digits[d]);
      }
      return out;
   }

   std::uint64_t value() const {
      detail::require(m_bits.size() <= 64, "message too long for a 64-bit value");
      std::uint64_t v = 0;
      for(auto b : m_bits) {
         v = (v << 1) | b;
      }
      return v;
   }

   std::size_t size() const { return m_bits.size(); }
   std::uint8_t operator[](std::size_t i) const { return m_bits[i]; }
   const std::vector<std::uint8_t>& bits() const { return m_bits; }

   bool operator==(const Message&) const = default;

private:
   std::vector<std::uint8_t> m_bits;
};

/// Fraction of agreeing positions.
inline double bit_accuracy(const Message& a, const Message& b) {
   detail::require_dims(a.size(), b.size(), "bit_accuracy");
   std::size_t same = 0;
   for(std::size_t i = 0; i < a.size(); ++i) {
      same += a[i] == b[i];
   }
   return static_cast<double>(same) / static_cast<double>(a.size());
}

enum class EncodingKind : std::uint8_t {
   map1_fourier = 0x01,
   map1_haar = 0x02,
   map2 = 0x03,
};

inline std::string to_string(EncodingKind k) {
   switch(k) {
      case EncodingKind::map1_fourier:
         return "map1-fourier";
      case EncodingKind::map1_haar:
         return "map1-haar";
      case EncodingKind::map2:
         return "map2";
   }
   return "unknown";
}

inline EncodingKind encoding_kind_from_string(std::string_view s) {
   if(s == "map1-fourier" || s == "fourier") {
      return EncodingKind::map1_fourier;
   }
   if(s == "map1-haar" || s == "haar") {
      return EncodingKind::map1_haar;
   }
   if(s == "map2") {
      return EncodingKind::map2;
   }
   throw Error("unknown encoding \"" + std::string(s) + "\" (map1-fourier, map1-haar, map2)");
}

inline EncodingKind encoding_kind_from_id(std::uint8_t id) {
   if(id < 0x01 || id > 0x03) {
      throw FormatError("unknown encoding id " + std::to_string(id));
   }
   return static_cast<EncodingKind>(id);
}

inline constexpr std::size_t max_map1_bits = 20;

class EncodingScheme {
public:
   EncodingScheme(EncodingKind kind, std::size_t t, std::size_t n) : m_kind(kind), m_t(t), m_n(n) {
      detail::require(t >= 1, "message length t must be positive");
      detail::require(n >= 1, "grid size n must be positive");
      if(is_map1()) {
         if(t > max_map1_bits) {
            throw Error("Map1 enumeration infeasible for t=" + std::to_string(t) + " (limit " +
                        std::to_string(max_map1_bits) + ")");
         }
      } else if(n % t != 0) {
         throw Error("Map2 needs n to be a multiple of t (n=" + std::to_string(n) + ", t=" + std::to_string(t) +
                     ")");
      }
   }

   static EncodingScheme map2(std::size_t t, std::size_t n) { return {EncodingKind::map2, t, n}; }

   static EncodingScheme map1(EncodingKind basis, std::size_t t, std::size_t n) { return {basis, t, n}; }

   EncodingKind kind() const { return m_kind; }
   std::uint8_t id() const { return static_cast<std::uint8_t>(m_kind); }
   std::size_t message_bits() const { return m_t; }
   std::size_t grid_size() const { return m_n; }
   bool is_map1() const { return m_kind != EncodingKind::map2; }

   bool operator==(const EncodingScheme&) const = default;

private:
   EncodingKind m_kind;
   std::size_t m_t;
   std::size_t m_n;
};

/// Number of leading basis functions that are exactly orthonormal on the n-point midpoint grid.
inline std::size_t basis_size(EncodingKind basis, std::size_t n) {
   if(basis == EncodingKind::map1_fourier) {
      // for even n the cosine at the Nyquist frequency vanishes at every midpoint
      return n % 2 == 1 ? n : n - 1;
   }
   if(basis == EncodingKind::map1_haar) {
      return n & (~n + 1);  // largest power of two dividing n
   }
   throw Error("basis_size: Map2 has no basis");
}

/// Fourier basis (1-based): e_1 = 1, e_{2j} = sqrt2 cos(2 pi j y), e_{2j+1} = sqrt2 sin(2 pi j y).
inline double fourier_basis(std::size_t k, double y) {
   constexpr double two_pi = 6.28318530717958647692;
   if(k == 1) {
      return 1.0;
   }
   const double j = static_cast<double>(k / 2);
   return k % 2 == 0 ? std::sqrt(2.0) * std::cos(two_pi * j * y) : std::sqrt(2.0) * std::sin(two_pi * j * y);
}

/// Haar basis (1-based) at the midpoint of cell i of n: e_1 = 1, then psi_{l,p} at k = 2^l + p + 1.
inline double haar_basis(std::size_t k, std::size_t i, std::size_t n) {
   if(k == 1) {
      return 1.0;
   }
   const std::size_t m = k - 1;
   const int level = std::bit_width(m) - 1;
   const std::size_t p = m - (std::size_t{1} << level);
   // half-interval of length 2^-(level+1) containing y = (2i+1)/(2n)
   const std::size_t half = ((2 * i + 1) << (level + 1)) / (2 * n);
   const double amp = std::sqrt(static_cast<double>(std::size_t{1} << level));
   if(half == 2 * p) {
      return amp;
   }
   if(half == 2 * p + 1) {
      return -amp;
   }
   return 0.0;
}

inline GridFunction map1_basis_function(EncodingKind basis, std::size_t k, std::size_t n) {
   std::vector<double> v(n);
   for(std::size_t i = 0; i < n; ++i) {
      v[i] = basis == EncodingKind::map1_fourier ? fourier_basis(k, GridFunction::midpoint(i, n))
                                                 : haar_basis(k, i, n);
   }
   return GridFunction(std::move(v));
}

inline GridFunction encode_map1(const Message& msg, const EncodingScheme& scheme) {
   detail::require(scheme.is_map1(), "encode_map1 needs a Map1 scheme");
   detail::require_dims(msg.size(), scheme.message_bits(), "encode_map1");
   const std::size_t k = static_cast<std::size_t>(msg.value()) + 1;
   const std::size_t available = basis_size(scheme.kind(), scheme.grid_size());
   if(k > available) {
      throw Error("Map1 basis index " + std::to_string(k) + " exceeds the " + std::to_string(available) +
                  " orthonormal " + to_string(scheme.kind()) + " functions on a grid of " +
                  std::to_string(scheme.grid_size()));
   }
   return map1_basis_function(scheme.kind(), k, scheme.grid_size());
}

namespace detail {

/// Row-major table of the first `count` basis functions on an n-point grid, built once per
/// (basis, n, count) because correlation decoding evaluates all of them.
inline std::shared_ptr<const std::vector<double>> basis_table(EncodingKind basis, std::size_t n, std::size_t count) {
   static std::mutex mutex;
   static std::map<std::tuple<EncodingKind, std::size_t, std::size_t>, std::shared_ptr<const std::vector<double>>>
      cache;
   const auto key = std::make_tuple(basis, n, count);
   std::lock_guard lock(mutex);
   if(auto it = cache.find(key); it != cache.end()) {
      return it->second;
   }
   auto table = std::make_shared<std::vector<double>>(n * count);
   for(std::size_t k = 1; k <= count; ++k) {
      const auto f = map1_basis_function(basis, k, n);
      std::copy(f.values().begin(), f.values().end(), table->begin() + static_cast<std::ptrdiff_t>((k - 1) * n));
   }
   return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace detail

/// Correlation decoding: the message whose basis function maximizes |<u, e_k>|; ties go to smaller k.
inline Message decode_map1(const GridFunction& u, const EncodingScheme& scheme) {
   detail::require(scheme.is_map1(), "decode_map1 needs a Map1 scheme");
   detail::require_dims(u.size(), scheme.grid_size(), "decode_map1");
   const std::size_t n = u.size();
   const std::size_t count =
      std::min<std::size_t>(std::size_t{1} << scheme.message_bits(), basis_size(scheme.kind(), n));
   const auto table = detail::basis_table(scheme.kind(), n, count);
   std::size_t best_k = 1;
   double best = -1.0;
   for(std::size_t k = 1; k <= count; ++k) {
      const double* row = table->data() + (k - 1) * n;
      double acc = 0.0;
      for(std::size_t i = 0; i < n; ++i) {
         acc += row[i] * u[i];
      }
      const double c = std::abs(acc);
      if(c > best) {
         best = c;
         best_k = k;
      }
   }
   return Message::from_value(best_k - 1, scheme.message_bits());
}

inline GridFunction encode_map2(const Message& msg, const EncodingScheme& scheme) {
   detail::require(!scheme.is_map1(), "encode_map2 needs a Map2 scheme");
   detail::require_dims(msg.size(), scheme.message_bits(), "encode_map2");
   const std::size_t n = scheme.grid_size();
   const std::size_t cells = n / msg.size();
   std::vector<double> v(n);
   for(std::size_t i = 0; i < n; ++i) {
      v[i] = msg[i / cells];
   }
   return GridFunction(std::move(v));
}

/// Mean of each subinterval, bit = 1 when the mean is >= 0.5.
inline Message decode_map2(const GridFunction& u, const EncodingScheme& scheme) {
   detail::require(!scheme.is_map1(), "decode_map2 needs a Map2 scheme");
   detail::require_dims(u.size(), scheme.grid_size(), "decode_map2");
   const std::size_t t = scheme.message_bits();
   const std::size_t cells = u.size() / t;
   std::vector<std::uint8_t> bits(t);
   for(std::size_t j = 0; j < t; ++j) {
      double sum = 0.0;
      for(std::size_t c = 0; c < cells; ++c) {
         sum += u[j * cells + c];
      }
      bits[j] = sum / static_cast<double>(cells) >= 0.5 ? 1 : 0;
   }
   return Message(std::move(bits));
}

inline GridFunction encode(const Message& msg, const EncodingScheme& scheme) {
   return scheme.is_map1() ? encode_map1(msg, scheme) : encode_map2(msg, scheme);
}

inline Message decode(const GridFunction& u, const EncodingScheme& scheme) {
   return scheme.is_map1() ? decode_map1(u, scheme) : decode_map2(u, scheme);
}

}  // namespace illposed

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace illposed {

using Bytes = std::vector<std::uint8_t>;

/// Raised when an argument violates a documented precondition or invariant.
class Error : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

/// Two objects that must share a grid size (or length) do not.
class DimensionError : public Error {
public:
   using Error::Error;
};

/// Malformed serialized input.
class FormatError : public Error {
public:
   using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
   if(!cond) {
      throw Error(what);
   }
}

inline void require_dims(std::size_t a, std::size_t b, std::string_view where) {
   if(a != b) {
      throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                           std::to_string(b) + ")");
   }
}

}  // namespace detail

/// Little-endian byte writer used by every on-disk format.
class ByteWriter {
public:
   void u8(std::uint8_t v) { m_buf.push_back(v); }

   void u16(std::uint16_t v) {
      u8(static_cast<std::uint8_t>(v));
      u8(static_cast<std::uint8_t>(v >> 8));
   }

   void u32(std::uint32_t v) {
      for(int i = 0; i < 4; ++i) {
         u8(static_cast<std::uint8_t>(v >> (8 * i)));
      }
   }

   void u64(std::uint64_t v) {
      for(int i = 0; i < 8; ++i) {
         u8(static_cast<std::uint8_t>(v >> (8 * i)));
      }
   }

   void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

   void raw(std::span<const std::uint8_t> data) { m_buf.insert(m_buf.end(), data.begin(), data.end()); }

   void magic(std::string_view tag) {
      for(char c : tag) {
         u8(static_cast<std::uint8_t>(c));
      }
   }

   const Bytes& bytes() const& { return m_buf; }
   Bytes bytes() && { return std::move(m_buf); }

private:
   Bytes m_buf;
};

/// Bounds-checked little-endian reader; throws FormatError on truncation.
class ByteReader {
public:
   explicit ByteReader(std::span<const std::uint8_t> data) : m_data(data) {}

   std::uint8_t u8() {
      need(1);
      return m_data[m_pos++];
   }

   std::uint16_t u16() {
      std::uint16_t lo = u8();
      std::uint16_t hi = u8();
      return static_cast<std::uint16_t>(lo | (hi << 8));
   }

   std::uint32_t u32() {
      std::uint32_t v = 0;
      for(int i = 0; i < 4; ++i) {
         v |= static_cast<std::uint32_t>(u8()) << (8 * i);
      }
      return v;
   }

   std::uint64_t u64() {
      std::uint64_t v = 0;
      for(int i = 0; i < 8; ++i) {
         v |= static_cast<std::uint64_t>(u8()) << (8 * i);
      }
      return v;
   }

   double f64() { return std::bit_cast<double>(u64()); }

   std::span<const std::uint8_t> raw(std::size_t len) {
      need(len);
      auto out = m_data.subspan(m_pos, len);
      m_pos += len;
      return out;
   }

   void expect_magic(std::string_view tag) {
      for(char c : tag) {
         if(u8() != static_cast<std::uint8_t>(c)) {
            throw FormatError("bad magic, expected \"" + std::string(tag) + "\"");
         }
      }
   }

   std::size_t remaining() const { return m_data.size() - m_pos; }

   void expect_end() const {
      if(remaining() != 0) {
         throw FormatError("trailing bytes after object (" + std::to_string(remaining()) + ")");
      }
   }

private:
   void need(std::size_t len) const {
      if(m_data.size() - m_pos < len) {
         throw FormatError("truncated input");
      }
   }

   std::span<const std::uint8_t> m_data;
   std::size_t m_pos = 0;
};

inline std::string to_hex(std::span<const std::uint8_t> data) {
   static constexpr char digits[] = "0123456789abcdef";
   std::string out;
   out.reserve(2 * data.size());
   for(auto b : data) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 0xF]);
   }
   return out;
}

inline int hex_digit(char c) {
   if(c >= '0' && c <= '9') {
      return c - '0';
   }
   if(c >= 'a' && c <= 'f') {
      return c - 'a' + 10;
   }
   if(c >= 'A' && c <= 'F') {
      return c - 'A' + 10;
   }
   return -1;
}

/// Parses an even-length hex string. An optional "0x" prefix is accepted.
inline Bytes from_hex(std::string_view hex) {
   if(hex.starts_with("0x") || hex.starts_with("0X")) {
      hex.remove_prefix(2);
   }
   if(hex.size() % 2 != 0) {
      throw Error("hex string has odd length");
   }
   Bytes out(hex.size() / 2);
   for(std::size_t i = 0; i < out.size(); ++i) {
      const int hi = hex_digit(hex[2 * i]);
      const int lo = hex_digit(hex[2 * i + 1]);
      if(hi < 0 || lo < 0) {
         throw Error("invalid hex digit at offset " + std::to_string(2 * i));
      }
      out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
   }
   return out;
}

}  // namespace illposed

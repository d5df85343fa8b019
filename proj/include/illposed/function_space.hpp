// SPDX-License-Identifier: Apache-2.0
#pragma once

// Discretized L^2[0,1]: n samples at the cell midpoints y_i = (i + 0.5)/n,
// integrated with the midpoint rule (weight h = 1/n).

#include <illposed/common.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace illposed {

class GridFunction {
public:
   /// Throws Error for an empty vector or a non-finite entry.
   explicit GridFunction(std::vector<double> values) : m_values(std::move(values)) {
      if(m_values.empty()) {
         throw Error("grid function needs at least one sample");
      }
      for(std::size_t i = 0; i < m_values.size(); ++i) {
         if(!std::isfinite(m_values[i])) {
            throw Error("non-finite at index " + std::to_string(i));
         }
      }
   }

   static GridFunction zero(std::size_t n) { return GridFunction(std::vector<double>(n, 0.0)); }

   static GridFunction constant(std::size_t n, double c) { return GridFunction(std::vector<double>(n, c)); }

   template <typename F>
   static GridFunction sample(std::size_t n, F&& f) {
      detail::require(n >= 1, "grid size must be positive");
      std::vector<double> v(n);
      for(std::size_t i = 0; i < n; ++i) {
         v[i] = f(midpoint(i, n));
      }
      return GridFunction(std::move(v));
   }

   static double midpoint(std::size_t i, std::size_t n) {
      return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
   }

   std::size_t size() const { return m_values.size(); }

   double weight() const { return 1.0 / static_cast<double>(m_values.size()); }

   double operator[](std::size_t i) const { return m_values[i]; }

   std::span<const double> values() const { return m_values; }

   bool operator==(const GridFunction&) const = default;

private:
   std::vector<double> m_values;
};

inline GridFunction make_grid_function(std::vector<double> values) {
   return GridFunction(std::move(values));
}

/// Midpoint-rule inner product h * sum u_i v_i.
inline double inner_product(const GridFunction& u, const GridFunction& v) {
   detail::require_dims(u.size(), v.size(), "inner_product");
   double acc = 0.0;
   for(std::size_t i = 0; i < u.size(); ++i) {
      acc += u[i] * v[i];
   }
   return u.weight() * acc;
}

inline double norm(const GridFunction& u) {
   return std::sqrt(inner_product(u, u));
}

/// Pointwise a*u + v.
inline GridFunction axpy(double a, const GridFunction& u, const GridFunction& v) {
   detail::require_dims(u.size(), v.size(), "axpy");
   std::vector<double> out(u.size());
   for(std::size_t i = 0; i < u.size(); ++i) {
      out[i] = a * u[i] + v[i];
   }
   return GridFunction(std::move(out));
}

inline GridFunction operator+(const GridFunction& u, const GridFunction& v) {
   return axpy(1.0, u, v);
}

inline GridFunction operator-(const GridFunction& u, const GridFunction& v) {
   return axpy(-1.0, v, u);
}

inline GridFunction scaled(double a, const GridFunction& u) {
   return axpy(a, u, GridFunction::zero(u.size()));
}

// Wire form: n (u32 LE) followed by n IEEE-754 binary64 LE values.

inline void write_grid_function(ByteWriter& w, const GridFunction& u) {
   w.u32(static_cast<std::uint32_t>(u.size()));
   for(double x : u.values()) {
      w.f64(x);
   }
}

inline GridFunction read_grid_function(ByteReader& r) {
   const std::uint32_t n = r.u32();
   if(n == 0) {
      throw FormatError("grid function with zero samples");
   }
   if(r.remaining() / 8 < n) {
      throw FormatError("truncated grid function body");
   }
   std::vector<double> v(n);
   for(auto& x : v) {
      x = r.f64();
   }
   try {
      return GridFunction(std::move(v));
   } catch(const Error& e) {
      throw FormatError(e.what());
   }
}

}  // namespace illposed

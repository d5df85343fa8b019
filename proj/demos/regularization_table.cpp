// SPDX-License-Identifier: Apache-2.0
//
// Prints TSVD attack accuracy over truncation level x error scale.

#include <illposed/illposed.hpp>

#include <cstdio>

int main() {
   using namespace illposed;

   SweepConfig cfg;
   cfg.trials = 200;
   const Bytes seed{0x01};
   const auto table = regularization_sweep(cfg, seed);

   std::printf("%8s", "k");
   for(double s : cfg.scales) {
      std::printf("  scale=%-6g", s);
   }
   std::printf("\n");
   for(std::size_t i = 0; i < cfg.truncation_levels.size(); ++i) {
      std::printf("%8zu", cfg.truncation_levels[i]);
      for(double a : table.accuracy[i]) {
         std::printf("  %12.4f", a);
      }
      std::printf("\n");
   }
   return 0;
}

#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "tdvmm/cell_model.hpp"

namespace testing_helpers {

inline std::filesystem::path data_dir() { return TDVMM_DATA_DIR; }

// Cell with tables filled from callables; binary weights.
inline tdvmm::CellSpec make_cell(int b, const std::function<double(int, int)>& inl,
                                 const std::function<double(int, int)>& sigma) {
  tdvmm::CellSpec s;
  s.bit_width = b;
  const std::size_t xs = std::size_t{1} << b;
  s.inl = tdvmm::CellTable(xs, 2);
  s.sigma = tdvmm::CellTable(xs, 2);
  for (std::size_t x = 0; x < xs; ++x) {
    for (std::size_t w = 0; w < 2; ++w) {
      s.inl(x, w) = inl(static_cast<int>(x), static_cast<int>(w));
      s.sigma(x, w) = sigma(static_cast<int>(x), static_cast<int>(w));
    }
  }
  s.e_op = 1e-15;
  s.e_op_per_r = 0.5e-15;
  s.d_step = 10e-12;
  s.d_max = static_cast<double>(xs) * s.d_step;
  s.area = {1e-7, 5e-7};
  s.validate();
  return s;
}

inline tdvmm::CellSpec random_cell(std::mt19937_64& rng, int b) {
  std::uniform_real_distribution<double> inl(-0.2, 0.2), sig(0.0, 0.08);
  return make_cell(b, [&](int, int) { return inl(rng); }, [&](int, int) { return sig(rng); });
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_helpers

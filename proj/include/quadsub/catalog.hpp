#pragma once

#include <optional>
#include <string>
#include <vector>

#include "quadsub/core.hpp"

namespace quadsub {

struct CatalogEntry {
  std::string name;
  QuadraticSymbol symbol;
  std::optional<int> expected_k0;  // empty for symbols with S != {0}
  std::string notes;
};

/// Worked symbols exercised by every pipeline and by the test suite.
inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> list;

    {
      Mat q_re = Mat::Identity(2, 2);
      Mat q_im = Mat::Zero(2, 2);
      list.push_back({"harmonic", QuadraticSymbol(1, q_re, q_im), 0,
                      "harmonic oscillator x^2 + xi^2; elliptic, no loss"});
    }
    {
      Mat q_re = Mat::Zero(2, 2);
      q_re(1, 1) = 1.0;
      Mat q_im = Mat::Zero(2, 2);
      q_im(0, 0) = 1.0;
      list.push_back({"davies", QuadraticSymbol(1, q_re, q_im), 1,
                      "rotated oscillator xi^2 + i x^2; one averaging step"});
    }
    {
      // coordinates (x, v, xi, eta): eta^2 + v^2/4 + i (v xi - x eta),
      // the standard quadratic kinetic Fokker-Planck model with unit
      // coefficients.
      Mat q_re = Mat::Zero(4, 4);
      q_re(1, 1) = 0.25;
      q_re(3, 3) = 1.0;
      Mat q_im = Mat::Zero(4, 4);
      q_im(1, 2) = 0.5;
      q_im(2, 1) = 0.5;
      q_im(0, 3) = -0.5;
      q_im(3, 0) = -0.5;
      list.push_back({"kfp", QuadraticSymbol(2, q_re, q_im), 1,
                      "kinetic Fokker-Planck quadratic model on R^4"});
    }
    {
      // maximal transport chain: Re q covers only the xi1 direction and each
      // averaging step adds one more (xi1 -> x2 -> xi2 -> x1), so the rank
      // sequence is 1,2,3,4 and k0 = 2n-1
      Mat q_re = Mat::Zero(4, 4);
      q_re(2, 2) = 1.0;
      Mat q_im = Mat::Zero(4, 4);
      q_im(0, 1) = 0.5;
      q_im(1, 0) = 0.5;
      q_im(3, 3) = 1.0;
      list.push_back({"chain", QuadraticSymbol(2, q_re, q_im), 3,
                      "xi1^2 + i(x1 x2 + xi2^2); maximal averaging chain on R^4"});
    }
    {
      Mat q_re = Mat::Zero(2, 2);
      Mat q_im = Mat::Zero(2, 2);
      q_im(1, 1) = 1.0;
      list.push_back({"degenerate", QuadraticSymbol(1, q_re, q_im), std::nullopt,
                      "i xi^2; Re q vanishes, singular space is all of R^2"});
    }
    return list;
  }();
  return entries;
}

inline const CatalogEntry& find_catalog(const std::string& name) {
  for (const auto& entry : catalog())
    if (entry.name == name) return entry;
  throw std::invalid_argument("unknown catalog symbol: " + name);
}

}  // namespace quadsub

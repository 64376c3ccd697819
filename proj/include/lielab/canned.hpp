#pragma once

#include "lielab/algebra_file.hpp"

namespace lielab {

struct CannedAlgebra {
  std::string_view name;
  std::string_view text;
};

/// Worked examples shipped with the tool, each carrying its expected invariants.
inline const std::vector<CannedAlgebra>& canned_library() {
  static const std::vector<CannedAlgebra> lib{
      {"abelian", R"(name = abelian
dim = 3
distribution = all
norm = euclidean
expect step = 1
expect carnot = true
expect alpha_inf = inf
expect beta = 0
expect alpha0 = inf
expect beta0 = 0
)"},
      {"carnot_heis", R"(name = carnot_heis
dim = 3
bracket e1 e2 = e3
distribution = span(e1, e2)
norm = euclidean
expect step = 2
expect carnot = true
expect alpha1_inf = inf
expect alpha2_inf = inf
expect alpha_inf = inf
expect beta = 0
expect alpha0 = inf
expect beta0 = 0
)"},
      {"heis_riem", R"(name = heis_riem
dim = 3
bracket e1 e2 = e3
distribution = all
norm = euclidean
expect step = 2
expect carnot = false
expect alpha1_inf = inf
expect alpha2_inf = 1
expect alpha_inf = 1
expect beta = 2
expect alpha0 = 1
expect beta0 = 1
)"},
      {"n522", R"(name = n522
dim = 5
bracket e1 e2 = e4
bracket e1 e4 = e5
bracket e2 e3 = e5
distribution = span(e1, e2, e3)
norm = euclidean
expect step = 3
expect carnot = false
expect alpha1_inf = 1
expect alpha2_inf = inf
expect alpha_inf = 1
expect beta = 3
expect alpha0 = 1
expect beta0 = 2
)"},
      {"n521", R"(name = n521
dim = 5
bracket e1 e2 = e3
bracket e1 e3 = e4
bracket e1 e4 = e5
distribution = span(e1, e2)
norm = euclidean
expect step = 4
expect carnot = true
expect alpha_inf = inf
expect beta = 0
expect alpha0 = inf
expect beta0 = 0
)"},
      {"n522_x_n521", R"(name = n522_x_n521
dim = 10
basis = e1, e2, e3, e4, e5, f1, f2, f3, f4, f5
bracket e1 e2 = e4
bracket e1 e4 = e5
bracket e2 e3 = e5
bracket f1 f2 = f3
bracket f1 f3 = f4
bracket f1 f4 = f5
distribution = span(e1, e2, e3, e4, e5, f1, f2)
grading V1 = span(e1, e2, e3, f1, f2)
grading V2 = span(e4, f3)
grading V3 = span(e5, f4)
grading V4 = span(f5)
norm = euclidean
expect step = 4
expect carnot = false
expect alpha1_inf = 1
expect alpha2_inf = 1
expect alpha_inf = 1
expect beta = 3
expect alpha0 = 1
expect beta0 = 1
)"},
      {"filiform_v1_v2", R"(name = filiform_v1_v2
dim = 5
bracket e1 e2 = e3
bracket e1 e3 = e4
bracket e1 e4 = e5
distribution = span(e1, e2, e3)
norm = euclidean
expect step = 4
expect carnot = false
expect alpha1_inf = inf
expect alpha2_inf = 1
expect alpha_inf = 1
expect beta = 4
expect alpha0 = 1
expect beta0 = 3
)"},
      {"filiform_v1_v3", R"(name = filiform_v1_v3
dim = 5
bracket e1 e2 = e3
bracket e1 e3 = e4
bracket e1 e4 = e5
distribution = span(e1, e2, e4)
norm = euclidean
expect step = 4
expect carnot = false
expect alpha1_inf = inf
expect alpha2_inf = 2
expect alpha_inf = 2
expect beta = 4
expect alpha0 = 2
expect beta0 = 2
)"},
      {"filiform_v1_v4", R"(name = filiform_v1_v4
dim = 5
bracket e1 e2 = e3
bracket e1 e3 = e4
bracket e1 e4 = e5
distribution = span(e1, e2, e5)
norm = euclidean
expect step = 4
expect carnot = false
expect alpha1_inf = inf
expect alpha2_inf = 3
expect alpha_inf = 3
expect beta = 4
expect alpha0 = 3
expect beta0 = 1
)"},
      {"heis_x_n522", R"(name = heis_x_n522
dim = 8
basis = a1, a2, a3, e1, e2, e3, e4, e5
bracket a1 a2 = a3
bracket e1 e2 = e4
bracket e1 e4 = e5
bracket e2 e3 = e5
distribution = span(a1, a2, e1, e2, e3)
norm = euclidean
expect step = 3
expect carnot = false
expect alpha1_inf = 1
expect alpha2_inf = inf
expect alpha_inf = 1
expect beta = 3
expect alpha0 = 1
expect beta0 = 2
)"},
  };
  return lib;
}

inline AlgebraFile canned(std::string_view name) {
  for (const auto& c : canned_library())
    if (c.name == name) return parse_algebra(c.text);
  throw Error("no canned algebra named '" + std::string(name) + "'");
}

}  // namespace lielab

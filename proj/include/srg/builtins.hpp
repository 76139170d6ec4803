#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "srg/structure.hpp"

namespace srg::builtins {

/// d_1, ..., d_n.
SubRiemannianStructure euclidean(std::size_t n);
/// X1 = d1 - x2/2 d3, X2 = d2 + x1/2 d3.
SubRiemannianStructure heisenberg();
/// X1 = d1, X2 = x1 d2.
SubRiemannianStructure grushin();
/// X1 = d1, X2 = x1^alpha d2 (integer alpha >= 1).
SubRiemannianStructure grushin_alpha(int alpha);
/// Heisenberg frame plus X3 = x3^2 d3.
SubRiemannianStructure singruppo();
/// X1 = cos(x3) d1 + sin(x3) d2, X2 = d3 on R^2 x S^1 (analytic coefficients).
SubRiemannianStructure rototranslation();
/// X_i = d_{x_i} - y_i/2 d_t, Y_i = d_{y_i} + x_i/2 d_t on R^{2k+1}.
SubRiemannianStructure contact_corank1(int k = 2);

/// "heisenberg", "euclidean:3", "grushin_alpha:3", "contact_corank1_standard:2", ...
SubRiemannianStructure by_name(std::string_view name);
std::vector<std::string> names();

}  // namespace srg::builtins

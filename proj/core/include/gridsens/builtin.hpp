#pragma once

#include "gridsens/network.hpp"

namespace gridsens {

/// Built-in three-state demonstration systems with two uncertain links each.
/// Both share the nominal map (eigenvalues 0.7, 0.1, -0.1); the first pair of
/// directions interacts strongly, the second only weakly.
AssembledNetwork builtin_example(int which);

/// Number of built-in examples.
inline constexpr int kBuiltinExampleCount = 2;

}  // namespace gridsens

#pragma once

#include <string>

#include "dgs/objective.hpp"

namespace dgs::objectives {

enum class Kind { Sphere, ShiftedQuadratic, Multimodal2d };

// Deterministic analytic objectives with known global maxima:
//   sphere            J(theta) = -||theta||^2, max 0 at the origin
//   shifted-quadratic J(theta) = -||theta - s||^2 with s_i = sin(i+1)
//   multimodal-2d     two smooth compactly-supported bumps of heights 1 and 3
// The evaluation seed is ignored (the functions are noise-free).
ObjectiveHandle synthetic_objective(Kind kind, int dim);

// Multimodal landscape pieces, exposed for analytic checks. A bump of height
// h, radius r centered at c is h*exp(1 - 1/(1 - s^2)) for s = |x - c|/r < 1,
// zero outside.
double multimodal_bump(double x, double y, double cx, double cy, double radius,
                       double height);
double multimodal_value(double x, double y);

// Center/radius/height of the two bumps (bump 2 holds the global maximum).
inline constexpr double kBump1X = 0.64, kBump1Y = 0.64, kBump1R = 0.78,
                        kBump1H = 1.0;
inline constexpr double kBump2X = 2.25, kBump2Y = 0.64, kBump2R = 1.15,
                        kBump2H = 3.0;

// Parse "syn:sphere:d20", "syn:shifted-quadratic:d8", "syn:multimodal-2d:d2",
// or "env:<name>:h<hidden>" into an objective; throws invalid-argument on
// anything else.
ObjectiveHandle objective_from_spec(const std::string& spec_string);

}  // namespace dgs::objectives

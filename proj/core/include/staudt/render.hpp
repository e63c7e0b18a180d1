#pragma once

#include "staudt/config.hpp"

namespace staudt {

struct RenderOptions {
  int width = 900;
  int height = 700;
  std::size_t max_elements = 400;  // beyond this a summary is emitted
};

/// Static SVG of the affine chart z = 1. Horizontal lines render horizontal;
/// the line at infinity and points on it are listed in a margin legend.
/// Characteristic-0 configurations draw to scale; finite-field ones render as
/// a symbolic summary (labels and incidence counts). Output is deterministic.
std::string render_svg(const Configuration& cfg, const RenderOptions& opt = {});

}  // namespace staudt

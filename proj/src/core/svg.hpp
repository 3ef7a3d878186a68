#pragma once

// Hand-emitted SVG figures from the CSV outputs: bifurcation diagrams (branch
// curves, beta-band shading where the equilibrium is nonlinearly mean-square
// stable, red circles where lambda_max crosses zero) and sample-path plots
// (per-path polylines, equilibrium lines, beta band). Fixed 800x600 viewport,
// linear axes autoscaled to the data with 5% margins.

#include <string>

namespace msbif {

enum class SvgKind { bifurcation, paths };

void render_svg(const std::string& csv_path, SvgKind kind,
                const std::string& out_path);

SvgKind svg_kind_from_string(const std::string& name);

// Inspects the CSV header to pick the figure kind.
SvgKind svg_kind_from_csv(const std::string& csv_path);

}  // namespace msbif

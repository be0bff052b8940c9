#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meancurve/bench.hpp"
#include "meancurve/reconstruct.hpp"

namespace meancurve {

/// ARC curves of every method on one plot, threshold on X.
std::string svg_arc_plot(const EvalResult& eval, const std::string& title);

/// rows x cols heatmap, row-major values; NaN cells are drawn grey.
std::string svg_heatmap(std::span<const double> values, int rows, int cols, const std::string& title,
                        const std::string& row_label, const std::string& col_label);

/// Inducers, the reconstruction shaded by log(m), an optional Euler-spiral
/// overlay and an optional ground truth. Sized in corpus pixels.
std::string svg_reconstruction(const Reconstruction& rec, const Inducer& i1, const Inducer& i2,
                               const std::optional<Polyline>& euler = std::nullopt,
                               const std::optional<Polyline>& ground_truth = std::nullopt);

/// JSON record of one reconstruction: inducers, points, m, flags, options.
std::string reconstruction_json(const Reconstruction& rec, const Inducer& i1, const Inducer& i2,
                                const ReconstructOptions& options, const std::optional<Polyline>& euler);

/// CSV of a scale grid: theta1, theta2, valid, std_of_mu, mean_of_sigma, scales_used, min_count.
std::string scale_grid_csv(std::span<const ScaleGridCell> cells);

}  // namespace meancurve

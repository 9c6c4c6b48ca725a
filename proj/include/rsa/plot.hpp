#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rsa/pipeline.hpp"

namespace rsa {

struct PlotGroup {
  std::string model;
  int best_layer = 0;
  std::vector<double> values;  // per-participant rho
  double baseline_mean = 0.0;
};

/// Strip-plus-box chart of participant rho per model for one network, with
/// the shuffled-baseline mean as a dashed line and the noise ceiling as a band.
struct PlotSpec {
  std::string kind = "strip_box";
  Network network = Network::LanguageLH;
  std::vector<PlotGroup> groups;  // report order
  double ceiling_lower = 0.0;
  double ceiling_upper = 0.0;
  std::string title;
  std::string x_label = "model";
  std::string y_label = "representational similarity (Spearman rho)";
};

/// One spec per network, networks in order of first appearance.
/// Throws InvalidArgument on an empty report list.
std::vector<PlotSpec> build_plot_specs(const std::vector<AlignmentReport>& reports);

std::string render_svg(const PlotSpec& spec);

/// Writes `<out_dir>/plot_<network>.svg` per network and returns the paths.
std::vector<std::filesystem::path> render_plot(const std::vector<AlignmentReport>& reports,
                                               const std::filesystem::path& out_dir);

}  // namespace rsa

#include "rsa/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rsa/io.hpp"

namespace rsa {

namespace {

constexpr double kGroupWidth = 110.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kPlotHeight = 300.0;
constexpr double kBottom = 70.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Linear-interpolated quantile of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<PlotSpec> build_plot_specs(const std::vector<AlignmentReport>& reports) {
  if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "cannot plot an empty report list");
  std::vector<PlotSpec> specs;
  for (const auto& r : reports) {
    auto it = std::find_if(specs.begin(), specs.end(), [&](const PlotSpec& s) { return s.network == r.network; });
    if (it == specs.end()) {
      PlotSpec spec;
      spec.network = r.network;
      spec.ceiling_lower = std::clamp(r.ceiling.lower, -1.0, 1.0);
      spec.ceiling_upper = std::clamp(r.ceiling.upper, -1.0, 1.0);
      spec.title = "Representational similarity, " + std::string(to_string(r.condition)) + " condition, " +
                   std::string(to_string(r.network));
      specs.push_back(std::move(spec));
      it = specs.end() - 1;
    }
    it->groups.push_back({r.model_name, r.best_layer, r.per_participant_rho, std::clamp(r.baseline.grand_mean, -1.0, 1.0)});
  }
  return specs;
}

std::string render_svg(const PlotSpec& spec) {
  double lo = std::min({0.0, spec.ceiling_lower});
  double hi = std::max({0.1, spec.ceiling_upper});
  for (const auto& g : spec.groups) {
    for (double v : g.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    lo = std::min(lo, g.baseline_mean);
  }
  lo = std::max(-1.0, std::floor(lo * 10.0) / 10.0);
  hi = std::min(1.0, std::ceil(hi * 10.0) / 10.0);
  if (hi <= lo) hi = lo + 0.1;

  const double width = kLeft + kRight + kGroupWidth * static_cast<double>(std::max<std::size_t>(spec.groups.size(), 1));
  const double height = kTop + kPlotHeight + kBottom;
  const double plot_right = width - kRight;
  auto y_of = [&](double v) { return kTop + (hi - v) / (hi - lo) * kPlotHeight; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width) << "\" height=\""
    << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n"
    << "<title>" << escape_xml(spec.title) << "</title>\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height) << "\" fill=\"white\"/>\n"
    << "<text x=\"" << fmt(width / 2) << "\" y=\"25\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"14\">" << escape_xml(spec.title) << "</text>\n";

  // Noise ceiling band.
  const double band_top = y_of(std::max(spec.ceiling_lower, spec.ceiling_upper));
  const double band_bottom = y_of(std::min(spec.ceiling_lower, spec.ceiling_upper));
  s << "<rect class=\"ceiling-band\" x=\"" << fmt(kLeft) << "\" y=\"" << fmt(band_top) << "\" width=\""
    << fmt(plot_right - kLeft) << "\" height=\"" << fmt(std::max(band_bottom - band_top, 1.0))
    << "\" fill=\"#999999\" fill-opacity=\"0.3\" data-lower=\"" << io::format_double(spec.ceiling_lower)
    << "\" data-upper=\"" << io::format_double(spec.ceiling_upper) << "\"/>\n";

  // Axes and ticks.
  s << "<g class=\"axes\" font-family=\"sans-serif\" font-size=\"10\">\n"
    << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
    << fmt(kTop + kPlotHeight) << "\" stroke=\"black\"/>\n";
  const int ticks = static_cast<int>(std::lround((hi - lo) * 10.0));
  const int step = ticks > 10 ? 2 : 1;
  for (int t = 0; t <= ticks; t += step) {
    const double v = lo + t / 10.0;
    const double y = y_of(v);
    s << "<line x1=\"" << fmt(kLeft - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft) << "\" y2=\"" << fmt(y)
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << fmt(kLeft - 7) << "\" y=\"" << fmt(y + 3) << "\" text-anchor=\"end\">" << fmt(v)
      << "</text>\n";
  }
  if (lo < 0.0 && hi > 0.0) {
    s << "<line class=\"zero\" x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y_of(0.0)) << "\" x2=\"" << fmt(plot_right)
      << "\" y2=\"" << fmt(y_of(0.0)) << "\" stroke=\"#cccccc\"/>\n";
  }
  s << "<text x=\"18\" y=\"" << fmt(kTop + kPlotHeight / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << fmt(kTop + kPlotHeight / 2) << ")\">" << escape_xml(spec.y_label) << "</text>\n"
    << "<text x=\"" << fmt((kLeft + plot_right) / 2) << "\" y=\"" << fmt(height - 12)
    << "\" text-anchor=\"middle\">" << escape_xml(spec.x_label) << "</text>\n"
    << "</g>\n";

  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    const auto& g = spec.groups[gi];
    const double cx = kLeft + kGroupWidth * (static_cast<double>(gi) + 0.5);
    s << "<g class=\"group\" data-model=\"" << escape_xml(g.model) << "\" data-best-layer=\"" << g.best_layer
      << "\">\n";
    if (!g.values.empty()) {
      auto sorted = g.values;
      std::sort(sorted.begin(), sorted.end());
      const double q1 = quantile(sorted, 0.25);
      const double med = quantile(sorted, 0.5);
      const double q3 = quantile(sorted, 0.75);
      s << "<line class=\"whisker\" x1=\"" << fmt(cx) << "\" y1=\"" << fmt(y_of(sorted.back())) << "\" x2=\""
        << fmt(cx) << "\" y2=\"" << fmt(y_of(sorted.front())) << "\" stroke=\"black\"/>\n"
        << "<rect class=\"box\" x=\"" << fmt(cx - 20) << "\" y=\"" << fmt(y_of(q3)) << "\" width=\"40\" height=\""
        << fmt(std::max(y_of(q1) - y_of(q3), 0.5)) << "\" fill=\"#cfe2f3\" stroke=\"black\"/>\n"
        << "<line class=\"median\" x1=\"" << fmt(cx - 20) << "\" y1=\"" << fmt(y_of(med)) << "\" x2=\""
        << fmt(cx + 20) << "\" y2=\"" << fmt(y_of(med)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      for (std::size_t i = 0; i < g.values.size(); ++i) {
        // Fixed jitter pattern keeps the output deterministic.
        const double jitter = static_cast<double>(static_cast<int>((i * 7) % 13) - 6) * 2.5;
        s << "<circle class=\"point\" cx=\"" << fmt(cx + jitter) << "\" cy=\"" << fmt(y_of(g.values[i]))
          << "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.8\"/>\n";
      }
    }
    s << "<line class=\"baseline\" x1=\"" << fmt(cx - 40) << "\" y1=\"" << fmt(y_of(g.baseline_mean)) << "\" x2=\""
      << fmt(cx + 40) << "\" y2=\"" << fmt(y_of(g.baseline_mean))
      << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n"
      << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + kPlotHeight + 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(g.model)
      << "</text>\n"
      << "<text x=\"" << fmt(cx) << "\" y=\"" << fmt(kTop + kPlotHeight + 32)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">layer " << g.best_layer
      << "</text>\n"
      << "</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::filesystem::path> render_plot(const std::vector<AlignmentReport>& reports,
                                               const std::filesystem::path& out_dir) {
  const auto specs = build_plot_specs(reports);
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (const auto& spec : specs) {
    files.emplace_back(out_dir / ("plot_" + std::string(to_string(spec.network)) + ".svg"), render_svg(spec));
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& [path, svg] : files) {
    io::write_file_atomic(path, svg);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace rsa

#include "losslim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "losslim/io.hpp"

namespace losslim {

namespace {

// Fixed 8-step sequential ramp (dark blue to light yellow).
const char* kColormap[8] = {"#0d0887", "#5302a3", "#8b0aa5", "#b83289",
                            "#db5c68", "#f48849", "#febd2a", "#f0f921"};

}  // namespace

std::string heatmap_svg(const GainMatrix& gains) {
  const Eigen::Index n = gains.values.rows();
  if (n == 0 || gains.values.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "heatmap needs a square gain table");
  }
  const bool log_scale = gains.metric == Metric::H2 && !gains.log_transformed;
  MatrixXd display = gains.values;
  if (log_scale) display = display.array().max(1e-300).log().matrix();

  const double vmin = display.minCoeff();
  const double vmax = display.maxCoeff();
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  const int cell = n <= 16 ? 32 : 10;
  const int margin = 28;
  const int legend_w = 56;
  const int width = margin * 2 + int(n) * cell + legend_w;
  const int height = margin * 2 + int(n) * cell;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\">\n";
  os << "<!-- metric=" << (gains.metric == Metric::H2 ? "H2" : "Hinf")
     << " scale=" << (log_scale ? "ln" : "linear")
     << " min=" << format_double(gains.values.minCoeff())
     << " max=" << format_double(gains.values.maxCoeff())
     << " display_min=" << format_double(vmin)
     << " display_max=" << format_double(vmax) << " -->\n";
  os << "<rect width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";

  // Row i top-down = monitored bus i, column k = disturbed bus k.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t = (display(i, k) - vmin) / span;
      const int bin = std::clamp(int(t * 8.0), 0, 7);
      os << "<rect x=\"" << margin + int(k) * cell << "\" y=\""
         << margin + int(i) * cell << "\" width=\"" << cell << "\" height=\""
         << cell << "\" fill=\"" << kColormap[bin] << "\"/>\n";
    }
  }

  // Cluster boundaries as white rectangles over the diagonal blocks.
  int start = 0;
  for (int boundary : gains.cluster_boundaries) {
    const int size = boundary - start;
    if (size > 0) {
      os << "<rect x=\"" << margin + start * cell << "\" y=\""
         << margin + start * cell << "\" width=\"" << size * cell
         << "\" height=\"" << size * cell
         << "\" fill=\"none\" stroke=\"white\" stroke-width=\"2\"/>\n";
    }
    start = boundary;
  }

  // Legend: the 8 bins with their lower edges.
  const int lx = margin + int(n) * cell + 12;
  const int lh = std::max(12, int(n) * cell / 8);
  for (int b = 0; b < 8; ++b) {
    const double lo = vmin + span * b / 8.0;
    os << "<rect x=\"" << lx << "\" y=\"" << margin + (7 - b) * lh
       << "\" width=\"14\" height=\"" << lh << "\" fill=\"" << kColormap[b]
       << "\"/>\n";
    std::ostringstream label;
    label.precision(3);
    label << lo;
    os << "<text x=\"" << lx + 18 << "\" y=\"" << margin + (7 - b) * lh + lh
       << "\" font-size=\"9\" font-family=\"sans-serif\">" << label.str()
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace losslim

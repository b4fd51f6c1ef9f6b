#pragma once

#include <string>
#include <vector>

#include "banditlab/simulator.hpp"

namespace banditlab {

struct PlotOptions {
  std::string title;
  std::string x_label = "round";
  std::string y_label;
  int width = 800;
  int height = 500;
};

// One policy curve: mean line plus a translucent mean +- 2 std band.
struct BandCurve {
  std::string label;
  std::vector<double> x;
  BandSeries band;
};

// Static SVG with one styled line and band per curve, axes, and a legend.
// The plot area carries data-x0/x1/y0/y1 (data range) and data-left/top/
// width/height (pixel box) attributes so coordinates can be read back.
std::string render_band_plot(const std::vector<BandCurve>& curves, const PlotOptions& options);

struct BarSeries {
  std::string label;
  std::vector<double> mean;    // one per category
  std::vector<double> stddev;  // error bars span +- 2 std
};

std::string render_bar_chart(const std::vector<std::string>& categories, const std::vector<BarSeries>& series,
                             const PlotOptions& options);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace banditlab

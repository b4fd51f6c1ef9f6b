#include "banditlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace banditlab {

namespace {

constexpr int kLeft = 80;
constexpr int kRight = 170;
constexpr int kTop = 40;
constexpr int kBottom = 60;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};
const char* const kDashes[] = {"", "6,3", "2,2", "8,3,2,3", "10,4", "4,4,1,4", "1,3", "12,2"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round-number tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 6) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  }
  return out;
}

std::string tick_label(double v) {
  char buf[32];
  if (std::abs(v) >= 1e5 || (std::abs(v) < 1e-3 && v != 0.0)) {
    std::snprintf(buf, sizeof buf, "%.2g", v);
  } else {
    std::snprintf(buf, sizeof buf, "%g", v);
  }
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  int left, top, width, height;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + (1.0 - (y - y0) / (y1 - y0)) * height; }
};

void open_svg(std::ostringstream& out, const PlotOptions& o) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
      << "\" viewBox=\"0 0 " << o.width << " " << o.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << o.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(o.title)
      << "</text>\n";
}

void draw_axes(std::ostringstream& out, const Frame& f, const PlotOptions& o, bool x_ticks) {
  out << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
  out << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.width << "\" height=\"" << f.height
      << "\"/>\n</g>\n";
  out << "<g class=\"ticks\" fill=\"#333\">\n";
  for (double v : ticks(f.y0, f.y1)) {
    const double y = f.py(v);
    out << "<line x1=\"" << f.left - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << f.left << "\" y2=\"" << num(y)
        << "\" stroke=\"#333\"/>";
    out << "<text x=\"" << f.left - 8 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
        << "</text>\n";
  }
  if (x_ticks) {
    for (double v : ticks(f.x0, f.x1)) {
      const double x = f.px(v);
      const int base = f.top + f.height;
      out << "<line x1=\"" << num(x) << "\" y1=\"" << base << "\" x2=\"" << num(x) << "\" y2=\"" << base + 5
          << "\" stroke=\"#333\"/>";
      out << "<text x=\"" << num(x) << "\" y=\"" << base + 18 << "\" text-anchor=\"middle\">" << tick_label(v)
          << "</text>\n";
    }
  }
  out << "</g>\n";
  out << "<text x=\"" << f.left + f.width / 2 << "\" y=\"" << o.height - 15 << "\" text-anchor=\"middle\">"
      << escape(o.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << f.top + f.height / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(o.y_label) << "</text>\n";
}

void draw_legend(std::ostringstream& out, const Frame& f, const std::vector<std::string>& labels, bool bars) {
  const int x = f.left + f.width + 15;
  out << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const int y = f.top + 10 + static_cast<int>(k) * 20;
    const char* color = kColors[k % std::size(kColors)];
    if (bars) {
      out << "<rect x=\"" << x << "\" y=\"" << y - 6 << "\" width=\"24\" height=\"12\" fill=\"" << color << "\"/>";
    } else {
      out << "<line x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24 << "\" y2=\"" << y << "\" stroke=\""
          << color << "\" stroke-width=\"2\"";
      const char* dash = kDashes[k % std::size(kDashes)];
      if (*dash) out << " stroke-dasharray=\"" << dash << "\"";
      out << "/>";
    }
    out << "<text x=\"" << x + 30 << "\" y=\"" << y + 4 << "\">" << escape(labels[k]) << "</text>\n";
  }
  out << "</g>\n";
}

}  // namespace

std::string render_band_plot(const std::vector<BandCurve>& curves, const PlotOptions& options) {
  if (curves.empty()) throw std::invalid_argument("plot: no curves to draw");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& c : curves) {
    if (c.x.empty() || c.x.size() != c.band.mean.size() || c.band.lower.size() != c.x.size() ||
        c.band.upper.size() != c.x.size()) {
      throw std::invalid_argument("plot: curve '" + c.label + "' has mismatched or empty columns");
    }
    for (std::size_t k = 0; k < c.x.size(); ++k) {
      x0 = std::min(x0, c.x[k]);
      x1 = std::max(x1, c.x[k]);
      for (double v : {c.band.lower[k], c.band.upper[k], c.band.mean[k]}) {
        if (std::isfinite(v)) {
          y0 = std::min(y0, v);
          y1 = std::max(y1, v);
        }
      }
    }
  }
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  Frame f{x0, x1, y0 - pad, y1 + pad, kLeft, kTop, options.width - kLeft - kRight, options.height - kTop - kBottom};

  std::ostringstream out;
  open_svg(out, options);
  draw_axes(out, f, options, true);
  {
    std::ostringstream attrs;
    attrs << std::setprecision(17) << "data-x0=\"" << f.x0 << "\" data-x1=\"" << f.x1 << "\" data-y0=\"" << f.y0
          << "\" data-y1=\"" << f.y1 << "\" data-left=\"" << f.left << "\" data-top=\"" << f.top << "\" data-width=\""
          << f.width << "\" data-height=\"" << f.height << "\"";
    out << "<g class=\"plot-area\" " << attrs.str() << ">\n";
  }
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* color = kColors[k % std::size(kColors)];
    const char* dash = kDashes[k % std::size(kDashes)];
    out << "<g class=\"series\" data-label=\"" << escape(c.label) << "\">\n";
    out << "<path class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" d=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      out << (i == 0 ? "M" : " L") << num(f.px(c.x[i])) << "," << num(f.py(c.band.upper[i]));
    }
    for (std::size_t i = c.x.size(); i-- > 0;) out << " L" << num(f.px(c.x[i])) << "," << num(f.py(c.band.lower[i]));
    out << " Z\"/>\n";
    out << "<path class=\"line\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (*dash) out << " stroke-dasharray=\"" << dash << "\"";
    out << " d=\"";
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      out << (i == 0 ? "M" : " L") << num(f.px(c.x[i])) << "," << num(f.py(c.band.mean[i]));
    }
    out << "\"/>\n</g>\n";
  }
  out << "</g>\n";
  std::vector<std::string> labels;
  for (const auto& c : curves) labels.push_back(c.label);
  draw_legend(out, f, labels, false);
  out << "</svg>\n";
  return out.str();
}

std::string render_bar_chart(const std::vector<std::string>& categories, const std::vector<BarSeries>& series,
                             const PlotOptions& options) {
  if (categories.empty() || series.empty()) throw std::invalid_argument("bar chart: no data");
  double y1 = 0.0;
  for (const auto& s : series) {
    if (s.mean.size() != categories.size() || s.stddev.size() != categories.size()) {
      throw std::invalid_argument("bar chart: series '" + s.label + "' does not match the categories");
    }
    for (std::size_t k = 0; k < s.mean.size(); ++k) y1 = std::max(y1, s.mean[k] + 2.0 * s.stddev[k]);
  }
  if (!(y1 > 0.0)) y1 = 1.0;
  Frame f{0.0, static_cast<double>(categories.size()), 0.0, y1 * 1.05, kLeft, kTop, options.width - kLeft - kRight,
          options.height - kTop - kBottom};

  std::ostringstream out;
  open_svg(out, options);
  draw_axes(out, f, options, false);
  const double group = static_cast<double>(f.width) / categories.size();
  const double bar = group * 0.8 / series.size();
  out << "<g class=\"bars\">\n";
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = f.left + c * group;
    out << "<text x=\"" << num(gx + group / 2) << "\" y=\"" << f.top + f.height + 18 << "\" text-anchor=\"middle\">"
        << escape(categories[c]) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double x = gx + group * 0.1 + s * bar;
      const double m = series[s].mean[c];
      const double sd = series[s].stddev[c];
      out << "<rect x=\"" << num(x) << "\" y=\"" << num(f.py(m)) << "\" width=\"" << num(bar * 0.9)
          << "\" height=\"" << num(f.py(0.0) - f.py(m)) << "\" fill=\"" << kColors[s % std::size(kColors)] << "\"/>";
      const double cx = x + bar * 0.45;
      out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(f.py(std::max(0.0, m - 2 * sd))) << "\" x2=\"" << num(cx)
          << "\" y2=\"" << num(f.py(m + 2 * sd)) << "\" stroke=\"#222\"/>\n";
    }
  }
  out << "</g>\n";
  std::vector<std::string> labels;
  for (const auto& s : series) labels.push_back(s.label);
  draw_legend(out, f, labels, true);
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace banditlab

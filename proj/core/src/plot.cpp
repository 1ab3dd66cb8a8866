#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "ofo/scenario.hpp"

namespace ofo {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 50.0;
constexpr std::size_t kMaxPoints = 2000;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Series {
  std::vector<double> t;
  std::vector<double> v;
  std::string color;
  std::string dash;
};

class Chart {
 public:
  Chart(std::string title, std::string ylabel) : title_(std::move(title)), ylabel_(std::move(ylabel)) {}

  void add(Series s) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      t_min_ = std::min(t_min_, s.t[i]);
      t_max_ = std::max(t_max_, s.t[i]);
      v_min_ = std::min(v_min_, s.v[i]);
      v_max_ = std::max(v_max_, s.v[i]);
    }
    series_.push_back(std::move(s));
  }

  std::string render() const {
    double lo = v_min_;
    double hi = v_max_;
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double t0 = t_min_;
    const double t1 = t_max_ > t_min_ ? t_max_ : t_min_ + 1.0;
    auto px = [&](double t) { return kMargin + (t - t0) / (t1 - t0) * (kWidth - 2 * kMargin); };
    auto py = [&](double v) { return kHeight - kMargin - (v - lo) / (hi - lo) * (kHeight - 2 * kMargin); };

    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">"
        << title_ << "</text>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
        << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
        << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    out << std::setprecision(4) << std::defaultfloat;
    out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 15 << "\" font-family=\"sans-serif\" "
           "font-size=\"10\">" << t0 << "</text>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 15
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">t = " << t1 << "</text>\n";
    out << "<text x=\"" << kMargin - 5 << "\" y=\"" << py(hi - pad) << "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"10\">" << hi - pad << "</text>\n";
    out << "<text x=\"" << kMargin - 5 << "\" y=\"" << py(lo + pad) << "\" text-anchor=\"end\" "
           "font-family=\"sans-serif\" font-size=\"10\">" << lo + pad << "</text>\n";
    out << "<text x=\"12\" y=\"" << kHeight / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">" << ylabel_
        << "</text>\n";
    out << std::fixed << std::setprecision(2);
    for (const Series& s : series_) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
      if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
      out << " points=\"";
      const std::size_t stride = std::max<std::size_t>(1, s.t.size() / kMaxPoints);
      for (std::size_t i = 0; i < s.t.size(); i += stride) out << px(s.t[i]) << ',' << py(s.v[i]) << ' ';
      if (!s.t.empty()) out << px(s.t.back()) << ',' << py(s.v.back());
      out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
  }

 private:
  std::string title_;
  std::string ylabel_;
  std::vector<Series> series_;
  double t_min_ = std::numeric_limits<double>::infinity();
  double t_max_ = -std::numeric_limits<double>::infinity();
  double v_min_ = std::numeric_limits<double>::infinity();
  double v_max_ = -std::numeric_limits<double>::infinity();
};

/// Piecewise-constant reference drawn as steps at the segment changes.
Series reference_series(const ClosedLoopTrajectory& t, const std::vector<SegmentReference>& refs, bool input,
                        Eigen::Index component) {
  Series s;
  s.color = "black";
  s.dash = "6,4";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const SegmentReference& r = refs.at(t.segments[i]);
    const double v = input ? r.u_star[component] : r.y_star[component];
    if (i > 0 && t.segments[i] != t.segments[i - 1]) {
      s.t.push_back(t.times[i - 1]);
      s.v.push_back(v);
    }
    s.t.push_back(t.times[i]);
    s.v.push_back(v);
  }
  return s;
}

std::string chart_title(const char* what, double alpha) {
  std::ostringstream out;
  out << what << ", alpha = " << alpha;
  return out.str();
}

}  // namespace

std::string input_plot_svg(const AlphaRun& run, const std::vector<SegmentReference>& references, const Box& box) {
  const ClosedLoopTrajectory& t = run.trajectory;
  Chart chart(chart_title("input u(t)", run.alpha), "u");
  for (Eigen::Index j = 0; j < t.input_dim; ++j) {
    Series s;
    s.color = kColors[j % 5];
    for (std::size_t i = 0; i < t.size(); ++i) {
      s.t.push_back(t.times[i]);
      s.v.push_back(t.inputs[i][j]);
    }
    chart.add(std::move(s));
    chart.add(reference_series(t, references, true, j));
    if (!t.times.empty()) {
      for (double bound : {box.lower()[j], box.upper()[j]}) {
        chart.add(Series{{t.times.front(), t.times.back()}, {bound, bound}, "gray", "2,3"});
      }
    }
  }
  return chart.render();
}

std::string output_plot_svg(const AlphaRun& run, const std::vector<SegmentReference>& references) {
  const ClosedLoopTrajectory& t = run.trajectory;
  Chart chart(chart_title("output y(t)", run.alpha), "y");
  for (Eigen::Index j = 0; j < t.output_dim; ++j) {
    Series s;
    s.color = kColors[j % 5];
    for (std::size_t i = 0; i < t.size(); ++i) {
      s.t.push_back(t.times[i]);
      s.v.push_back(t.outputs[i][j]);
    }
    chart.add(std::move(s));
    chart.add(reference_series(t, references, false, j));
  }
  return chart.render();
}

}  // namespace ofo

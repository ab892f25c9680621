#include "stqos/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "stqos/csv.hpp"
#include "stqos/error.hpp"
#include "stqos/sim.hpp"

namespace stqos::report {

namespace fs = std::filesystem;

Figure parse_figure(std::string_view id) {
  if (id == "fig2") return Figure::fig2;
  if (id == "fig4") return Figure::fig4;
  if (id == "fig5") return Figure::fig5;
  throw ConfigError("unknown figure '" + std::string(id) + "' (expected fig2, fig4 or fig5)");
}

std::string figure_name(Figure f) {
  switch (f) {
    case Figure::fig2: return "fig2";
    case Figure::fig4: return "fig4";
    case Figure::fig5: return "fig5";
  }
  return "fig2";
}

namespace {

constexpr double kSec = sim::kSecondsPerChannelUse;

double cell_number(const csv::Table& t, const std::vector<std::string>& row, std::string_view col) {
  const std::size_t i = t.column(col);
  if (i >= row.size()) throw SchemaError("short row in column '" + std::string(col) + "'");
  const auto v = csv::parse_number(row[i]);
  if (!v) throw SchemaError("non-numeric value '" + row[i] + "' in column '" + std::string(col) + "'");
  return *v;
}

std::string cell(const csv::Table& t, const std::vector<std::string>& row, std::string_view col) {
  const std::size_t i = t.column(col);
  return i < row.size() ? row[i] : std::string{};
}

// Averages y over replications sharing (series, x).
PlotData aggregate(PlotData base, const std::vector<PlotPoint>& raw, bool numeric_series) {
  std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
  std::vector<std::string> order;
  for (const auto& p : raw) {
    if (std::find(order.begin(), order.end(), p.series) == order.end()) order.push_back(p.series);
    auto& a = acc[{p.series, p.x}];
    a.first += p.y;
    a.second += 1;
  }
  if (numeric_series) {
    auto key = [](const std::string& s) {
      const auto eq = s.find('=');
      const auto v = csv::parse_number(eq == std::string::npos ? s : s.substr(eq + 1));
      return v.value_or(0.0);
    };
    std::stable_sort(order.begin(), order.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  }
  base.series_order = order;
  for (const auto& s : order) {
    for (const auto& [k, v] : acc) {
      if (k.first == s) base.points.push_back({k.second, v.first / v.second, s});
    }
  }
  return base;
}

PlotData from_sweep(const csv::Table& t, Figure fig) {
  std::vector<PlotPoint> raw;
  PlotData pd;
  const std::string axis = t.rows.empty() ? std::string{} : cell(t, t.rows.front(), "axis");
  auto series_of = [&](const std::vector<std::string>& row, std::string_view fallback) {
    const std::string s = cell(t, row, "series_value");
    return s.empty() ? cell(t, row, fallback) : cell(t, row, "series_axis") + "=" + s;
  };
  const double x_scale = axis == "aoi_threshold" ? kSec : 1.0;
  const std::string x_label = axis == "aoi_threshold" ? "aoi_threshold_s" : axis;

  switch (fig) {
    case Figure::fig2: {
      pd.title = "End-to-end delay vs " + axis;
      pd.x_label = x_label;
      pd.y_label = "mean_total_delay_s";
      t.column("value");
      t.column("mean_total_delay_cu");
      for (const auto& row : t.rows) {
        raw.push_back({cell_number(t, row, "value") * x_scale, cell_number(t, row, "mean_total_delay_cu") * kSec,
                       series_of(row, "mode")});
      }
      return aggregate(pd, raw, false);
    }
    case Figure::fig4: {
      const bool by_gbs = axis == "gbs_count";
      const std::string y_col = by_gbs ? "mean_peak_aoi_cu" : "peak_aoi_violation";
      pd.title = (by_gbs ? "Mean peak AoI vs " : "Peak-AoI violation probability vs ") + axis;
      pd.x_label = x_label;
      pd.y_label = by_gbs ? "mean_peak_aoi_s" : "peak_aoi_violation";
      t.column("value");
      t.column(y_col);
      for (const auto& row : t.rows) {
        const double y = cell_number(t, row, y_col) * (by_gbs ? kSec : 1.0);
        raw.push_back({cell_number(t, row, "value") * x_scale, y, series_of(row, "mode")});
      }
      return aggregate(pd, raw, false);
    }
    case Figure::fig5: {
      pd.title = "Error-rate bounded QoS exponent vs sub-blocklength";
      pd.x_label = "sub_blocklength";
      pd.y_label = "theta_error_per_n_hat";
      t.column("sub_blocklength");
      t.column("max_rounds");
      t.column("theta_error");
      for (const auto& row : t.rows) {
        raw.push_back({cell_number(t, row, "sub_blocklength"), cell_number(t, row, "theta_error"),
                       "L=" + cell(t, row, "max_rounds")});
      }
      return aggregate(pd, raw, true);
    }
  }
  return pd;
}

PlotData from_run(const fs::path& dir, Figure fig) {
  PlotData pd;
  switch (fig) {
    case Figure::fig2: {
      if (!fs::exists(dir / "trace.csv")) throw SchemaError("missing trace.csv in " + dir.string());
      const auto t = csv::read(dir / "trace.csv");
      t.column("rounds");
      t.column("total_cu");
      pd.title = "End-to-end delay vs HARQ rounds used";
      pd.x_label = "rounds";
      pd.y_label = "mean_total_delay_s";
      std::vector<PlotPoint> raw;
      for (const auto& row : t.rows) {
        raw.push_back({cell_number(t, row, "rounds"), cell_number(t, row, "total_cu") * kSec, "run"});
      }
      return aggregate(pd, raw, false);
    }
    case Figure::fig4: {
      if (!fs::exists(dir / "aoi.csv")) throw SchemaError("missing aoi.csv in " + dir.string());
      const auto t = csv::read(dir / "aoi.csv");
      t.column("age_cu");
      t.column("is_peak");
      std::vector<double> peaks;
      for (const auto& row : t.rows) {
        if (cell_number(t, row, "is_peak") != 0.0) peaks.push_back(cell_number(t, row, "age_cu"));
      }
      pd.title = "Peak-AoI violation probability vs threshold";
      pd.x_label = "aoi_threshold_s";
      pd.y_label = "peak_aoi_violation";
      pd.series_order = {"run"};
      if (peaks.empty()) return pd;
      std::sort(peaks.begin(), peaks.end());
      const double lo = peaks.front();
      const double hi = peaks.back();
      constexpr int kPoints = 50;
      for (int i = 0; i < kPoints; ++i) {
        const double th = lo + (hi - lo) * i / (kPoints - 1);
        const auto above = peaks.end() - std::upper_bound(peaks.begin(), peaks.end(), th);
        pd.points.push_back({th * kSec, static_cast<double>(above) / static_cast<double>(peaks.size()), "run"});
      }
      return pd;
    }
    case Figure::fig5:
      throw SchemaError("fig5 needs sweep.csv with columns sub_blocklength, max_rounds, theta_error in " +
                        dir.string());
  }
  return pd;
}

std::string fixed2(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

PlotData derive(const fs::path& dir, Figure figure) {
  if (fs::exists(dir / "sweep.csv")) return from_sweep(csv::read(dir / "sweep.csv"), figure);
  return from_run(dir, figure);
}

std::string plot_csv(const PlotData& data) {
  std::string out = "x,y,series\n";
  for (const auto& p : data.points) {
    csv::Row r;
    r.add(p.x).add(p.y).add(p.series);
    out += r.str() + "\n";
  }
  return out;
}

std::string plot_svg(const PlotData& data) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  std::vector<const PlotPoint*> finite;
  for (const auto& p : data.points) {
    if (std::isfinite(p.x) && std::isfinite(p.y)) finite.push_back(&p);
  }
  if (!finite.empty()) {
    x0 = x1 = finite.front()->x;
    y0 = y1 = finite.front()->y;
    for (const auto* p : finite) {
      x0 = std::min(x0, p->x);
      x1 = std::max(x1, p->x);
      y0 = std::min(y0, p->y);
      y1 = std::max(y1, p->y);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  s += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"" + fixed2(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + xml_escape(data.title) + "</text>\n";
  s += "<line x1=\"" + fixed2(L) + "\" y1=\"" + fixed2(H - B) + "\" x2=\"" + fixed2(W - R) + "\" y2=\"" + fixed2(H - B) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fixed2(L) + "\" y1=\"" + fixed2(T) + "\" x2=\"" + fixed2(L) + "\" y2=\"" + fixed2(H - B) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fixed2((L + W - R) / 2) + "\" y=\"" + fixed2(H - 12) + "\" text-anchor=\"middle\" font-size=\"12\">" + xml_escape(data.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fixed2((T + H - B) / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " + fixed2((T + H - B) / 2) + ")\">" + xml_escape(data.y_label) + "</text>\n";
  s += "<text x=\"" + fixed2(L) + "\" y=\"" + fixed2(H - B + 16) + "\" font-size=\"10\">" + csv::format_number(x0) + "</text>\n";
  s += "<text x=\"" + fixed2(W - R) + "\" y=\"" + fixed2(H - B + 16) + "\" text-anchor=\"end\" font-size=\"10\">" + csv::format_number(x1) + "</text>\n";
  s += "<text x=\"" + fixed2(L - 4) + "\" y=\"" + fixed2(H - B) + "\" text-anchor=\"end\" font-size=\"10\">" + csv::format_number(y0) + "</text>\n";
  s += "<text x=\"" + fixed2(L - 4) + "\" y=\"" + fixed2(T + 8) + "\" text-anchor=\"end\" font-size=\"10\">" + csv::format_number(y1) + "</text>\n";

  for (std::size_t si = 0; si < data.series_order.size(); ++si) {
    const std::string& name = data.series_order[si];
    const char* color = colors[si % std::size(colors)];
    std::string pts;
    for (const auto* p : finite) {
      if (p->series != name) continue;
      if (!pts.empty()) pts += ' ';
      pts += fixed2(sx(p->x)) + "," + fixed2(sy(p->y));
    }
    if (!pts.empty()) {
      s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    const double ly = T + 14.0 * static_cast<double>(si) + 10.0;
    s += "<line x1=\"" + fixed2(W - R + 10) + "\" y1=\"" + fixed2(ly) + "\" x2=\"" + fixed2(W - R + 30) + "\" y2=\"" + fixed2(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fixed2(W - R + 34) + "\" y=\"" + fixed2(ly + 4) + "\" font-size=\"10\">" + xml_escape(name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::vector<fs::path> report(const fs::path& dir, Figure figure) {
  const PlotData data = derive(dir, figure);
  const std::string name = figure_name(figure);
  const fs::path csv_path = dir / (name + ".csv");
  const fs::path svg_path = dir / (name + ".svg");
  csv::write_file(csv_path, plot_csv(data));
  csv::write_file(svg_path, plot_svg(data));
  return {csv_path, svg_path};
}

}  // namespace stqos::report

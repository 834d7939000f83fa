#include "seqinv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "seqinv/errors.hpp"

namespace seqinv {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvTable::render() const {
  std::ostringstream os;
  for (const auto& line : meta) os << "# " << line << '\n';
  const auto emit = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

CsvTable observation_table(const ObservationSet& obs) {
  CsvTable table;
  table.header = {"j", "Y", "X"};
  for (std::size_t j = 1; j <= obs.J; ++j)
    table.add_row({std::to_string(j), format_double(obs.Y[j - 1]), format_double(obs.X[j - 1])});
  return table;
}

std::string render_rate_svg(const RateFit& fit, const std::string& title, const std::string& x_label) {
  constexpr double width = 640, height = 420, left = 70, right = 20, top = 40, bottom = 60;
  double xmin = fit.points.front().first, xmax = xmin;
  double ymin = fit.points.front().second, ymax = ymin;
  for (const auto& [x, y] : fit.points) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  for (double x : {xmin, xmax}) {
    ymin = std::min(ymin, fit.intercept + fit.slope * x);
    ymax = std::max(ymax, fit.intercept + fit.slope * x);
  }
  const double xpad = std::max(1e-9, 0.05 * (xmax - xmin)), ypad = std::max(1e-9, 0.08 * (ymax - ymin));
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
  const auto py = [&](double y) { return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom); };
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
     << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double x = xmin + (xmax - xmin) * i / 4.0, y = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">" << num(x)
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y)
       << "</text>\n";
  }
  os << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << x_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << height / 2
     << ")\">log risk</text>\n";
  const double x0 = fit.points.front().first, x1 = fit.points.back().first;
  os << "<line x1=\"" << num(px(x0)) << "\" y1=\"" << num(py(fit.intercept + fit.slope * x0)) << "\" x2=\""
     << num(px(x1)) << "\" y2=\"" << num(py(fit.intercept + fit.slope * x1))
     << "\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
  for (const auto& [x, y] : fit.points)
    os << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"4\" fill=\"firebrick\"/>\n";
  os << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 12 << "\" text-anchor=\"end\">slope " << num(fit.slope)
     << " (expected " << num(fit.expected_slope) << ")</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace seqinv

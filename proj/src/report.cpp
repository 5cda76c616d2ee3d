#include "phraseprobe/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "phraseprobe/common.hpp"

namespace phraseprobe {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  for (std::string& f : fields) {
    auto first = f.find_first_not_of(' ');
    auto last = f.find_last_not_of(' ');
    f = first == std::string::npos ? std::string() : f.substr(first, last - first + 1);
  }
  return fields;
}

double parse_double(const std::string& text, std::size_t line_number) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(at_line(line_number, "non-numeric CSV value '" + text + "'"));
  }
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.2f", v);
  return buffer;
}

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

SeriesTable read_series_csv(std::istream& in) {
  SeriesTable table;
  std::string line;
  std::size_t line_number = 0;
  if (!std::getline(in, line)) throw ParseError("CSV has no header");
  ++line_number;
  auto header = split_csv_line(line);
  if (header.size() < 2) throw ParseError("CSV needs an x column and at least one series");
  table.x_name = header[0];
  table.series_names.assign(header.begin() + 1, header.end());
  table.values.resize(table.series_names.size());
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(at_line(line_number, "expected " + std::to_string(header.size()) + " CSV fields"));
    }
    table.x_labels.push_back(fields[0]);
    for (std::size_t s = 1; s < fields.size(); ++s) table.values[s - 1].push_back(parse_double(fields[s], line_number));
  }
  return table;
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_series_csv(in);
}

SeriesTable pivot_profile_csv(const std::filesystem::path& path, const std::string& axis) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("profile CSV has no header");
  auto header = split_csv_line(line);
  auto column = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ParseError("profile CSV lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t epoch_col = column("epoch");
  const std::size_t axis_col = column("axis");
  const std::size_t class_col = column("class");
  const std::size_t value_col = column("normalized");

  SeriesTable table;
  table.x_name = "epoch";
  std::map<std::string, std::size_t> series_index;
  std::map<std::string, std::size_t> epoch_index;
  std::vector<std::tuple<std::size_t, std::size_t, double>> cells;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ParseError(at_line(line_number, "ragged profile CSV row"));
    if (f[axis_col] != axis) continue;
    auto [e, new_epoch] = epoch_index.try_emplace(f[epoch_col], table.x_labels.size());
    if (new_epoch) table.x_labels.push_back(f[epoch_col]);
    auto [s, new_series] = series_index.try_emplace(f[class_col], table.series_names.size());
    if (new_series) table.series_names.push_back(f[class_col]);
    cells.emplace_back(s->second, e->second, parse_double(f[value_col], line_number));
  }
  table.values.assign(table.series_names.size(), std::vector<double>(table.x_labels.size(), 0.0));
  for (const auto& [s, e, v] : cells) table.values[s][e] = v;
  return table;
}

std::string render_svg(const SeriesTable& table, const ChartOptions& options) {
  const double left = 60, right = 150, top = 40, bottom = 50;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;

  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& series : table.values) {
    for (double v : series) {
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  const std::size_t points = table.x_labels.size();
  auto x_at = [&](std::size_t i) {
    return left + (points <= 1 ? plot_w / 2 : plot_w * static_cast<double>(i) / static_cast<double>(points - 1));
  };
  auto y_at = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
      << options.height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << escape_xml(options.title) << "</text>\n";
  }
  svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w)
      << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = lo + (hi - lo) * tick / 4.0;
    svg << "<text x=\"" << num(left - 6) << "\" y=\"" << num(y_at(v) + 4) << "\" text-anchor=\"end\">"
        << format_score(v) << "</text>\n";
  }
  const std::size_t label_step = std::max<std::size_t>(1, points / 10);
  for (std::size_t i = 0; i < points; i += label_step) {
    svg << "<text x=\"" << num(x_at(i)) << "\" y=\"" << num(top + plot_h + 16)
        << "\" text-anchor=\"middle\">" << escape_xml(table.x_labels[i]) << "</text>\n";
  }
  svg << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(options.height - 10.0)
      << "\" text-anchor=\"middle\">" << escape_xml(table.x_name) << "</text>\n";
  if (!options.y_label.empty()) {
    svg << "<text x=\"14\" y=\"" << num(top + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << num(top + plot_h / 2) << ")\">" << escape_xml(options.y_label) << "</text>\n";
  }
  for (std::size_t s = 0; s < table.series_names.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < table.values[s].size(); ++i) {
      if (i) svg << ' ';
      svg << num(x_at(i)) << ',' << num(y_at(table.values[s][i]));
    }
    svg << "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(s);
    svg << "<line x1=\"" << num(left + plot_w + 10) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(left + plot_w + 30) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(left + plot_w + 34) << "\" y=\"" << num(ly + 4) << "\">"
        << escape_xml(table.series_names[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const std::filesystem::path& path, const SeriesTable& table, const ChartOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_svg(table, options);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace phraseprobe

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace phraseprobe {

/// A CSV file whose first column is the x label (epoch) and whose remaining columns are
/// numeric series.
struct SeriesTable {
  std::string x_name;
  std::vector<std::string> x_labels;
  std::vector<std::string> series_names;
  /// values[s][row]
  std::vector<std::vector<double>> values;
};

SeriesTable read_series_csv(std::istream& in);
SeriesTable read_series_csv(const std::filesystem::path& path);

/// Long-format CSV (`epoch, axis, class, count, normalized`) pivoted into one series per
/// class of the requested axis, taking the `normalized` column.
SeriesTable pivot_profile_csv(const std::filesystem::path& path, const std::string& axis);

struct ChartOptions {
  std::string title;
  std::string y_label;
  int width = 640;
  int height = 400;
};

/// Line chart with one polyline per series and a legend. Output is deterministic.
std::string render_svg(const SeriesTable& table, const ChartOptions& options = {});
void write_svg(const std::filesystem::path& path, const SeriesTable& table,
               const ChartOptions& options = {});

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& value);

}  // namespace phraseprobe

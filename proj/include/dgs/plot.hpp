#pragma once

#include <string>
#include <vector>

namespace dgs::plot {

// One training curve: mean line plus a shaded min-max band, indexed by
// iteration (xs). lo/hi may equal mean for band-less curves.
struct BandSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> mean;
  std::vector<double> lo;
  std::vector<double> hi;
};

// Renders mean curves with min-max shading into an RGB PNG (written with
// uncompressed deflate blocks; byte-deterministic for identical inputs).
// Labels are rendered with a built-in 5x7 uppercase font.
void write_band_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<BandSeries>& series, int width = 900,
                     int height = 600);

}  // namespace dgs::plot

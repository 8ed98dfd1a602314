#include "dgs/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "dgs/errors.hpp"

namespace dgs::plot {

namespace {

// ----------------------------- PNG encoding -------------------------------

class Crc32 {
 public:
  Crc32() {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
      }
      table_[i] = c;
    }
  }
  std::uint32_t compute(const unsigned char* data, std::size_t n) const {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) {
      c = table_[(c ^ data[i]) & 0xFF] ^ (c >> 8);
    }
    return c ^ 0xFFFFFFFFu;
  }

 private:
  std::uint32_t table_[256];
};

std::uint32_t adler32(const unsigned char* data, std::size_t n) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a = (a + data[i]) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void push_u32be(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

void push_chunk(std::vector<unsigned char>& out, const Crc32& crc,
                const char type[4], const std::vector<unsigned char>& data) {
  push_u32be(out, static_cast<std::uint32_t>(data.size()));
  std::vector<unsigned char> body(type, type + 4);
  body.insert(body.end(), data.begin(), data.end());
  out.insert(out.end(), body.begin(), body.end());
  push_u32be(out, crc.compute(body.data(), body.size()));
}

// RGB rows -> PNG bytes using stored (uncompressed) deflate blocks.
std::vector<unsigned char> encode_png(const std::vector<unsigned char>& rgb,
                                      int width, int height) {
  // Raw scanline stream: filter byte 0 + pixels per row.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(height) * (1 + 3 * width));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const unsigned char* row = rgb.data() + static_cast<std::size_t>(y) * width * 3;
    raw.insert(raw.end(), row, row + 3 * width);
  }

  std::vector<unsigned char> idat;
  idat.push_back(0x78);  // zlib header, 32K window
  idat.push_back(0x01);  // no preset dictionary, fastest compression hint
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t len = std::min<std::size_t>(65535, raw.size() - pos);
    bool final_block = (pos + len == raw.size());
    idat.push_back(final_block ? 1 : 0);  // BFINAL, BTYPE=00 (stored)
    idat.push_back(static_cast<unsigned char>(len & 0xFF));
    idat.push_back(static_cast<unsigned char>(len >> 8));
    idat.push_back(static_cast<unsigned char>(~len & 0xFF));
    idat.push_back(static_cast<unsigned char>((~len >> 8) & 0xFF));
    idat.insert(idat.end(), raw.begin() + pos, raw.begin() + pos + len);
    pos += len;
  }
  push_u32be(idat, adler32(raw.data(), raw.size()));

  Crc32 crc;
  std::vector<unsigned char> png = {137, 80, 78, 71, 13, 10, 26, 10};
  std::vector<unsigned char> ihdr;
  push_u32be(ihdr, static_cast<std::uint32_t>(width));
  push_u32be(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(2);  // truecolor RGB
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // no interlace
  push_chunk(png, crc, "IHDR", ihdr);
  push_chunk(png, crc, "IDAT", idat);
  push_chunk(png, crc, "IEND", {});
  return png;
}

// ------------------------------- canvas -----------------------------------

struct Color {
  unsigned char r, g, b;
};

constexpr Color kPalette[] = {
    {31, 119, 180},   // blue
    {214, 39, 40},    // red
    {44, 160, 44},    // green
    {255, 127, 14},   // orange
    {148, 103, 189},  // purple
    {140, 86, 75},    // brown
};
constexpr int kPaletteSize = static_cast<int>(sizeof(kPalette) / sizeof(Color));

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h * 3, 255) {}

  void set(int x, int y, Color c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    std::size_t k = (static_cast<std::size_t>(y) * w_ + x) * 3;
    px_[k] = c.r;
    px_[k + 1] = c.g;
    px_[k + 2] = c.b;
  }

  // alpha in [0,1]; blends toward c.
  void blend(int x, int y, Color c, double alpha) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    std::size_t k = (static_cast<std::size_t>(y) * w_ + x) * 3;
    px_[k] = static_cast<unsigned char>(px_[k] + (c.r - px_[k]) * alpha);
    px_[k + 1] = static_cast<unsigned char>(px_[k + 1] + (c.g - px_[k + 1]) * alpha);
    px_[k + 2] = static_cast<unsigned char>(px_[k + 2] + (c.b - px_[k + 2]) * alpha);
  }

  void vline(int x, int y0, int y1, Color c) {
    if (y0 > y1) std::swap(y0, y1);
    for (int y = y0; y <= y1; ++y) set(x, y, c);
  }

  void hline(int y, int x0, int x1, Color c) {
    if (x0 > x1) std::swap(x0, x1);
    for (int x = x0; x <= x1; ++x) set(x, y, c);
  }

  void line(int x0, int y0, int x1, int y1, Color c) {
    int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }
  const std::vector<unsigned char>& pixels() const { return px_; }

 private:
  int w_, h_;
  std::vector<unsigned char> px_;
};

// ------------------------------ 5x7 font -----------------------------------

struct Glyph {
  char ch;
  unsigned char rows[7];  // low 5 bits, bit 4 = leftmost column
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char c) {
  for (const Glyph& g : kFont) {
    if (g.ch == c) return &g;
  }
  return nullptr;
}

// Uppercased text at (x, y) = top-left; unknown characters render as space.
void draw_text(Canvas& canvas, int x, int y, const std::string& text, Color c,
               int scale = 1) {
  int cx = x;
  for (char raw : text) {
    char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
    const Glyph* g = find_glyph(ch);
    if (g) {
      for (int row = 0; row < 7; ++row) {
        for (int col = 0; col < 5; ++col) {
          if (g->rows[row] & (1 << (4 - col))) {
            for (int sy = 0; sy < scale; ++sy) {
              for (int sx = 0; sx < scale; ++sx) {
                canvas.set(cx + col * scale + sx, y + row * scale + sy, c);
              }
            }
          }
        }
      }
    }
    cx += 6 * scale;
  }
}

int text_width(const std::string& text, int scale = 1) {
  return static_cast<int>(text.size()) * 6 * scale;
}

// ------------------------------ axis ticks --------------------------------

double nice_step(double range, int target_ticks) {
  if (!(range > 0.0)) return 1.0;
  double raw = range / std::max(1, target_ticks);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step;
  if (norm < 1.5) {
    step = 1.0;
  } else if (norm < 3.5) {
    step = 2.0;
  } else if (norm < 7.5) {
    step = 5.0;
  } else {
    step = 10.0;
  }
  return step * mag;
}

std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

void write_band_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<BandSeries>& series, int width,
                     int height) {
  if (width < 200 || height < 150) {
    throw InvalidArgument("write_band_plot: canvas too small");
  }
  std::vector<BandSeries> norm(series);
  for (BandSeries& s : norm) {
    if (s.mean.size() != s.xs.size()) {
      throw InvalidArgument("write_band_plot: mean/xs length mismatch");
    }
    if (s.lo.size() != s.xs.size()) s.lo = s.mean;
    if (s.hi.size() != s.xs.size()) s.hi = s.mean;
  }
  // Data extent across all series.
  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const BandSeries& s : norm) {
    for (std::size_t k = 0; k < s.xs.size(); ++k) {
      double lo = k < s.lo.size() ? s.lo[k] : s.mean[k];
      double hi = k < s.hi.size() ? s.hi[k] : s.mean[k];
      if (!any) {
        xmin = xmax = s.xs[k];
        ymin = lo;
        ymax = hi;
        any = true;
      } else {
        xmin = std::min(xmin, s.xs[k]);
        xmax = std::max(xmax, s.xs[k]);
        ymin = std::min(ymin, lo);
        ymax = std::max(ymax, hi);
      }
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) {
    ymax = ymin + 1.0;
    ymin -= 1.0;
  }
  // 5% vertical padding so curves do not hug the border.
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const int ml = 72, mr = 20, mt = 34, mb = 46;  // margins
  const int px0 = ml, px1 = width - mr;
  const int py0 = mt, py1 = height - mb;

  auto to_px = [&](double x) {
    return px0 + static_cast<int>(std::lround((x - xmin) / (xmax - xmin) *
                                              (px1 - px0)));
  };
  auto to_py = [&](double y) {
    return py1 - static_cast<int>(std::lround((y - ymin) / (ymax - ymin) *
                                              (py1 - py0)));
  };

  Canvas canvas(width, height);
  const Color black{0, 0, 0};
  const Color grey{210, 210, 210};

  // Gridlines + ticks.
  double xstep = nice_step(xmax - xmin, 6);
  double ystep = nice_step(ymax - ymin, 6);
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + 1e-9 * xstep;
       x += xstep) {
    int px = to_px(x);
    canvas.vline(px, py0, py1, grey);
    std::string lbl = format_tick(x);
    draw_text(canvas, px - text_width(lbl) / 2, py1 + 8, lbl, black);
  }
  for (double y = std::ceil(ymin / ystep) * ystep; y <= ymax + 1e-9 * ystep;
       y += ystep) {
    int py = to_py(y);
    canvas.hline(py, px0, px1, grey);
    std::string lbl = format_tick(y);
    draw_text(canvas, px0 - 6 - text_width(lbl), py - 3, lbl, black);
  }

  // Bands then lines, so lines stay visible.
  for (std::size_t si = 0; si < norm.size(); ++si) {
    const BandSeries& s = norm[si];
    Color c = kPalette[si % kPaletteSize];
    for (std::size_t k = 0; k + 1 < s.xs.size(); ++k) {
      int xa = to_px(s.xs[k]);
      int xb = to_px(s.xs[k + 1]);
      if (xb <= xa) xb = xa + 1;
      for (int x = xa; x < xb; ++x) {
        double t = (xb == xa) ? 0.0
                              : static_cast<double>(x - xa) / (xb - xa);
        double lo = s.lo[k] + t * (s.lo[k + 1] - s.lo[k]);
        double hi = s.hi[k] + t * (s.hi[k + 1] - s.hi[k]);
        int ya = to_py(hi), yb = to_py(lo);
        for (int y = std::max(ya, py0); y <= std::min(yb, py1); ++y) {
          canvas.blend(x, y, c, 0.25);
        }
      }
    }
  }
  for (std::size_t si = 0; si < norm.size(); ++si) {
    const BandSeries& s = norm[si];
    Color c = kPalette[si % kPaletteSize];
    for (std::size_t k = 0; k + 1 < s.xs.size(); ++k) {
      canvas.line(to_px(s.xs[k]), to_py(s.mean[k]), to_px(s.xs[k + 1]),
                  to_py(s.mean[k + 1]), c);
    }
    // Legend entry.
    int ly = py0 + 6 + static_cast<int>(si) * 12;
    canvas.hline(ly + 3, px0 + 8, px0 + 24, c);
    draw_text(canvas, px0 + 30, ly, s.label, black);
  }

  // Frame and labels.
  canvas.hline(py1, px0, px1, black);
  canvas.hline(py0, px0, px1, black);
  canvas.vline(px0, py0, py1, black);
  canvas.vline(px1, py0, py1, black);
  draw_text(canvas, (width - text_width(title, 2)) / 2, 8, title, black, 2);
  draw_text(canvas, (px0 + px1 - text_width(x_label)) / 2, height - 16,
            x_label, black);
  draw_text(canvas, 8, py0 - 14, y_label, black);

  std::vector<unsigned char> png =
      encode_png(canvas.pixels(), canvas.width(), canvas.height());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("write_band_plot: cannot open " + path);
  f.write(reinterpret_cast<const char*>(png.data()),
          static_cast<std::streamsize>(png.size()));
  if (!f) throw InvalidArgument("write_band_plot: write failed for " + path);
}

}  // namespace dgs::plot

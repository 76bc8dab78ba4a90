#include "strokefit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <vector>

namespace strokefit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image from_bytes(const std::vector<unsigned char>& bytes, int w, int h, int channels,
                 Topology topology) {
  Image img(CanvasSpec{w, h, channels, topology});
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c)
      for (int ch = 0; ch < channels; ++ch)
        img(r, c, ch) = bytes[(static_cast<size_t>(r) * w + c) * channels + ch] / 255.0;
  return img;
}

std::vector<unsigned char> to_bytes(const Image& img) {
  std::vector<unsigned char> bytes(static_cast<size_t>(img.canvas.pixel_count()) * img.channels());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      for (int ch = 0; ch < img.channels(); ++ch)
        bytes[(static_cast<size_t>(r) * img.width() + c) * img.channels() + ch] =
            static_cast<unsigned char>(std::lround(std::clamp(img(r, c, ch), 0.0, 1.0) * 255.0));
  return bytes;
}

Image read_png(const std::string& path, Topology topology) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw ValidationError("cannot open " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("libpng initialisation failed");
  }
  std::vector<unsigned char> bytes;
  std::vector<png_bytep> rows;
  int w = 0, h = 0, channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("corrupt PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth > 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("only 8-bit PNG images are supported: " + path);
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  png_read_update_info(png, info);
  w = static_cast<int>(png_get_image_width(png, info));
  h = static_cast<int>(png_get_image_height(png, info));
  channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("unsupported PNG channel layout: " + path);
  }
  bytes.resize(static_cast<size_t>(w) * h * channels);
  rows.resize(h);
  for (int r = 0; r < h; ++r) rows[r] = bytes.data() + static_cast<size_t>(r) * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_bytes(bytes, w, h, channels, topology);
}

void write_png(const std::string& path, const Image& img) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw ValidationError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("libpng initialisation failed");
  }
  std::vector<unsigned char> bytes = to_bytes(img);
  std::vector<png_bytep> rows(img.height());
  for (int r = 0; r < img.height(); ++r)
    rows[r] = bytes.data() + static_cast<size_t>(r) * img.width() * img.channels();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw ValidationError("failed writing PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8,
               img.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Next header token, skipping whitespace and # comments.
std::string pnm_token(const std::string& data, size_t& pos) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const size_t start = pos;
  while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) &&
         data[pos] != '#')
    ++pos;
  return data.substr(start, pos - start);
}

int pnm_int(const std::string& data, size_t& pos, const std::string& path) {
  const std::string tok = pnm_token(data, pos);
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit))
    throw ValidationError("malformed PNM header: " + path);
  return std::stoi(tok);
}

Image read_pnm(const std::string& data, const std::string& path, Topology topology) {
  size_t pos = 0;
  const std::string magic = pnm_token(data, pos);
  const bool ascii = magic == "P2" || magic == "P3";
  const int channels = (magic == "P3" || magic == "P6") ? 3 : 1;
  const int w = pnm_int(data, pos, path);
  const int h = pnm_int(data, pos, path);
  const int maxval = pnm_int(data, pos, path);
  if (w <= 0 || h <= 0) throw ValidationError("PNM image has no pixels: " + path);
  if (maxval != 255) throw ValidationError("only 8-bit (maxval 255) PNM is supported: " + path);
  const size_t count = static_cast<size_t>(w) * h * channels;
  std::vector<unsigned char> bytes(count);
  if (ascii) {
    for (size_t i = 0; i < count; ++i) {
      const int v = pnm_int(data, pos, path);
      if (v > 255) throw ValidationError("PNM sample exceeds maxval: " + path);
      bytes[i] = static_cast<unsigned char>(v);
    }
  } else {
    ++pos;  // single whitespace after maxval
    if (data.size() < pos + count) throw ValidationError("truncated PNM data: " + path);
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(pos), count, bytes.begin());
  }
  return from_bytes(bytes, w, h, channels, topology);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(),
                    [](char a, char b) { return std::tolower(a) == std::tolower(b); });
}

}  // namespace

Image read_image(const std::string& path, Topology topology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() >= 8 && static_cast<unsigned char>(data[0]) == 0x89 && data.substr(1, 3) == "PNG")
    return read_png(path, topology);
  if (data.size() >= 2 && data[0] == 'P' && (data[1] == '2' || data[1] == '3' || data[1] == '5' || data[1] == '6'))
    return read_pnm(data, path, topology);
  throw ValidationError("unrecognised image format (expected PNG, PGM or PPM): " + path);
}

void write_image(const std::string& path, const Image& image) {
  validate(image.canvas);
  if (has_suffix(path, ".pgm") || has_suffix(path, ".ppm") || has_suffix(path, ".pnm")) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << (image.channels() == 3 ? "P6" : "P5") << "\n"
        << image.width() << " " << image.height() << "\n255\n";
    const auto bytes = to_bytes(image);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("failed writing " + path);
    return;
  }
  write_png(path, image);
}

}  // namespace strokefit

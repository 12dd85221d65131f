#include "shapepose/image_io.hpp"

#include <cstdio>
#include <memory>

#include <png.h>

#include "shapepose/errors.hpp"

namespace shapepose {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp msg) {
  throw Error(ErrorKind::MalformedRecord, std::string("PNG: ") + msg);
}

void png_warn(png_structp, png_const_charp) {}

// Returns rows of 16-bit samples from the first channel.
Image16 decode(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw Error(ErrorKind::MissingFile, path);
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw Error(ErrorKind::MalformedRecord, path + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  Image16 img;
  try {
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth == 16) png_set_swap(png);  // 16-bit samples arrive little-endian
    png_read_update_info(png, info);

    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    const int channels = png_get_channels(png, info);
    const int out_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<unsigned char> buffer(rowbytes * img.height);
    std::vector<png_bytep> rows(img.height);
    for (int r = 0; r < img.height; ++r) rows[r] = buffer.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int r = 0; r < img.height; ++r) {
      const unsigned char* row = rows[r];
      for (int c = 0; c < img.width; ++c) {
        std::uint16_t v;
        if (out_depth == 16) {
          // png_set_swap produced little-endian samples.
          const unsigned char* s = row + 2 * static_cast<std::size_t>(c) * channels;
          v = static_cast<std::uint16_t>(s[0] | (s[1] << 8));
        } else {
          v = row[static_cast<std::size_t>(c) * channels];
        }
        img.pixels[static_cast<std::size_t>(r) * img.width + c] = v;
      }
    }
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void encode(const std::string& path, int width, int height, int depth,
            const std::vector<unsigned char>& bytes) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw Error(ErrorKind::IoError, "cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png_create_info_struct(png);
  try {
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes = static_cast<std::size_t>(width) * (depth / 8);
    for (int r = 0; r < height; ++r) {
      png_write_row(png, bytes.data() + r * rowbytes);
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image16 read_png_gray16(const std::string& path) { return decode(path); }

BinaryMask read_png_mask(const std::string& path) {
  const Image16 img = decode(path);
  BinaryMask m(img.width, img.height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) m.data[i] = img.pixels[i] != 0;
  return m;
}

void write_png_gray16(const std::string& path, const Image16& img) {
  std::vector<unsigned char> bytes(img.pixels.size() * 2);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    bytes[2 * i] = static_cast<unsigned char>(img.pixels[i] >> 8);  // PNG is big-endian
    bytes[2 * i + 1] = static_cast<unsigned char>(img.pixels[i] & 0xff);
  }
  encode(path, img.width, img.height, 16, bytes);
}

void write_png_mask(const std::string& path, const BinaryMask& mask) {
  std::vector<unsigned char> bytes(mask.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
  encode(path, mask.width, mask.height, 8, bytes);
}

}  // namespace shapepose

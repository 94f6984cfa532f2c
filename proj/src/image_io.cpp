#include "nwb/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

#include "nwb/error.hpp"

namespace nwb {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSignature, 8) == 0;
}

bool is_ppm(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6';
}

// --- PPM -------------------------------------------------------------------

class PpmHeaderReader {
 public:
  explicit PpmHeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  int next_int() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw FormatError("malformed PPM header");
    }
    long long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000) throw FormatError("PPM header value out of range");
    }
    return static_cast<int>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("malformed PPM header");
    }
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

ImageBuffer decode_ppm(std::span<const std::uint8_t> bytes) {
  PpmHeaderReader reader(bytes);
  reader.skip(2);
  const int width = reader.next_int();
  const int height = reader.next_int();
  const int maxval = reader.next_int();
  if (width < 1 || height < 1) throw FormatError("PPM has empty dimensions");
  if (maxval != 255) {
    throw FormatError("only 8-bit PPM (maxval 255) is supported, got maxval " +
                      std::to_string(maxval));
  }
  const std::size_t offset = reader.raster_offset();
  const std::size_t needed = static_cast<std::size_t>(width) * height * 3;
  if (bytes.size() < offset + needed) throw FormatError("PPM raster is truncated");

  std::vector<LinearRgb> pixels(static_cast<std::size_t>(width) * height);
  const std::uint8_t* raster = bytes.data() + offset;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = srgb_decode(Srgb8{raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]});
  }
  return ImageBuffer(width, height, std::move(pixels));
}

std::vector<std::uint8_t> encode_rgb8(const ImageBuffer& image) {
  std::vector<std::uint8_t> raster;
  raster.reserve(image.size() * 3);
  for (const auto& p : image.pixels()) {
    const Srgb8 e = srgb_encode(p);
    raster.push_back(e.r);
    raster.push_back(e.g);
    raster.push_back(e.b);
  }
  return raster;
}

// --- PNG -------------------------------------------------------------------

struct PngReadSource {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

// libpng reports failures by longjmp; the message is parked here first.
struct PngErrorSlot {
  char message[256] = "PNG codec error";
};

void png_error_handler(png_structp png, png_const_charp message) {
  auto* slot = static_cast<PngErrorSlot*>(png_get_error_ptr(png));
  if (slot != nullptr && message != nullptr) {
    std::snprintf(slot->message, sizeof(slot->message), "%s", message);
  }
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

void png_read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngReadSource*>(png_get_io_ptr(png));
  if (src->pos + length > src->bytes.size()) {
    png_error(png, "PNG data is truncated");
  }
  std::memcpy(out, src->bytes.data() + src->pos, length);
  src->pos += length;
}

void png_write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_flush_callback(png_structp) {}

class PngReader {
 public:
  explicit PngReader(PngErrorSlot* slot) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, slot, png_error_handler,
                                  png_warning_handler);
    if (png_ == nullptr) throw FormatError("cannot create PNG reader");
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw FormatError("cannot create PNG info");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
 public:
  explicit PngWriter(PngErrorSlot* slot) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, slot, png_error_handler,
                                   png_warning_handler);
    if (png_ == nullptr) throw FormatError("cannot create PNG writer");
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_write_struct(&png_, nullptr);
      throw FormatError("cannot create PNG info");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  PngErrorSlot slot;
  PngReader reader(&slot);
  PngReadSource source{bytes, 0};
  png_structp png = reader.png();
  png_infop info = reader.info();
  // Declared before setjmp so a longjmp never skips their construction.
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    throw FormatError(slot.message);
  }
  png_set_read_fn(png, &source, png_read_callback);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_strip_alpha(png);
  }
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
    throw FormatError("unsupported PNG pixel layout");
  }
  if (width < 1 || height < 1 || width > 1u << 15 || height > 1u << 15) {
    throw FormatError("PNG dimensions out of range");
  }
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  raster.resize(row_bytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);

  std::vector<LinearRgb> pixels(static_cast<std::size_t>(width) * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    for (png_uint_32 x = 0; x < width; ++x) {
      const std::uint8_t* p = rows[y] + 3 * x;
      pixels[static_cast<std::size_t>(y) * width + x] = srgb_decode(Srgb8{p[0], p[1], p[2]});
    }
  }
  return ImageBuffer(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

ImageFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") return ImageFormat::Png;
  if (ext == ".ppm" || ext == ".pnm") return ImageFormat::Ppm;
  throw FormatError("unsupported image format '" + ext + "' for " + path.string());
}

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_ppm(bytes)) return decode_ppm(bytes);
  throw FormatError("unrecognised image data (expected PNG or binary PPM)");
}

ImageBuffer read_image(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_image(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_ppm(const ImageBuffer& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto raster = encode_rgb8(image);
  out.insert(out.end(), raster.begin(), raster.end());
  return out;
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
  const std::vector<std::uint8_t> raster = encode_rgb8(image);
  std::vector<std::uint8_t> out;
  PngErrorSlot slot;
  PngWriter writer(&slot);
  png_structp png = writer.png();
  png_infop info = writer.info();
  if (setjmp(png_jmpbuf(png))) {
    throw FormatError(slot.message);
  }
  png_set_write_fn(png, &out, png_write_callback, png_flush_callback);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
  png_set_compression_level(png, 6);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 3;
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<std::uint8_t*>(raster.data()) + static_cast<std::size_t>(y) * stride);
  }
  png_write_end(png, nullptr);
  return out;
}

void write_image(const std::filesystem::path& path, const ImageBuffer& image) {
  const ImageFormat format = format_from_path(path);
  const auto bytes = format == ImageFormat::Png ? encode_png(image) : encode_ppm(image);
  write_file_bytes(path, bytes);
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace nwb

#include "cobra/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace cobra {

namespace {

const char* kind_name(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::kUnreadable: return "cannot read file";
    case IoErrorKind::kUnwritable: return "cannot write file";
    case IoErrorKind::kMalformedHeader: return "malformed header";
    case IoErrorKind::kUnsupportedBitDepth: return "unsupported bit depth";
    case IoErrorKind::kUnsupportedFormat: return "unsupported format";
    case IoErrorKind::kDimensionOverflow: return "dimension overflow";
    case IoErrorKind::kTruncatedData: return "truncated pixel data";
  }
  return "image i/o error";
}

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  return std::equal(suffix.rbegin(), suffix.rend(), s.rbegin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
  });
}

// Tokenizer over a PGM header; skips whitespace and '#' comments.
class PgmReader {
 public:
  PgmReader(const std::string& bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  std::string magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P') {
      throw ImageIoError(IoErrorKind::kMalformedHeader, origin_, "missing PGM magic");
    }
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  long number(const char* what, IoErrorKind on_bad = IoErrorKind::kMalformedHeader) {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ImageIoError(on_bad, origin_, std::string("expected ") + what);
    }
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) {
        throw ImageIoError(IoErrorKind::kDimensionOverflow, origin_, std::string(what) + " too large");
      }
      ++pos_;
    }
    return value;
  }

  // After maxval exactly one whitespace byte separates header and raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ImageIoError(IoErrorKind::kMalformedHeader, origin_, "missing separator after maxval");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  const std::string& origin_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(IoErrorKind::kUnreadable, path, "open failed");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void check_dimensions(long width, long height, const std::string& origin) {
  if (width < 1 || height < 1) {
    throw ImageIoError(IoErrorKind::kMalformedHeader, origin, "zero dimension");
  }
  if (width > kMaxImageSide || height > kMaxImageSide) {
    throw ImageIoError(IoErrorKind::kDimensionOverflow, origin,
                       std::to_string(width) + "x" + std::to_string(height));
  }
}

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

[[noreturn]] void png_error_handler(png_structp png, png_const_charp message) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  if (what) *what = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

Image load_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) throw ImageIoError(IoErrorKind::kUnreadable, path, "open failed");

  std::string libpng_message;
  PngReadGuard guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &libpng_message, png_error_handler,
                                     png_warning_handler);
  if (!guard.png) throw ImageIoError(IoErrorKind::kUnreadable, path, "libpng init failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw ImageIoError(IoErrorKind::kUnreadable, path, "libpng init failed");

  png_uint_32 width = 0, height = 0;
  int bit_depth = 0, color_type = 0;
  std::vector<std::uint8_t> raster;
  std::vector<png_bytep> rows;
  volatile IoErrorKind failure = IoErrorKind::kMalformedHeader;

  if (setjmp(png_jmpbuf(guard.png))) {
    throw ImageIoError(failure, path, libpng_message);
  }
  png_init_io(guard.png, file.get());
  png_set_user_limits(guard.png, kMaxImageSide, kMaxImageSide);
  png_read_info(guard.png, guard.info);
  png_get_IHDR(guard.png, guard.info, &width, &height, &bit_depth, &color_type, nullptr, nullptr,
               nullptr);
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    throw ImageIoError(IoErrorKind::kUnsupportedFormat, path, "PNG is not single-channel gray");
  }
  if (bit_depth > 8) {
    throw ImageIoError(IoErrorKind::kUnsupportedBitDepth, path, std::to_string(bit_depth) + "-bit PNG");
  }
  if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(guard.png);
  png_read_update_info(guard.png, guard.info);

  failure = IoErrorKind::kTruncatedData;
  raster.resize(static_cast<std::size_t>(width) * height);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) rows[r] = raster.data() + static_cast<std::size_t>(r) * width;
  png_read_image(guard.png, rows.data());
  png_read_end(guard.png, nullptr);

  std::vector<double> data(raster.size());
  std::transform(raster.begin(), raster.end(), data.begin(), [](std::uint8_t v) { return v / 255.0; });
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

void save_png(const Image& img, const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "wb"));
  if (!file) throw ImageIoError(IoErrorKind::kUnwritable, path, "open failed");

  std::string libpng_message;
  PngWriteGuard guard;
  guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &libpng_message, png_error_handler,
                                      png_warning_handler);
  if (!guard.png) throw ImageIoError(IoErrorKind::kUnwritable, path, "libpng init failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw ImageIoError(IoErrorKind::kUnwritable, path, "libpng init failed");

  std::vector<std::uint8_t> raster = quantize(img);
  std::vector<png_bytep> rows(img.height());
  for (int r = 0; r < img.height(); ++r) rows[r] = raster.data() + static_cast<std::size_t>(r) * img.width();

  if (setjmp(png_jmpbuf(guard.png))) {
    throw ImageIoError(IoErrorKind::kUnwritable, path, libpng_message);
  }
  png_init_io(guard.png, file.get());
  png_set_IHDR(guard.png, guard.info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(guard.png, guard.info);
  png_write_image(guard.png, rows.data());
  png_write_end(guard.png, nullptr);
}

}  // namespace

ImageIoError::ImageIoError(IoErrorKind kind, const std::string& path, const std::string& detail)
    : Error(path + ": " + kind_name(kind) + (detail.empty() ? "" : " (" + detail + ")")), kind_(kind) {}

std::vector<std::uint8_t> quantize(const Image& img) {
  std::vector<std::uint8_t> out(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double level = std::round(img[i] * 255.0);
    out[i] = static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
  }
  return out;
}

Image decode_pgm(const std::string& bytes, const std::string& origin) {
  PgmReader reader(bytes, origin);
  const std::string magic = reader.magic();
  if (magic != "P2" && magic != "P5") {
    throw ImageIoError(IoErrorKind::kMalformedHeader, origin, "magic " + magic + " is not P2/P5");
  }
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  check_dimensions(width, height, origin);
  if (maxval < 1) throw ImageIoError(IoErrorKind::kMalformedHeader, origin, "maxval must be positive");
  if (maxval > 255) {
    throw ImageIoError(IoErrorKind::kUnsupportedBitDepth, origin, "maxval " + std::to_string(maxval));
  }

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> data(count);
  const double scale = static_cast<double>(maxval);
  if (magic == "P5") {
    reader.single_space();
    const std::size_t start = reader.pos();
    if (bytes.size() - start < count) {
      throw ImageIoError(IoErrorKind::kTruncatedData, origin,
                         std::to_string(bytes.size() - start) + " of " + std::to_string(count) + " bytes");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = static_cast<unsigned char>(bytes[start + i]);
      if (v > maxval) throw ImageIoError(IoErrorKind::kMalformedHeader, origin, "sample exceeds maxval");
      data[i] = v / scale;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = reader.number("sample", IoErrorKind::kTruncatedData);
      if (v > maxval) throw ImageIoError(IoErrorKind::kMalformedHeader, origin, "sample exceeds maxval");
      data[i] = v / scale;
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::string encode_pgm(const Image& img, bool ascii) {
  const std::vector<std::uint8_t> levels = quantize(img);
  std::ostringstream out;
  out << (ascii ? "P2" : "P5") << '\n' << img.width() << ' ' << img.height() << "\n255\n";
  if (ascii) {
    for (int r = 0; r < img.height(); ++r) {
      for (int c = 0; c < img.width(); ++c) {
        if (c) out << ' ';
        out << static_cast<int>(levels[static_cast<std::size_t>(r) * img.width() + c]);
      }
      out << '\n';
    }
  } else {
    out.write(reinterpret_cast<const char*>(levels.data()), static_cast<std::streamsize>(levels.size()));
  }
  return out.str();
}

Image load_image(const std::string& path) {
  if (ends_with(path, ".png")) return load_png(path);
  const std::string bytes = read_file(path);
  if (bytes.size() >= 8 && static_cast<unsigned char>(bytes[0]) == 0x89 && bytes[1] == 'P' &&
      bytes[2] == 'N' && bytes[3] == 'G') {
    return load_png(path);
  }
  if (!ends_with(path, ".pgm") && (bytes.empty() || bytes[0] != 'P')) {
    throw ImageIoError(IoErrorKind::kUnsupportedFormat, path, "neither PNG nor PGM");
  }
  return decode_pgm(bytes, path);
}

void save_image(const Image& img, const std::string& path) {
  if (img.empty()) throw Error("cannot save an empty image");
  if (ends_with(path, ".png")) {
    save_png(img, path);
    return;
  }
  if (!ends_with(path, ".pgm")) {
    throw ImageIoError(IoErrorKind::kUnsupportedFormat, path, "extension must be .png or .pgm");
  }
  const std::string bytes = encode_pgm(img, ends_with(path, ".ascii.pgm"));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError(IoErrorKind::kUnwritable, path, "open failed");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError(IoErrorKind::kUnwritable, path, "write failed");
}

}  // namespace cobra

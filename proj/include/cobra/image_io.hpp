#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cobra/image.hpp"

namespace cobra {

/// Failure categories for image file I/O. Each maps to a distinct message.
enum class IoErrorKind {
  kUnreadable,
  kUnwritable,
  kMalformedHeader,
  kUnsupportedBitDepth,
  kUnsupportedFormat,
  kDimensionOverflow,
  kTruncatedData,
};

class ImageIoError : public Error {
 public:
  ImageIoError(IoErrorKind kind, const std::string& path, const std::string& detail);
  IoErrorKind kind() const { return kind_; }

 private:
  IoErrorKind kind_;
};

/// Largest accepted width or height; the pixel count must also fit in memory.
inline constexpr long kMaxImageSide = 1 << 16;

/// Reads an 8-bit gray-scale PGM (P2 or P5) or PNG. Intensities are divided by 255.
Image load_image(const std::string& path);

/// Writes an 8-bit image, quantizing round(v * 255) clamped to [0, 255].
/// The extension selects the format: `.png`, `.pgm` (binary P5) or
/// `.ascii.pgm` (P2).
void save_image(const Image& img, const std::string& path);

/// 8-bit quantization used by save_image.
std::vector<std::uint8_t> quantize(const Image& img);

/// Parses PGM bytes held in memory (either variant).
Image decode_pgm(const std::string& bytes, const std::string& origin = "<memory>");

/// Encodes an image as PGM; `ascii` selects P2 over P5.
std::string encode_pgm(const Image& img, bool ascii);

}  // namespace cobra

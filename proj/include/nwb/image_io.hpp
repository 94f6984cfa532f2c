#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nwb/image.hpp"

namespace nwb {

enum class ImageFormat { Png, Ppm };

// Format from the file extension (.png, .ppm); throws FormatError otherwise.
ImageFormat format_from_path(const std::filesystem::path& path);

// Decoders sniff the signature, so the extension of an input file does not
// matter. Pixels come back as linear RGB.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
ImageBuffer read_image(const std::filesystem::path& path);

// Encoders clamp to [0, 1] and apply the sRGB transfer curve (8 bits).
std::vector<std::uint8_t> encode_ppm(const ImageBuffer& image);
std::vector<std::uint8_t> encode_png(const ImageBuffer& image);
void write_image(const std::filesystem::path& path, const ImageBuffer& image);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace nwb

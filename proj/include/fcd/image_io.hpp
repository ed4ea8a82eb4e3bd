#ifndef FCD_IMAGE_IO_HPP
#define FCD_IMAGE_IO_HPP

#include <filesystem>

#include "fcd/image.hpp"

namespace fcd {

/// Decodes any raster format the host OpenCV build understands.
/// Throws std::runtime_error when the file is missing or undecodable.
RgbImage load_image(const std::filesystem::path& file);

/// Binary PPM (P6) writer, handy for fixtures and synthetic corpora.
void save_ppm(const RgbImage& img, const std::filesystem::path& file);

}  // namespace fcd

#endif  // FCD_IMAGE_IO_HPP

#ifndef EVCAL_IMAGE_IO_HPP
#define EVCAL_IMAGE_IO_HPP

#include <string>

#include "evcal/frame.hpp"

namespace evcal {

// Binary PGM (P5), maxval 255.
void write_pgm(const std::string& path, const Image8& img);

// 8-bit grayscale PNG (color type 0), no interlace.
void write_png(const std::string& path, const Image8& img);

// Reads PGM (P2/P5) or PNG (8-bit gray or RGB, converted by luma).
// Throws UnreadableImage on anything else.
Image8 read_image(const std::string& path);

// Dispatches on extension (.png vs .pgm).
void write_image(const std::string& path, const Image8& img);

}  // namespace evcal

#endif

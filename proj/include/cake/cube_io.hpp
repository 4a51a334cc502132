#ifndef CAKE_CUBE_IO_HPP
#define CAKE_CUBE_IO_HPP

#include <string>

#include "cake/video_cube.hpp"

namespace cake {

// "VCUB" container: 32-byte header
//   magic "VCUB" | u16 version | u16 dtype (0 = float32) |
//   u32 n1 | u32 n2 | u32 frames | u32 flags | 8 reserved bytes
// followed by the frames in order, row-major, little-endian float32.
// flags bit 0: cube kind (0 scene, 1 measurement); bits 8..15: frame rate
// ratio B (clamped to 255).
void write_cube(const VideoCube& cube, const std::string& path);
VideoCube read_cube(const std::string& path);

// Per-frame 16-bit PGM dump with a linear intensity mapping recorded in a
// header comment, so dumps re-import losslessly at 16-bit depth.
// Files are named <prefix>_NNNN.pgm.
void dump_pgm_frames(const VideoCube& cube, const std::string& prefix);
void write_pgm(const double* img, int rows, int cols, const std::string& path);
void read_pgm(const std::string& path, std::vector<double>& img, int& rows,
              int& cols);

}  // namespace cake

#endif

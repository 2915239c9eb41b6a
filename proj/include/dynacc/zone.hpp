#pragma once

#include <string>

namespace dynacc {

inline constexpr double kZoneSizeMeters = 2000.0;    // analysis cells are 2x2 km
inline constexpr double kRasterSizeMeters = 1000.0;  // population input is 1 km2

/// One 2x2 km grid cell. Population doubles as origin weight and destination
/// opportunities. Cells are aligned to multiples of 2000 m in the projected
/// CRS; (col, row) index the cell whose lower-left corner is (2000*col, 2000*row).
struct Zone {
  std::string id;
  int col = 0;
  int row = 0;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  double population = 0.0;  // integer-valued count
  bool in_study_area = false;
};

/// 1 km2 population raster cell, addressed by its lower-left corner (meters).
struct RasterCell {
  double x = 0.0;
  double y = 0.0;
  double population = 0.0;
};

struct BoundingBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};

}  // namespace dynacc

#pragma once

#include <stdexcept>
#include <string>

namespace hypermap {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define HYPERMAP_DEFINE_ERROR(name)            \
  class name : public Error {                  \
  public:                                      \
    using Error::Error;                        \
  }

HYPERMAP_DEFINE_ERROR(DegenerateInput);   // < 3 distinct non-collinear points
HYPERMAP_DEFINE_ERROR(InvalidPolygon);    // polygon type invariant violated
HYPERMAP_DEFINE_ERROR(EmptyRaster);       // neither polygon covers a cell center
HYPERMAP_DEFINE_ERROR(OutOfBounds);       // point/index outside grid bounds
HYPERMAP_DEFINE_ERROR(BadThresholds);     // free/occupied thresholds out of order
HYPERMAP_DEFINE_ERROR(GeometryMismatch);  // grids do not share a geometry
HYPERMAP_DEFINE_ERROR(IoError);           // filesystem failure
HYPERMAP_DEFINE_ERROR(FormatError);       // malformed file content
HYPERMAP_DEFINE_ERROR(UnknownLayer);      // layer name not present
HYPERMAP_DEFINE_ERROR(DuplicateName);     // layer name already taken
HYPERMAP_DEFINE_ERROR(MissingLayer);      // pipeline layer requirements unmet
HYPERMAP_DEFINE_ERROR(OutOfOrderFrame);   // detection log sequence not increasing
HYPERMAP_DEFINE_ERROR(NoProgress);        // exploration revisited an identical state

#undef HYPERMAP_DEFINE_ERROR

}  // namespace hypermap

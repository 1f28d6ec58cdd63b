#pragma once

#include <string>

#include "islab/time_synthesis.hpp"

namespace islab {

/// Flat binary sweep container. Header: three little-endian u64 fields
/// (node count, frequency count, value arity); body: per row (node-major,
/// component within node) all frequencies as interleaved re/im f64 pairs.
/// The grids travel in a JSON sidecar next to the binary file.
void write_sweep(const std::string& path, const FrequencySweep& sweep);
FrequencySweep read_sweep(const std::string& path);

/// Same container family for real time traces (header: node count, sample
/// count, arity; body: f64 samples row-major), time axis in the sidecar.
void write_trace(const std::string& path, const TimeTrace& trace);
TimeTrace read_trace(const std::string& path);

/// Volume snapshot dump (header: cell count, snapshot count, arity).
void write_snapshots(const std::string& path, const std::vector<Eigen::MatrixXd>& fields,
                     const std::vector<Real>& times, const VoxelGrid& grid);

std::string sidecar_path(const std::string& binary_path);

}  // namespace islab

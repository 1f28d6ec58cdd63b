#include "islab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace islab {

static_assert(std::endian::native == std::endian::little,
              "containers are written natively and assume a little-endian host");

namespace {

void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& is) {
  std::uint64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

void write_doubles(std::ostream& os, const Real* data, std::size_t n) {
  os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(Real)));
}

void read_doubles(std::istream& is, Real* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(Real)));
}

}  // namespace

std::string sidecar_path(const std::string& binary_path) { return binary_path + ".json"; }

void write_sweep(const std::string& path, const FrequencySweep& sweep) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "write_sweep: cannot open output file");
  write_u64(os, static_cast<std::uint64_t>(sweep.nodes));
  write_u64(os, static_cast<std::uint64_t>(sweep.grid.count));
  write_u64(os, static_cast<std::uint64_t>(sweep.arity));
  std::vector<Real> row(2 * static_cast<std::size_t>(sweep.grid.count));
  for (Index r = 0; r < sweep.values.rows(); ++r) {
    for (int j = 0; j < sweep.grid.count; ++j) {
      row[2 * static_cast<std::size_t>(j)] = sweep.values(r, j).real();
      row[2 * static_cast<std::size_t>(j) + 1] = sweep.values(r, j).imag();
    }
    write_doubles(os, row.data(), row.size());
  }
  require(os.good(), "write_sweep: short write");

  nlohmann::json meta;
  meta["container"] = "sweep";
  meta["nodes"] = sweep.nodes;
  meta["arity"] = sweep.arity;
  meta["domega"] = sweep.grid.domega;
  meta["count"] = sweep.grid.count;
  meta["omega_max"] = sweep.grid.omega_max();
  std::ofstream js(sidecar_path(path));
  require(js.good(), "write_sweep: cannot open sidecar");
  js << meta.dump(2) << "\n";
}

FrequencySweep read_sweep(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "read_sweep: cannot open input file");
  FrequencySweep sweep;
  sweep.nodes = static_cast<Index>(read_u64(is));
  const auto count = static_cast<int>(read_u64(is));
  sweep.arity = static_cast<int>(read_u64(is));
  require(sweep.nodes > 0 && count > 0 && (sweep.arity == 1 || sweep.arity == 3 || sweep.arity == 9),
          "read_sweep: corrupt header");

  std::ifstream js(sidecar_path(path));
  require(js.good(), "read_sweep: missing sidecar");
  nlohmann::json meta = nlohmann::json::parse(js);
  sweep.grid.domega = meta.at("domega").get<Real>();
  sweep.grid.count = count;

  sweep.values.resize(sweep.nodes * sweep.arity, count);
  std::vector<Real> row(2 * static_cast<std::size_t>(count));
  for (Index r = 0; r < sweep.values.rows(); ++r) {
    read_doubles(is, row.data(), row.size());
    for (int j = 0; j < count; ++j)
      sweep.values(r, j) = Complex(row[2 * static_cast<std::size_t>(j)],
                                   row[2 * static_cast<std::size_t>(j) + 1]);
  }
  require(is.good(), "read_sweep: short read");
  return sweep;
}

void write_trace(const std::string& path, const TimeTrace& trace) {
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "write_trace: cannot open output file");
  write_u64(os, static_cast<std::uint64_t>(trace.nodes));
  write_u64(os, static_cast<std::uint64_t>(trace.samples()));
  write_u64(os, static_cast<std::uint64_t>(trace.arity));
  for (Index r = 0; r < trace.values.rows(); ++r) {
    Eigen::VectorXd row = trace.values.row(r);
    write_doubles(os, row.data(), static_cast<std::size_t>(row.size()));
  }
  require(os.good(), "write_trace: short write");

  nlohmann::json meta;
  meta["container"] = "trace";
  meta["nodes"] = trace.nodes;
  meta["arity"] = trace.arity;
  meta["dt"] = trace.dt;
  meta["samples"] = trace.samples();
  meta["t_end"] = trace.t_end();
  std::ofstream js(sidecar_path(path));
  require(js.good(), "write_trace: cannot open sidecar");
  js << meta.dump(2) << "\n";
}

TimeTrace read_trace(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "read_trace: cannot open input file");
  TimeTrace trace;
  trace.nodes = static_cast<Index>(read_u64(is));
  const auto samples = static_cast<int>(read_u64(is));
  trace.arity = static_cast<int>(read_u64(is));
  require(trace.nodes > 0 && samples > 0 && (trace.arity == 1 || trace.arity == 3),
          "read_trace: corrupt header");

  std::ifstream js(sidecar_path(path));
  require(js.good(), "read_trace: missing sidecar");
  nlohmann::json meta = nlohmann::json::parse(js);
  trace.dt = meta.at("dt").get<Real>();

  trace.values.resize(trace.nodes * trace.arity, samples);
  Eigen::VectorXd row(samples);
  for (Index r = 0; r < trace.values.rows(); ++r) {
    read_doubles(is, row.data(), static_cast<std::size_t>(samples));
    trace.values.row(r) = row;
  }
  require(is.good(), "read_trace: short read");
  return trace;
}

void write_snapshots(const std::string& path, const std::vector<Eigen::MatrixXd>& fields,
                     const std::vector<Real>& times, const VoxelGrid& grid) {
  require(fields.size() == times.size(), "write_snapshots: time list mismatch");
  require(!fields.empty(), "write_snapshots: nothing to write");
  std::ofstream os(path, std::ios::binary);
  require(os.good(), "write_snapshots: cannot open output file");
  const Index cells = fields.front().rows();
  const int arity = static_cast<int>(fields.front().cols());
  write_u64(os, static_cast<std::uint64_t>(cells));
  write_u64(os, static_cast<std::uint64_t>(fields.size()));
  write_u64(os, static_cast<std::uint64_t>(arity));
  for (const auto& f : fields) {
    require(f.rows() == cells && f.cols() == arity, "write_snapshots: shape mismatch");
    for (int a = 0; a < arity; ++a) {
      Eigen::VectorXd col = f.col(a);
      write_doubles(os, col.data(), static_cast<std::size_t>(col.size()));
    }
  }
  nlohmann::json meta;
  meta["container"] = "snapshots";
  meta["cells"] = cells;
  meta["arity"] = arity;
  meta["times"] = times;
  meta["grid"] = {{"h", grid.h},
                  {"n", {grid.n[0], grid.n[1], grid.n[2]}},
                  {"origin", {grid.origin[0], grid.origin[1], grid.origin[2]}}};
  std::ofstream js(sidecar_path(path));
  require(js.good(), "write_snapshots: cannot open sidecar");
  js << meta.dump(2) << "\n";
}

}  // namespace islab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "islab/io.hpp"

using namespace islab;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/islab_test_" + name) {}
  ~TempFile() {
    std::remove(path.c_str());
    std::remove(sidecar_path(path).c_str());
  }
};

}  // namespace

TEST_CASE("sweep container round trip") {
  FrequencySweep sweep;
  sweep.grid = make_frequency_grid(3.0, 0.5);
  sweep.arity = 3;
  sweep.nodes = 5;
  sweep.values.resize(15, sweep.grid.count);
  Rng rng(17);
  for (Index r = 0; r < sweep.values.rows(); ++r)
    for (int j = 0; j < sweep.grid.count; ++j)
      sweep.values(r, j) = Complex(rng.normal(), rng.normal());

  TempFile tmp("sweep.bin");
  write_sweep(tmp.path, sweep);
  const FrequencySweep back = read_sweep(tmp.path);
  CHECK(back.nodes == sweep.nodes);
  CHECK(back.arity == sweep.arity);
  CHECK(back.grid.count == sweep.grid.count);
  CHECK(back.grid.domega == sweep.grid.domega);
  CHECK((back.values - sweep.values).cwiseAbs().maxCoeff() == 0.0);

  // header is exactly three little-endian u64 fields
  std::ifstream is(tmp.path, std::ios::binary);
  std::uint64_t header[3];
  is.read(reinterpret_cast<char*>(header), sizeof(header));
  CHECK(header[0] == 5);
  CHECK(header[1] == static_cast<std::uint64_t>(sweep.grid.count));
  CHECK(header[2] == 3);
}

TEST_CASE("trace container round trip") {
  TimeTrace trace;
  trace.nodes = 4;
  trace.arity = 1;
  trace.dt = 0.025;
  trace.values.resize(4, 11);
  Rng rng(3);
  for (Index r = 0; r < 4; ++r)
    for (int n = 0; n < 11; ++n) trace.values(r, n) = rng.normal();

  TempFile tmp("trace.bin");
  write_trace(tmp.path, trace);
  const TimeTrace back = read_trace(tmp.path);
  CHECK(back.dt == trace.dt);
  CHECK((back.values - trace.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("snapshot dump writes a sane sidecar") {
  VoxelGrid grid;
  grid.h = 0.1;
  grid.n.setConstant(4);
  grid.origin = Vec3(-0.2, -0.2, -0.2);
  std::vector<Eigen::MatrixXd> fields(2, Eigen::MatrixXd::Ones(grid.cells(), 3));
  fields[1] *= 2.0;
  TempFile tmp("snaps.bin");
  write_snapshots(tmp.path, fields, {0.1, 0.2}, grid);
  std::ifstream js(sidecar_path(tmp.path));
  REQUIRE(js.good());
  std::string text((std::istreambuf_iterator<char>(js)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"snapshots\"") != std::string::npos);
  CHECK(text.find("\"times\"") != std::string::npos);
}

TEST_CASE("unreadable paths are rejected") {
  FrequencySweep sweep;
  sweep.grid = make_frequency_grid(1.0, 0.5);
  sweep.arity = 1;
  sweep.nodes = 1;
  sweep.values.setZero(1, sweep.grid.count);
  CHECK_THROWS(write_sweep("/nonexistent_dir/x.bin", sweep));
  CHECK_THROWS(read_sweep("/nonexistent_dir/x.bin"));
}

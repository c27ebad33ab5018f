// Paired arrays of noisy time-domain traces and target distance
// distributions on fixed grids, stored as a directory of .dmat files plus a
// key=value meta file.
#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dsg/matrix.hpp"

namespace dsg {

struct DeerDataset {
  std::vector<double> time_grid;  // microseconds
  std::vector<double> dist_grid;  // nanometers
  DenseMatrix inputs;             // time_points x n_traces
  DenseMatrix targets;            // dist_points x n_traces
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;

  std::size_t n_traces() const { return inputs.cols(); }
};

namespace detail {

inline void check_uniform_increasing(const std::vector<double>& g,
                                     const char* name) {
  if (g.size() < 2)
    throw structure_error(std::string(name) + ": need at least 2 grid points");
  double step = g[1] - g[0];
  if (!(step > 0))
    throw structure_error(std::string(name) + ": grid not increasing");
  for (std::size_t i = 1; i < g.size(); ++i) {
    double d = g[i] - g[i - 1];
    if (!(d > 0) || std::abs(d - step) > 1e-9 * std::max(1.0, std::abs(step)))
      throw structure_error(std::string(name) +
                            ": grid not uniformly increasing");
  }
}

}  // namespace detail

inline void validate_dataset(const DeerDataset& ds) {
  detail::check_uniform_increasing(ds.time_grid, "time_grid");
  detail::check_uniform_increasing(ds.dist_grid, "dist_grid");
  if (ds.inputs.rows() != ds.time_grid.size())
    throw structure_error("inputs rows do not match time grid");
  if (ds.targets.rows() != ds.dist_grid.size())
    throw structure_error("targets rows do not match distance grid");
  if (ds.inputs.cols() != ds.targets.cols())
    throw structure_error("inputs/targets trace counts differ");
  for (std::size_t j = 0; j < ds.targets.cols(); ++j) {
    double sum = 0;
    for (std::size_t i = 0; i < ds.targets.rows(); ++i) {
      double v = ds.targets(i, j);
      if (v < 0)
        throw domain_error("target column " + std::to_string(j) +
                           " has a negative entry");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw domain_error("target column " + std::to_string(j) +
                         " does not sum to 1");
  }
}

inline DenseMatrix column_matrix(const std::vector<double>& v) {
  return DenseMatrix(v.size(), 1, std::vector<double>(v));
}

inline std::vector<double> grid_from_matrix(const DenseMatrix& m,
                                            const char* name) {
  if (m.cols() != 1)
    throw structure_error(std::string(name) + ": expected a single column");
  return m.data();
}

inline void save_dataset(const DeerDataset& ds,
                         const std::filesystem::path& dir) {
  validate_dataset(ds);
  std::filesystem::create_directories(dir);
  save_matrix(column_matrix(ds.time_grid), dir / "time.dmat");
  save_matrix(column_matrix(ds.dist_grid), dir / "dist.dmat");
  save_matrix(ds.inputs, dir / "inputs.dmat");
  save_matrix(ds.targets, dir / "targets.dmat");
  std::ofstream meta(dir / "meta");
  if (!meta) throw error("cannot write meta in " + dir.string());
  meta << "seed=" << ds.seed << '\n';
  for (const auto& [k, v] : ds.meta)
    if (k != "seed") meta << k << '=' << v << '\n';
}

inline DeerDataset load_dataset(const std::filesystem::path& dir) {
  DeerDataset ds;
  ds.time_grid = grid_from_matrix(load_matrix(dir / "time.dmat"), "time.dmat");
  ds.dist_grid = grid_from_matrix(load_matrix(dir / "dist.dmat"), "dist.dmat");
  ds.inputs = load_matrix(dir / "inputs.dmat");
  ds.targets = load_matrix(dir / "targets.dmat");
  std::ifstream meta(dir / "meta");
  if (!meta) throw error("missing meta file in " + dir.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(meta, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw parse_error("meta line " + std::to_string(line_no) +
                        ": expected key=value");
    ds.meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (auto it = ds.meta.find("seed"); it != ds.meta.end()) {
    std::uint64_t s = 0;
    auto& t = it->second;
    auto res = std::from_chars(t.data(), t.data() + t.size(), s);
    if (res.ec != std::errc{})
      throw parse_error("meta: bad seed value '" + t + "'");
    ds.seed = s;
  }
  validate_dataset(ds);
  return ds;
}

}  // namespace dsg

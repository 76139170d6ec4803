#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "srg/grid.hpp"
#include "srg/kernels.hpp"
#include "srg/structure.hpp"

namespace srg::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Options shared by every subcommand.
struct Common {
  std::string structure = "heisenberg";
  std::string frame;       // inline definitions, lines separated by ';' or newlines
  std::string frame_file;
  std::size_t dim = 0;     // 0: inferred from the frame
  std::string weight;      // volume density polynomial, empty: Lebesgue
  std::vector<double> point;
  std::uint64_t seed = 1;
  std::string json = "-";
  std::string csv;
  bool serial = false;

  Exec exec() const { return serial ? Exec::Serial : Exec::Parallel; }
};

void add_common(CLI::App* sub, Common& c);

/// Built-in by name, or the inline / file frame when given.
SubRiemannianStructure load_structure(const Common& c);

/// Point of the right dimension; an empty option yields the origin.
Point point_of(const std::vector<double>& v, std::size_t dim, const std::string& what);
Box box_of(const std::vector<double>& lo, const std::vector<double>& hi, std::size_t dim, double half_width);

std::uint64_t fnv1a(const std::string& s);
/// Subcommand name plus every option value (given or default), output paths excluded.
std::string canonical_config(const CLI::App& sub);

Json to_json(const Point& p);
Json to_json(const Eigen::MatrixXd& m);  // row-major nested arrays

/// {schema_version, command, config_hash, seed, structure, result}
Json envelope(const CLI::App& sub, const Common& c, const SubRiemannianStructure& S, Json result);
void write_json(const Json& doc, const std::string& path);

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  void write(const std::string& path) const;
};

std::string num(double v);

}  // namespace srg::cli

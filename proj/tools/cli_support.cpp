#include "cli_support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "srg/builtins.hpp"
#include "srg/errors.hpp"
#include "srg/text_format.hpp"

namespace srg::cli {

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--structure,-s", c.structure, "built-in structure (" + fmt::format("{}", fmt::join(builtins::names(), ", ")) + ")");
  sub->add_option("--frame", c.frame, "inline frame, e.g. \"X1 = d1; X2 = x1*d2\" (overrides --structure)");
  sub->add_option("--frame-file", c.frame_file, "file with one field definition per line")->check(CLI::ExistingFile);
  sub->add_option("--dim", c.dim, "ambient dimension of an inline frame (default: largest index used)");
  sub->add_option("--weight", c.weight, "volume density wbar as a polynomial (default 1)");
  sub->add_option("--point,-p", c.point, "point, comma separated")->delimiter(',');
  sub->add_option("--seed", c.seed, "seed for every randomized step");
  sub->add_option("--json", c.json, "JSON output path, '-' for stdout");
  sub->add_option("--csv", c.csv, "CSV output path");
  sub->add_flag("--serial", c.serial, "run kernels on the serial reference path");
}

SubRiemannianStructure load_structure(const Common& c) {
  std::string text = c.frame;
  if (!c.frame_file.empty()) {
    std::ifstream in(c.frame_file);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) {
    auto S = builtins::by_name(c.structure);
    if (!c.weight.empty()) S.weight = parse_polynomial(c.weight, S.dim);
    return S;
  }
  std::replace(text.begin(), text.end(), ';', '\n');
  const auto named = parse_frame(text, c.dim);
  if (named.empty()) throw InvalidInput("frame definition is empty");
  const auto fields = fields_of(named);
  VolumeWeight w;
  if (!c.weight.empty()) w = parse_polynomial(c.weight, fields.front().dim());
  return SubRiemannianStructure(c.frame_file.empty() ? "inline" : c.frame_file, fields, w);
}

Point point_of(const std::vector<double>& v, std::size_t dim, const std::string& what) {
  if (v.empty()) return Point::Zero(static_cast<Eigen::Index>(dim));
  if (v.size() != dim) throw InvalidInput(fmt::format("{} has {} coordinates, the structure lives in R^{}", what, v.size(), dim));
  return Eigen::Map<const Point>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Box box_of(const std::vector<double>& lo, const std::vector<double>& hi, std::size_t dim, double half_width) {
  if (lo.empty() && hi.empty()) return Box::cube(dim, half_width);
  const Point l = point_of(lo, dim, "--lo"), h = point_of(hi, dim, "--hi");
  if (!(l.array() < h.array()).all()) throw InvalidInput("box needs lo < hi on every axis");
  return Box(l, h);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string canonical_config(const CLI::App& sub) {
  std::string out = sub.get_name();
  for (const CLI::Option* o : sub.get_options()) {
    const std::string name = o->get_name();
    if (name == "--help" || name == "--json" || name == "--csv" || name == "--config") continue;
    std::string value;
    if (o->count() > 0) {
      for (const auto& r : o->results()) value += r + ",";
    } else {
      value = o->get_default_str();
    }
    out += "\n" + name + "=" + value;
  }
  return out;
}

Json to_json(const Point& p) {
  Json a = Json::array();
  for (double v : p) a.push_back(v);
  return a;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(row);
  }
  return a;
}

Json envelope(const CLI::App& sub, const Common& c, const SubRiemannianStructure& S, Json result) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = sub.get_name();
  doc["config_hash"] = fmt::format("{:016x}", fnv1a(canonical_config(sub)));
  doc["seed"] = c.seed;
  doc["structure"] = S.name;
  doc["dim"] = S.dim;
  doc["result"] = std::move(result);
  return doc;
}

void write_json(const Json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path == "-" || path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text;
}

void Csv::write(const std::string& path) const {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : rows) out << fmt::format("{}\n", fmt::join(r, ","));
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.17g}", v);
}

}  // namespace srg::cli

#include "srg/structure.hpp"

#include <Eigen/SVD>

#include "srg/errors.hpp"

namespace srg {

SubRiemannianStructure::SubRiemannianStructure(std::string name_, std::vector<FrameField> frame_, VolumeWeight weight_)
    : name(std::move(name_)), frame(std::move(frame_)), weight(std::move(weight_)) {
  if (frame.empty()) throw InvalidInput("a structure needs at least one frame field");
  dim = field_dim(frame.front());
  for (const auto& f : frame)
    if (field_dim(f) != dim) throw InvalidInput("frame fields disagree on ambient dimension");
  if (weight && weight->dim() != dim) throw InvalidInput("volume weight has the wrong dimension");
}

SubRiemannianStructure::SubRiemannianStructure(std::string name_, const std::vector<PolyVectorField>& frame_,
                                               VolumeWeight weight_)
    : SubRiemannianStructure(std::move(name_), std::vector<FrameField>(frame_.begin(), frame_.end()),
                             std::move(weight_)) {}

bool SubRiemannianStructure::is_polynomial() const {
  for (const auto& f : frame)
    if (!std::holds_alternative<PolyVectorField>(f)) return false;
  return true;
}

std::vector<PolyVectorField> SubRiemannianStructure::polynomial_frame() const {
  std::vector<PolyVectorField> out;
  for (const auto& f : frame) {
    const auto* p = std::get_if<PolyVectorField>(&f);
    if (!p) throw PreconditionError("structure '" + name + "' has non-polynomial coefficients");
    out.push_back(*p);
  }
  return out;
}

Eigen::MatrixXd SubRiemannianStructure::frame_matrix(const Point& x) const {
  Eigen::MatrixXd F(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    F.col(static_cast<Eigen::Index>(i)) = evaluate(frame[i], std::span<const double>(x.data(), dim));
  return F;
}

const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::Regular: return "regular";
    case Regularity::Singular: return "singular";
    default: return "unknown";
  }
}

namespace {

bool is_zero_field(const FrameField& f) {
  if (const auto* p = std::get_if<PolyVectorField>(&f)) return p->is_zero();
  const auto& a = std::get<AnalyticField>(f);
  for (std::size_t j = 0; j < a.dim(); ++j)
    if (!a[j].is_zero()) return false;
  return true;
}

bool same_up_to_sign(const FrameField& a, const FrameField& b) {
  const auto* pa = std::get_if<PolyVectorField>(&a);
  const auto* pb = std::get_if<PolyVectorField>(&b);
  if (!pa || !pb) return false;
  return *pa == *pb || *pa == -*pb;
}

}  // namespace

std::vector<BracketWord> bracket_level(const std::vector<FrameField>& frame, const std::vector<BracketWord>& previous) {
  std::vector<BracketWord> out;
  for (std::size_t i = 0; i < frame.size(); ++i)
    for (const auto& w : previous) {
      FrameField b = lie_bracket(frame[i], w.field);
      if (is_zero_field(b)) continue;
      bool dup = false;
      for (const auto& o : out)
        if (same_up_to_sign(o.field, b)) {
          dup = true;
          break;
        }
      if (dup) continue;
      std::vector<int> letters{static_cast<int>(i)};
      letters.insert(letters.end(), w.letters.begin(), w.letters.end());
      out.push_back({std::move(letters), std::move(b)});
    }
  return out;
}

PointFlag growth_vector(const SubRiemannianStructure& S, const Point& x, const FlagOptions& opts) {
  if (static_cast<std::size_t>(x.size()) != S.dim) throw InvalidInput("point has the wrong dimension");
  if (!(opts.rank_tol > 0.0)) throw InvalidInput("rank tolerance must be positive");
  const auto n = static_cast<Eigen::Index>(S.dim);
  PointFlag flag;
  flag.point = x;
  std::vector<BracketWord> level;
  for (std::size_t i = 0; i < S.size(); ++i) level.push_back({{static_cast<int>(i)}, S.frame[i]});
  Eigen::MatrixXd cols(n, 0);
  int rank = 0;
  for (int depth = 1; depth <= opts.max_depth; ++depth) {
    if (depth > 1) level = bracket_level(S.frame, level);
    if (level.empty())
      throw HormanderViolation("iterated brackets vanish identically before the flag reaches dimension " +
                                   std::to_string(n),
                               rank);
    const Eigen::Index c0 = cols.cols();
    cols.conservativeResize(n, c0 + static_cast<Eigen::Index>(level.size()));
    for (std::size_t k = 0; k < level.size(); ++k)
      cols.col(c0 + static_cast<Eigen::Index>(k)) = evaluate(level[k].field, std::span<const double>(x.data(), S.dim));
    const Eigen::VectorXd sv = Eigen::BDCSVD<Eigen::MatrixXd>(cols).singularValues();
    const double smax = sv.size() ? sv[0] : 0.0;
    const double thr = opts.rank_tol * smax;
    rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv[k] > thr) ++rank;
      if (smax > 0.0 && sv[k] >= thr / 10.0 && sv[k] <= thr * 10.0) flag.gray_zone = true;
    }
    flag.growth.push_back(rank);
    if (rank == n) break;
  }
  if (rank < n)
    throw HormanderViolation("bracket flag reaches dimension " + std::to_string(rank) + " < " + std::to_string(n) +
                                 " within depth " + std::to_string(opts.max_depth),
                             rank);
  flag.step = static_cast<int>(flag.growth.size());
  int prev = 0;
  for (int s = 1; s <= flag.step; ++s) {
    for (int j = prev; j < flag.growth[s - 1]; ++j) flag.weights.push_back(s);
    prev = flag.growth[s - 1];
  }
  for (int w : flag.weights) flag.Q += w;
  return flag;
}

PointFlag point_flag(const SubRiemannianStructure& S, const Point& x, const FlagOptions& opts) {
  PointFlag flag = growth_vector(S, x, opts);
  flag.regular = flag.gray_zone ? Regularity::Unknown : classify_regularity(S, x, 0.1, 16, opts).verdict;
  return flag;
}

std::vector<double> halton(std::size_t index, std::size_t dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > std::size(primes)) throw InvalidInput("Halton sequence supports at most 16 dimensions");
  std::vector<double> u(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    double f = 1.0, r = 0.0;
    for (std::size_t i = index; i > 0; i /= primes[a]) {
      f /= primes[a];
      r += f * static_cast<double>(i % primes[a]);
    }
    u[a] = r;
  }
  return u;
}

RegularityReport classify_regularity(const SubRiemannianStructure& S, const Point& x, double radius, int samples,
                                     const FlagOptions& opts) {
  if (samples < 8) throw InvalidInput("regularity classification needs at least 8 samples");
  if (!(radius > 0.0)) throw InvalidInput("sampling radius must be positive");
  RegularityReport rep;
  const PointFlag at = growth_vector(S, x, opts);
  rep.growth_at_x = at.growth;
  bool gray = at.gray_zone;
  int taken = 0;
  for (std::size_t idx = 1; taken < samples; ++idx) {
    auto u = halton(idx, S.dim);
    Point y(static_cast<Eigen::Index>(S.dim));
    double r2 = 0.0;
    for (std::size_t a = 0; a < S.dim; ++a) {
      y[static_cast<Eigen::Index>(a)] = 2.0 * u[a] - 1.0;
      r2 += (2.0 * u[a] - 1.0) * (2.0 * u[a] - 1.0);
    }
    if (r2 > 1.0) continue;
    ++taken;
    y = x + radius * y;
    std::vector<int> g;
    try {
      const PointFlag f = growth_vector(S, y, opts);
      gray = gray || f.gray_zone;
      g = f.growth;
    } catch (const HormanderViolation& e) {
      g = {e.achieved_dim()};
    }
    if (g != rep.growth_at_x) {
      rep.verdict = Regularity::Singular;
      rep.witness = y;
      rep.witness_growth = g;
      return rep;
    }
  }
  rep.verdict = gray ? Regularity::Unknown : Regularity::Regular;
  return rep;
}

}  // namespace srg

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srg/vector_field.hpp"

namespace srg {

/// Frame X_1..X_m on R^n with a volume weight wbar (empty: wbar == 1).
struct SubRiemannianStructure {
  std::string name;
  std::size_t dim = 0;
  std::vector<FrameField> frame;
  VolumeWeight weight;

  SubRiemannianStructure() = default;
  SubRiemannianStructure(std::string name, std::vector<FrameField> frame, VolumeWeight weight = std::nullopt);
  SubRiemannianStructure(std::string name, const std::vector<PolyVectorField>& frame,
                         VolumeWeight weight = std::nullopt);

  std::size_t size() const { return frame.size(); }
  bool is_polynomial() const;
  /// Throws PreconditionError for analytic frames.
  std::vector<PolyVectorField> polynomial_frame() const;
  /// n x m matrix with columns X_i(x).
  Eigen::MatrixXd frame_matrix(const Point& x) const;
};

enum class Regularity { Regular, Singular, Unknown };
const char* to_string(Regularity r);

struct FlagOptions {
  double rank_tol = 1e-9;  // relative to the largest singular value
  int max_depth = 6;
};

struct PointFlag {
  Point point;
  std::vector<int> growth;   // n_1 < ... < n_k = n
  std::vector<int> weights;  // w_1 <= ... <= w_n
  int step = 0;
  int Q = 0;
  /// Unknown when a retained or discarded singular value sits within 10x of
  /// the rank threshold.
  bool gray_zone = false;
  Regularity regular = Regularity::Unknown;
};

/// Growth vector of the bracket flag at x. Throws HormanderViolation when the
/// span stalls below n (all brackets of a level vanish) or depth runs out.
PointFlag growth_vector(const SubRiemannianStructure& S, const Point& x, const FlagOptions& opts = {});

/// growth_vector plus the regularity classification of x (radius 0.1, 16 samples).
PointFlag point_flag(const SubRiemannianStructure& S, const Point& x, const FlagOptions& opts = {});

struct RegularityReport {
  Regularity verdict = Regularity::Unknown;
  std::vector<int> growth_at_x;
  std::optional<Point> witness;  // first sample with a different growth vector
  std::vector<int> witness_growth;
};

/// Compares the growth at x with `samples` Halton points of the Euclidean
/// ball B(x, radius).
RegularityReport classify_regularity(const SubRiemannianStructure& S, const Point& x, double radius, int samples,
                                     const FlagOptions& opts = {});

/// Right-normed bracket words [X_{i1},[X_{i2},...,X_{ik}]] of length k, skipping
/// words that are identically zero. Words index into the frame.
struct BracketWord {
  std::vector<int> letters;
  FrameField field;
};
std::vector<BracketWord> bracket_level(const std::vector<FrameField>& frame, const std::vector<BracketWord>& previous);

/// i-th point of the Halton sequence in [0,1)^dim (bases 2,3,5,...).
std::vector<double> halton(std::size_t index, std::size_t dim);

}  // namespace srg

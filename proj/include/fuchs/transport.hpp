#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fuchs/system.hpp"

namespace fuchs {

/// Polyline in the punctured plane. Together with a fixed basepoint it
/// selects a lift to the universal cover.
struct Path {
  std::vector<cplx> vertices;

  Path() = default;
  explicit Path(std::vector<cplx> v) : vertices(std::move(v)) {}

  cplx start() const { return vertices.front(); }
  cplx end() const { return vertices.back(); }
  int segments() const { return vertices.empty() ? 0 : static_cast<int>(vertices.size()) - 1; }
  bool empty() const { return vertices.size() < 2; }

  Path reversed() const;
  /// Concatenation; `next` must start where this path ends.
  Path then(const Path& next) const;
  /// Prefix ending at parameter t of segment `seg`.
  Path prefix(int seg, double t) const;
  double length() const;
};

Path straight(cplx a, cplx b);

struct TransportResult {
  Mat matrix;
  double error_estimate = 0.0;
  double det_defect = 0.0;
  int steps = 0;
};

/// One Taylor step of the transport: Psi(x + s) = U(s) Psi(x) and
/// Psi(x + s)^{-1} = Psi(x)^{-1} V(s), with A(x + s) = sum a[m] s^m.
struct TaylorStep {
  cplx x;
  cplx h;
  std::vector<Mat> a;
  std::vector<Mat> u;
  std::vector<Mat> v;
  double truncation = 0.0;

  Mat u_at(cplx s) const;
  Mat v_at(cplx s) const;
};

/// Taylor coefficients of the transport around x, accurate on |s| <= |h|
/// to relative accuracy `tol`. `with_inverse` also fills V.
TaylorStep taylor_step(const FuchsianSystem& system, cplx x, cplx h, double tol, bool with_inverse);

/// Series of U (and V) around x to a fixed order, without step control.
TaylorStep taylor_series(const FuchsianSystem& system, cplx x, int order, bool with_inverse);

/// Solves dT/dx = A(x) T along the polyline with T(start) = start_value.
TransportResult transport(const FuchsianSystem& system, const Path& path, double tol = 0.0);
TransportResult transport_from(const FuchsianSystem& system, const Path& path, const Mat& start_value,
                               double tol = 0.0);

/// Transport along a polyline with the values at every vertex retained.
class PathTransport {
 public:
  PathTransport(const FuchsianSystem& system, Path path, Mat start_value, double tol = 0.0);

  const Path& path() const { return path_; }
  const Mat& at_vertex(int k) const { return values_[static_cast<size_t>(k)]; }
  const Mat& at_end() const { return values_.back(); }
  /// Value at start + t (end - start) of segment `seg`.
  Mat at(int seg, double t) const;
  double det_defect() const { return det_defect_; }

 private:
  const FuchsianSystem* system_;
  Path path_;
  std::vector<Mat> values_;
  double tol_;
  double det_defect_ = 0.0;
};

void check_clearance(const FuchsianSystem& system, const Path& path);

/// Standard generators gamma_j: from the basepoint along a straight spoke to
/// z_j + rho_j u_j, counterclockwise around z_j at radius rho_j, and back.
class GeneratorLayout {
 public:
  explicit GeneratorLayout(const FuchsianSystem& system, double radius_factor = 10.0, int circle_vertices = 48);
  GeneratorLayout(const FuchsianSystem& system, cplx basepoint, double radius_factor, int circle_vertices = 48);

  cplx basepoint() const { return x0_; }
  double radius(int j) const { return radius_[j]; }
  cplx spoke_direction(int j) const { return dir_[j]; }
  cplx spoke_point(int j) const { return spoke_[j]; }

  Path spoke(int j) const;   ///< basepoint -> spoke point
  Path circle(int j) const;  ///< counterclockwise loop starting at the spoke point
  Path loop(int j) const;    ///< spoke, circle, spoke back
  /// Generator indices in the order whose loop product is contractible.
  const std::vector<int>& relation_order() const { return order_; }

 private:
  void build(const FuchsianSystem& system, double radius_factor, int circle_vertices);

  cplx x0_;
  std::vector<cplx> dir_;
  std::vector<double> radius_;
  std::vector<cplx> spoke_;
  std::vector<std::vector<cplx>> circle_;
  std::vector<int> order_;
};

/// Word in the standard generators; letters are (0-based index, +1 or -1).
struct LoopWord {
  std::vector<std::pair<int, int>> letters;

  static LoopWord parse(const std::string& text);
  std::string str() const;
  LoopWord inverse() const;
  LoopWord then(const LoopWord& other) const;
  Path realize(const GeneratorLayout& layout) const;
};

/// Word whose loop is contractible (product of all generators in order).
LoopWord relation_word(const FuchsianSystem& system);

/// S_gamma = Psi(x0)^{-1} Psi(x0 + gamma) with Psi(x0) = Id. Letters are
/// traversed left to right, so S_{ab} = S_b S_a.
Mat monodromy(const FuchsianSystem& system, const LoopWord& word);
Mat generator_monodromy(const FuchsianSystem& system, int j);

/// X = [x.E]: endpoint of `route` (which starts at the basepoint) with E.
struct BundlePoint {
  Path route;
  Mat e;

  cplx position() const { return route.end(); }
};

BundlePoint point_at(const FuchsianSystem& system, cplx x, Mat e);

/// M(X) = Psi(x) E Psi(x)^{-1}.
Mat evaluate_M(const FuchsianSystem& system, const BundlePoint& point);

/// Integral of W_1(x.E) = Tr(A(x) Psi E Psi^{-1}) dx along `path`, starting
/// from Psi(start) = start_value. Returns the integral and the end value.
std::pair<cplx, Mat> integrate_w1(const FuchsianSystem& system, const Path& path, const Mat& start_value,
                                  const Mat& e, double tol = 0.0);

}  // namespace fuchs

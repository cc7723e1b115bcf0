#include "confzero/zeros.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace confzero {

namespace {

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

double point_residual(const FlatConformalField& f, const MetricSpace& M,
                      const Eigen::VectorXd& x) {
  return evaluate(f, x, M).norm() / (1.0 + x.norm());
}

// The scale the thresholds of a jet-local decision are measured against.
// Using |J| alone would make the tests scale-free in x, which is wrong at
// the vertex of a cone of zeros: there J itself tends to zero and points
// converged to the vertex up to rounding must classify like the exact
// vertex. dphi carries the field scale through that degeneration.
double jet_scale(const PointJet& jet) {
  double s = 1.0;
  if (jet.J.size()) s += jet.J.cwiseAbs().maxCoeff();
  if (jet.dphi.size()) s += jet.dphi.cwiseAbs().maxCoeff();
  return s;
}

// Kernel with an absolute singular-value cutoff (the library-wide kernel()
// thresholds relative to sigma_max, which is the wrong yardstick here).
Subspace abs_kernel(const Eigen::MatrixXd& A, double thr) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > thr) ++rank;
  Subspace out;
  out.basis = svd.matrixV().rightCols(A.cols() - rank);
  return out;
}

int abs_rank(const Eigen::MatrixXd& A, double thr) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > thr) ++rank;
  return rank;
}

}  // namespace

std::optional<Eigen::VectorXd> refine_zero(const FlatConformalField& f,
                                           const MetricSpace& M,
                                           const Eigen::VectorXd& seed,
                                           const NewtonOptions& opts) {
  Eigen::VectorXd x = seed;
  Eigen::VectorXd v = evaluate(f, x, M);
  double res = v.norm();

  // Iterate far past the acceptance tolerance. Where grad v is singular
  // transversally to the zero set (cone vertices) convergence is linear and
  // the positional error scales like sqrt(residual), so stopping at tol
  // would leave points ~sqrt(tol) off the set. The loop ends on a residual
  // floor or when backtracking stalls at the floating-point limit.
  const double floor_res = 1e-26;
  for (int it = 0; it < opts.max_iter && res > floor_res; ++it) {
    if (x.norm() > opts.max_norm) return std::nullopt;

    const Eigen::MatrixXd J = jet_at(f, x, M).J;
    // least-squares step: on the zero set the Jacobian is singular along it
    const Eigen::VectorXd step =
        J.completeOrthogonalDecomposition().solve(-v);
    if (!step.allFinite()) return std::nullopt;

    double alpha = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 25; ++bt) {
      const Eigen::VectorXd xn = x + alpha * step;
      const Eigen::VectorXd vn = evaluate(f, xn, M);
      if (vn.norm() < res) {
        x = xn;
        v = vn;
        res = vn.norm();
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  if (res <= opts.tol * (1.0 + x.norm())) return x;
  return std::nullopt;
}

std::vector<Eigen::VectorXd> find_zeros(const FlatConformalField& f,
                                        const MetricSpace& M, const Box& box,
                                        const NewtonOptions& opts) {
  const int n = M.dim();
  if (box.lo.size() != n || box.hi.size() != n)
    throw std::invalid_argument("find_zeros: box dimension mismatch");
  const int g = std::max(opts.grid, 2);

  // cell map at the dedup resolution collapses co-converged seeds
  std::map<std::vector<std::int64_t>, Eigen::VectorXd> cells;
  const auto cell_of = [&](const Eigen::VectorXd& x) {
    std::vector<std::int64_t> key(n);
    for (int i = 0; i < n; ++i)
      key[i] = static_cast<std::int64_t>(std::floor(x(i) / opts.dedup));
    return key;
  };

  std::vector<int> odo(n, 0);
  while (true) {
    Eigen::VectorXd seed(n);
    for (int i = 0; i < n; ++i)
      seed(i) = box.lo(i) + odo[i] * (box.hi(i) - box.lo(i)) / (g - 1);
    if (const auto z = refine_zero(f, M, seed, opts))
      if (box.contains(*z, 1e-6)) cells.emplace(cell_of(*z), *z);

    int d = 0;
    while (d < n && ++odo[d] == g) odo[d++] = 0;
    if (d == n) break;
  }

  std::vector<Eigen::VectorXd> out;
  out.reserve(cells.size());
  for (const auto& [key, z] : cells) out.push_back(z);
  std::sort(out.begin(), out.end(), lex_less);
  // cell quantization leaves near-duplicates across cell walls, and they
  // need not be lexicographic neighbours, so compare against all survivors
  std::vector<Eigen::VectorXd> dedup;
  for (const auto& z : out) {
    bool dup = false;
    for (const auto& kept : dedup)
      if ((z - kept).norm() <= opts.dedup) {
        dup = true;
        break;
      }
    if (!dup) dedup.push_back(z);
  }
  return dedup;
}

Subspace gradient_kernel(const PointJet& jet, double tol) {
  return abs_kernel(jet.J, tol * jet_scale(jet));
}

Subspace simultaneous_kernel(const PointJet& jet, const MetricSpace& M,
                             double tol) {
  const int n = M.dim();
  Eigen::MatrixXd stacked(n + 1, n);
  stacked.topRows(n) = jet.J;
  stacked.bottomRows(1) = jet.dphi;
  return abs_kernel(stacked, tol * jet_scale(jet));
}

const char* to_string(ZeroCase c) {
  switch (c) {
    case ZeroCase::Nonessential: return "nonessential";
    case ZeroCase::EssentialNonsingular: return "essential-nonsingular";
    case ZeroCase::EssentialSingular: return "essential-singular";
  }
  return "unknown";
}

ZeroClassification classify_zero(const PointJet& jet, const MetricSpace& M,
                                 double tol) {
  if (!jet.at_zero(tol))
    throw std::invalid_argument("classify_zero: jet must be at a zero");
  ZeroClassification out;
  const double scale = jet_scale(jet);
  const double thr = tol * scale;

  out.phi = jet.phi;
  out.phi_threshold = thr;
  const bool phi_zero = std::abs(jet.phi) <= out.phi_threshold;

  out.range_threshold = tol;
  const Eigen::VectorXd gphi = M.raise(jet.dphi);
  if (gphi.norm() <= thr) {
    out.range_residual = 0.0;  // zero gradient lies in any range
  } else {
    // project onto the numerical range of grad v, cut at the jet scale
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jet.J, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(gphi.size());
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > thr)
        proj += svd.matrixU().col(i) * svd.matrixU().col(i).dot(gphi);
    out.range_residual = (gphi - proj).norm() / gphi.norm();
  }
  const bool in_range = out.range_residual <= out.range_threshold;

  out.essential = !(phi_zero && in_range);

  out.H = simultaneous_kernel(jet, M, tol);
  out.gram = restricted_gram(out.H, M);
  if (out.H.dim() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.gram);
    out.gram_eigenvalues = es.eigenvalues();
    const double gthr =
        tol * std::max(1.0, out.gram_eigenvalues.cwiseAbs().maxCoeff());
    for (int i = 0; i < out.gram_eigenvalues.size(); ++i) {
      if (out.gram_eigenvalues(i) > gthr)
        ++out.gram_positive;
      else if (out.gram_eigenvalues(i) < -gthr)
        ++out.gram_negative;
      else
        ++out.gram_null;
    }
  }
  out.semidefinite = out.gram_positive == 0 || out.gram_negative == 0;

  out.rank_J = abs_rank(jet.J, thr);
  out.kernel_J_dim = M.dim() - out.rank_J;

  if (!out.essential)
    out.kind = ZeroCase::Nonessential;
  else if (out.semidefinite)
    out.kind = ZeroCase::EssentialNonsingular;
  else
    out.kind = ZeroCase::EssentialSingular;
  return out;
}

bool LocalZeroModel::contains(const Eigen::VectorXd& y, double tol) const {
  const Eigen::VectorXd h = y - x;
  if ((h - H.project(h)).norm() > tol * (1.0 + h.norm())) return false;
  if (!cone) return true;
  return std::abs(h.dot(g * h)) <= tol * (1.0 + h.squaredNorm());
}

std::vector<Eigen::VectorXd> LocalZeroModel::sample_null_dirs(
    Rng& rng, int count) const {
  std::vector<Eigen::VectorXd> dirs;
  const int m = H.dim();
  if (m == 0) return dirs;

  if (!cone) {
    for (int k = 0; k < count; ++k) {
      const Eigen::VectorXd h = H.basis * rng.gauss_vec(m);
      if (h.norm() > 1e-8) dirs.push_back(h.normalized());
    }
    return dirs;
  }

  const double thr =
      kDefaultTol *
      std::max(1.0, gram_vals.size() ? gram_vals.cwiseAbs().maxCoeff() : 0.0);
  std::vector<int> pos, neg, nul;
  for (int i = 0; i < gram_vals.size(); ++i) {
    if (gram_vals(i) > thr)
      pos.push_back(i);
    else if (gram_vals(i) < -thr)
      neg.push_back(i);
    else
      nul.push_back(i);
  }

  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd coords = Eigen::VectorXd::Zero(m);
    if (!pos.empty() && !neg.empty()) {
      // balance the positive and negative squares, add radical noise
      Eigen::VectorXd a(pos.size()), b(neg.size());
      double sa = 0.0, sb = 0.0;
      for (std::size_t i = 0; i < pos.size(); ++i) {
        a(i) = rng.gauss();
        sa += gram_vals(pos[i]) * a(i) * a(i);
      }
      for (std::size_t i = 0; i < neg.size(); ++i) {
        b(i) = rng.gauss();
        sb += -gram_vals(neg[i]) * b(i) * b(i);
      }
      if (sa <= 0.0 || sb <= 0.0) continue;
      for (std::size_t i = 0; i < pos.size(); ++i)
        coords(pos[i]) = a(i) / std::sqrt(sa);
      for (std::size_t i = 0; i < neg.size(); ++i)
        coords(neg[i]) = b(i) / std::sqrt(sb);
      for (const int i : nul) coords(i) = 0.7 * rng.gauss();
    } else if (!nul.empty()) {
      for (const int i : nul) coords(i) = rng.gauss();
    } else {
      return dirs;  // definite restricted metric: isolated zero
    }
    const Eigen::VectorXd h = H.basis * (gram_vecs * coords);
    if (h.norm() > 1e-8) dirs.push_back(h.normalized());
  }
  return dirs;
}

std::vector<Eigen::VectorXd> LocalZeroModel::sample_off_dirs(
    Rng& rng, int count, double margin) const {
  std::vector<Eigen::VectorXd> dirs;
  const int n = static_cast<int>(x.size());
  const int m = H.dim();

  const double max_abs_val =
      gram_vals.size() ? gram_vals.cwiseAbs().maxCoeff() : 0.0;
  if (cone && m > 0 && max_abs_val >= margin) {
    // directions inside H with a definite amount of g-length
    int i_star = 0;
    for (int i = 1; i < gram_vals.size(); ++i)
      if (std::abs(gram_vals(i)) > std::abs(gram_vals(i_star))) i_star = i;
    for (int k = 0; k < count; ++k) {
      Eigen::VectorXd h;
      bool ok = false;
      for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
        Eigen::VectorXd coords = 0.3 * rng.gauss_vec(m);
        coords(i_star) += 1.0;
        h = (H.basis * (gram_vecs * coords)).normalized();
        ok = std::abs(h.dot(g * h)) >= margin;
      }
      if (!ok) h = (H.basis * gram_vecs.col(i_star)).normalized();
      dirs.push_back(h);
    }
    return dirs;
  }

  // totally null H (or plane model): leave H through its Euclidean complement
  const Subspace comp = kernel(H.basis.transpose());
  if (comp.dim() == 0) return dirs;
  for (int k = 0; k < count; ++k) {
    const Eigen::VectorXd h = comp.basis * rng.gauss_vec(comp.dim());
    if (h.norm() > 1e-8) dirs.push_back(h.normalized());
  }
  (void)n;
  return dirs;
}

namespace {

LocalZeroModel model_from_H(const Eigen::VectorXd& x, bool cone,
                            const Subspace& H, const MetricSpace& M,
                            double tol) {
  LocalZeroModel model;
  model.x = x;
  model.cone = cone;
  model.H = H;
  model.g = M.g();
  model.gram = restricted_gram(H, M);
  if (H.dim() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.gram);
    model.gram_vecs = es.eigenvectors();
    model.gram_vals = es.eigenvalues();
  } else {
    model.gram_vecs.resize(0, 0);
    model.gram_vals.resize(0);
  }
  model.sing = cone ? intersect(H, orth_complement(H, M, tol), tol)
                    : Subspace{Eigen::MatrixXd::Zero(M.dim(), 0)};
  return model;
}

}  // namespace

LocalZeroModel essential_zero_model(const PointJet& jet, const MetricSpace& M,
                                    double tol) {
  const ZeroClassification cls = classify_zero(jet, M, tol);
  if (!cls.essential)
    throw std::invalid_argument(
        "essential_zero_model: zero is nonessential; the cone model does "
        "not apply");
  return model_from_H(jet.x, true, cls.H, M, tol);
}

LocalZeroModel killing_zero_model(const FlatConformalField& f,
                                  const Eigen::VectorXd& x,
                                  const MetricSpace& M, double tol) {
  if (std::abs(f.c) > tol || f.u.norm() > tol)
    throw std::invalid_argument(
        "killing_zero_model: field is not Killing (c or u nonzero)");
  const PointJet jet = jet_at(f, x, M);
  if (!jet.at_zero(tol))
    throw std::invalid_argument("killing_zero_model: x is not a zero");
  return model_from_H(x, false, abs_kernel(jet.J, tol * jet_scale(jet)), M,
                      tol);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int k) : parent(k) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int i, int j) { parent[find(i)] = find(j); }
};

struct ComponentStats {
  bool essential_present = false;
  bool nonessential_present = false;
  bool singular_present = false;
  double phi_value = 0.0;
  double phi_spread = 0.0;
  double char_poly_spread = 0.0;
  int dim_singular = -1;
  int dim_nonsingular = -1;
  int restricted_rank = -1;
  bool sign_pattern_constant = true;
  bool dim_relation_ok = true;
  bool rank_relation_ok = true;
  bool rank_relation_applicable = false;
};

// classification-driven relations for one sampled component
ComponentStats component_stats(const FlatConformalField& f,
                               const MetricSpace& M,
                               const std::vector<Eigen::VectorXd>& pts,
                               double tol) {
  ComponentStats s;
  std::vector<ZeroClassification> cls;
  std::vector<PointJet> jets;
  cls.reserve(pts.size());
  for (const auto& p : pts) {
    jets.push_back(jet_at(f, p, M));
    cls.push_back(classify_zero(jets.back(), M, tol));
  }
  CharPoly cp0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& c = cls[i];
    s.essential_present |= c.essential;
    s.nonessential_present |= !c.essential;
    s.singular_present |= c.kind == ZeroCase::EssentialSingular;
    if (i == 0) {
      s.phi_value = c.phi;
      cp0 = char_poly(jets[0].J);
    } else {
      s.phi_spread = std::max(s.phi_spread, std::abs(c.phi - s.phi_value));
      s.char_poly_spread = std::max(
          s.char_poly_spread, char_poly_distance(char_poly(jets[i].J), cp0));
    }
  }

  // stratified relations between singular points and the nonsingular rest
  std::vector<int> sing_idx, nonsing_idx;
  for (std::size_t i = 0; i < cls.size(); ++i)
    (cls[i].kind == ZeroCase::EssentialSingular ? sing_idx : nonsing_idx)
        .push_back(static_cast<int>(i));
  if (!sing_idx.empty() && !nonsing_idx.empty()) {
    const auto& cx = cls[sing_idx[0]];
    const Subspace sing_tangent =
        intersect(cx.H, orth_complement(cx.H, M, tol), tol);
    s.dim_singular = sing_tangent.dim();

    std::pair<int, int> sig0{0, 0};
    int r0 = -1;
    for (std::size_t k = 0; k < nonsing_idx.size(); ++k) {
      const PointJet& jy = jets[nonsing_idx[k]];
      const Subspace tangent = abs_kernel(jy.J, tol * jet_scale(jy));
      const Eigen::MatrixXd gram = restricted_gram(tangent, M);
      const auto sig = signature_of(gram, tol);
      const int r = sig.first + sig.second;
      if (k == 0) {
        s.dim_nonsingular = tangent.dim();
        s.restricted_rank = r;
        sig0 = sig;
        r0 = r;
      } else if (sig != sig0 || r != r0 ||
                 tangent.dim() != s.dim_nonsingular) {
        s.sign_pattern_constant = false;
      }
    }
    s.dim_relation_ok =
        s.dim_nonsingular - s.dim_singular == s.restricted_rank + 1;

    s.rank_relation_applicable = s.nonessential_present;
    if (s.rank_relation_applicable)
      for (const int iy : nonsing_idx)
        for (const int ix : sing_idx)
          if (cls[iy].rank_J != 2 + cls[ix].rank_J)
            s.rank_relation_ok = false;
  }
  return s;
}

}  // namespace

ScanReport component_scan(const FlatConformalField& f, const MetricSpace& M,
                          const Box& box, const ScanOptions& opts) {
  ScanReport report;
  const int n = M.dim();
  const auto zeros = find_zeros(f, M, box, opts.newton);
  if (zeros.empty()) return report;
  const int k = static_cast<int>(zeros.size());
  const double spacing =
      box.max_extent() / std::max(opts.newton.grid - 1, 1);
  const double adjacency = 3.0 * spacing;

  // neighbor candidates via cells of the adjacency size
  std::map<std::vector<std::int64_t>, std::vector<int>> cells;
  const auto cell_of = [&](const Eigen::VectorXd& xx) {
    std::vector<std::int64_t> key(n);
    for (int i = 0; i < n; ++i)
      key[i] = static_cast<std::int64_t>(std::floor(xx(i) / adjacency));
    return key;
  };
  for (int i = 0; i < k; ++i) cells[cell_of(zeros[i])].push_back(i);

  UnionFind uf(k);
  std::vector<std::pair<int, int>> refinement_failures;
  for (const auto& [key, idxs] : cells) {
    std::vector<std::int64_t> nb = key;
    std::vector<int> candidates;
    // this cell and all neighbors; walk an odometer over offsets
    std::vector<int> off(n, -1);
    while (true) {
      for (int i = 0; i < n; ++i) nb[i] = key[i] + off[i];
      if (const auto it = cells.find(nb); it != cells.end())
        for (const int j : it->second) candidates.push_back(j);
      int d = 0;
      while (d < n && ++off[d] == 2) off[d++] = -1;
      if (d == n) break;
    }
    for (const int i : idxs)
      for (const int j : candidates) {
        if (j <= i) continue;
        if ((zeros[i] - zeros[j]).norm() >= adjacency) continue;
        if (uf.find(i) == uf.find(j)) continue;
        const Eigen::VectorXd mid = 0.5 * (zeros[i] + zeros[j]);
        const auto z = refine_zero(f, M, mid, opts.newton);
        if (z && (*z - mid).norm() <= 1.5 * spacing)
          uf.unite(i, j);
        else
          refinement_failures.emplace_back(i, j);
      }
  }

  // assemble components in first-member order
  std::map<int, std::vector<int>> by_root;
  for (int i = 0; i < k; ++i) by_root[uf.find(i)].push_back(i);

  report.samples.reserve(k);
  std::vector<ZeroClassification> cls(k);
  for (int i = 0; i < k; ++i) {
    const PointJet jet = jet_at(f, zeros[i], M);
    cls[i] = classify_zero(jet, M, opts.newton.tol);
    report.samples.push_back({zeros[i], cls[i].kind, cls[i].phi,
                              cls[i].rank_J, cls[i].kernel_J_dim});
  }

  const bool killing = std::abs(f.c) <= 1e-12 && f.u.norm() <= 1e-12;

  std::vector<int> root_of_component;
  for (const auto& [root, members] : by_root) {
    ComponentReport comp;
    comp.members = members;
    root_of_component.push_back(root);

    std::vector<Eigen::VectorXd> pts;
    for (const int i : members) pts.push_back(zeros[i]);
    ComponentStats stats = component_stats(f, M, pts, opts.newton.tol);

    comp.mixed_classification =
        stats.essential_present && stats.nonessential_present;
    if (comp.mixed_classification && opts.refine_on_mixed) {
      // thin strata can hide at the base resolution; recompute the stats
      // once on a doubled grid over this component's neighborhood
      Box sub;
      sub.lo = pts[0];
      sub.hi = pts[0];
      for (const auto& p : pts) {
        sub.lo = sub.lo.cwiseMin(p);
        sub.hi = sub.hi.cwiseMax(p);
      }
      sub.lo.array() -= spacing;
      sub.hi.array() += spacing;
      NewtonOptions fine = opts.newton;
      fine.grid = 2 * opts.newton.grid - 1;
      const auto fine_zeros = find_zeros(f, M, sub, fine);
      if (fine_zeros.size() > pts.size()) {
        stats = component_stats(f, M, fine_zeros, opts.newton.tol);
        comp.refined = true;
        comp.notes.push_back("stats recomputed from " +
                             std::to_string(fine_zeros.size()) +
                             " samples on a doubled grid");
      }
    }

    comp.essential_present = stats.essential_present;
    comp.nonessential_present = stats.nonessential_present;
    comp.singular_present = stats.singular_present;
    comp.phi_value = stats.phi_value;
    comp.phi_spread = stats.phi_spread;
    comp.char_poly_spread = stats.char_poly_spread;
    comp.dim_singular = stats.dim_singular;
    comp.dim_nonsingular = stats.dim_nonsingular;
    comp.restricted_rank = stats.restricted_rank;
    comp.sign_pattern_constant = stats.sign_pattern_constant;
    comp.dim_relation_ok = stats.dim_relation_ok;
    comp.rank_relation_ok = stats.rank_relation_ok;
    comp.rank_relation_applicable = stats.rank_relation_applicable;

    // straight segments between singular samples must consist of zeros
    std::vector<int> sing_members;
    for (const int i : members)
      if (cls[i].kind == ZeroCase::EssentialSingular) sing_members.push_back(i);
    if (sing_members.size() >= 2) {
      const auto check_segment = [&](int a, int b) {
        for (int t = 1; t <= 20; ++t) {
          const Eigen::VectorXd p =
              zeros[a] + (t / 21.0) * (zeros[b] - zeros[a]);
          if (point_residual(f, M, p) > 1e-8) return false;
        }
        return true;
      };
      if (sing_members.size() <= 10) {
        for (std::size_t a = 0; a < sing_members.size(); ++a)
          for (std::size_t b = a + 1; b < sing_members.size(); ++b)
            comp.geodesic_segments_ok &=
                check_segment(sing_members[a], sing_members[b]);
      } else {
        for (std::size_t a = 0; a + 1 < sing_members.size(); ++a)
          comp.geodesic_segments_ok &=
              check_segment(sing_members[a], sing_members[a + 1]);
        comp.geodesic_segments_ok &=
            check_segment(sing_members.front(), sing_members.back());
      }
    }

    // membership in the local model, based at a singular sample when one
    // exists, else at the first essential one
    int base = -1;
    for (const int i : members)
      if (cls[i].kind == ZeroCase::EssentialSingular) {
        base = i;
        break;
      }
    if (base < 0)
      for (const int i : members)
        if (cls[i].essential) {
          base = i;
          break;
        }
    if (base >= 0) {
      const LocalZeroModel model =
          essential_zero_model(jet_at(f, zeros[base], M), M, opts.newton.tol);
      comp.model_membership_checked = true;
      for (const int i : members)
        comp.model_membership_ok &=
            model.contains(zeros[i], opts.membership_tol);
    } else if (killing) {
      const LocalZeroModel model =
          killing_zero_model(f, zeros[members[0]], M, 1e-9);
      comp.model_membership_checked = true;
      for (const int i : members)
        comp.model_membership_ok &=
            model.contains(zeros[i], opts.membership_tol);
      comp.codim_even = (n - model.H.dim()) % 2 == 0;
    } else {
      comp.notes.push_back(
          "nonessential non-Killing component: no local model checked");
    }

    // sampling-density warning: holes in the sampled component
    if (members.size() >= 2 && members.size() <= 2000) {
      double worst_gap = 0.0;
      for (const int i : members) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const int j : members)
          if (j != i)
            nearest = std::min(nearest, (zeros[i] - zeros[j]).norm());
        worst_gap = std::max(worst_gap, nearest);
      }
      if (worst_gap > 10.0 * spacing)
        report.warnings.push_back(
            "component " +
            std::to_string(report.components.size()) +
            " has sampling gaps above 10 grid spacings; connectivity is "
            "unreliable");
    }

    report.components.push_back(std::move(comp));
  }

  // ambiguous separations: near pairs whose midpoint refinement failed and
  // that ended up in different components
  for (const auto& [i, j] : refinement_failures)
    if (uf.find(i) != uf.find(j)) {
      report.warnings.push_back(
          "zeros closer than 3 grid spacings could not be joined by "
          "midpoint refinement; component split may be an artifact");
      break;
    }

  return report;
}

LineTransportCheck null_line_transport(const FlatConformalField& f,
                                       const MetricSpace& M,
                                       const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& dir,
                                       double t_max, int steps, double tol) {
  if (steps < 3) throw std::invalid_argument("null_line_transport: steps < 3");
  const PointJet jet0 = jet_at(f, x, M);
  if (!jet0.at_zero(1e-8))
    throw std::invalid_argument("null_line_transport: x is not a zero");
  const Eigen::VectorXd d = dir.normalized();
  const Subspace H = simultaneous_kernel(jet0, M);
  if (!H.contains(d, 1e-8) || !M.is_null(d, 1e-10))
    throw std::invalid_argument(
        "null_line_transport: direction is not a null direction in the "
        "simultaneous kernel");

  // parallel test vectors: a basis of the g-orthogonal complement of d
  const Subspace W = kernel(M.lower(d));

  LineTransportCheck out;
  std::vector<PointJet> jets(steps);
  for (int s = 0; s < steps; ++s) {
    const double t = -t_max + 2.0 * t_max * s / (steps - 1);
    jets[s] = jet_at(f, x + t * d, M);
    out.max_point_residual =
        std::max(out.max_point_residual,
                 jets[s].value.norm() / (1.0 + jets[s].x.norm()));
  }
  if (out.max_point_residual > tol)
    throw std::domain_error(
        "null_line_transport: the sampled line leaves the zero set");

  const double dt = 2.0 * t_max / (steps - 1);
  for (int c = 0; c < W.dim(); ++c) {
    const Eigen::VectorXd w = W.basis.col(c);
    // g(w, grad phi) along the line
    const double target0 = (jets[0].dphi * w).value();
    for (int s = 0; s < steps; ++s) {
      const double along = (jets[s].dphi * w).value();
      out.residual_constant =
          std::max(out.residual_constant, std::abs(along - target0));
      if (s + 1 < steps) {
        const Eigen::VectorXd slope =
            (jets[s + 1].J * w - jets[s].J * w) / dt;
        const Eigen::VectorXd expected = 0.5 * along * d;
        out.residual_parallel = std::max(
            out.residual_parallel, (slope - expected).cwiseAbs().maxCoeff());
      }
    }
  }
  return out;
}

}  // namespace confzero

#include "confzero/fixtures.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace confzero {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

struct Params {
  std::string name;
  std::map<std::string, double> kv;

  double get(const std::string& key, double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const double v = it->second;
    kv.erase(it);
    return v;
  }
  int get_int(const std::string& key, int fallback) {
    const double v = get(key, fallback);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-12)
      throw std::invalid_argument("constructor " + name + ": parameter " +
                                  key + " must be an integer");
    return i;
  }
  void reject_leftovers() const {
    if (!kv.empty())
      throw std::invalid_argument("constructor " + name +
                                  ": unknown parameter " + kv.begin()->first);
  }
};

Params parse_call(const std::string& text) {
  Params p;
  const std::string s = trimmed(text);
  const std::size_t open = s.find('(');
  if (open == std::string::npos) {
    p.name = s;
    return p;
  }
  if (s.back() != ')')
    throw std::invalid_argument("constructor string missing ')': " + text);
  p.name = trimmed(s.substr(0, open));
  const std::string args = s.substr(open + 1, s.size() - open - 2);
  std::stringstream ss(args);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trimmed(item);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("constructor " + p.name +
                                  ": expected key=value, got '" + item + "'");
    const std::string key = trimmed(item.substr(0, eq));
    const std::string val = trimmed(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      p.kv[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw std::invalid_argument("constructor " + p.name + ": parameter " +
                                  key + " has non-numeric value '" + val +
                                  "'");
    }
  }
  return p;
}

// B rotating the plane of basis vectors i, j (0-based); g-skew for any g.
Eigen::MatrixXd plane_rotation(const MetricSpace& M, int i, int j,
                               double speed) {
  return rotation_generator(M, i, j, speed);
}

FlatConformalField zero_field(int n) {
  FlatConformalField f;
  f.w = Eigen::VectorXd::Zero(n);
  f.B = Eigen::MatrixXd::Zero(n, n);
  f.c = 0.0;
  f.u = Eigen::VectorXd::Zero(n);
  return f;
}

Fixture assemble(std::string name, const MetricSpace& space,
                 FlatConformalField field,
                 std::optional<Eigen::VectorXd> line_dir = std::nullopt,
                 double half_width = 1.0) {
  const int n = space.dim();
  return Fixture{std::move(name),
                 space,
                 std::move(field),
                 Eigen::VectorXd::Zero(n),
                 std::move(line_dir),
                 Box::centered(n, half_width)};
}

}  // namespace

Fixture from_constructor(const std::string& text) {
  Params p = parse_call(text);

  if (p.name == "rotation") {
    const int n = p.get_int("n", 3);
    const int pp = p.get_int("p", n);
    const int i = p.get_int("i", 1) - 1;
    const int j = p.get_int("j", 2) - 1;
    const double speed = p.get("speed", 1.0);
    p.reject_leftovers();
    const MetricSpace space(pp, n - pp);
    FlatConformalField f = zero_field(n);
    f.B = plane_rotation(space, i, j, speed);
    return assemble(p.name, space, std::move(f));
  }

  if (p.name == "dilation") {
    const int n = p.get_int("n", 3);
    const int pp = p.get_int("p", n);
    const double c = p.get("c", 1.0);
    p.reject_leftovers();
    const MetricSpace space(pp, n - pp);
    FlatConformalField f = zero_field(n);
    f.c = c;
    return assemble(p.name, space, std::move(f));
  }

  if (p.name == "special-conformal") {
    const int n = p.get_int("n", 3);
    const int pp = p.get_int("p", n);
    const int axis = p.get_int("axis", 1) - 1;
    const double scale = p.get("scale", 1.0);
    p.reject_leftovers();
    if (axis < 0 || axis >= n)
      throw std::invalid_argument("special-conformal: axis out of range");
    const MetricSpace space(pp, n - pp);
    FlatConformalField f = zero_field(n);
    f.u = scale * Eigen::VectorXd::Unit(n, axis);
    return assemble(p.name, space, std::move(f));
  }

  if (p.name == "lorentz-cone") {
    const int n = p.get_int("n", 4);
    p.reject_leftovers();
    if (n < 3) throw std::invalid_argument("lorentz-cone: n must be >= 3");
    const MetricSpace space(1, n - 1);
    FlatConformalField f = zero_field(n);
    f.u = Eigen::VectorXd::Unit(n, 1);  // spacelike axis
    // null generator of the zero cone, orthogonal to u
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    d(0) = 1.0;
    d(2) = 1.0;
    return assemble(p.name, space, std::move(f), d);
  }

  if (p.name == "neutral-counterexample") {
    const double c = p.get("c", 1.0);
    p.reject_leftovers();
    const MetricSpace space(2, 2);
    FlatConformalField f = zero_field(4);
    // B swaps the null planes span{e1+e3, e2+e4} and span{e1-e3, e2-e4};
    // paired with the matching dilation the whole line through e1-e3 is a
    // zero line, and Ker grad v drops from 2 to 1 away from the origin.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(4, 4);
    K(0, 2) = K(2, 0) = K(1, 3) = K(3, 1) = 1.0;
    f.B = c * K;
    f.c = c;
    f.u = Eigen::VectorXd::Unit(4, 1);
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(4);
    m2(0) = 1.0;
    m2(2) = -1.0;
    return assemble(p.name, space, std::move(f), m2);
  }

  if (p.name == "xi-plane") {
    p.reject_leftovers();
    // signature (2,3): the totally null plane spanned by t = e1+e3 and
    // m = e2+e4 consists entirely of essential zeros with phi = 0 and
    // carries a nonvanishing xi form.
    const MetricSpace space(2, 3);
    FlatConformalField f = zero_field(5);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(5), m = Eigen::VectorXd::Zero(5);
    t(0) = t(2) = 1.0;
    m(1) = m(3) = 1.0;
    f.B = m * space.lower(t) - t * space.lower(m);
    f.u = Eigen::VectorXd::Unit(5, 4);
    return assemble(p.name, space, std::move(f), t);
  }

  throw std::invalid_argument("unknown constructor name: " + p.name);
}

PlantedPair plant_equivalent_pair(const MetricSpace& M, Rng& rng) {
  const int n = M.dim();
  PlantedPair out;
  out.f1 = zero_field(n);
  out.f1.B = skew_from_params(rng.gauss_vec(n * (n - 1) / 2), M);
  out.f1.c = rng.gauss();
  out.f1.u = rng.gauss_vec(n);

  const double t0 = rng.uniform(-0.6, 0.6);
  out.s0 = std::exp(t0);
  out.F0 = std::exp(t0 / 2.0) *
           isometry_from_params(0.4 * rng.gauss_vec(n * (n - 1) / 2), M);

  const PointJet jet1 = jet_at(out.f1, Eigen::VectorXd::Zero(n), M);
  const Eigen::MatrixXd F0_inv = out.F0.inverse();
  PointJet jet2;
  jet2.x = Eigen::VectorXd::Zero(n);
  jet2.value = Eigen::VectorXd::Zero(n);
  jet2.J = out.F0 * jet1.J * F0_inv;
  jet2.phi = jet1.phi;
  jet2.dphi = jet1.dphi * F0_inv;
  out.f2 = field_from_jet(jet2, M);
  return out;
}

PlantedPair plant_inequivalent_pair(const MetricSpace& M, Rng& rng,
                                    MismatchKind kind) {
  const int n = M.dim();
  PlantedPair out;
  out.F0 = Eigen::MatrixXd::Identity(n, n);
  out.f1 = zero_field(n);
  out.f2 = zero_field(n);
  if (kind == MismatchKind::Lambda) {
    out.f1.B = skew_from_params(rng.gauss_vec(n * (n - 1) / 2), M);
    out.f2.B = out.f1.B;
    out.f1.u = rng.gauss_vec(n);
    out.f2.u = out.f1.u;
    out.f1.c = rng.gauss();
    out.f2.c = out.f1.c + 0.75 + std::abs(rng.gauss());
  } else {
    // same trace part, different kernel dimension: one plane rotation
    // against two rotations in disjoint planes
    if (n < 4)
      throw std::invalid_argument(
          "plant_inequivalent_pair: kernel mismatch needs n >= 4");
    out.f1.B = plane_rotation(M, 0, 1, 1.0);
    out.f2.B = plane_rotation(M, 0, 1, 1.0) + plane_rotation(M, 2, 3, 1.0);
  }
  return out;
}

Eigen::MatrixXd rotation_generator(const MetricSpace& M, int i, int j,
                                   double speed) {
  const int n = M.dim();
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw std::invalid_argument("rotation: plane axes out of range");
  const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
  const Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
  return speed * (ej * M.lower(ei) - ei * M.lower(ej));
}

}  // namespace confzero

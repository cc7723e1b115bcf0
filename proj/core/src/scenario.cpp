#include "confzero/scenario.hpp"

#include "confzero/fixtures.hpp"
#include "confzero/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

namespace confzero {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        });
    if (!known) fail(where + "." + item.key(), "unknown key");
  }
}

double number_at(const json& obj, const char* key, const std::string& where,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& j = obj.at(key);
  if (!j.is_number()) fail(where + "." + key, "expected a number");
  return j.get<double>();
}

int int_at(const json& obj, const char* key, const std::string& where,
           int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& j = obj.at(key);
  if (!j.is_number_integer()) fail(where + "." + key, "expected an integer");
  return j.get<int>();
}

std::uint64_t seed_at(const json& obj, const char* key,
                      const std::string& where, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& j = obj.at(key);
  if (!j.is_number_unsigned() && !j.is_number_integer())
    fail(where + "." + key, "expected a nonnegative integer");
  if (j.is_number_integer() && j.get<std::int64_t>() < 0)
    fail(where + "." + key, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

Eigen::VectorXd vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      fail(where + "[" + std::to_string(i) + "]", "expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  if (v.size() == 0) fail(where, "expected a nonempty array");
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected an array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  Eigen::MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail(row_where, "expected an array of numbers");
    if (r == 0) {
      cols = j[r].size();
      if (cols == 0) fail(row_where, "expected a nonempty row");
      m.resize(static_cast<Eigen::Index>(rows),
               static_cast<Eigen::Index>(cols));
    } else if (j[r].size() != cols) {
      fail(row_where, "rows have different lengths");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number())
        fail(row_where + "[" + std::to_string(c) + "]", "expected a number");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
    }
  }
  return m;
}

MetricSpace parse_space(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"n", "p", "q", "g"});
  if (j.contains("g")) {
    const Eigen::MatrixXd g = matrix_from(j.at("g"), where + ".g");
    if (g.rows() != g.cols()) fail(where + ".g", "expected a square matrix");
    MetricSpace M = [&] {
      try {
        return MetricSpace(g);
      } catch (const std::invalid_argument& e) {
        fail(where + ".g", e.what());
      }
    }();
    if (j.contains("n") && int_at(j, "n", where, 0) != M.dim())
      fail(where + ".n", "disagrees with the size of g");
    if (j.contains("p") && int_at(j, "p", where, 0) != M.p())
      fail(where + ".p", "disagrees with the signature of g");
    if (j.contains("q") && int_at(j, "q", where, 0) != M.q())
      fail(where + ".q", "disagrees with the signature of g");
    return M;
  }
  if (!j.contains("n")) fail(where, "needs n (with p or q) or g");
  const int n = int_at(j, "n", where, 0);
  if (n < 1) fail(where + ".n", "expected a positive dimension");
  int p = int_at(j, "p", where, j.contains("q") ? n - int_at(j, "q", where, 0)
                                                : n);
  int q = int_at(j, "q", where, n - p);
  if (p < 0 || q < 0 || p + q != n)
    fail(where, "signature must satisfy p + q = n with p, q >= 0");
  return MetricSpace(p, q);
}

bool standard_metric(const MetricSpace& M) {
  Eigen::VectorXd d(M.dim());
  for (int i = 0; i < M.dim(); ++i) d(i) = i < M.p() ? 1.0 : -1.0;
  return (M.g() - Eigen::MatrixXd(d.asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

// B given as "rotation(i=1,j=2,speed=1)" with 1-based axes, matching the
// named field constructors.
Eigen::MatrixXd b_from_text(const std::string& text, const MetricSpace& M,
                            const std::string& where) {
  std::string name = text;
  std::string args;
  const auto open = text.find('(');
  if (open != std::string::npos) {
    if (text.back() != ')') fail(where, "unbalanced parentheses");
    name = text.substr(0, open);
    args = text.substr(open + 1, text.size() - open - 2);
  }
  if (name != "rotation")
    fail(where, "unknown B constructor '" + name +
                    "' (write a matrix or \"rotation(i=1,j=2,speed=1)\")");
  int i = 1, j = 2;
  double speed = 1.0;
  std::stringstream ss(args);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) fail(where, "expected key=value arguments");
    const std::string key = part.substr(0, eq);
    const std::string val = part.substr(eq + 1);
    try {
      if (key == "i")
        i = std::stoi(val);
      else if (key == "j")
        j = std::stoi(val);
      else if (key == "speed")
        speed = std::stod(val);
      else
        fail(where, "unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      fail(where, "bad value for '" + key + "'");
    }
  }
  try {
    return rotation_generator(M, i - 1, j - 1, speed);
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

struct FieldParse {
  FlatConformalField field;
  std::optional<MetricSpace> space;  // set when a constructor supplied it
  std::optional<Box> box;            // the constructor's suggested region
};

FieldParse parse_field(const json& j,
                       const std::optional<MetricSpace>& declared,
                       const std::string& where) {
  if (j.is_string()) {
    Fixture fx = [&] {
      try {
        return from_constructor(j.get<std::string>());
      } catch (const std::invalid_argument& e) {
        fail(where, e.what());
      }
    }();
    if (declared && (declared->dim() != fx.space.dim() ||
                     !declared->g().isApprox(fx.space.g(), 1e-12)))
      fail(where, "constructor space disagrees with the declared space");
    return {fx.field, fx.space, fx.box};
  }
  require_object(j, where);
  if (!declared)
    fail("space", "required when " + where + " is given componentwise");
  const MetricSpace& M = *declared;
  const int n = M.dim();
  reject_unknown(j, where, {"w", "B", "c", "u"});

  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  if (j.contains("w")) {
    w = vector_from(j.at("w"), where + ".w");
    if (w.size() != n) fail(where + ".w", "expected length n");
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  if (j.contains("u")) {
    u = vector_from(j.at("u"), where + ".u");
    if (u.size() != n) fail(where + ".u", "expected length n");
  }
  const double c = number_at(j, "c", where, 0.0);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  if (j.contains("B")) {
    const json& jb = j.at("B");
    if (jb.is_string()) {
      B = b_from_text(jb.get<std::string>(), M, where + ".B");
    } else {
      B = matrix_from(jb, where + ".B");
      if (B.rows() != n || B.cols() != n)
        fail(where + ".B", "expected an n by n matrix");
    }
  }
  try {
    return {make_field(w, B, c, u, M), std::nullopt, std::nullopt};
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

Box parse_box(const json& j, int n, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, where, {"half_width", "lo", "hi"});
  if (j.contains("half_width")) {
    if (j.contains("lo") || j.contains("hi"))
      fail(where, "give either half_width or lo/hi, not both");
    const double hw = number_at(j, "half_width", where, 0.0);
    if (!(hw > 0.0)) fail(where + ".half_width", "expected a positive number");
    return Box::centered(n, hw);
  }
  if (!j.contains("lo") || !j.contains("hi"))
    fail(where, "needs half_width or both lo and hi");
  Box b;
  b.lo = vector_from(j.at("lo"), where + ".lo");
  b.hi = vector_from(j.at("hi"), where + ".hi");
  if (b.lo.size() != n || b.hi.size() != n)
    fail(where, "lo and hi must have length n");
  if (!((b.hi - b.lo).array() > 0.0).all())
    fail(where, "hi must exceed lo in every coordinate");
  return b;
}

TaskSpec parse_task(const json& j, const Scenario& s, std::size_t index) {
  const std::string where = "tasks[" + std::to_string(index) + "]";
  require_object(j, where);
  if (!j.contains("kind") || !j.at("kind").is_string())
    fail(where, "needs a string 'kind'");
  TaskSpec t;
  t.kind = j.at("kind").get<std::string>();
  const auto& kinds = task_kinds();
  if (std::find(kinds.begin(), kinds.end(), t.kind) == kinds.end())
    fail(where + ".kind", "unknown task kind '" + t.kind + "'");

  t.tol = number_at(j, "tol", where, s.tol);
  if (!(t.tol > 0.0)) fail(where + ".tol", "expected a positive number");
  t.grid = int_at(j, "grid", where, s.grid);
  if (t.grid < 2) fail(where + ".grid", "expected at least 2");
  t.budget = int_at(j, "budget", where, s.budget);
  if (t.budget < 1) fail(where + ".budget", "expected a positive count");
  t.seed = seed_at(j, "seed", where, s.seed);

  const int n = s.space.dim();
  const bool wants_point = t.kind == "classify" || t.kind == "local-model" ||
                           t.kind == "char-poly" || t.kind == "quintuple" ||
                           t.kind == "xi" || t.kind == "equivalence";

  std::vector<const char*> allowed = {"kind", "tol", "grid", "budget", "seed"};
  if (t.kind == "find-zeros" || t.kind == "component-scan")
    allowed.push_back("box");
  if (wants_point) allowed.push_back("at");
  if (t.kind == "xi") allowed.push_back("dir");
  if (t.kind == "equivalence") {
    allowed.push_back("jets");
    allowed.push_back("target");
  }
  if (t.kind == "verify-theorem") allowed.push_back("name");
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }))
      fail(where + "." + item.key(),
           "unknown key for task kind '" + t.kind + "'");
  }

  if (j.contains("box"))
    t.box = parse_box(j.at("box"), n, where + ".box");
  if (wants_point) {
    if (!j.contains("at")) fail(where, t.kind + " needs 'at'");
    t.at = vector_from(j.at("at"), where + ".at");
    if (t.at->size() != n) fail(where + ".at", "expected length n");
  }
  if (j.contains("dir")) {
    t.dir = vector_from(j.at("dir"), where + ".dir");
    if (t.dir->size() != n) fail(where + ".dir", "expected length n");
  }
  if (t.kind == "equivalence") {
    t.jets = int_at(j, "jets", where, 2);
    if (t.jets != 1 && t.jets != 2) fail(where + ".jets", "expected 1 or 2");
    if (!j.contains("target")) fail(where, "equivalence needs 'target'");
    const json& jt = j.at("target");
    require_object(jt, where + ".target");
    reject_unknown(jt, where + ".target", {"space", "field", "at"});
    std::optional<MetricSpace> tspace;
    if (jt.contains("space"))
      tspace = parse_space(jt.at("space"), where + ".target.space");
    else
      tspace = s.space;
    if (!jt.contains("field")) fail(where + ".target", "needs 'field'");
    FieldParse fp =
        parse_field(jt.at("field"), tspace, where + ".target.field");
    const MetricSpace tsp = fp.space ? *fp.space : *tspace;
    Eigen::VectorXd at = Eigen::VectorXd::Zero(tsp.dim());
    if (jt.contains("at")) {
      at = vector_from(jt.at("at"), where + ".target.at");
      if (at.size() != tsp.dim())
        fail(where + ".target.at", "expected the target space dimension");
    }
    t.target = EquivalenceTarget{tsp, fp.field, at};
  }
  if (t.kind == "verify-theorem") {
    if (!j.contains("name") || !j.at("name").is_string())
      fail(where, "verify-theorem needs a string 'name'");
    t.theorem = j.at("name").get<std::string>();
    const auto& names = theorem_names();
    if (std::find(names.begin(), names.end(), t.theorem) == names.end())
      fail(where + ".name", "unknown check '" + t.theorem + "'");
  }
  return t;
}

json vector_to(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_to(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json space_to(const MetricSpace& M) {
  json j;
  j["n"] = M.dim();
  j["p"] = M.p();
  j["q"] = M.q();
  if (!standard_metric(M)) j["g"] = matrix_to(M.g());
  return j;
}

json field_to(const FlatConformalField& f) {
  json j;
  j["w"] = vector_to(f.w);
  j["B"] = matrix_to(f.B);
  j["c"] = f.c;
  j["u"] = vector_to(f.u);
  return j;
}

json box_to(const Box& b) {
  json j;
  j["lo"] = vector_to(b.lo);
  j["hi"] = vector_to(b.hi);
  return j;
}

}  // namespace

const std::vector<std::string>& task_kinds() {
  static const std::vector<std::string> kinds = {
      "find-zeros", "classify",    "local-model",
      "component-scan", "char-poly", "quintuple",
      "equivalence", "xi",         "verify-theorem"};
  return kinds;
}

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("syntax: ") + e.what());
  }
  require_object(root, "scenario");
  reject_unknown(root, "scenario",
                 {"space", "field", "box", "tol", "grid", "budget", "seed",
                  "tasks"});
  if (!root.contains("field")) fail("scenario", "needs 'field'");

  std::optional<MetricSpace> declared;
  if (root.contains("space"))
    declared = parse_space(root.at("space"), "space");

  FieldParse fp = parse_field(root.at("field"), declared, "field");
  if (!fp.space && !declared) fail("scenario", "needs 'space'");

  Scenario s{fp.space ? *fp.space : *declared,
             fp.field,
             Box::centered(1, 1.0),
             kDefaultTol,
             7,
             5000,
             42,
             {}};
  s.box = fp.box ? *fp.box : Box::centered(s.space.dim(), 1.0);
  if (root.contains("box"))
    s.box = parse_box(root.at("box"), s.space.dim(), "box");

  s.tol = number_at(root, "tol", "scenario", kDefaultTol);
  if (!(s.tol > 0.0)) fail("tol", "expected a positive number");
  s.grid = int_at(root, "grid", "scenario", 7);
  if (s.grid < 2) fail("grid", "expected at least 2");
  s.budget = int_at(root, "budget", "scenario", 5000);
  if (s.budget < 1) fail("budget", "expected a positive count");
  s.seed = seed_at(root, "seed", "scenario", 42);

  if (root.contains("tasks")) {
    const json& jt = root.at("tasks");
    if (!jt.is_array()) fail("tasks", "expected an array");
    for (std::size_t i = 0; i < jt.size(); ++i)
      s.tasks.push_back(parse_task(jt[i], s, i));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize(const Scenario& s) {
  json root;
  root["space"] = space_to(s.space);
  root["field"] = field_to(s.field);
  root["box"] = box_to(s.box);
  root["tol"] = s.tol;
  root["grid"] = s.grid;
  root["budget"] = s.budget;
  root["seed"] = s.seed;
  json tasks = json::array();
  for (const TaskSpec& t : s.tasks) {
    json j;
    j["kind"] = t.kind;
    j["tol"] = t.tol;
    j["grid"] = t.grid;
    j["budget"] = t.budget;
    j["seed"] = t.seed;
    if (t.at) j["at"] = vector_to(*t.at);
    if (t.dir) j["dir"] = vector_to(*t.dir);
    if (t.box) j["box"] = box_to(*t.box);
    if (t.kind == "equivalence") {
      j["jets"] = t.jets;
      if (t.target) {
        json jt;
        jt["space"] = space_to(t.target->space);
        jt["field"] = field_to(t.target->field);
        jt["at"] = vector_to(t.target->at);
        j["target"] = jt;
      }
    }
    if (t.kind == "verify-theorem") j["name"] = t.theorem;
    tasks.push_back(j);
  }
  root["tasks"] = tasks;
  return root.dump(2) + "\n";
}

}  // namespace confzero

#include "confzero/report.hpp"

#include "confzero/jets.hpp"
#include "confzero/sigma.hpp"
#include "confzero/verify.hpp"
#include "confzero/zeros.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace confzero {
namespace {

using json = nlohmann::ordered_json;

json vec_to(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json row_to(const Eigen::RowVectorXd& v) { return vec_to(v.transpose()); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equivalent:
      return "equivalent";
    case Verdict::Inequivalent:
      return "inequivalent";
    default:
      return "undecided";
  }
}

PointJet jet_at_zero(const FlatConformalField& f, const Eigen::VectorXd& x,
                     const MetricSpace& M) {
  PointJet jet = jet_at(f, x, M);
  if (!jet.at_zero(1e-8))
    throw std::runtime_error("the point is not a zero of the field (|v| = " +
                             fmt(jet.value.norm()) + ")");
  return jet;
}

NewtonOptions newton_from(const TaskSpec& t) {
  NewtonOptions n;
  n.grid = t.grid;
  n.tol = t.tol;
  return n;
}

json do_find_zeros(const Scenario& s, const TaskSpec& t) {
  const Box box = t.box ? *t.box : s.box;
  const auto zeros = find_zeros(s.field, s.space, box, newton_from(t));
  double worst = 0.0;
  json pts = json::array();
  for (const auto& z : zeros) {
    worst = std::max(worst, evaluate(s.field, z, s.space).norm());
    pts.push_back(vec_to(z));
  }
  json d;
  d["count"] = zeros.size();
  d["worst_value_norm"] = worst;
  d["zeros"] = pts;
  return d;
}

json do_classify(const Scenario& s, const TaskSpec& t) {
  const PointJet jet = jet_at_zero(s.field, *t.at, s.space);
  const ZeroClassification c = classify_zero(jet, s.space, t.tol);
  json d;
  d["at"] = vec_to(*t.at);
  d["case"] = to_string(c.kind);
  d["essential"] = c.essential;
  d["phi"] = c.phi;
  d["phi_threshold"] = c.phi_threshold;
  d["range_residual"] = c.range_residual;
  d["range_threshold"] = c.range_threshold;
  d["rank_grad"] = c.rank_J;
  d["kernel_dim"] = c.kernel_J_dim;
  d["h_dim"] = c.H.dim();
  d["gram_signature"] = {{"positive", c.gram_positive},
                         {"negative", c.gram_negative},
                         {"null", c.gram_null}};
  d["restricted_semidefinite"] = c.semidefinite;
  return d;
}

json do_local_model(const Scenario& s, const TaskSpec& t) {
  const PointJet jet = jet_at_zero(s.field, *t.at, s.space);
  const ZeroClassification c = classify_zero(jet, s.space, t.tol);
  LocalZeroModel m;
  if (c.essential) {
    m = essential_zero_model(jet, s.space, t.tol);
  } else if (s.field.c == 0.0 && s.field.u.isZero(0)) {
    m = killing_zero_model(s.field, *t.at, s.space, t.tol);
  } else {
    throw std::runtime_error(
        "no affine model: the zero is nonessential and the field is not "
        "Killing");
  }
  json d;
  d["at"] = vec_to(*t.at);
  d["model"] = m.cone ? "cone" : "plane";
  d["h_dim"] = m.H.dim();
  d["singular_dim"] = m.sing.dim();
  d["gram_values"] = vec_to(m.gram_vals);

  Rng rng(t.seed);
  double null_res = 0.0;
  int null_count = 0;
  for (const auto& h : m.sample_null_dirs(rng, 16)) {
    null_res = std::max(null_res,
                        evaluate(s.field, *t.at + 0.1 * h, s.space).norm());
    ++null_count;
  }
  double off_min = -1.0;
  for (const auto& h : m.sample_off_dirs(rng, 16)) {
    const double r = evaluate(s.field, *t.at + 0.1 * h, s.space).norm();
    off_min = off_min < 0.0 ? r : std::min(off_min, r);
  }
  d["null_dirs_sampled"] = null_count;
  d["null_dir_worst_value"] = null_res;
  if (off_min >= 0.0) d["off_dir_least_value"] = off_min;
  return d;
}

json do_component_scan(const Scenario& s, const TaskSpec& t, bool& pass) {
  ScanOptions opts;
  opts.newton = newton_from(t);
  const Box box = t.box ? *t.box : s.box;
  const ScanReport rep = component_scan(s.field, s.space, box, opts);
  json d;
  d["samples"] = rep.samples.size();
  d["warnings"] = rep.warnings;
  json comps = json::array();
  for (const auto& c : rep.components) {
    json jc;
    jc["size"] = c.members.size();
    jc["essential"] = c.essential_present;
    jc["nonessential"] = c.nonessential_present;
    jc["singular"] = c.singular_present;
    jc["mixed"] = c.mixed_classification;
    jc["phi"] = c.phi_value;
    jc["phi_spread"] = c.phi_spread;
    jc["char_poly_spread"] = c.char_poly_spread;
    if (c.dim_singular >= 0) jc["dim_singular"] = c.dim_singular;
    if (c.dim_nonsingular >= 0) jc["dim_nonsingular"] = c.dim_nonsingular;
    if (c.restricted_rank >= 0) jc["restricted_rank"] = c.restricted_rank;
    jc["dim_relation_ok"] = c.dim_relation_ok;
    jc["rank_relation_ok"] = c.rank_relation_ok;
    jc["rank_relation_applicable"] = c.rank_relation_applicable;
    jc["geodesic_segments_ok"] = c.geodesic_segments_ok;
    if (c.model_membership_checked)
      jc["model_membership_ok"] = c.model_membership_ok;
    jc["codim_even"] = c.codim_even;
    if (!c.notes.empty()) jc["notes"] = c.notes;
    comps.push_back(jc);

    const bool structural =
        c.dim_relation_ok && c.geodesic_segments_ok && c.codim_even &&
        (!c.rank_relation_applicable || c.rank_relation_ok) &&
        (!c.model_membership_checked || c.model_membership_ok);
    pass = pass && structural;
  }
  d["components"] = comps;
  return d;
}

json do_char_poly(const Scenario& s, const TaskSpec& t) {
  const PointJet jet = jet_at(s.field, *t.at, s.space);
  json d;
  d["at"] = vec_to(*t.at);
  d["value_norm"] = jet.value.norm();
  d["coeffs"] = vec_to(char_poly(jet.J).coeffs);
  return d;
}

json do_quintuple(const Scenario& s, const TaskSpec& t) {
  const PointJet jet = jet_at_zero(s.field, *t.at, s.space);
  const Quintuple q = extract_quintuple(jet, s.space, t.tol);
  json d;
  d["at"] = vec_to(*t.at);
  d["lambda"] = q.lambda;
  d["kernel_dim"] = q.kernel_B_lambda.dim();
  d["delta"] = row_to(q.delta);
  d["delta_vanishes"] = q.delta_vanishes();
  return d;
}

json do_equivalence(const Scenario& s, const TaskSpec& t, bool& pass) {
  const PointJet jet1 = jet_at_zero(s.field, *t.at, s.space);
  const EquivalenceTarget& tgt = *t.target;
  const PointJet jet2 = jet_at_zero(tgt.field, tgt.at, tgt.space);
  SearchOptions opts;
  opts.budget = t.budget;
  json d;
  d["jets"] = t.jets;
  d["at"] = vec_to(*t.at);
  d["target_at"] = vec_to(tgt.at);
  if (t.jets == 1) {
    const EquivalenceVerdict v =
        one_jet_equivalent(jet1, s.space, jet2, tgt.space, t.seed, opts);
    d["verdict"] = verdict_name(v.status);
    d["detail"] = v.detail;
    d["residual"] = v.residual;
    pass = v.status != Verdict::Undecided;
  } else {
    const TwoJetResult r =
        two_jet_equivalent(jet1, s.space, jet2, tgt.space, t.seed, opts);
    d["verdict"] = verdict_name(r.verdict.status);
    d["detail"] = r.verdict.detail;
    d["residual"] = r.verdict.residual;
    if (r.quintuple_witness) {
      d["witness_objective"] = r.quintuple_witness->objective;
      d["witness_scale"] = r.quintuple_witness->s;
    }
    if (r.residuals) {
      d["system_residuals"] = {{"linear", r.residuals->linear},
                               {"second", r.residuals->second},
                               {"metric", r.residuals->metric},
                               {"metric_derivative",
                                r.residuals->metric_derivative}};
    }
    pass = r.verdict.status != Verdict::Undecided;
  }
  return d;
}

json do_xi(const Scenario& s, const TaskSpec& t) {
  const PointJet jet = jet_at_zero(s.field, *t.at, s.space);
  const ZeroClassification c = classify_zero(jet, s.space, t.tol);
  if (!c.essential)
    throw std::runtime_error(
        "xi is defined on essential strata; this zero is nonessential");
  const LocalZeroModel m = essential_zero_model(jet, s.space, t.tol);
  const XiSample xs = xi_at(jet, m, s.space, t.tol);
  json d;
  d["at"] = vec_to(*t.at);
  d["rule"] = xs.defined_by == XiRule::PhiZero ? "phi-zero" : "phi-nonzero";
  d["stratum_dim"] = m.sing.dim();
  d["xi"] = row_to(xs.xi);
  d["xi_norm"] = xs.xi.size() == 0 ? 0.0 : xs.xi.norm();
  d["section_agreement"] = xs.section_agreement;
  if (t.dir) {
    d["dir"] = vec_to(*t.dir);
    d["dir_value"] = xs.value_on(*t.dir);
    try {
      d["kernel_transport"] =
          xi_kernel_transport(s.field, s.space, *t.at, *t.dir);
    } catch (const std::exception& e) {
      d["transport_error"] = e.what();
    }
  }
  return d;
}

json do_verify(const Scenario& s, const TaskSpec& t, bool& pass) {
  const TheoremCheck c = verify_theorem(t.theorem, &s, t.seed);
  json d;
  d["name"] = c.name;
  d["pass"] = c.pass;
  d["applicable"] = c.applicable;
  json res = json::array();
  for (const auto& [label, value] : c.residuals)
    res.push_back({{"what", label}, {"value", value}});
  d["residuals"] = res;
  if (!c.notes.empty()) d["notes"] = c.notes;
  pass = c.pass;
  return d;
}

// Indented key = value rendering of a record's data block.
void render_human(const json& j, std::ostringstream& out,
                  const std::string& prefix) {
  for (const auto& item : j.items()) {
    const json& v = item.value();
    if (v.is_object()) {
      out << prefix << item.key() << ":\n";
      render_human(v, out, prefix + "  ");
    } else if (v.is_array() && !v.empty() && v[0].is_object()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        out << prefix << item.key() << "[" << i << "]:\n";
        render_human(v[i], out, prefix + "  ");
      }
    } else if (v.is_array() && v.size() > 10) {
      json head = json::array();
      for (std::size_t i = 0; i < 4; ++i) head.push_back(v[i]);
      out << prefix << item.key() << " = " << head.dump() << " ... ("
          << v.size() << " entries, full list in the machine record)\n";
    } else {
      out << prefix << item.key() << " = " << v.dump() << "\n";
    }
  }
}

}  // namespace

int RunReport::exit_code() const {
  for (const auto& t : tasks)
    if (t.gating && (!t.ok || !t.pass)) return 1;
  return 0;
}

std::string RunReport::machine_text() const {
  std::ostringstream out;
  out << scenario_echo << "\n";
  int errors = 0, failed = 0, gating_failed = 0;
  for (const auto& t : tasks) {
    out << t.machine << "\n";
    errors += !t.ok;
    failed += !t.pass;
    gating_failed += t.gating && !t.pass;
  }
  json summary;
  summary["record"] = "summary";
  summary["tasks"] = tasks.size();
  summary["errors"] = errors;
  summary["failed"] = failed;
  summary["gating_failed"] = gating_failed;
  summary["exit"] = exit_code();
  out << summary.dump() << "\n";
  return out.str();
}

std::string RunReport::human_text() const {
  std::ostringstream out;
  const json echo = json::parse(scenario_echo);
  out << "confzero " << kVersion << "\n";
  out << "scenario: n=" << echo["space"]["n"] << " p=" << echo["space"]["p"]
      << " q=" << echo["space"]["q"] << " tol=" << echo["tol"].dump()
      << " grid=" << echo["grid"] << " seed=" << echo["seed"] << "\n\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const TaskRecord& t = tasks[i];
    const char* status = !t.ok ? "ERROR" : (t.pass ? "pass" : "FAIL");
    out << "[" << i << "] " << t.kind;
    for (std::size_t pad = t.kind.size(); pad < 18; ++pad) out << ' ';
    out << status << "\n";
    out << t.human;
    out << "\n";
  }
  int gating_failed = 0, gating_total = 0;
  for (const auto& t : tasks) {
    gating_total += t.gating;
    gating_failed += t.gating && !t.pass;
  }
  out << "summary: " << tasks.size() << " task(s)";
  if (gating_total > 0)
    out << ", " << (gating_total - gating_failed) << "/" << gating_total
        << " named checks passed";
  out << ", exit " << exit_code() << "\n";
  return out.str();
}

RunReport run(const Scenario& s) {
  RunReport rep;
  {
    json echo = json::parse(serialize(s));
    json stamp;
    stamp["record"] = "scenario";
    stamp["version"] = kVersion;
    for (auto& item : echo.items()) stamp[item.key()] = item.value();
    rep.scenario_echo = stamp.dump();
  }
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    const TaskSpec& t = s.tasks[i];
    TaskRecord rec;
    rec.kind = t.kind;
    rec.gating = t.kind == "verify-theorem";
    json data;
    bool pass = true;
    try {
      if (t.kind == "find-zeros")
        data = do_find_zeros(s, t);
      else if (t.kind == "classify")
        data = do_classify(s, t);
      else if (t.kind == "local-model")
        data = do_local_model(s, t);
      else if (t.kind == "component-scan")
        data = do_component_scan(s, t, pass);
      else if (t.kind == "char-poly")
        data = do_char_poly(s, t);
      else if (t.kind == "quintuple")
        data = do_quintuple(s, t);
      else if (t.kind == "equivalence")
        data = do_equivalence(s, t, pass);
      else if (t.kind == "xi")
        data = do_xi(s, t);
      else if (t.kind == "verify-theorem")
        data = do_verify(s, t, pass);
      else
        throw std::logic_error("unhandled task kind " + t.kind);
    } catch (const std::exception& e) {
      rec.ok = false;
      pass = false;
      rec.error = e.what();
    }
    rec.pass = pass && rec.ok;

    json record;
    record["record"] = "task";
    record["index"] = i;
    record["kind"] = t.kind;
    record["ok"] = rec.ok;
    record["pass"] = rec.pass;
    if (!rec.ok) record["error"] = rec.error;
    record["data"] = data;
    rec.machine = record.dump();

    std::ostringstream hout;
    if (!rec.ok) hout << "      error: " << rec.error << "\n";
    render_human(data, hout, "      ");
    rec.human = hout.str();

    rep.tasks.push_back(std::move(rec));
  }
  return rep;
}

}  // namespace confzero

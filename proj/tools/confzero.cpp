#include "confzero/jets.hpp"
#include "confzero/report.hpp"
#include "confzero/scenario.hpp"
#include "confzero/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using confzero::Scenario;
using njson = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 42;

// CONFZERO_SEED replaces the built-in default seed. Explicit --seed values
// and non-default seeds written in a scenario file take precedence.
std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("CONFZERO_SEED");
  if (!v || !*v) return std::nullopt;
  try {
    return std::stoull(v);
  } catch (const std::logic_error&) {
    return std::nullopt;
  }
}

void apply_seed_policy(Scenario& s, const std::optional<std::uint64_t>& cli) {
  if (cli) {
    s.seed = *cli;
    for (auto& t : s.tasks) t.seed = *cli;
    return;
  }
  if (const auto env = env_seed()) {
    if (s.seed == kDefaultSeed) s.seed = *env;
    for (auto& t : s.tasks)
      if (t.seed == kDefaultSeed) t.seed = *env;
  }
}

void apply_tol_override(Scenario& s, const std::optional<double>& cli) {
  if (!cli) return;
  s.tol = *cli;
  for (auto& t : s.tasks) t.tol = *cli;
}

int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write " << out_path << "\n";
    return 2;
  }
  out << text;
  return 0;
}

njson check_to_json(const confzero::TheoremCheck& c, std::uint64_t seed) {
  njson j;
  j["record"] = "check";
  j["version"] = confzero::kVersion;
  j["name"] = c.name;
  j["seed"] = seed;
  j["pass"] = c.pass;
  j["applicable"] = c.applicable;
  njson res = njson::array();
  for (const auto& [label, value] : c.residuals)
    res.push_back({{"what", label}, {"value", value}});
  j["residuals"] = res;
  if (!c.notes.empty()) j["notes"] = c.notes;
  return j;
}

std::string check_to_human(const confzero::TheoremCheck& c) {
  std::ostringstream out;
  out << c.name << "  "
      << (c.applicable ? (c.pass ? "pass" : "FAIL") : "inapplicable") << "\n";
  for (const auto& [label, value] : c.residuals) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    out << "      " << label << " = " << buf << "\n";
  }
  for (const auto& note : c.notes) out << "      note: " << note << "\n";
  return out.str();
}

Eigen::VectorXd parse_point(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) vals.push_back(std::stod(part));
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "confzero: conformal vector fields on flat pseudo-Euclidean space. "
      "Finds and classifies zero sets, extracts jet invariants, and decides "
      "conformal jet equivalence."};
  app.require_subcommand(1);

  // analyze
  std::string an_file, an_out, an_format = "human";
  std::optional<std::uint64_t> an_seed;
  std::optional<double> an_tol;
  CLI::App* analyze =
      app.add_subcommand("analyze", "run a scenario file's task list");
  analyze->add_option("scenario", an_file, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", an_out, "write the report here");
  analyze->add_option("--seed", an_seed, "override every seed in the run");
  analyze->add_option("--tol", an_tol, "override every tolerance in the run");
  analyze->add_option("--format", an_format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));

  // verify
  std::string ve_name, ve_file, ve_out, ve_format = "human";
  std::optional<std::uint64_t> ve_seed;
  CLI::App* verify = app.add_subcommand(
      "verify", "run one named invariant check on its built-in inputs");
  verify->add_option("name", ve_name, "check name")
      ->required()
      ->check(CLI::IsMember(confzero::theorem_names()));
  verify->add_option("--scenario", ve_file,
                     "point the check at this scenario's field instead")
      ->check(CLI::ExistingFile);
  verify->add_option("--seed", ve_seed, "sampling seed");
  verify->add_option("--out", ve_out, "write the report here");
  verify->add_option("--format", ve_format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));

  // compare
  std::string cm_a, cm_b, cm_out, cm_format = "human";
  std::vector<std::string> cm_at;
  int cm_jets = 2;
  std::optional<std::uint64_t> cm_seed;
  CLI::App* compare = app.add_subcommand(
      "compare",
      "decide conformal jet equivalence between two scenario fields at "
      "chosen zeros");
  compare->add_option("scenario-a", cm_a, "first scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("scenario-b", cm_b, "second scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  compare
      ->add_option("--at", cm_at,
                   "comma-separated point, given once per scenario")
      ->required()
      ->expected(1, 2);
  compare->add_option("--jets", cm_jets, "jet order, 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  compare->add_option("--seed", cm_seed, "witness search seed");
  compare->add_option("--out", cm_out, "write the report here");
  compare->add_option("--format", cm_format, "human or machine")
      ->check(CLI::IsMember({"human", "machine"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) {
      Scenario s = confzero::load_scenario(an_file);
      apply_seed_policy(s, an_seed);
      apply_tol_override(s, an_tol);
      const confzero::RunReport rep = confzero::run(s);
      const std::string text =
          an_format == "machine" ? rep.machine_text() : rep.human_text();
      const int io = emit(text, an_out);
      return io != 0 ? io : rep.exit_code();
    }

    if (*verify) {
      std::uint64_t seed = kDefaultSeed;
      if (const auto env = env_seed()) seed = *env;
      if (ve_seed) seed = *ve_seed;
      std::optional<Scenario> ctx;
      if (!ve_file.empty()) ctx = confzero::load_scenario(ve_file);
      const confzero::TheoremCheck c = confzero::verify_theorem(
          ve_name, ctx ? &*ctx : nullptr, seed);
      std::string text;
      if (ve_format == "machine") {
        njson summary;
        summary["record"] = "summary";
        summary["tasks"] = 1;
        summary["gating_failed"] = c.pass ? 0 : 1;
        summary["exit"] = c.pass ? 0 : 1;
        text = check_to_json(c, seed).dump() + "\n" + summary.dump() + "\n";
      } else {
        text = check_to_human(c);
      }
      const int io = emit(text, ve_out);
      return io != 0 ? io : (c.pass ? 0 : 1);
    }

    if (*compare) {
      if (cm_at.size() != 2) {
        std::cerr << "compare needs --at twice: one point per scenario\n";
        return 2;
      }
      std::uint64_t seed = kDefaultSeed;
      if (const auto env = env_seed()) seed = *env;
      if (cm_seed) seed = *cm_seed;
      const Scenario sa = confzero::load_scenario(cm_a);
      const Scenario sb = confzero::load_scenario(cm_b);
      const Eigen::VectorXd xa = parse_point(cm_at[0]);
      const Eigen::VectorXd xb = parse_point(cm_at[1]);
      if (xa.size() != sa.space.dim() || xb.size() != sb.space.dim()) {
        std::cerr << "--at points must match their scenario dimensions\n";
        return 2;
      }
      const confzero::PointJet ja = jet_at(sa.field, xa, sa.space);
      const confzero::PointJet jb = jet_at(sb.field, xb, sb.space);
      if (!ja.at_zero(1e-8) || !jb.at_zero(1e-8)) {
        std::cerr << "both --at points must be zeros of their fields\n";
        return 2;
      }

      njson j;
      j["record"] = "compare";
      j["version"] = confzero::kVersion;
      j["jets"] = cm_jets;
      j["seed"] = seed;
      confzero::Verdict status = confzero::Verdict::Undecided;
      if (cm_jets == 1) {
        const confzero::EquivalenceVerdict v = confzero::one_jet_equivalent(
            ja, sa.space, jb, sb.space, seed);
        status = v.status;
        j["verdict"] = v.status == confzero::Verdict::Equivalent
                           ? "equivalent"
                           : (v.status == confzero::Verdict::Inequivalent
                                  ? "inequivalent"
                                  : "undecided");
        j["detail"] = v.detail;
        j["residual"] = v.residual;
      } else {
        const confzero::TwoJetResult r = confzero::two_jet_equivalent(
            ja, sa.space, jb, sb.space, seed);
        status = r.verdict.status;
        j["verdict"] = r.verdict.status == confzero::Verdict::Equivalent
                           ? "equivalent"
                           : (r.verdict.status ==
                                      confzero::Verdict::Inequivalent
                                  ? "inequivalent"
                                  : "undecided");
        j["detail"] = r.verdict.detail;
        j["residual"] = r.verdict.residual;
        if (r.quintuple_witness)
          j["witness_objective"] = r.quintuple_witness->objective;
        if (r.residuals) j["system_residual"] = r.residuals->max_residual;
      }
      std::string text;
      if (cm_format == "machine") {
        text = j.dump() + "\n";
      } else {
        std::ostringstream out;
        out << "compare (" << cm_jets << "-jet): "
            << j["verdict"].get<std::string>() << "\n";
        out << "      detail: " << j["detail"].get<std::string>() << "\n";
        out << "      residual: " << j["residual"].get<double>() << "\n";
        text = out.str();
      }
      const int io = emit(text, cm_out);
      if (io != 0) return io;
      return status == confzero::Verdict::Equivalent ? 0 : 1;
    }
  } catch (const confzero::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

// qmcltl: command-line front end.
//
//   qmcltl check MODEL [--epsilon E] [--max-halvings N] [--tolerance-file F]
//                      [--qmax Q] [--formula PHI] [--export-hoa PATH] [--json]
//   qmcltl spectral MODEL [--epsilon E] [--tolerance-file F] [--qmax Q] [--json]
//   qmcltl trace MODEL [--steps N] [--tolerance-file F] [--json]
//
// Exit codes: 0 true, 1 false, 2 unknown, 3 not periodically stable,
// 4 input or numerical error.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "qmcltl/qmcltl.hpp"

using namespace qmcltl;

namespace {

constexpr int kExitUnstable = 3;
constexpr int kExitError = 4;

struct Common {
  std::string model;
  std::string toleranceFile;
  int qmax = 0;
  bool json = false;
};

Tolerances resolveTolerances(const Common& c) {
  Tolerances tol;
  std::string path = c.toleranceFile;
  if (path.empty())
    if (const char* env = std::getenv("QMC_LTL_TOLERANCES")) path = env;
  if (!path.empty()) tol = loadTolerances(path, tol);
  if (c.qmax > 0) tol.qmax = c.qmax;
  return tol;
}

int exitFor(Verdict v) {
  switch (v) {
    case Verdict::True:
      return 0;
    case Verdict::False:
      return 1;
    case Verdict::Unknown:
      return 2;
  }
  return 2;
}

std::string word(const std::vector<Letter>& letters, const std::vector<std::string>& aps) {
  std::string s;
  for (Letter l : letters) s += (s.empty() ? "" : " ") + letterToString(l, aps);
  return s.empty() ? "(empty)" : s;
}

int runCheck(const Common& c, double epsilon, unsigned halvings, const std::string& formula,
             const std::string& hoaPath) {
  Model m = loadModel(c.model);
  if (!formula.empty()) {
    m.formula = formula;
    m.jOffset = 0;
  }
  CheckConfig cfg;
  cfg.tol = resolveTolerances(c);
  cfg.epsilon0 = epsilon;
  cfg.maxHalvings = halvings;
  const Problem p = buildProblem(m, cfg.tol);
  if (!hoaPath.empty()) {
    std::ofstream out(hoaPath);
    if (!out) throw InputError("cannot write '" + hoaPath + "'");
    out << toHoa(toNba(p.formula, m.propNames()), toString(p.formula));
  }
  const RefinementResult r = checkWithRefinement(p.chain, p.props, p.formula, cfg);
  if (c.json) {
    std::cout << refinementToJson(r).dump(2) << "\n";
    return exitFor(r.verdict);
  }
  const auto& last = r.reports.back();
  std::cout << "formula: " << toString(p.formula) << "\n";
  std::cout << "verdict: " << toString(r.verdict) << "\n";
  std::cout << "epsilon trace:";
  for (const auto& rep : r.reports) std::cout << " " << rep.epsilon << "=" << toString(rep.verdict);
  std::cout << "\nperiod: " << last.period << "\nhorizon: " << last.horizon << "\n";
  if (!last.ambiguous.empty()) {
    std::cout << "ambiguous:";
    for (const auto& a : last.ambiguous) std::cout << " " << a;
    std::cout << "\n";
  }
  if (last.witness) {
    std::cout << (last.witness->satisfies ? "satisfying" : "violating") << " witness: prefix "
              << word(last.witness->prefix, last.aps) << ", cycle " << word(last.witness->cycle, last.aps) << "\n";
  }
  if (!last.note.empty()) std::cout << "note: " << last.note << "\n";
  return exitFor(r.verdict);
}

int runSpectral(const Common& c, double epsilon) {
  const Model m = loadModel(c.model);
  const Tolerances tol = resolveTolerances(c);
  const QMC g = m.chain(tol);
  const SpectralAnalysis a = analyze(g, tol);
  std::optional<std::uint64_t> k;
  if (a.stability.stable) k = horizon(a.decay, *a.stability.period, epsilon);

  if (c.json) {
    Json j;
    j["eigenvalues"] = Json::array();
    for (const auto& z : a.eigs.eigenvalues) j["eigenvalues"].push_back({z.real(), z.imag()});
    j["peripheral"] = Json::array();
    for (const auto& e : a.peripheral.entries) {
      Json pe{{"eigenvalue", {e.eigenvalue.real(), e.eigenvalue.imag()}}, {"multiplicity", e.eigenIndexes.size()}};
      pe["angle"] = e.angle ? Json{{"p", e.angle->p}, {"q", e.angle->q}} : Json(nullptr);
      j["peripheral"].push_back(pe);
    }
    j["stable"] = a.stability.stable;
    j["period"] = a.stability.period ? Json(*a.stability.period) : Json(nullptr);
    j["offending"] = Json::array();
    for (const auto& z : a.stability.offending) j["offending"].push_back({z.real(), z.imag()});
    j["mu"] = a.decay.mu;
    j["dMu"] = a.decay.dMu;
    j["C"] = a.decay.C;
    j["alphaBound"] = a.decay.alphaBound;
    j["epsilon"] = epsilon;
    j["horizon"] = k ? Json(*k) : Json(nullptr);
    j["qmax"] = a.qmax;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << std::setprecision(10) << "eigenvalues:";
    for (const auto& z : a.eigs.eigenvalues) std::cout << " " << z;
    std::cout << "\nperipheral:\n";
    for (const auto& e : a.peripheral.entries) {
      std::cout << "  " << e.eigenvalue << " x" << e.eigenIndexes.size() << "  angle ";
      if (e.angle)
        std::cout << e.angle->p << "/" << e.angle->q;
      else
        std::cout << "irrational (no q <= " << a.qmax << ")";
      std::cout << "\n";
    }
    if (a.stability.stable) {
      std::cout << "period: " << *a.stability.period << "\n";
    } else {
      std::cout << "not periodically stable; offending:";
      for (const auto& z : a.stability.offending) std::cout << " " << z;
      std::cout << "\n";
    }
    std::cout << "mu: " << a.decay.mu << "\ndMu: " << a.decay.dMu << "\nC: " << a.decay.C
              << "\nalpha: " << a.decay.alphaBound << "\n";
    if (k) std::cout << "horizon(" << epsilon << "): " << *k << "\n";
  }
  return a.stability.stable ? 0 : kExitUnstable;
}

int runTrace(const Common& c, unsigned steps) {
  const Model m = loadModel(c.model);
  const Tolerances tol = resolveTolerances(c);
  const Problem p = buildProblem(m, tol);
  const auto names = m.propNames();
  DensityOperator rho = *p.chain.initial;
  Json rows = Json::array();
  if (!c.json) {
    std::cout << "n\tletter";
    for (const auto& n : names) std::cout << "\t" << n;
    std::cout << "\n";
  }
  for (unsigned n = 0; n <= steps; ++n) {
    const Letter l = labelState(rho, p.props, tol);
    std::vector<double> values;
    for (const auto& prop : p.props) values.push_back(expectation(prop.observable, rho.mat(), tol));
    if (c.json) {
      rows.push_back({{"n", n}, {"letter", letterToString(l, names)}, {"values", values}});
    } else {
      std::cout << n << "\t" << letterToString(l, names);
      for (double v : values) std::cout << "\t" << std::setprecision(12) << (std::abs(v) < 1e-13 ? 0.0 : v);
      std::cout << "\n";
    }
    if (n < steps) rho = apply(p.chain.superop, rho, tol);
  }
  if (c.json) std::cout << rows.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate LTL model checking of quantum Markov chains"};
  app.require_subcommand(1);
  app.footer(
      "Formula syntax: true, false, identifiers or \"quoted names\", ! X X^n F G (unary), "
      "U (right associative), &, |, -> (right associative), parentheses. Precedence from "
      "tightest: unary, U, &, |, ->.\nExit codes: 0 true, 1 false, 2 unknown, 3 not "
      "periodically stable, 4 input or numerical error.\nQMC_LTL_TOLERANCES names a "
      "tolerance file used when --tolerance-file is absent.");

  Common common;
  double epsilon = 0.5;
  unsigned halvings = 10;
  unsigned steps = 10;
  std::string formula;
  std::string hoa;

  auto addCommon = [&](CLI::App* sub, bool withQmax) {
    sub->add_option("model", common.model, "model JSON file")->required();
    sub->add_option("--tolerance-file", common.toleranceFile, "JSON object overriding tolerances");
    if (withQmax) sub->add_option("--qmax", common.qmax, "denominator cap for rational angles")->check(CLI::PositiveNumber);
    sub->add_flag("--json", common.json, "machine-readable output");
  };

  auto* check = app.add_subcommand("check", "check the model's formula with epsilon halving");
  addCommon(check, true);
  check->add_option("--epsilon", epsilon, "initial epsilon")->check(CLI::PositiveNumber);
  check->add_option("--max-halvings", halvings, "halvings before giving up")->check(CLI::Range(1u, 60u));
  check->add_option("--formula", formula, "formula overriding the model's (jOffset is then ignored)");
  check->add_option("--export-hoa", hoa, "write the formula automaton in HOA format");

  auto* spectral = app.add_subcommand("spectral", "print the spectral analysis of the channel");
  addCommon(spectral, true);
  spectral->add_option("--epsilon", epsilon, "epsilon for the horizon")->check(CLI::PositiveNumber);

  auto* trace = app.add_subcommand("trace", "print labels and proposition values along the trajectory");
  addCommon(trace, false);
  trace->add_option("--steps", steps, "last step printed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (check->parsed()) return runCheck(common, epsilon, halvings, formula, hoa);
    if (spectral->parsed()) return runSpectral(common, epsilon);
    return runTrace(common, steps);
  } catch (const NotPeriodicallyStable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnstable;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

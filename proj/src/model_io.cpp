#include "qmcltl/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "qmcltl/error.hpp"

namespace qmcltl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

Complex complexFromJson(const Json& e) {
  if (e.is_number()) return {e.get<double>(), 0.0};
  if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
    return {e[0].get<double>(), e[1].get<double>()};
  throw InputError("matrix entry must be a number or a [re, im] pair");
}

double endpointFromJson(const Json& e, double ifNull) {
  if (e.is_null()) return ifNull;
  if (e.is_number()) return e.get<double>();
  if (e.is_string()) {
    const auto s = e.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InputError("interval endpoint must be a number, \"inf\", \"-inf\" or null");
}

Json endpointToJson(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json parseFile(const std::string& path) {
  try {
    return Json::parse(readFile(path));
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

template <class T>
T getAs(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const Json::exception&) {
    throw InputError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

Json matrixToJson(const CMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrixFromJson(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const auto rows = Index(j.size());
  if (!j[0].is_array()) throw InputError("matrix rows must be arrays");
  const auto cols = Index(j[0].size());
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j[std::size_t(i)];
    if (!row.is_array() || Index(row.size()) != cols) throw InputError("matrix rows have different lengths");
    for (Index k = 0; k < cols; ++k) m(i, k) = complexFromJson(row[std::size_t(k)]);
  }
  return m;
}

Json windowToJson(const Window& w) {
  Json parts = Json::array();
  for (const auto& p : w.parts)
    parts.push_back({{"lo", endpointToJson(p.lo)},
                     {"hi", endpointToJson(p.hi)},
                     {"loClosed", p.loClosed},
                     {"hiClosed", p.hiClosed}});
  return parts;
}

Window windowFromJson(const Json& j) {
  if (!j.is_array() || j.empty()) throw InputError("windows must be a non-empty array of intervals");
  Window w;
  for (const auto& p : j) {
    const double lo = endpointFromJson(field(p, "lo"), -kInf);
    const double hi = endpointFromJson(field(p, "hi"), kInf);
    const bool loClosed = p.value("loClosed", true);
    const bool hiClosed = p.value("hiClosed", true);
    w.parts.emplace_back(lo, hi, loClosed, hiClosed);
  }
  return w;
}

namespace {

void requireDeclared(const Model& m, const Formula& f) {
  const auto names = m.propNames();
  for (const auto& used : atomicNames(f))
    if (std::find(names.begin(), names.end(), used) == names.end())
      throw InputError("formula uses undeclared proposition '" + used + "'");
}

}  // namespace

Formula Model::effectiveFormula() const {
  Formula f = parse(formula);
  return jOffset > 0 ? next(f, jOffset) : f;
}

QMC Model::chain(const Tolerances& tol) const {
  SuperOperator e(KrausSet(kraus), tol);
  if (semantics == Semantics::State) return QMC(std::move(e), DensityOperator(*initialState, tol));
  return QMC(std::move(e));
}

std::vector<std::string> Model::propNames() const {
  std::vector<std::string> names;
  for (const auto& p : props) names.push_back(p.name);
  return names;
}

Problem buildProblem(const Model& m, const Tolerances& tol) {
  const QMC g = m.chain(tol);
  Problem p{m.semantics == Semantics::State ? g : choiLift(g), {}, m.effectiveFormula(), m.dimension};
  for (const auto& mp : m.props) {
    if (m.semantics == Semantics::State) {
      p.props.push_back({mp.name, *mp.observable, mp.window});
    } else if (mp.kind == PropKind::Trace) {
      p.props.push_back(liftTraceProp({mp.name, mp.window}, m.dimension));
    } else {
      p.props.push_back(liftObservableProp({mp.name, *mp.observable, mp.window}, m.dimension));
    }
  }
  validateProps(p.props, p.chain.dim(), tol);
  requireDeclared(m, p.formula);
  return p;
}

Model modelFromJson(const Json& j) {
  if (!j.is_object()) throw InputError("model must be a JSON object");
  Model m;
  m.schemaVersion = getAs<int>(j, "schemaVersion");
  if (m.schemaVersion != kSchemaVersion)
    throw InputError("unsupported schemaVersion " + std::to_string(m.schemaVersion));
  const auto d = getAs<long long>(j, "dimension");
  if (d < 1) throw InputError("dimension must be positive");
  m.dimension = Index(d);
  const auto sem = getAs<std::string>(j, "semantics");
  if (sem == "state") m.semantics = Semantics::State;
  else if (sem == "superoperator") m.semantics = Semantics::Superoperator;
  else throw InputError("semantics must be \"state\" or \"superoperator\"");

  const auto& kraus = field(j, "kraus");
  if (!kraus.is_array() || kraus.empty()) throw InputError("kraus must be a non-empty array of matrices");
  for (const auto& k : kraus) {
    CMatrix e = matrixFromJson(k);
    if (e.rows() != m.dimension || e.cols() != m.dimension)
      throw InputError("Kraus operator dimension does not match 'dimension'");
    m.kraus.push_back(std::move(e));
  }

  if (j.contains("initialState") && !j.at("initialState").is_null()) {
    CMatrix rho = matrixFromJson(j.at("initialState"));
    if (rho.rows() != m.dimension || rho.cols() != m.dimension)
      throw InputError("initialState dimension does not match 'dimension'");
    m.initialState = std::move(rho);
  }
  if (m.semantics == Semantics::State && !m.initialState)
    throw InputError("state semantics needs an initialState");

  const auto& props = field(j, "atomicProps");
  if (!props.is_array()) throw InputError("atomicProps must be an array");
  for (const auto& pj : props) {
    ModelProp p;
    p.name = getAs<std::string>(pj, "name");
    if (p.name.empty()) throw InputError("proposition name must be non-empty");
    const auto kind = getAs<std::string>(pj, "kind");
    if (kind == "observable") p.kind = PropKind::Observable;
    else if (kind == "trace") p.kind = PropKind::Trace;
    else throw InputError("proposition kind must be \"observable\" or \"trace\"");
    if (p.kind == PropKind::Observable) p.observable = matrixFromJson(field(pj, "observable"));
    if (p.kind == PropKind::Trace && m.semantics == Semantics::State)
      throw InputError("trace proposition '" + p.name + "' needs superoperator semantics");
    p.window = windowFromJson(field(pj, "windows"));
    for (const auto& q : m.props)
      if (q.name == p.name) throw InputError("duplicate proposition name '" + p.name + "'");
    m.props.push_back(std::move(p));
  }
  if (m.props.size() > kMaxPropositions) throw InputError("at most 16 atomic propositions are supported");

  m.formula = getAs<std::string>(j, "formula");
  if (j.contains("jOffset") && !j.at("jOffset").is_null()) {
    const auto jo = getAs<long long>(j, "jOffset");
    if (jo < 0) throw InputError("jOffset must be non-negative");
    m.jOffset = unsigned(jo);
  }
  requireDeclared(m, m.effectiveFormula());
  return m;
}

Json modelToJson(const Model& m) {
  Json j;
  j["schemaVersion"] = m.schemaVersion;
  j["dimension"] = m.dimension;
  j["semantics"] = m.semantics == Semantics::State ? "state" : "superoperator";
  j["kraus"] = Json::array();
  for (const auto& k : m.kraus) j["kraus"].push_back(matrixToJson(k));
  if (m.initialState) j["initialState"] = matrixToJson(*m.initialState);
  j["atomicProps"] = Json::array();
  for (const auto& p : m.props) {
    Json pj;
    pj["name"] = p.name;
    pj["kind"] = p.kind == PropKind::Observable ? "observable" : "trace";
    if (p.observable) pj["observable"] = matrixToJson(*p.observable);
    pj["windows"] = windowToJson(p.window);
    j["atomicProps"].push_back(std::move(pj));
  }
  j["formula"] = m.formula;
  if (m.jOffset > 0) j["jOffset"] = m.jOffset;
  return j;
}

Model loadModel(const std::string& path) { return modelFromJson(parseFile(path)); }

#define QMCLTL_TOLERANCE_FIELDS(X) \
  X(herm) X(psd) X(trace) X(cptp) X(drift) X(spectralRadius) X(imag) X(eigResidual) X(cluster) X(defectCond) \
  X(nilpotent) X(zeroModulus) X(basisCond) X(peripheral) X(angle) X(qmax) X(coeff) X(projector) X(ambiguityCap)

Tolerances tolerancesFromJson(const Json& j, Tolerances base) {
  if (!j.is_object()) throw InputError("tolerance file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
#define QMCLTL_READ(name)                                                                          \
  if (key == #name) {                                                                              \
    known = true;                                                                                  \
    if (!value.is_number()) throw InputError("tolerance '" + key + "' must be a number");          \
    base.name = value.get<decltype(base.name)>();                                                  \
  }
    QMCLTL_TOLERANCE_FIELDS(QMCLTL_READ)
#undef QMCLTL_READ
    if (!known) throw InputError("unknown tolerance '" + key + "'");
  }
  return base;
}

Json tolerancesToJson(const Tolerances& t) {
  Json j;
#define QMCLTL_WRITE(name) j[#name] = t.name;
  QMCLTL_TOLERANCE_FIELDS(QMCLTL_WRITE)
#undef QMCLTL_WRITE
  return j;
}

Tolerances loadTolerances(const std::string& path, Tolerances base) { return tolerancesFromJson(parseFile(path), base); }

namespace {

Json witnessToJson(const std::optional<WitnessWord>& w) {
  if (!w) return nullptr;
  return {{"satisfies", w->satisfies}, {"prefix", w->prefix}, {"cycle", w->cycle}};
}

}  // namespace

Json reportToJson(const CheckReport& r) {
  Json j;
  j["verdict"] = toString(r.verdict);
  j["epsilon"] = r.epsilon;
  j["period"] = r.period;
  j["horizon"] = r.horizon;
  j["aps"] = r.aps;
  j["prefix"] = r.prefix;
  j["cycle"] = r.cycle;
  j["witness"] = witnessToJson(r.witness);
  j["ambiguous"] = r.ambiguous;
  j["note"] = r.note;
  j["timings"] = {{"spectralMs", r.timings.spectralMs},
                  {"labelsMs", r.timings.labelsMs},
                  {"automataMs", r.timings.automataMs}};
  return j;
}

CheckReport reportFromJson(const Json& j) {
  try {
    CheckReport r;
    r.verdict = verdictFromString(j.at("verdict").get<std::string>());
    r.epsilon = j.at("epsilon").get<double>();
    r.period = j.at("period").get<std::uint64_t>();
    r.horizon = j.at("horizon").get<std::uint64_t>();
    r.aps = j.at("aps").get<std::vector<std::string>>();
    r.prefix = j.at("prefix").get<std::vector<Letter>>();
    r.cycle = j.at("cycle").get<std::vector<std::vector<Letter>>>();
    if (!j.at("witness").is_null()) {
      const auto& w = j.at("witness");
      r.witness = WitnessWord{w.at("satisfies").get<bool>(), w.at("prefix").get<std::vector<Letter>>(),
                              w.at("cycle").get<std::vector<Letter>>()};
    }
    r.ambiguous = j.at("ambiguous").get<std::vector<std::string>>();
    r.note = j.at("note").get<std::string>();
    const auto& t = j.at("timings");
    r.timings = {t.at("spectralMs").get<double>(), t.at("labelsMs").get<double>(), t.at("automataMs").get<double>()};
    return r;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

Json refinementToJson(const RefinementResult& r) {
  Json reports = Json::array();
  for (const auto& c : r.reports) reports.push_back(reportToJson(c));
  return {{"verdict", toString(r.verdict)}, {"reports", reports}};
}

RefinementResult refinementFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("verdict") || !j.contains("reports") || !j.at("reports").is_array())
    throw InputError("malformed refinement report");
  RefinementResult r;
  r.verdict = verdictFromString(j.at("verdict").get<std::string>());
  for (const auto& c : j.at("reports")) r.reports.push_back(reportFromJson(c));
  return r;
}

}  // namespace qmcltl

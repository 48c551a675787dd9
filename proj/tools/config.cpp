#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace hamflow::cli {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError(field + ": " + msg);
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback, const std::string& field) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(field + "." + key, "wrong type");
  }
}

cplx parse_complex(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(field, "expected a number or a [re, im] pair");
}

CVector parse_cvector(const nlohmann::json& j, int n, const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    fail(field, "expected " + std::to_string(n) + " complex coordinates");
  }
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = parse_complex(j[i], field);
  return v;
}

ModelDescriptor parse_model(const nlohmann::json& j) {
  if (!j.is_object()) fail("model", "expected an object");
  const auto kind = get_or<std::string>(j, "kind", "", "model");
  if (kind == "flat") {
    const int n = get_or<int>(j, "n", 1, "model");
    if (n < 1) fail("model.n", "must be >= 1");
    return ModelDescriptor::flat(n);
  }
  if (kind == "sphere") {
    if (get_or<int>(j, "n", 1, "model") != 1) fail("model.n", "the sphere model has n = 1");
    return ModelDescriptor::sphere();
  }
  fail("model.kind", "expected \"flat\" or \"sphere\"");
}

PolynomialHamiltonian parse_hamiltonian(const nlohmann::json& j, const ModelDescriptor& model) {
  const nlohmann::json* list = &j;
  int chart = 0;
  if (j.is_object()) {
    if (!j.contains("terms")) fail("hamiltonian", "missing terms");
    list = &j.at("terms");
    chart = get_or<int>(j, "chart", 0, "hamiltonian");
  }
  if (!list->is_array() || list->empty()) fail("hamiltonian", "at least one term required");
  if (chart < 0 || chart >= model.chart_count()) fail("hamiltonian.chart", "out of range");

  std::vector<Term> terms;
  for (std::size_t k = 0; k < list->size(); ++k) {
    const auto& t = (*list)[k];
    const std::string field = "hamiltonian.terms[" + std::to_string(k) + "]";
    if (!t.is_object()) fail(field, "expected an object");
    Term term;
    term.coeff = {get_or<double>(t, "re", 0.0, field), get_or<double>(t, "im", 0.0, field)};
    term.alpha = get_or<std::vector<int>>(t, "alpha", std::vector<int>(model.n, 0), field);
    term.beta = get_or<std::vector<int>>(t, "beta", std::vector<int>(model.n, 0), field);
    term.denom_pow = get_or<int>(t, "denom_pow", 0, field);
    if (static_cast<int>(term.alpha.size()) != model.n ||
        static_cast<int>(term.beta.size()) != model.n) {
      fail(field, "alpha and beta need " + std::to_string(model.n) + " entries");
    }
    for (int i = 0; i < model.n; ++i) {
      if (term.alpha[i] < 0 || term.beta[i] < 0) fail(field, "exponents must be >= 0");
    }
    if (model.kind == ModelKind::flat && term.denom_pow != 0) {
      fail(field, "denom_pow must be 0 on the flat model");
    }
    if (model.kind == ModelKind::sphere &&
        (term.denom_pow < term.alpha[0] || term.denom_pow < term.beta[0])) {
      fail(field, "sphere terms need denom_pow >= alpha and beta (smooth at both poles)");
    }
    terms.push_back(std::move(term));
  }
  try {
    return PolynomialHamiltonian(model, std::move(terms), chart);
  } catch (const std::invalid_argument& e) {
    fail("hamiltonian", e.what());
  }
}

std::vector<KahlerPoint> parse_seeds(const nlohmann::json& j, const ModelDescriptor& model) {
  std::vector<KahlerPoint> seeds;
  if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      const std::string field = "seeds[" + std::to_string(k) + "]";
      const auto& s = j[k];
      int chart = 0;
      const nlohmann::json* z = &s;
      if (s.is_object()) {
        if (!s.contains("z")) fail(field, "missing z");
        chart = get_or<int>(s, "chart", 0, field);
        z = &s.at("z");
      }
      if (chart < 0 || chart >= model.chart_count()) fail(field + ".chart", "out of range");
      seeds.push_back(KahlerPoint{chart, parse_cvector(*z, model.n, field)});
    }
  } else if (j.is_object()) {
    // Vogel spiral around the centre: deterministic and roughly uniform on the disc.
    if (!j.contains("center")) fail("seeds.center", "required for a grid");
    const CVector center = parse_cvector(j.at("center"), model.n, "seeds.center");
    const double radius = get_or<double>(j, "radius", 0.0, "seeds");
    const int count = get_or<int>(j, "count", 0, "seeds");
    const int chart = get_or<int>(j, "chart", 0, "seeds");
    if (!(radius >= 0.0)) fail("seeds.radius", "must be >= 0");
    if (chart < 0 || chart >= model.chart_count()) fail("seeds.chart", "out of range");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double rho = radius * std::sqrt((k + 0.5) / count);
      CVector z = center;
      for (int i = 0; i < model.n; ++i) z(i) += std::polar(rho, k * golden + i * 1.0);
      seeds.push_back(KahlerPoint{chart, z});
    }
  } else {
    fail("seeds", "expected a list of points or a grid {center, radius, count}");
  }
  if (seeds.empty()) fail("seeds", "at least one required");
  for (const auto& s : seeds) {
    if (!s.z.allFinite()) fail("seeds", "coordinates must be finite");
  }
  return seeds;
}

IntegratorConfig parse_integrator(const nlohmann::json& j) {
  IntegratorConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) fail("integrator", "expected an object");
  const auto method = get_or<std::string>(j, "method", "rk45_adaptive", "integrator");
  if (method == "rk45_adaptive") {
    c.method = Method::rk45_adaptive;
  } else if (method == "rk4_fixed") {
    c.method = Method::rk4_fixed;
  } else {
    fail("integrator.method", "expected rk45_adaptive or rk4_fixed");
  }
  c.step = get_or<double>(j, "step", c.step, "integrator");
  c.abs_tol = get_or<double>(j, "abs_tol", c.abs_tol, "integrator");
  c.rel_tol = get_or<double>(j, "rel_tol", c.rel_tol, "integrator");
  c.max_steps = get_or<long>(j, "max_steps", c.max_steps, "integrator");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    fail("integrator", e.what());
  }
  return c;
}

NewtonConfig parse_newton(const nlohmann::json& j) {
  NewtonConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) fail("newton", "expected an object");
  c.tol = get_or<double>(j, "tol", c.tol, "newton");
  c.max_iters = get_or<int>(j, "max_iters", c.max_iters, "newton");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    fail("newton", e.what());
  }
  return c;
}

}  // namespace

std::vector<double> RunConfig::times() const {
  std::vector<double> ts;
  for (int k = 0; k <= steps; ++k) ts.push_back(t_max * k / steps);
  return ts;
}

Job parse_job(const std::string& name) {
  if (name == "flow") return Job::flow;
  if (name == "verify") return Job::verify;
  if (name == "oracle-compare") return Job::oracle_compare;
  if (name == "sweep") return Job::sweep;
  fail("job", "unknown job \"" + name + "\" (flow, verify, oracle-compare, sweep)");
}

std::string job_name(Job job) {
  switch (job) {
    case Job::flow: return "flow";
    case Job::verify: return "verify";
    case Job::oracle_compare: return "oracle-compare";
    case Job::sweep: return "sweep";
  }
  return "flow";
}

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c;
  c.raw = doc;
  if (!doc.contains("model")) fail("model", "required");
  c.model = parse_model(doc.at("model"));
  if (!doc.contains("hamiltonian")) fail("hamiltonian", "required");
  c.hamiltonian = parse_hamiltonian(doc.at("hamiltonian"), c.model);
  c.seeds = parse_seeds(doc.value("seeds", nlohmann::json::array()), c.model);

  const auto times = doc.value("times", nlohmann::json::object());
  if (!times.is_object()) fail("times", "expected {t_max, steps}");
  c.t_max = get_or<double>(times, "t_max", 0.0, "times");
  c.steps = get_or<int>(times, "steps", 1, "times");
  if (c.steps < 1) fail("times.steps", "must be >= 1");

  c.solver.integrator = parse_integrator(doc.value("integrator", nlohmann::json()));
  c.solver.newton = parse_newton(doc.value("newton", nlohmann::json()));
  if (!std::isfinite(c.t_max) || std::abs(c.t_max) > c.solver.integrator.max_horizon) {
    fail("times.t_max", "must not exceed the integrator horizon " +
                            std::to_string(c.solver.integrator.max_horizon));
  }
  if (doc.contains("job")) c.job = parse_job(get_or<std::string>(doc, "job", "", "config"));
  c.output = get_or<std::string>(doc, "output", c.output, "config");
  if (c.output.empty()) fail("output", "prefix must not be empty");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace hamflow::cli

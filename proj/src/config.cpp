#include "mfc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mfc/error.hpp"

namespace mfc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::config, path + ": " + message);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) fail(path + "." + key, "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (!v) fail(path + "." + key, "missing required key");
  return *v;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::size_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(path, "expected a nonnegative integer");
  }
  return v.get<std::size_t>();
}

PerturbedChainParams parse_plant(const json& system) {
  reject_unknown(system, "system", {"id", "params"});
  const std::string id = string(require(system, "system", "id"), "system.id");
  if (id != "perturbed_chain") fail("system.id", "unknown system id '" + id + "'");

  PerturbedChainParams p;
  const json* params = find(system, "params");
  if (!params) return p;
  reject_unknown(*params, "system.params", {"n", "alpha", "rho", "matched", "input_channel"});
  if (const json* v = find(*params, "n")) p.n = count(*v, "system.params.n");
  if (const json* v = find(*params, "alpha")) {
    p.alpha = numbers(*v, "system.params.alpha");
  } else if (p.n != 3) {
    p.alpha.assign(p.n == 0 ? 0 : p.n - 1, 0.0);
  }
  if (const json* v = find(*params, "rho")) p.rho = number(*v, "system.params.rho");
  if (const json* v = find(*params, "matched")) {
    reject_unknown(*v, "system.params.matched", {"kind", "scale"});
    const std::string kind =
        string(require(*v, "system.params.matched", "kind"), "system.params.matched.kind");
    double scale = 1.0;
    if (const json* s = find(*v, "scale")) scale = number(*s, "system.params.matched.scale");
    try {
      p.matched = MatchedModel::parse(kind, scale);
    } catch (const Error& e) {
      fail("system.params.matched.kind", e.message());
    }
  }
  if (const json* v = find(*params, "input_channel")) {
    const std::size_t channel = count(*v, "system.params.input_channel");
    if (channel < 1 || channel > p.n) fail("system.params.input_channel", "must be in 1..n");
    p.input_channel = channel - 1;
  }
  return p;
}

ReferenceSpec parse_reference(const json& reference) {
  reject_unknown(reference, "reference", {"kind", "params"});
  ReferenceSpec spec;
  spec.kind = string(require(reference, "reference", "kind"), "reference.kind");
  const json* params = find(reference, "params");
  if (spec.kind == "sin") {
    if (params) {
      reject_unknown(*params, "reference.params", {"amplitude", "frequency", "phase", "offset"});
      if (const json* v = find(*params, "amplitude")) spec.amplitude = number(*v, "reference.params.amplitude");
      if (const json* v = find(*params, "frequency")) spec.frequency = number(*v, "reference.params.frequency");
      if (const json* v = find(*params, "phase")) spec.phase = number(*v, "reference.params.phase");
      if (const json* v = find(*params, "offset")) spec.offset = number(*v, "reference.params.offset");
    }
  } else if (spec.kind == "poly") {
    if (!params) fail("reference.params", "poly reference needs coeffs");
    reject_unknown(*params, "reference.params", {"coeffs"});
    spec.coeffs = numbers(require(*params, "reference.params", "coeffs"), "reference.params.coeffs");
  } else {
    fail("reference.kind", "must be 'sin' or 'poly'");
  }
  return spec;
}

}  // namespace

RunPlan parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports byte offsets; translate to a line number.
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw Error(ErrorKind::config, "JSON syntax error at line " + std::to_string(line) + ": " +
                                       e.what());
  }
  reject_unknown(root, "config", {"system", "controller", "reference", "init", "sim"});

  SimConfig base;
  base.plant = parse_plant(require(root, "config", "system"));
  const std::size_t n = base.plant.n;
  base.k_poles.assign(n, -1.0);
  base.kt_poles.assign(n, -4.0);
  base.x0 = Vector(n);
  base.xistar0 = Vector(n);

  std::vector<Variant> variants{Variant::mfc};
  if (const json* controller = find(root, "controller")) {
    reject_unknown(*controller, "controller",
                   {"variant", "k_poles", "kt_poles", "eta", "sign", "deriv"});
    if (const json* v = find(*controller, "variant")) {
      variants.clear();
      auto add = [&variants](const json& item, const std::string& path) {
        try {
          variants.push_back(parse_variant(string(item, path)));
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::config && item.is_string()) fail(path, e.message());
          throw;
        }
      };
      if (v->is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i) {
          add((*v)[i], "controller.variant[" + std::to_string(i) + "]");
        }
        if (variants.empty()) fail("controller.variant", "empty variant list");
      } else {
        add(*v, "controller.variant");
      }
    }
    if (const json* v = find(*controller, "k_poles")) base.k_poles = numbers(*v, "controller.k_poles");
    if (const json* v = find(*controller, "kt_poles")) base.kt_poles = numbers(*v, "controller.kt_poles");
    if (const json* v = find(*controller, "eta")) base.eta = number(*v, "controller.eta");
    if (const json* v = find(*controller, "sign")) {
      try {
        base.sign = SignPolicy::parse(string(*v, "controller.sign"));
      } catch (const Error& e) {
        fail("controller.sign", e.message());
      }
    }
    if (const json* v = find(*controller, "deriv")) base.deriv = string(*v, "controller.deriv");
  }

  if (const json* reference = find(root, "reference")) base.reference = parse_reference(*reference);

  if (const json* init = find(root, "init")) {
    reject_unknown(*init, "init", {"x0", "xistar0"});
    if (const json* v = find(*init, "x0")) base.x0 = Vector(numbers(*v, "init.x0"));
    if (const json* v = find(*init, "xistar0")) {
      if (v->is_string()) {
        if (v->get<std::string>() != "reference") {
          fail("init.xistar0", "expected an array or \"reference\"");
        }
        base.xistar0.reset();
      } else {
        base.xistar0 = Vector(numbers(*v, "init.xistar0"));
      }
    }
  }

  if (const json* sim = find(root, "sim")) {
    reject_unknown(*sim, "sim", {"dt", "horizon", "decimation"});
    if (const json* v = find(*sim, "dt")) base.dt = number(*v, "sim.dt");
    if (const json* v = find(*sim, "horizon")) base.horizon = number(*v, "sim.horizon");
    if (const json* v = find(*sim, "decimation")) base.decimation = count(*v, "sim.decimation");
  }

  RunPlan plan;
  std::set<Variant> seen;
  for (Variant v : variants) {
    if (!seen.insert(v).second) fail("controller.variant", "duplicate variant " + to_string(v));
    SimConfig cfg = base;
    cfg.variant = v;
    cfg.name = to_string(v);
    plan.runs.push_back(std::move(cfg));
  }
  for (const SimConfig& cfg : plan.runs) {
    try {
      cfg.validate();
      build_chain(cfg.plant);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::config) throw;
      throw Error(ErrorKind::config, "invalid configuration: " + e.message());
    }
  }
  return plan;
}

RunPlan load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace mfc

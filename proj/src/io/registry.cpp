#include "kcontract/io/registry.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace kc::io {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << v << ")";
  return os.str();
}

std::map<std::string, double> merge(const std::string& model, std::map<std::string, double> defaults,
                                    const json& params) {
  if (!params.is_object()) throw ModelError(model + ": params must be an object");
  for (auto it = params.begin(); it != params.end(); ++it) {
    auto d = defaults.find(it.key());
    if (d == defaults.end()) throw ModelError(model + ": unknown parameter \"" + it.key() + "\"");
    if (!it.value().is_number()) throw ModelError(model + ": parameter \"" + it.key() + "\" must be a number");
    d->second = it.value().get<double>();
  }
  return defaults;
}

json defaults_json(const std::map<std::string, double>& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

Matrix unit_term(int n, int r, int c, double v) {
  Matrix a = Matrix::Zero(n, n);
  a(r, c) = v;
  return a;
}

ModelSpec rossler(const json& params) {
  merge("rossler", {}, params);
  ModelSpec s;
  s.kind = "nonlinear";
  s.name = s.builtin = "rossler";
  s.dim = 3;
  s.f = {"x2", "-x1 - x3", "0.5*((x1 - x1^2) - x3)"};
  s.a0.resize(3, 3);
  s.a0 << 0, 1, 0, -1, 0, -1, 0.5, 0, -0.5;
  s.terms.push_back({unit_term(3, 2, 0, -1.0), "x1", false, {}});
  s.has_box = true;
  s.box = Box({-3, -3, -3}, {3, 3, 3});
  return s;
}

ModelSpec rossler_mod(const json& params) {
  merge("rossler_mod", {}, params);
  ModelSpec s;
  s.kind = "nonlinear";
  s.name = s.builtin = "rossler_mod";
  s.dim = 3;
  s.f = {"x2 - 2*x3", "-x1 - x3", "0.5*((x1 - x1^3) - x3)"};
  s.a0.resize(3, 3);
  s.a0 << 0, 1, -2, -1, 0, -1, 0.5, 0, -0.5;
  s.terms.push_back({unit_term(3, 2, 0, -1.5), "x1^2", false, {}});
  s.has_box = true;
  s.box = Box({-2, -2, -2}, {2, 2, 2});
  return s;
}

ModelSpec synchronverter(const json& params) {
  const auto p = merge("synchronverter",
                       {{"w_n", 100.0 * std::numbers::pi},
                        {"V", 230.0 * std::sqrt(3.0)},
                        {"J", 0.2},
                        {"R", 1.875},
                        {"L", 0.05675},
                        {"D_p", 10.0},
                        {"m", 3.5},
                        {"T_m", 0.0},
                        {"i_f", 1.0}},
                       params);
  const double wn = p.at("w_n"), V = p.at("V"), J = p.at("J"), R = p.at("R"), L = p.at("L");
  const double Dp = p.at("D_p"), m = p.at("m"), Tm = p.at("T_m"), i_f = p.at("i_f");
  ModelSpec s;
  s.kind = "nonlinear";
  s.name = s.builtin = "synchronverter";
  s.params = defaults_json(p);
  s.dim = 4;
  s.f = {
      "-" + num(R / L) + "*x1 + x2*x3 + " + num(V / L) + "*sin(x4)",
      "-x1*x3 - " + num(R / L) + "*x2 - " + num(m * i_f / L) + "*x3 + " + num(V / L) + "*cos(x4)",
      num(m * i_f / J) + "*x2 - " + num(Dp / J) + "*(x3 - " + num(wn) + ") + " + num(Tm / J),
      "x3 - " + num(wn),
  };
  s.a0 = Matrix::Zero(4, 4);
  s.a0(0, 0) = -R / L;
  s.a0(1, 1) = -R / L;
  s.a0(1, 2) = -(m / L) * i_f;
  s.a0(2, 1) = (m / J) * i_f;
  s.a0(2, 2) = -Dp / J;
  s.a0(3, 2) = 1.0;
  Matrix a3 = Matrix::Zero(4, 4);
  a3(0, 1) = 1.0;
  a3(1, 0) = -1.0;
  s.terms = {
      {unit_term(4, 1, 2, -1.0), "x1", false, {}},
      {unit_term(4, 0, 2, 1.0), "x2", false, {}},
      {a3, "x3", false, {}},
      {unit_term(4, 1, 3, -V / L), "sin(x4)", false, {}},
      {unit_term(4, 0, 3, V / L), "cos(x4)", false, {}},
  };
  s.has_box = true;
  s.box = Box({-81, -67, 298, -0.2}, {5, 10.5, 315, 1});
  return s;
}

ModelSpec example25(const json& params) {
  const auto p = merge("example25", {{"k1", 0.0}, {"k2", 0.0}, {"k3", 0.0}}, params);
  const double k1 = p.at("k1"), k2 = p.at("k2"), k3 = p.at("k3");
  ModelSpec s;
  s.kind = "nonlinear";
  s.name = s.builtin = "example25";
  s.params = defaults_json(p);
  s.dim = 3;
  s.f = {"x2 - x3",
         "-x1 - x3 - (" + num(k1) + "*x1 + " + num(k2) + "*x2 + " + num(k3) + "*x3)",
         "x1*(x1^2 - 0.25)"};
  s.a0.resize(3, 3);
  s.a0 << 0, 1, -1, -1 - k1, -k2, -1 - k3, -0.25, 0, 0;
  s.terms.push_back({unit_term(3, 2, 0, 3.0), "x1^2", false, {}});
  s.B = Matrix::Zero(3, 1);
  s.B(1, 0) = 1.0;
  s.has_box = true;
  s.box = Box({-0.55, -1, -1}, {0.55, 1, 1});
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"rossler", "rossler_mod", "synchronverter", "example25"}; }

ModelSpec builtin_model(const std::string& name, const json& params) {
  if (name == "rossler") return rossler(params);
  if (name == "rossler_mod") return rossler_mod(params);
  if (name == "synchronverter") return synchronverter(params);
  if (name == "example25") return example25(params);
  throw ModelError("unknown builtin model \"" + name + "\"");
}

}  // namespace kc::io

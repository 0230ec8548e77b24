#include "kcontract/io/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kcontract/compound.hpp"
#include "kcontract/io/certificates.hpp"
#include "kcontract/io/registry.hpp"
#include "kcontract/io/report.hpp"
#include "kcontract/nl_verify.hpp"
#include "kcontract/sim.hpp"

namespace kc::io {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

json box_json(const Box& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

Vector random_point(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector r(box.dim());
  for (int i = 0; i < box.dim(); ++i) r(i) = u(rng);
  return box.at(r);
}

// Printed certificate at slack 0 and at relative slack 1e-2, then a fresh
// search when slack 0 fails.
json certificate_section(const NonlinearModel& model, const Box& box, const LoadedNlCertificate& printed,
                         std::uint64_t seed, bool& accepted) {
  json out;
  const json inputs = {{"model", model.name}, {"box", box_json(box)}, {"certificate", nl_certificate_to_json(printed.cert)}};
  const VerificationReport strict = verify_nl_certificate(model, box, printed.cert, 0.0);
  const VerificationReport loose = verify_nl_certificate(model, box, printed.cert, 1e-2);
  out["printed_slack_0"] = report_to_json(strict, inputs);
  out["printed_slack_1e-2"] = report_to_json(loose, inputs);
  out["printed_asymmetry"] = printed.asymmetry;
  out["inertia"] = {to_string(inertia_symmetric(printed.cert.p0)), to_string(inertia_symmetric(printed.cert.p1))};
  out["rate_sum"] = printed.cert.mu1 + (printed.cert.k - 1) * printed.cert.mu0;
  accepted = loose.accept;
  if (!strict.accept) {
    SearchBudget budget;
    budget.seed = seed;
    const SearchResult sr = search_nl_certificate(model, box, printed.cert.k, budget);
    json rs = {{"success", sr.success}, {"message", sr.message}};
    if (sr.success) {
      rs["certificate"] = nl_certificate_to_json(sr.cert);
      rs["report"] = report_to_json(sr.report, inputs);
    }
    out["resolved"] = rs;
  }
  return out;
}

BundleResult bundle_rossler(std::uint64_t seed) {
  const ModelSpec spec = builtin_model("rossler");
  const NonlinearModel model = compile_model(spec);
  const Box box = model_box(spec);
  json rep;
  std::mt19937_64 rng(seed);

  double dev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Matrix c = additive_compound(model.jacobian(random_point(box, rng)), 3);
    dev = std::max(dev, std::abs(c(0, 0) + 0.5));
  }
  rep["compound3_max_deviation_from_-0.5"] = dev;

  NonlinearCertificate identity;
  identity.k = 3;
  identity.p0 = Matrix::Identity(3, 3);
  identity.p1 = Matrix::Identity(3, 3);
  identity.mu0 = 1.0;
  identity.mu1 = -3.0;
  const VerificationReport structural = verify_nl_certificate(model, box, identity, 0.0);
  rep["identity_P1"] = report_to_json(structural, {{"model", "rossler"}, {"P1", "identity"}});

  SearchBudget budget;
  budget.seed = seed;
  budget.restarts = 6;
  const SearchResult sr = search_nl_certificate(model, box, 3, budget);
  rep["search_k3"] = {{"success", sr.success}, {"message", sr.message}};

  const Trace tr = integrate(model.f, vec({0.1, 0.1, 0.0}), 500.0, 1e-3);
  const AttractorClass ac = classify_attractor(tr, 1e-3);
  rep["attractor"] = {{"x0", {0.1, 0.1, 0.0}}, {"class", to_string(ac.kind)}, {"recurrence", ac.recurrence}};

  const bool ok = dev <= 1e-12 && !structural.accept && !sr.success && ac.kind == AttractorKind::unresolved;
  rep["verdict"] = ok ? "accept" : "reject";
  rep["inputs_digest"] = fnv1a_hex(json{{"bundle", "rossler"}, {"seed", seed}}.dump());
  return {ok, rep};
}

BundleResult bundle_rossler_mod(std::uint64_t seed) {
  const ModelSpec spec = builtin_model("rossler_mod");
  const NonlinearModel model = compile_model(spec);
  json rep;
  const auto x0s = rossler_mod_initial_conditions();
  const Box box = trajectory_box(model.f, x0s, 500.0, 1e-3, 0.1);
  rep["box"] = box_json(box);
  rep["box_rule"] = "bounding box of the three trajectories on [0, 500], widened by 10% of the half-width";

  const LoadedNlCertificate printed = nl_certificate_from_json(read_json_file(data_file("rossler_mod_printed.json")));
  bool accepted = false;
  rep["certificate"] = certificate_section(model, box, printed, seed, accepted);

  const Trace ct = integrate_compound(model, x0s[0], Matrix::Identity(3, 3), 3, 20.0, 1e-3);
  const DecayFit fit = fit_decay(ct);
  rep["compound_decay"] = {{"fitted_rate", fit.a}, {"expected_rate", 0.5}};

  json classes = json::array();
  bool all_simple = true;
  for (const auto& x0 : x0s) {
    const AttractorClass ac = classify_attractor(integrate(model.f, x0, 500.0, 1e-3), 1e-3);
    all_simple = all_simple && ac.kind != AttractorKind::unresolved;
    classes.push_back({{"x0", {x0(0), x0(1), x0(2)}}, {"class", to_string(ac.kind)}, {"recurrence", ac.recurrence}});
  }
  rep["attractors"] = classes;
  const bool resolved = rep["certificate"].contains("resolved") && rep["certificate"]["resolved"]["success"].get<bool>();
  const bool ok = (accepted || resolved) && all_simple && std::abs(fit.a - 0.5) <= 1e-3;
  rep["verdict"] = ok ? "accept" : "reject";
  rep["inputs_digest"] = fnv1a_hex(json{{"bundle", "rossler_mod"}, {"seed", seed}}.dump());
  return {ok, rep};
}

BundleResult bundle_synchronverter(std::uint64_t seed) {
  const ModelSpec spec = builtin_model("synchronverter");
  const NonlinearModel model = compile_model(spec);
  const Box box = model_box(spec);
  json rep;
  rep["box"] = box_json(box);
  rep["box_note"] = "x4 range read as [-0.2, 1]";
  const LoadedNlCertificate printed = nl_certificate_from_json(read_json_file(data_file("synchronverter_printed.json")));
  bool accepted = false;
  rep["certificate"] = certificate_section(model, box, printed, seed, accepted);
  rep["vertices"] = 1 << model.terms.size();

  std::mt19937_64 rng(seed);
  json classes = json::array();
  bool all_fixed = true;
  for (int i = 0; i < 10; ++i) {
    const Vector x0 = random_point(box, rng);
    const AttractorClass ac = classify_attractor(integrate(model.f, x0, 10.0, 1e-3), 1e-3);
    all_fixed = all_fixed && ac.kind == AttractorKind::fixed_point;
    classes.push_back({{"x0", std::vector<double>(x0.data(), x0.data() + x0.size())}, {"class", to_string(ac.kind)}});
  }
  rep["attractors"] = classes;
  const bool resolved = rep["certificate"].contains("resolved") && rep["certificate"]["resolved"]["success"].get<bool>();
  const bool strict_ok = rep["certificate"]["printed_slack_0"]["verdict"] == "accept";
  const bool ok = accepted && (strict_ok || resolved) && all_fixed;
  rep["verdict"] = ok ? "accept" : "reject";
  rep["inputs_digest"] = fnv1a_hex(json{{"bundle", "synchronverter"}, {"seed", seed}}.dump());
  return {ok, rep};
}

BundleResult bundle_example25(std::uint64_t) {
  const ModelSpec open = builtin_model("example25");
  const NonlinearModel plant = compile_model(open);
  const Box box = model_box(open);
  const DesignData d = design_data_from_json(read_json_file(data_file("example25_printed.json")));
  json rep;
  rep["box"] = box_json(box);
  rep["asymmetry"] = {{"W1", d.asymmetry_w1}, {"Q", d.asymmetry_q}};

  NlGainResult g;
  std::string gain_error;
  try {
    g = synthesize_nl_gain(plant, box, d.w0, d.w1, d.mu0, d.mu1, open.B, d.k);
  } catch (const GainConditionError& e) {
    g = e.result;
    gain_error = e.what();
  }
  const json inputs = {{"bundle", "example25"}, {"W0", matrix_to_json(d.w0)}, {"W1", matrix_to_json(d.w1)}};
  json gain = report_to_json(g.report, inputs);
  gain["K"] = matrix_to_json(g.K);
  gain["K_printed"] = matrix_to_json(d.k_printed);
  gain["omega"] = g.omega;
  gain["omega_printed"] = d.omega_printed;
  if (!gain_error.empty()) gain["error"] = gain_error;
  rep["gain"] = gain;
  const double k_dev = (g.K - d.k_printed).cwiseAbs().maxCoeff();
  const bool k_ok = k_dev <= 0.02;
  const bool omega_ok = std::abs(g.omega - 0.048) <= 0.01;
  rep["gain"]["K_max_deviation"] = k_dev;

  // Closed loop with the printed gain.
  const ModelSpec closed = builtin_model(
      "example25", {{"k1", d.k_printed(0, 0)}, {"k2", d.k_printed(0, 1)}, {"k3", d.k_printed(0, 2)}});
  const NonlinearModel cl = compile_model(closed);
  const VerificationReport qrep = verify_compound_condition(cl, box, d.q, d.eta, 2, 1e-2);
  rep["compound_condition"] = report_to_json(qrep, {{"Q", matrix_to_json(d.q)}, {"eta", d.eta}});
  // Same Q against the transposed compound; informational only.
  double transposed = -std::numeric_limits<double>::infinity();
  for (const Matrix& j : envelope_vertices(cl, box)) {
    const Matrix c = additive_compound(j, 2).transpose();
    const Matrix s = d.q * c + c.transpose() * d.q + d.eta * Matrix::Identity(c.rows(), c.rows());
    transposed = std::max(transposed, max_eig_sym(symmetrize(s)));
  }
  rep["compound_condition"]["transposed_form_margin"] = transposed;

  const auto eqs = find_equilibria(cl.f, box, 7);
  json eq = json::array();
  int unstable = 0;
  for (const auto& e : eqs) {
    if (e.kind != EquilibriumKind::stable) ++unstable;
    eq.push_back({{"x", std::vector<double>(e.point.data(), e.point.data() + e.point.size())}, {"kind", to_string(e.kind)}});
  }
  rep["equilibria"] = eq;
  const bool eq_ok = eqs.size() == 3 && unstable == 1;
  const bool ok = k_ok && omega_ok && qrep.accept && eq_ok;
  rep["checks"] = {{"K_within_0.02", k_ok}, {"omega_within_0.01", omega_ok}, {"compound_condition", qrep.accept},
                   {"three_equilibria_one_unstable", eq_ok}};
  rep["verdict"] = ok ? "accept" : "reject";
  rep["inputs_digest"] = fnv1a_hex(inputs.dump());
  return {ok, rep};
}

}  // namespace

Box trajectory_box(const VectorField& field, const std::vector<Vector>& x0s, double t_end, double h, double inflate) {
  const int n = static_cast<int>(x0s.front().size());
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  for (const auto& x0 : x0s) {
    const Trace tr = integrate(field, x0, t_end, h);
    for (const auto& x : tr.states) {
      for (int i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], x(i));
        hi[i] = std::max(hi[i], x(i));
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    const double half = 0.5 * (hi[i] - lo[i]);
    lo[i] -= inflate * half;
    hi[i] += inflate * half;
  }
  return Box(lo, hi);
}

std::vector<Vector> rossler_mod_initial_conditions() {
  return {vec({0.2, 0.5, 0.0}), vec({-0.3, -0.3, -0.5}), vec({0.2, -0.5, -0.3})};
}

BundleResult reproduce(const std::string& name, std::uint64_t seed) {
  if (name == "rossler") return bundle_rossler(seed);
  if (name == "rossler_mod") return bundle_rossler_mod(seed);
  if (name == "synchronverter") return bundle_synchronverter(seed);
  if (name == "example25") return bundle_example25(seed);
  throw ModelError("unknown reproduction bundle \"" + name + "\"");
}

}  // namespace kc::io

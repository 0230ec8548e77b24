#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kcontract/compound.hpp"
#include "kcontract/io/certificates.hpp"
#include "kcontract/io/registry.hpp"
#include "kcontract/io/report.hpp"
#include "kcontract/io/reproduce.hpp"
#include "kcontract/lin_synthesis.hpp"
#include "kcontract/nl_verify.hpp"
#include "kcontract/sim.hpp"

using namespace kc;
using io::json;

namespace {

constexpr int kAccept = 0;
constexpr int kReject = 1;
constexpr int kUsage = 2;

struct Options {
  std::string model;
  std::string cert;
  std::string out;
  std::string x0;
  int k = 2;
  double rho = 1.0;
  double slack = -1.0;
  double t = 10.0;
  double h = 1e-3;
  int grid = 64;
  int compound = 0;
  int n = 0;
  double side = 1.0;
  std::uint64_t seed = 0;
  std::string bundle;
};

io::ModelSpec load_model(const std::string& what) {
  if (what.empty()) throw io::ModelError("--model is required");
  if (std::filesystem::exists(what)) {
    std::ifstream in(what);
    std::stringstream ss;
    ss << in.rdbuf();
    return io::parse_model(ss.str());
  }
  for (const auto& b : io::builtin_names())
    if (b == what) return io::builtin_model(b);
  throw io::ModelError("model \"" + what + "\" is neither a readable file nor a builtin");
}

Matrix require_linear(const io::ModelSpec& s) {
  if (s.kind != "linear") throw io::ModelError("this command needs a linear model (kind \"linear\")");
  return s.A;
}

Matrix require_b(const io::ModelSpec& s) {
  if (s.B.size() == 0) throw io::ModelError("this command needs an input matrix B in the model");
  return s.B;
}

Vector parse_vector(const std::string& text, int n) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw io::ModelError("--x0: cannot read \"" + item + "\" as a number");
    }
  }
  if (static_cast<int>(v.size()) != n) throw io::ModelError("--x0 must have " + std::to_string(n) + " entries");
  return Eigen::Map<Vector>(v.data(), n);
}

json model_inputs(const io::ModelSpec& s, const Options& o) {
  return {{"model", io::model_to_json(s)}, {"k", o.k}, {"seed", o.seed}};
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

int finish(const json& report) {
  emit(report);
  return report.value("verdict", "reject") == "accept" ? kAccept : kReject;
}

int cmd_analyze_lin(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const Matrix a = require_linear(s);
  const DefiniteResult r = k_contractive_lti(a, o.k);
  VerificationReport rep;
  rep.add({"sum of the k largest real parts", r.margin, 0.0, r.holds, ""});
  rep.finalize();
  return finish(io::report_to_json(rep, model_inputs(s, o)));
}

int cmd_certify_lin(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const Matrix a = require_linear(s);
  const json inputs = model_inputs(s, o);
  if (!o.cert.empty()) {
    const ContractionCertificate c = io::lin_certificate_from_json(io::read_json_file(o.cert));
    return finish(io::report_to_json(verify_certificate(a, o.k, c, std::max(0.0, o.slack)), inputs));
  }
  try {
    const ContractionCertificate c = build_certificate(a, o.k);
    json rep = io::report_to_json(verify_certificate(a, o.k, c, 0.0), inputs);
    rep["certificate"] = io::lin_certificate_to_json(c);
    if (!o.out.empty()) std::ofstream(o.out) << rep["certificate"].dump(2) << "\n";
    return finish(rep);
  } catch (const ConditionViolation& e) {
    json rep = io::bare_report(false, inputs);
    rep["diagnostics"] = e.what();
    return finish(rep);
  }
}

int cmd_stabilizable(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const Matrix a = require_linear(s);
  const Matrix b = require_b(s);
  const StabilizabilityTest t = k_order_stabilizable(a, b, o.k);
  VerificationReport rep;
  rep.add({"uncontrollable block", t.margin, 0.0, t.holds, t.diagnostics});
  rep.finalize();
  json j = io::report_to_json(rep, model_inputs(s, o));
  j["n_u"] = t.nu;
  return finish(j);
}

int cmd_synth_lin(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const Matrix a = require_linear(s);
  const Matrix b = require_b(s);
  json inputs = model_inputs(s, o);
  inputs["rho"] = o.rho;
  try {
    const StabilizabilityCertificate c = stabilizability_certificate(a, b, o.k);
    const Matrix K = synthesize_gain(c, b, o.rho);
    VerificationReport rep = verify_stabilizability_certificate(a, b, o.k, c, 0.0);
    const DefiniteResult cl = k_contractive_lti(a - b * K, o.k);
    rep.add({"closed loop: sum of the k largest real parts", cl.margin, 0.0, cl.holds, ""});
    rep.finalize();
    json j = io::report_to_json(rep, inputs);
    j["K"] = io::matrix_to_json(K);
    j["certificate"] = io::stabilizability_certificate_to_json(c);
    if (!o.out.empty()) std::ofstream(o.out) << j["certificate"].dump(2) << "\n";
    return finish(j);
  } catch (const ConditionViolation& e) {
    json j = io::bare_report(false, inputs);
    j["diagnostics"] = e.what();
    return finish(j);
  }
}

int cmd_verify_nl(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const NonlinearModel m = io::compile_model(s);
  const Box box = io::model_box(s);
  json inputs = model_inputs(s, o);
  if (o.cert.empty()) {
    SearchBudget budget;
    budget.seed = o.seed;
    const SearchResult r = search_nl_certificate(m, box, o.k, budget);
    json j = r.success ? io::report_to_json(r.report, inputs) : io::bare_report(false, inputs);
    j["search"] = r.message;
    if (r.success) {
      j["certificate"] = io::nl_certificate_to_json(r.cert);
      if (!o.out.empty()) std::ofstream(o.out) << j["certificate"].dump(2) << "\n";
    }
    return finish(j);
  }
  const io::LoadedNlCertificate c = io::nl_certificate_from_json(io::read_json_file(o.cert));
  const double slack = o.slack >= 0.0 ? o.slack : (c.printed_precision ? 1e-2 : 0.0);
  inputs["certificate"] = io::nl_certificate_to_json(c.cert);
  inputs["slack"] = slack;
  json j = io::report_to_json(verify_nl_certificate(m, box, c.cert, slack), inputs);
  j["slack"] = slack;
  j["inertia"] = {to_string(inertia_symmetric(c.cert.p0)), to_string(inertia_symmetric(c.cert.p1))};
  if (c.asymmetry > 0.0) j["printed_asymmetry"] = c.asymmetry;
  return finish(j);
}

int cmd_synth_nl(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const NonlinearModel m = io::compile_model(s);
  const Box box = io::model_box(s);
  const Matrix b = require_b(s);
  if (o.cert.empty()) throw io::ModelError("--cert with W0, W1, mu0, mu1 is required");
  const json data = io::read_json_file(o.cert);
  const Matrix w0 = io::symmetric_from_json(data.at("W0"), "W0");
  const Matrix w1 = io::symmetric_from_json(data.at("W1"), "W1");
  const double mu0 = data.at("mu0").get<double>();
  const double mu1 = data.at("mu1").get<double>();
  const int k = data.value("k", o.k);
  json inputs = model_inputs(s, o);
  inputs["design"] = {{"W0", io::matrix_to_json(w0)}, {"W1", io::matrix_to_json(w1)}, {"mu0", mu0}, {"mu1", mu1}};
  NlGainResult r;
  std::string err;
  try {
    r = synthesize_nl_gain(m, box, w0, w1, mu0, mu1, b, k);
  } catch (const GainConditionError& e) {
    r = e.result;
    err = e.what();
  }
  json j = io::report_to_json(r.report, inputs);
  j["K"] = io::matrix_to_json(r.K);
  j["omega"] = r.omega;
  j["omega_bar"] = r.omega_bar;
  if (!err.empty()) j["error"] = err;
  return finish(j);
}

int cmd_simulate(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const NonlinearModel m = io::compile_model(s);
  const Vector x0 = o.x0.empty() ? io::model_box(s).center() : parse_vector(o.x0, m.dim);
  Trace tr;
  if (o.compound > 0) {
    tr = integrate_compound(m, x0, Matrix::Identity(m.dim, o.compound), o.compound, o.t, o.h);
  } else {
    tr = integrate(m.f, x0, o.t, o.h);
  }
  if (!o.out.empty()) {
    std::ofstream out(o.out);
    write_trace_csv(out, tr);
  }
  json inputs = model_inputs(s, o);
  inputs["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
  inputs["t"] = o.t;
  inputs["h"] = o.h;
  inputs["compound"] = o.compound;
  json j = io::bare_report(!tr.truncated, inputs);
  const Vector& xe = tr.states.back();
  j["final_state"] = std::vector<double>(xe.data(), xe.data() + xe.size());
  j["samples"] = tr.size();
  j["truncated"] = tr.truncated;
  const AttractorClass ac = classify_attractor(tr, 1e-3);
  j["attractor"] = {{"class", to_string(ac.kind)}, {"terminal_speed", ac.terminal_speed}};
  if (o.compound > 0 && !tr.truncated) {
    const DecayFit fit = fit_decay(tr);
    j["decay"] = {{"a", fit.a}, {"b", fit.b}, {"residual", fit.residual}};
  }
  return finish(j);
}

int cmd_volume(const Options& o) {
  const io::ModelSpec s = load_model(o.model);
  const NonlinearModel m = io::compile_model(s);
  if (m.dim < 2) throw io::ModelError("volume needs a model of dimension >= 2");
  const Vector x0 = o.x0.empty() ? io::model_box(s).center() : parse_vector(o.x0, m.dim);
  Matrix edges = Matrix::Zero(m.dim, 2);
  edges(0, 0) = o.side;
  edges(1, 1) = o.side;
  const ImmersionGrid g0 = parallelotope_grid(x0, edges, o.grid);
  const ImmersionGrid gt = flow_immersion(m.f, g0, o.t, o.h);
  const Matrix p = Matrix::Identity(m.dim, m.dim);
  const VolumeResult v0 = volume_of_immersion(g0, p);
  const VolumeResult vt = volume_of_immersion(gt, p);
  json inputs = model_inputs(s, o);
  inputs["grid"] = o.grid;
  inputs["t"] = o.t;
  inputs["side"] = o.side;
  json j = io::bare_report(true, inputs);
  j["volume_initial"] = v0.volume;
  j["volume_final"] = vt.volume;
  j["ratio"] = vt.volume / v0.volume;
  j["degenerate"] = vt.degenerate;
  return finish(j);
}

int cmd_counts(const Options& o) {
  const VariableCounts c = variable_counts(o.n, o.k);
  std::cout << json{{"N1", c.n1}, {"N2", c.n2}}.dump() << "\n";
  return kAccept;
}

int cmd_reproduce(const Options& o) {
  const io::BundleResult r = io::reproduce(o.bundle, o.seed);
  emit(r.report);
  return r.ok ? kAccept : kReject;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-contraction analysis and k-contractive feedback design"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Random seed")->default_val(0);

  auto with_model = [&](CLI::App* c) { c->add_option("--model", o.model, "Model JSON file or builtin name")->required(); };
  auto with_k = [&](CLI::App* c) { c->add_option("--k", o.k, "Contraction order")->check(CLI::PositiveNumber); };

  auto* analyze = app.add_subcommand("analyze-lin", "Eigenvalue k-sum test for x' = A x");
  with_model(analyze);
  with_k(analyze);
  auto* certify = app.add_subcommand("certify-lin", "Build (or, with --cert, verify) a linear certificate");
  with_model(certify);
  with_k(certify);
  certify->add_option("--cert", o.cert, "Certificate JSON to verify");
  certify->add_option("--slack", o.slack, "Relative slack");
  certify->add_option("--out", o.out, "Write the certificate here");
  auto* stab = app.add_subcommand("stabilizable", "k-order stabilizability of (A, B)");
  with_model(stab);
  with_k(stab);
  auto* synl = app.add_subcommand("synth-lin", "k-contractive state feedback for (A, B)");
  with_model(synl);
  with_k(synl);
  synl->add_option("--rho", o.rho, "Gain scaling, >= 1");
  synl->add_option("--out", o.out, "Write the certificate here");
  auto* vnl = app.add_subcommand("verify-nl", "Check a constant-metric pair on the model box (search if no --cert)");
  with_model(vnl);
  with_k(vnl);
  vnl->add_option("--cert", o.cert, "Certificate JSON {k, mu0, mu1, P0, P1}");
  vnl->add_option("--slack", o.slack, "Relative slack (default 1e-2 for printed certificates, else 0)");
  vnl->add_option("--out", o.out, "Write a found certificate here");
  auto* snl = app.add_subcommand("synth-nl", "Nonlinear gain from W0, W1");
  with_model(snl);
  with_k(snl);
  snl->add_option("--cert", o.cert, "Design JSON {W0, W1, mu0, mu1, k}")->required();
  auto* sim = app.add_subcommand("simulate", "Integrate the model (and optionally a compound)");
  with_model(sim);
  sim->add_option("--x0", o.x0, "Initial state, comma separated");
  sim->add_option("--t", o.t, "Final time")->check(CLI::PositiveNumber);
  sim->add_option("--h", o.h, "Step size")->check(CLI::PositiveNumber);
  sim->add_option("--compound", o.compound, "Order k of the co-integrated compound");
  sim->add_option("--out", o.out, "Trace CSV");
  auto* vol = app.add_subcommand("volume", "Area of a flowed square in the x1-x2 plane");
  with_model(vol);
  vol->add_option("--grid", o.grid, "Points per axis")->check(CLI::Range(3, 4096));
  vol->add_option("--t", o.t, "Flow time")->check(CLI::NonNegativeNumber);
  vol->add_option("--h", o.h, "Step size")->check(CLI::PositiveNumber);
  vol->add_option("--x0", o.x0, "Square corner, comma separated");
  vol->add_option("--side", o.side, "Side length")->check(CLI::PositiveNumber);
  auto* counts = app.add_subcommand("counts", "Decision-variable counts of the two formulations");
  counts->add_option("--n", o.n, "State dimension")->required()->check(CLI::PositiveNumber);
  counts->add_option("--k", o.k, "Order")->required()->check(CLI::PositiveNumber);
  auto* rep = app.add_subcommand("reproduce", "Run a reproduction bundle");
  rep->add_option("bundle", o.bundle, "rossler | rossler_mod | synchronverter | example25")
      ->required()
      ->check(CLI::IsMember({"rossler", "rossler_mod", "synchronverter", "example25"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*analyze) return cmd_analyze_lin(o);
    if (*certify) return cmd_certify_lin(o);
    if (*stab) return cmd_stabilizable(o);
    if (*synl) return cmd_synth_lin(o);
    if (*vnl) return cmd_verify_nl(o);
    if (*snl) return cmd_synth_nl(o);
    if (*sim) return cmd_simulate(o);
    if (*vol) return cmd_volume(o);
    if (*counts) return cmd_counts(o);
    if (*rep) return cmd_reproduce(o);
  } catch (const ConditionViolation& e) {
    std::cerr << "rejected: " << e.what() << "\n";
    return kReject;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kReject;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

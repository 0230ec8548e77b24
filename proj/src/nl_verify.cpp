#include "kcontract/nl_verify.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kcontract/compound.hpp"
#include "kcontract/kernels.hpp"

namespace kc {

namespace {

std::string vertex_label(const std::string& what, std::size_t v, bool certifying) {
  return what + (certifying ? " / vertex " : " / sample ") + std::to_string(v);
}

// Vertices when m <= 16, otherwise a flagged grid of Jacobian samples.
std::vector<Matrix> vertices_or_samples(const NonlinearModel& model, const Box& box, bool& certifying) {
  certifying = static_cast<int>(model.terms.size()) <= kMaxEnvelopeTerms;
  if (certifying) return envelope_vertices(model, box);
  return envelope_grid_samples(model, box, 5);
}

void check_dims(const NonlinearModel& model, const Box& box, const Matrix& m, const char* what) {
  if (box.dim() != model.dim) throw std::invalid_argument(std::string(what) + ": box dimension mismatch");
  if (m.rows() != model.dim || m.cols() != model.dim)
    throw std::invalid_argument(std::string(what) + ": matrix dimension mismatch");
}

}  // namespace

VertexMargin worst_vertex_margin(const std::vector<Matrix>& vertices, const Matrix& p, double mu) {
  const std::vector<double> m = kernels::omp::vertex_margins(vertices, p, mu);
  VertexMargin w{-std::numeric_limits<double>::infinity(), 0};
  for (std::size_t v = 0; v < m.size(); ++v) {
    if (m[v] > w.margin) w = {m[v], v};
  }
  return w;
}

VerificationReport verify_nl_certificate(const NonlinearModel& model, const Box& box,
                                         const NonlinearCertificate& cert, double slack) {
  check_dims(model, box, cert.p0, "verify_nl_certificate(P0)");
  check_dims(model, box, cert.p1, "verify_nl_certificate(P1)");
  const int n = model.dim;
  const int k = cert.k;
  if (k < 1 || k > n) throw std::invalid_argument("verify_nl_certificate: k out of range");

  VerificationReport rep;
  std::ostringstream diag;
  const Matrix p0 = symmetrize(cert.p0);
  const Matrix p1 = symmetrize(cert.p1);

  const InertiaTriple in0 = inertia_symmetric(p0);
  const InertiaTriple in1 = inertia_symmetric(p1);
  const InertiaTriple want0{0, 0, n};
  const InertiaTriple want1{k - 1, 0, n - k + 1};
  rep.add({"P0 inertia", 0.0, 0.0, in0 == want0, "got " + to_string(in0) + ", want " + to_string(want0)});
  rep.add({"P1 inertia", 0.0, 0.0, in1 == want1, "got " + to_string(in1) + ", want " + to_string(want1)});
  if (!(in0 == want0)) diag << "P0 inertia " << to_string(in0) << " != " << to_string(want0) << "; ";
  if (!(in1 == want1)) diag << "P1 inertia " << to_string(in1) << " != " << to_string(want1) << "; ";

  bool certifying = true;
  const std::vector<Matrix> verts = vertices_or_samples(model, box, certifying);
  rep.certifying = certifying;
  if (!certifying) diag << "too many envelope terms; checked on grid samples only (not a certificate); ";

  const Matrix* ps[2] = {&p0, &p1};
  const double mus[2] = {cert.mu0, cert.mu1};
  for (int i = 0; i < 2; ++i) {
    const std::string tag = "P" + std::to_string(i) + " rate inequality";
    const VertexMargin w = worst_vertex_margin(verts, *ps[i], mus[i]);
    const double bound = slack * spectral_norm(*ps[i]);
    std::ostringstream det;
    det << "mu = " << mus[i] << ", ||P|| = " << spectral_norm(*ps[i]) << ", vertices = " << verts.size();
    rep.add({vertex_label(tag, w.vertex, certifying), w.margin, bound, w.margin < bound, det.str()});
    if (!(w.margin < bound)) diag << tag << " fails at vertex " << w.vertex << " (margin " << w.margin << "); ";
  }

  const double rs = cert.mu1 + (k - 1) * cert.mu0;
  rep.add({"rate sum mu1 + (k-1) mu0", rs, 0.0, rs < 0.0, ""});
  if (!(rs < 0.0)) diag << "rate sum " << rs << " >= 0; ";
  if (n == 2 && k == 2) diag << "planar case: compactness of the box is not needed; ";
  rep.diagnostics = diag.str();
  rep.finalize();
  return rep;
}

VerificationReport verify_compound_condition(const NonlinearModel& model, const Box& box, const Matrix& q,
                                             double eta, int k, double slack) {
  if (box.dim() != model.dim) throw std::invalid_argument("verify_compound_condition: box dimension mismatch");
  const int n = model.dim;
  if (k < 1 || k > n) throw std::invalid_argument("verify_compound_condition: k out of range");
  const Matrix qs = symmetrize(q);
  const long long nk = binomial(n, k);
  if (qs.rows() != nk || qs.cols() != nk)
    throw std::invalid_argument("verify_compound_condition: Q must be C(n,k) x C(n,k)");
  if (!(eta > 0.0)) throw std::invalid_argument("verify_compound_condition: eta must be positive");
  const InertiaTriple iq = inertia_symmetric(qs);
  if (iq.pos != nk) throw std::invalid_argument("verify_compound_condition: Q is not positive definite");

  bool certifying = true;
  const std::vector<Matrix> verts = vertices_or_samples(model, box, certifying);
  VerificationReport rep;
  rep.certifying = certifying;
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_v = 0;
  for (std::size_t v = 0; v < verts.size(); ++v) {
    const Matrix c = additive_compound(verts[v], k);
    const Matrix m = qs * c + c.transpose() * qs + eta * Matrix::Identity(nk, nk);
    const double l = max_eig_sym(symmetrize(m));
    if (l > worst) {
      worst = l;
      worst_v = v;
    }
  }
  const double bound = slack * spectral_norm(qs);
  std::ostringstream det;
  det << "eta = " << eta << ", ||Q|| = " << spectral_norm(qs) << ", vertices = " << verts.size();
  rep.add({vertex_label("compound inequality", worst_v, certifying), worst, bound, worst <= bound, det.str()});
  if (worst > bound) {
    std::ostringstream os;
    os << "compound inequality fails at vertex " << worst_v << " (margin " << worst << ")";
    rep.diagnostics = os.str();
  }
  rep.finalize();
  return rep;
}

NlGainResult synthesize_nl_gain(const NonlinearModel& model, const Box& box, const Matrix& w0_in,
                                const Matrix& w1_in, double mu0, double mu1, const Matrix& b, int k) {
  check_dims(model, box, w0_in, "synthesize_nl_gain(W0)");
  check_dims(model, box, w1_in, "synthesize_nl_gain(W1)");
  const int n = model.dim;
  if (b.rows() != n) throw std::invalid_argument("synthesize_nl_gain: B must have n rows");
  if (k < 1 || k > n) throw std::invalid_argument("synthesize_nl_gain: k out of range");
  const Matrix w0 = symmetrize(w0_in);
  const Matrix w1 = symmetrize(w1_in);
  const InertiaTriple in0 = inertia_symmetric(w0);
  const InertiaTriple in1 = inertia_symmetric(w1);
  if (!(in0 == InertiaTriple{0, 0, n}))
    throw std::invalid_argument("synthesize_nl_gain: W0 inertia " + to_string(in0) + " is not positive definite");
  if (!(in1 == InertiaTriple{k - 1, 0, n - k + 1}))
    throw std::invalid_argument("synthesize_nl_gain: W1 inertia " + to_string(in1) + ", want " +
                                to_string(InertiaTriple{k - 1, 0, n - k + 1}));

  const Matrix w0i = w0.inverse();
  const Matrix w1i = w1.inverse();
  NlGainResult r;
  r.K = 0.5 * b.transpose() * (w0i + w1i);

  const Matrix bbt = b * b.transpose();
  const Matrix m = Matrix::Identity(n, n) - 0.5 * bbt * w1i;
  const Eigen::LLT<Matrix> llt(w0);
  const Matrix l = llt.matrixL();
  const Matrix lml = l.triangularView<Eigen::Lower>().solve(m * l);
  const double s = spectral_norm(lml);
  r.omega_bar = std::max(s * s - 1.0, 0.0) + 1e-9;
  r.omega = (k - 1) * r.omega_bar;

  const std::vector<Matrix> verts = envelope_vertices(model, box);
  std::vector<double> ma(verts.size());
  std::vector<double> mb(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v) {
    const Matrix& j = verts[v];
    ma[v] = max_eig_sym(symmetrize(w0 * j.transpose() + j * w0 - bbt - 2.0 * mu0 * w0));
    const Matrix jcl = j - 0.5 * bbt * w0i;
    mb[v] = max_eig_sym(symmetrize(w1 * jcl.transpose() + jcl * w1 - bbt - 2.0 * mu1 * w1));
  }
  std::size_t va = 0;
  std::size_t vb = 0;
  for (std::size_t v = 1; v < verts.size(); ++v) {
    if (ma[v] > ma[va]) va = v;
    if (mb[v] > mb[vb]) vb = v;
  }
  std::ostringstream diag;
  r.report.add({vertex_label("W0 inequality", va, true), ma[va], 0.0, ma[va] < 0.0, ""});
  r.report.add({vertex_label("W1 closed-loop inequality", vb, true), mb[vb], 0.0, mb[vb] < 0.0, ""});
  const double budget = (k - 1) * mu0 + mu1 + r.omega;
  std::ostringstream det;
  det << "omega = " << r.omega << ", omega_bar = " << r.omega_bar;
  r.report.add({"rate sum (k-1) mu0 + mu1 + omega", budget, 0.0, budget < 0.0, det.str()});
  if (!(ma[va] < 0.0)) diag << "W0 inequality fails at vertex " << va << " (margin " << ma[va] << "); ";
  if (!(mb[vb] < 0.0)) diag << "W1 closed-loop inequality fails at vertex " << vb << " (margin " << mb[vb] << "); ";
  if (!(budget < 0.0)) diag << "rate sum " << budget << " >= 0; ";
  r.report.diagnostics = diag.str();
  r.report.finalize();
  r.certified = r.report.accept;
  if (!(ma[va] < 0.0) || !(mb[vb] < 0.0)) {
    throw GainConditionError("synthesize_nl_gain: " + r.report.diagnostics, r);
  }
  return r;
}

}  // namespace kc

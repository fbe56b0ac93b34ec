#include "cli.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "io.hpp"
#include "version.hpp"

namespace ripsel::cli {

namespace {

struct Options {
  std::string matrix;
  std::string weights;
  bool normalize = false;
  std::string points;
  std::string decomp;
  std::string cert;
  std::string out;
  double eps = std::nan("");
  std::optional<double> lambda;
  std::optional<double> eta;
  std::optional<double> delta;
  std::optional<double> d;
  bool optimize = false;
  bool direct = false;
  double tol = 1e-7;
  Index max_iter = 100000;
  std::string kind;
  Index rows = 0;
  Index cols = 0;
  std::uint64_t seed = 0;
};

void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must lie in (0,1)");
}

// Returns the weights and the mode name recorded in the certificate.
std::pair<DiagonalWeights, std::string> resolve_weights(const Options& o, const DenseMatrix& u) {
  if (!o.weights.empty() && o.normalize) throw InvalidInput("--weights and --normalize are mutually exclusive");
  if (o.normalize) return {DiagonalWeights::column_norms(u), "column-norms"};
  if (o.weights.empty()) return {DiagonalWeights::identity(u.cols()), "identity"};
  const DenseMatrix w = load_matrix(o.weights);
  if (w.rows() != 1 && w.cols() != 1) throw InvalidInput("weights: expected a single row or column");
  Vector a = w.values().reshaped();
  if (a.size() != u.cols()) {
    throw InvalidInput("weights: expected " + std::to_string(u.cols()) + " entries, got " + std::to_string(a.size()));
  }
  return {DiagonalWeights(std::move(a)), "file"};
}

void emit(const Options& o, const Json& j, std::ostream& out) {
  if (o.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_json(o.out, j);
    out << "certificate written to " << o.out << "\n";
  }
}

std::string join_sigma(const std::vector<Index>& sigma) {
  std::string s;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (i > 0) s += ' ';
    s += std::to_string(sigma[i] + 1);
  }
  return s;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& out) {
  for (const auto& w : warnings) out << "warning: " << w << "\n";
}

JohnDecomposition load_decomposition(const Options& o) {
  if (!o.decomp.empty() && !o.points.empty()) throw InvalidInput("--decomp and --points are mutually exclusive");
  if (!o.decomp.empty()) return decomposition_from_json(read_json(o.decomp));
  if (o.points.empty()) throw InvalidInput("one of --decomp or --points is required");
  const PointSet ps = PointSet::from_rows(load_matrix(o.points).values());
  return whiten_decomposition(mvee(ps, o.tol, o.max_iter), ps);
}

Json envelope(std::string kind, const std::vector<Index>& sigma, Index k, double claimed, double achieved, Json params,
              Json trace, const std::vector<std::string>& warnings) {
  Json j;
  j["kind"] = std::move(kind);
  Json s = Json::array();
  for (Index i : sigma) s.push_back(i + 1);
  j["sigma"] = std::move(s);
  j["k"] = k;
  j["claimed_bound"] = claimed;
  j["achieved"] = achieved;
  j["params"] = std::move(params);
  j["trace"] = std::move(trace);
  j["warnings"] = warnings;
  j["tool_version"] = kToolVersion;
  return j;
}

int cmd_ri(const Options& o, std::ostream& out) {
  require_eps(o.eps);
  const DenseMatrix u = load_matrix(o.matrix);
  const auto [w, mode] = resolve_weights(o, u);
  const SelectionCertificate cert = ri_select(u, w, o.eps);
  Json j = certificate_to_json(cert);
  j["params"]["weights"] = mode;
  out << "restricted invertibility: n = " << u.rows() << ", m = " << u.cols() << ", eps = " << o.eps << "\n"
      << "  sigma (" << cert.sigma.size() << "): " << join_sigma(cert.sigma) << "\n"
      << "  s_min = " << format_double(cert.achieved) << " >= bound " << format_double(cert.claimed_bound) << "\n";
  print_warnings(cert.warnings, out);
  emit(o, j, out);
  return kSuccess;
}

int cmd_kt(const Options& o, std::ostream& out) {
  const DenseMatrix u = load_matrix(o.matrix);
  if (!o.lambda) throw InvalidInput("--lambda is required");
  const SelectionCertificate cert = kt_select(u, *o.lambda, o.eta, o.delta.value_or(1.0));
  out << "norm-bounded selection: n = " << u.rows() << ", m = " << u.cols() << ", lambda = " << *o.lambda
      << ", eta = " << cert.params.eta << "\n"
      << "  sigma (" << cert.sigma.size() << "): " << join_sigma(cert.sigma) << "\n"
      << "  |U_sigma| = " << format_double(cert.achieved) << " <= bound " << format_double(cert.claimed_bound) << "\n";
  print_warnings(cert.warnings, out);
  emit(o, certificate_to_json(cert), out);
  return kSuccess;
}

int cmd_mvee(const Options& o, std::ostream& out) {
  const PointSet ps = PointSet::from_rows(load_matrix(o.points).values());
  const MveeResult res = mvee(ps, o.tol, o.max_iter);
  const JohnDecomposition d = whiten_decomposition(res, ps);
  const DecompositionReport rep = validate_decomposition(d);
  Json j = decomposition_to_json(d);
  Json info;
  info["iterations"] = res.iterations;
  info["final_gap"] = res.final_gap;
  Json contacts = Json::array();
  for (Index c : res.contact_indices) contacts.push_back(c + 1);
  info["contact_indices"] = std::move(contacts);
  info["identity_residual"] = rep.identity_residual;
  info["trace_defect"] = rep.trace_defect;
  info["max_norm_defect"] = rep.max_norm_defect;
  j["mvee"] = std::move(info);
  out << "mvee: n = " << ps.dim << ", m = " << ps.size() << ", iterations = " << res.iterations
      << ", gap = " << format_double(res.final_gap) << "\n"
      << "  contact points: " << d.size() << ", identity residual = " << format_double(rep.identity_residual) << "\n";
  emit(o, j, out);
  return kSuccess;
}

int cmd_drsym(const Options& o, std::ostream& out) {
  require_eps(o.eps);
  const JohnDecomposition d = load_decomposition(o);
  const DrSymResult r = dr_symmetric(d, o.eps);
  Json params;
  params["epsilon"] = r.epsilon;
  params["min_size"] = r.min_size;
  params["l1_distance_bound"] = r.l1_distance_bound;
  params["selection"] = certificate_to_json(r.certificate);
  const Json j = envelope("dr-symmetric", r.sigma, static_cast<Index>(r.sigma.size()), r.epsilon, r.lower_constant,
                          std::move(params), Json::array(), r.certificate.warnings);
  out << "symmetric factorization: n = " << d.dim() << ", eps = " << o.eps << "\n"
      << "  sigma (" << r.sigma.size() << "): " << join_sigma(r.sigma) << "\n"
      << "  lower constant = " << format_double(r.lower_constant) << " >= " << r.epsilon << "\n";
  print_warnings(r.certificate.warnings, out);
  emit(o, j, out);
  return kSuccess;
}

int cmd_drnonsym(const Options& o, std::ostream& out) {
  require_eps(o.eps);
  const JohnDecomposition d = load_decomposition(o);
  const DrNonsymResult r = dr_nonsymmetric(d, o.eps);
  Json groups = Json::array();
  for (const auto& g : r.groups) {
    Json grp = Json::array();
    for (Index i : g) grp.push_back(i + 1);
    groups.push_back(std::move(grp));
  }
  Json sigma1 = Json::array();
  for (Index i : r.sigma1) sigma1.push_back(i + 1);
  Json params;
  params["epsilon"] = r.epsilon;
  params["sigma1"] = std::move(sigma1);
  params["groups"] = std::move(groups);
  params["rank_p"] = r.rank_p;
  params["rank_p2"] = r.rank_p2;
  params["first_pass_smin"] = r.first_pass_smin;
  params["second_pass_smin"] = r.second_pass_smin;
  params["chain_constant"] = r.chain_constant;
  params["nominal_lower"] = r.nominal_lower;
  params["upper_group_bound"] = r.upper_group_bound;
  params["nominal_upper"] = r.nominal_upper;
  params["group_size_cap"] = r.group_size_cap;
  params["max_group_residual"] = r.max_group_residual;
  params["idempotence_residual"] = r.idempotence_residual;
  params["second_pass_capped"] = r.second_pass_capped;
  params["size_below_nominal"] = r.size_below_nominal;
  params["projected_l1_distance_bound"] = r.projected_l1_distance_bound;
  params["first_pass"] = certificate_to_json(r.first_pass);
  params["second_pass"] = certificate_to_json(r.second_pass);
  const Json j = envelope("dr-nonsymmetric", r.sigma, static_cast<Index>(r.sigma.size()), r.chain_constant,
                          r.lower_constant, std::move(params), Json::array(), r.warnings);
  out << "nonsymmetric factorization: n = " << d.dim() << ", eps = " << o.eps << "\n"
      << "  sigma (" << r.sigma.size() << "): " << join_sigma(r.sigma) << "\n"
      << "  rank P = " << r.rank_p << ", groups = " << r.groups.size() << ", max |A_l| - 1 = " << r.upper_group_bound
      << "\n"
      << "  lower constant = " << format_double(r.lower_constant) << " (chain " << format_double(r.chain_constant)
      << ", nominal " << format_double(r.nominal_lower) << ")\n";
  print_warnings(r.warnings, out);
  emit(o, j, out);
  return kSuccess;
}

int cmd_cube(const Options& o, std::ostream& out) {
  const JohnDecomposition d = load_decomposition(o);
  std::optional<double> eps;
  if (!std::isnan(o.eps)) {
    require_eps(o.eps);
    eps = o.eps;
  }
  if (o.optimize && eps) throw InvalidInput("--eps and --optimize-eps are mutually exclusive");
  SizeConvention conv = o.direct ? SizeConvention::Direct : SizeConvention::TwoEpsilon;
  if (o.optimize) {
    eps = optimize_eps(d.dim());
    conv = SizeConvention::Direct;
  }
  const CubeBasisResult r = cube_basis(d, eps, o.d, conv);
  Json t = Json::array();
  for (Index i = 0; i < r.t.rows(); ++i) {
    const Vector row = r.t.row(i).transpose();
    t.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  Json params;
  params["epsilon"] = r.epsilon;
  params["selector_epsilon"] = r.selector_epsilon;
  params["convention"] = r.convention == SizeConvention::TwoEpsilon ? "two-epsilon" : "direct";
  params["d"] = r.d;
  params["achieved_smin"] = r.achieved_smin;
  params["c_low"] = r.c_low;
  params["one_ellipsoid_bound"] = r.one_ellipsoid_bound;
  params["t"] = std::move(t);
  params["selection"] = certificate_to_json(r.selection.certificate);
  const Json j = envelope("cube-basis", r.sigma, r.k, r.claimed_bound, 1.0 / r.c_low, std::move(params), Json::array(),
                          r.selection.certificate.warnings);
  out << "cube basis: n = " << d.dim() << ", eps = " << format_double(r.epsilon) << ", d = " << format_double(r.d)
      << ", k = " << r.k << "\n"
      << "  c_low = " << format_double(r.c_low) << ", distance certificate 1/c_low = " << format_double(1.0 / r.c_low)
      << " (one-ellipsoid bound " << format_double(r.one_ellipsoid_bound) << ")\n";
  emit(o, j, out);
  return kSuccess;
}

int cmd_verify(const Options& o, std::ostream& out) {
  const Json j = read_json(o.cert);
  const SelectionCertificate cert = certificate_from_json(j);
  const DenseMatrix u = load_matrix(o.matrix);
  VerificationReport rep;
  if (cert.kind == SelectionKind::RestrictedInvertibility) {
    Options wo = o;
    const std::string mode = j.at("params").value("weights", std::string("identity"));
    if (o.weights.empty() && !o.normalize) {
      if (mode == "column-norms") wo.normalize = true;
      if (mode == "file") throw InvalidInput("certificate was produced with a weights file; pass --weights");
    }
    rep = verify_ri(u, resolve_weights(wo, u).first, cert);
  } else {
    rep = verify_kt(u, cert);
  }
  out << "verify " << to_string(rep.kind) << "\n";
  for (const auto& c : rep.clauses) {
    out << "  " << (c.pass ? "PASS " : "FAIL ");
    if (c.detail.empty()) {
      out << c.name;
    } else {
      out << std::left << std::setw(18) << c.name << " " << c.detail;
    }
    out << "\n";
  }
  out << (rep.passed() ? "certificate verified" : "certificate REJECTED") << "\n";
  return rep.passed() ? kSuccess : kVerificationFailed;
}

int cmd_gen(const Options& o, std::ostream& out) {
  if (o.out.empty()) throw InvalidInput("--out is required");
  if (o.kind == "gaussian") {
    if (o.rows < 1 || o.cols < 1) throw InvalidInput("gaussian needs --rows and --cols >= 1");
    save_matrix(o.out, gaussian_matrix(o.rows, o.cols, o.seed).values());
  } else if (o.kind == "random-polytope") {
    if (o.rows < 1 || o.cols < 1) throw InvalidInput("random-polytope needs --rows (dimension) and --cols (points)");
    const PointSet ps = random_symmetric_body(o.rows, o.cols, o.seed);
    save_matrix(o.out, ps.as_columns().transpose());
  } else if (o.kind == "cross-polytope") {
    if (o.rows < 1) throw InvalidInput("cross-polytope needs --rows (dimension) >= 1");
    write_json(o.out, decomposition_to_json(cross_polytope_decomposition(o.rows)));
  } else if (o.kind == "simplex") {
    if (o.rows < 1) throw InvalidInput("simplex needs --rows (dimension) >= 1");
    write_json(o.out, decomposition_to_json(regular_simplex_decomposition(o.rows)));
  } else {
    throw InvalidInput("unknown --kind '" + o.kind + "'");
  }
  out << "wrote " << o.kind << " to " << o.out << "\n";
  return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Barrier-potential column selection with certificates"};
  app.name(args.empty() ? "ripsel" : args.front());
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Options o;
  std::function<int(const Options&, std::ostream&)> handler;
  auto bind = [&](CLI::App* sub, auto fn) { sub->callback([&handler, fn] { handler = fn; }); };

  auto* ri = app.add_subcommand("ri", "restricted-invertibility selection");
  ri->add_option("--matrix", o.matrix, "CSV matrix U (n x m)")->required();
  ri->add_option("--weights", o.weights, "CSV weights alpha_j (one row or column)");
  ri->add_flag("--normalize", o.normalize, "use alpha_j = |U e_j|");
  ri->add_option("--eps", o.eps, "epsilon in (0,1)")->required();
  ri->add_option("--out", o.out, "certificate JSON path");
  bind(ri, cmd_ri);

  auto* kt = app.add_subcommand("kt", "norm-bounded column selection");
  kt->add_option("--matrix", o.matrix, "CSV matrix U (n x m)")->required();
  kt->add_option("--lambda", o.lambda, "fraction in [1/m, 1)")->required();
  kt->add_option("--eta", o.eta, "eta in [lambda, 1); defaults to lambda");
  kt->add_option("--delta", o.delta, "barrier step scale (default 1)");
  kt->add_option("--out", o.out, "certificate JSON path");
  bind(kt, cmd_kt);

  auto* mv = app.add_subcommand("mvee", "John position of a symmetric point set");
  mv->add_option("--points", o.points, "CSV point set, one point per row")->required();
  mv->add_option("--tol", o.tol, "MVEE tolerance");
  mv->add_option("--max-iter", o.max_iter, "iteration cap");
  mv->add_option("--out", o.out, "decomposition JSON path");
  bind(mv, cmd_mvee);

  auto add_body = [&](CLI::App* sub) {
    sub->add_option("--decomp", o.decomp, "decomposition JSON");
    sub->add_option("--points", o.points, "CSV point set (symmetric body, run through mvee)");
    sub->add_option("--tol", o.tol, "MVEE tolerance when --points is given");
    sub->add_option("--out", o.out, "certificate JSON path");
  };

  auto* ds = app.add_subcommand("drsym", "symmetric proportional factorization");
  add_body(ds);
  ds->add_option("--eps", o.eps, "epsilon in (0,1)")->required();
  bind(ds, cmd_drsym);

  auto* dn = app.add_subcommand("drnonsym", "nonsymmetric proportional factorization");
  add_body(dn);
  dn->add_option("--eps", o.eps, "epsilon in (0,1)")->required();
  bind(dn, cmd_drnonsym);

  auto* cb = app.add_subcommand("cube", "basis certifying the distance to the cube");
  add_body(cb);
  cb->add_option("--eps", o.eps, "epsilon in (0,1); default (sqrt(2) d)^(-2/3)");
  cb->add_option("--d", o.d, "ellipsoid ratio d >= 1; default sqrt(n)");
  cb->add_flag("--optimize-eps", o.optimize, "solve for eps instead of using the default");
  cb->add_flag("--direct", o.direct, "select at eps itself rather than the (1-2 eps) n size rule");
  bind(cb, cmd_cube);

  auto* vf = app.add_subcommand("verify", "re-verify a selection certificate");
  vf->add_option("--cert", o.cert, "certificate JSON")->required();
  vf->add_option("--matrix", o.matrix, "CSV matrix U the certificate refers to")->required();
  vf->add_option("--weights", o.weights, "CSV weights (restricted-invertibility certificates)");
  vf->add_flag("--normalize", o.normalize, "use alpha_j = |U e_j|");
  bind(vf, cmd_verify);

  auto* gen = app.add_subcommand("gen", "generate seeded instances");
  gen->add_option("--kind", o.kind, "gaussian | random-polytope | cross-polytope | simplex")
      ->required()
      ->check(CLI::IsMember({"gaussian", "random-polytope", "cross-polytope", "simplex"}));
  gen->add_option("--rows", o.rows, "rows (gaussian) or dimension");
  gen->add_option("--cols", o.cols, "columns (gaussian) or number of points");
  gen->add_option("--seed", o.seed, "RNG seed");
  gen->add_option("--out", o.out, "output path")->required();
  bind(gen, cmd_gen);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kValidationError;
  }

  try {
    return handler(o, out);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const Json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kValidationError;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

} // namespace ripsel::cli

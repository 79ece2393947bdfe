// Command-line front end: eval, descend, flow, hessian, kite-map, certify, lagrange.
// Exit status: 0 success (or CC found), 1 negative result, 2 usage or input error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "twistcc/twistcc.hpp"

#ifndef TWISTCC_VERSION
#define TWISTCC_VERSION "dev"
#endif

namespace {

using namespace twistcc;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;
constexpr int kExitInput = 2;

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InputError(what + ": not a number: '" + s + "'");
  }
  if (used != s.size()) throw InputError(what + ": not a number: '" + s + "'");
  return v;
}

GridAxis parse_axis(const std::string& s, const std::string& what) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw InputError(what + " expects lo:hi:n, got '" + s + "'");
  const double lo = parse_number(parts[0], what);
  const double hi = parse_number(parts[1], what);
  const double n = parse_number(parts[2], what);
  if (!(hi > lo) || n < 1 || n != std::floor(n)) throw InputError(what + " needs lo < hi and integer n >= 1");
  return {lo, hi, static_cast<std::size_t>(n)};
}

Interval parse_range(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw InputError(what + " expects a,b, got '" + s + "'");
  const double a = parse_number(parts[0], what);
  const double b = parse_number(parts[1], what);
  if (!(b >= a)) throw InputError(what + " needs a <= b");
  return {a, b};
}

/// "i,j" or "i,j:c" with 1-based bodies.
std::pair<TwistIndex, double> parse_pair_term(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.empty() || parts.size() > 2) throw InputError("--pair expects i,j[:c], got '" + s + "'");
  const auto ij = split(parts[0], ',');
  if (ij.size() != 2) throw InputError("--pair expects i,j[:c], got '" + s + "'");
  const double i = parse_number(ij[0], "--pair");
  const double j = parse_number(ij[1], "--pair");
  if (i < 1 || j < 1 || i != std::floor(i) || j != std::floor(j))
    throw InputError("--pair bodies are 1-based integers, got '" + s + "'");
  const double c = parts.size() == 2 ? parse_number(parts[1], "--pair coefficient") : 1.0;
  return {TwistIndex::one_based(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), c};
}

/// Writes text to a file atomically, or to stdout when the path is empty.
void emit(const std::string& path, const std::string& text, RunManifest& manifest) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  atomic_write(path, text);
  manifest.outputs.push_back(path);
}

struct Common {
  std::string manifest_path;
  std::optional<double> A;
};

void finish(RunManifest& m, const Common& common) {
  std::string path = common.manifest_path;
  if (path.empty())
    path = m.outputs.empty() ? "twistcc-" + m.subcommand + ".manifest.json" : m.outputs.front() + ".manifest.json";
  m.version = TWISTCC_VERSION;
  m.write(path);
}

ConfigFile load(const std::string& path, const Common& common, RunManifest& m) {
  ConfigFile f = read_config(path);
  if (common.A) f.params.A = *common.A;
  m.inputs["config"] = path;
  m.inputs["A"] = f.params.A;
  return f;
}

std::string trajectory_csv(const Trajectory& tr, const PotentialParams& params) {
  const std::size_t n = static_cast<std::size_t>(tr.masses.size());
  std::vector<std::string> header = {"step"};
  for (std::size_t i = 1; i <= n; ++i) {
    header.push_back("x" + std::to_string(i));
    header.push_back("y" + std::to_string(i));
  }
  header.push_back("I");
  header.push_back("f");
  CsvTable t(header);
  for (std::size_t s = 0; s < tr.states.size(); ++s) {
    const PlanarConfig c = tr.config_at(s);
    std::vector<std::string> row = {std::to_string(tr.steps[s])};
    for (Eigen::Index k = 0; k < tr.states[s].size(); ++k) row.push_back(fmt(tr.states[s][k]));
    row.push_back(fmt(moment_of_inertia(c)));
    row.push_back(fmt(f_value(c, params)));
    t.add_row(row);
  }
  return t.str();
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string config;
  std::string csv;
  double tol = 1e-10;
};

int cmd_eval(const EvalArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "eval";
  const ConfigFile f = load(a.config, common, m);
  m.tolerances["is_cc"] = a.tol;
  const auto& c = f.config;
  const auto table = build_pair_table(c, f.params);
  const auto masses = c.mass_span();
  CsvTable t({"i", "j", "LA", "b_ij", "b_ji", "g_ij"});
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double bij = albouy_chenciner_asym<double>(table, masses, i, j);
      const double bji = albouy_chenciner_asym<double>(table, masses, j, i);
      t.add_row({std::to_string(i + 1), std::to_string(j + 1), fmt(laura_andoyer<double>(table, masses, i, j)),
                 fmt(bij), fmt(bji), fmt(bij + bji)});
    }
  }
  const CcResidual r = cc_residual(c, f.params, a.tol);
  std::ostringstream summary;
  summary << "f = " << fmt(f_value(c, f.params)) << "\n"
          << "U = " << fmt(potential_U(c, f.params)) << "\n"
          << "I = " << fmt(moment_of_inertia(c)) << "\n"
          << "euler_residual = " << fmt(euler_residual(c, f.params)) << "\n"
          << "max_LA_normalized = " << fmt(r.max_la) << "\n"
          << "max_b_normalized = " << fmt(r.max_b) << "\n"
          << "is_cc = " << (r.is_cc ? "true" : "false") << "\n";
  if (a.csv.empty()) {
    std::cout << summary.str() << t.str();
  } else {
    std::cout << summary.str();
    emit(a.csv, t.str(), m);
  }
  finish(m, common);
  return r.is_cc ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------

struct DescendArgs {
  std::string config;
  std::optional<unsigned long long> seed;
  std::size_t bodies = 4;
  std::string csv;
  std::string out;
  std::string basis = "span";
  double tol = 1e-10;
  std::size_t max_iter = 20000;
  std::size_t every = 1;
};

PlanarConfig random_start(unsigned long long seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mass(0.2, 3.0);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  Eigen::VectorXd m(static_cast<Eigen::Index>(n));
  Eigen::VectorXd q(static_cast<Eigen::Index>(2 * n));
  for (Eigen::Index i = 0; i < m.size(); ++i) m[i] = mass(rng);
  for (Eigen::Index k = 0; k < q.size(); ++k) q[k] = pos(rng);
  return {q, m};
}

int cmd_descend(const DescendArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "descend";
  if (a.config.empty() && !a.seed) throw InputError("descend needs a config file or --seed");
  if (a.config.empty() && a.bodies < 2) throw InputError("--bodies must be at least 2");
  const ConfigFile f = a.config.empty() ? ConfigFile{random_start(*a.seed, a.bodies), {common.A.value_or(3.0)}}
                                        : load(a.config, common, m);
  if (a.config.empty()) {
    m.seed = *a.seed;
    m.inputs["bodies"] = a.bodies;
    m.inputs["A"] = f.params.A;
  }
  DescentOptions opt;
  opt.tol = a.tol;
  opt.max_iter = a.max_iter;
  if (a.basis == "all")
    opt.basis = BasisSelection::kAllPairs;
  else if (a.basis != "span")
    throw InputError("--basis must be span or all");
  opt.record_trajectory = true;
  opt.record_every = std::max<std::size_t>(1, a.every);
  m.tolerances["descent"] = a.tol;
  m.inputs["basis"] = a.basis;
  m.inputs["max_iter"] = a.max_iter;
  const DescentReport rep = descend(f.config, f.params, opt);
  emit(a.csv, trajectory_csv(rep.trajectory, f.params), m);
  const PlanarConfig cc = rescale_to_cc_size(rep.final_config, f.params);
  if (!a.out.empty()) {
    write_config(a.out, cc, f.params);
    m.outputs.push_back(a.out);
  }
  const CcResidual r = cc_residual(cc, f.params);
  std::ostream& info = a.csv.empty() ? std::cerr : std::cout;
  info << "converged = " << (rep.converged ? "true" : "false") << "\n"
       << "iterations = " << rep.iterations << "\n"
       << "stop_reason = " << rep.stop_reason << "\n"
       << "final_residual = " << fmt(rep.final_residual) << "\n"
       << "final_f = " << fmt(rep.final_f) << "\n"
       << "rescaled_is_cc = " << (r.is_cc ? "true" : "false") << "\n";
  finish(m, common);
  return rep.converged ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------

struct FlowArgs {
  std::string config;
  std::vector<std::string> pairs;
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t every = 1;
  std::string integrator = "rk4";
  std::string csv;
};

int cmd_flow(const FlowArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "flow";
  const ConfigFile f = load(a.config, common, m);
  FlowSpec spec;
  for (const auto& p : a.pairs) spec.field.push_back(parse_pair_term(p));
  spec.dt = a.dt;
  spec.steps = a.steps;
  spec.sample_every = std::max<std::size_t>(1, a.every);
  if (a.integrator == "euler")
    spec.integrator = Integrator::kEuler;
  else if (a.integrator == "midpoint")
    spec.integrator = Integrator::kMidpoint;
  else if (a.integrator != "rk4")
    throw InputError("--integrator must be euler, midpoint or rk4");
  m.inputs["pairs"] = a.pairs;
  m.inputs["dt"] = a.dt;
  m.inputs["steps"] = a.steps;
  m.inputs["integrator"] = a.integrator;
  const Trajectory tr = flow_fixed_combo(f.config, spec);
  emit(a.csv, trajectory_csv(tr, f.params), m);
  if (tr.aborted) std::cerr << "flow aborted: " << tr.abort_reason << "\n";
  finish(m, common);
  return tr.aborted ? kExitNegative : kExitOk;
}

// ---------------------------------------------------------------------------

struct HessianArgs {
  std::string config;
  std::string basis = "auto";
  bool normalized = false;
  double zero_tol = 1e-8;
  std::string csv;
};

int cmd_hessian(const HessianArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "hessian";
  const ConfigFile f = load(a.config, common, m);
  std::vector<TwistIndex> pairs;
  if (a.basis == "auto")
    pairs = twist_span_basis(f.config).basis;
  else if (a.basis == "all")
    pairs = all_pairs(f.config.size());
  else
    for (const auto& p : split(a.basis, ';')) pairs.push_back(parse_pair_term(p).first);
  m.inputs["basis"] = a.basis;
  m.inputs["normalized"] = a.normalized;
  m.tolerances["zero_tol"] = a.zero_tol;
  const TwistMatrix h = assemble_twist_hessian(f.config, f.params, single_directions(pairs), a.normalized);
  const Eigen::VectorXd ev = symmetric_eigenvalues(h.values);
  std::vector<std::string> header = {"direction"};
  for (const auto& d : h.directions) header.push_back((a.normalized ? "vt" : "v") + d.label);
  header.push_back("eigenvalue");
  CsvTable t(header);
  for (Eigen::Index r = 0; r < h.values.rows(); ++r) {
    std::vector<std::string> row = {(a.normalized ? "vt" : "v") + h.directions[static_cast<std::size_t>(r)].label};
    for (Eigen::Index c = 0; c < h.values.cols(); ++c) row.push_back(fmt(h.values(r, c)));
    row.push_back(fmt(ev[r]));
    t.add_row(row);
  }
  emit(a.csv, t.str(), m);
  const MorseCounts mc = count_signs(ev, a.zero_tol);
  (a.csv.empty() ? std::cerr : std::cout) << "negative = " << mc.negative << "\nzero = " << mc.zero
                                          << "\npositive = " << mc.positive << "\n";
  finish(m, common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct KiteMapArgs {
  std::string z3 = "1:2.2:200";
  std::string z4 = "0:0.9:200";
  std::string csv;
  std::string pgm;
  unsigned threads = 0;
  double zero_tol = 1e-6;
};

int cmd_kite_map(const KiteMapArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "kite-map";
  const GridAxis z3 = parse_axis(a.z3, "--z3");
  const GridAxis z4 = parse_axis(a.z4, "--z4");
  const PotentialParams params{common.A.value_or(3.0)};
  m.inputs["z3"] = a.z3;
  m.inputs["z4"] = a.z4;
  m.inputs["A"] = params.A;
  m.tolerances["rotational_zero_tol"] = a.zero_tol;
  KiteMapOptions opt;
  opt.threads = a.threads;
  opt.rotational_zero_tol = a.zero_tol;
  const auto cells = kite_index_map(z3, z4, params, opt);
  CsvTable t({"z3", "z4", "class", "mu31", "mu41", "x2", "idx_Hs", "idx_Ha", "idx_total", "degenerate_flag",
              "which_block_changed"});
  for (const auto& c : cells) {
    const bool v = c.valid();
    t.add_row({fmt(c.z3), fmt(c.z4), to_string(c.cls), v ? fmt(c.mu31) : "", v ? fmt(c.mu41) : "",
               v ? fmt(c.x2) : "", v ? std::to_string(c.idx_hs) : "", v ? std::to_string(c.idx_ha) : "",
               v ? std::to_string(c.idx_total) : "", c.degenerate ? "1" : "0", c.which_block_changed});
  }
  emit(a.csv, t.str(), m);
  if (!a.pgm.empty()) {
    atomic_write(a.pgm, pgm_bytes(z3.n, z4.n, index_map_gray(cells)));
    m.outputs.push_back(a.pgm);
  }
  std::ostream& info = a.csv.empty() ? std::cerr : std::cout;
  info << "observed_indices =";
  for (int v : observed_indices(cells)) info << " " << v;
  info << "\n";
  finish(m, common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string z3;
  std::string z4;
  std::size_t subdivide = 1;
  unsigned threads = 0;
  std::string csv;
};

int cmd_certify(const CertifyArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "certify";
  const ShapeBox box{parse_range(a.z3, "--z3"), parse_range(a.z4, "--z4")};
  const PotentialParams params{common.A.value_or(3.0)};
  if (a.subdivide == 0) throw InputError("--subdivide must be at least 1");
  m.inputs["z3"] = a.z3;
  m.inputs["z4"] = a.z4;
  m.inputs["A"] = params.A;
  m.inputs["subdivide"] = a.subdivide;
  const CertificationSweep sweep = certify_sweep(box, a.subdivide, params, a.threads);
  CsvTable t({"z3_lo", "z3_hi", "z4_lo", "z4_hi", "class", "x2_lo", "x2_hi", "Hs", "Ha", "total", "Hs_certificate",
              "Ha_certificate"});
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
  };
  for (const auto& b : sweep.boxes) {
    const auto total = b.total();
    t.add_row({fmt(b.box.z3.lo()), fmt(b.box.z3.hi()), fmt(b.box.z4.lo()), fmt(b.box.z4.hi()), to_string(b.cls),
               b.x2 ? fmt(b.x2->lo()) : "", b.x2 ? fmt(b.x2->hi()) : "", b.hs.value_string(), b.ha.value_string(),
               total ? std::to_string(*total) : "Unknown", quote(b.hs.certificate), quote(b.ha.certificate)});
  }
  emit(a.csv, t.str(), m);
  (a.csv.empty() ? std::cerr : std::cout) << "coverage = " << fmt(sweep.coverage) << " (" << sweep.decided << "/"
                                          << sweep.boxes.size() << ")\n";
  finish(m, common);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct LagrangeArgs {
  std::string masses = "1,1,1";
  std::string csv;
};

int cmd_lagrange(const LagrangeArgs& a, const Common& common) {
  RunManifest m;
  m.subcommand = "lagrange";
  const auto parts = split(a.masses, ',');
  if (parts.size() != 3) throw InputError("--masses expects m1,m2,m3");
  const double m1 = parse_number(parts[0], "--masses");
  const double m2 = parse_number(parts[1], "--masses");
  const double m3 = parse_number(parts[2], "--masses");
  const PotentialParams params{common.A.value_or(3.0)};
  m.inputs["masses"] = a.masses;
  m.inputs["A"] = params.A;
  PlanarConfig tri = rescale_to_cc_size(lagrange_triangle(m1, m2, m3), params);
  const std::vector<TwistIndex> pairs = {TwistIndex(0, 1), TwistIndex(0, 2), TwistIndex(1, 2)};
  const TwistMatrix h = assemble_twist_hessian(tri, params, single_directions(pairs), true);
  const Eigen::Matrix3d closed = lagrange_hessian_closed_form(m1, m2, m3, params.A);
  const Eigen::VectorXd ev = symmetric_eigenvalues(h.values);
  CsvTable t({"row", "assembled_1", "assembled_2", "assembled_3", "closed_1", "closed_2", "closed_3", "eigenvalue"});
  for (Eigen::Index r = 0; r < 3; ++r)
    t.add_row({"vt" + pairs[static_cast<std::size_t>(r)].label(), fmt(h.values(r, 0)), fmt(h.values(r, 1)),
               fmt(h.values(r, 2)), fmt(closed(r, 0)), fmt(closed(r, 1)), fmt(closed(r, 2)), fmt(ev[r])});
  emit(a.csv, t.str(), m);
  const LagrangeCharPoly p = lagrange_char_poly_coeffs(m1, m2, m3);
  const auto [lo, hi] = p.roots();
  (a.csv.empty() ? std::cerr : std::cout) << "char_poly a0 = " << fmt(p.a0) << " a1 = " << fmt(p.a1)
                                          << " a2 = " << fmt(p.a2) << "\nroots = " << fmt(lo) << " " << fmt(hi)
                                          << "\n";
  finish(m, common);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar central configurations: twist-basis residuals, Hessians, kite maps, certification"};
  app.set_version_flag("--version", TWISTCC_VERSION);
  app.require_subcommand(1);
  Common common;
  app.add_option("--manifest", common.manifest_path, "Manifest path (default: next to the first output)");

  auto add_A = [&](CLI::App* sub) { sub->add_option("--A", common.A, "Potential exponent (overrides the config)"); };

  EvalArgs eval;
  auto* s_eval = app.add_subcommand("eval", "Laura-Andoyer and Albouy-Chenciner residuals of a config");
  s_eval->add_option("config", eval.config, "Config JSON")->required();
  s_eval->add_option("--csv", eval.csv, "Residual CSV path");
  s_eval->add_option("--tol", eval.tol, "Normalized residual tolerance")->capture_default_str();
  add_A(s_eval);

  DescendArgs desc;
  auto* s_desc = app.add_subcommand("descend", "Twist-basis gradient descent to a central configuration");
  s_desc->add_option("config", desc.config, "Config JSON");
  s_desc->add_option("--seed", desc.seed, "Random start seed (when no config is given)");
  s_desc->add_option("--bodies", desc.bodies, "Bodies in a random start")->capture_default_str();
  s_desc->add_option("--csv", desc.csv, "Trajectory CSV path");
  s_desc->add_option("--out", desc.out, "Rescaled final config JSON");
  s_desc->add_option("--basis", desc.basis, "span or all")->capture_default_str();
  s_desc->add_option("--tol", desc.tol, "Normalized max |LA| tolerance")->capture_default_str();
  s_desc->add_option("--max-iter", desc.max_iter)->capture_default_str();
  s_desc->add_option("--every", desc.every, "Record every k-th iterate")->capture_default_str();
  add_A(s_desc);

  FlowArgs flow;
  auto* s_flow = app.add_subcommand("flow", "Integrate a fixed combination of twist vectors");
  s_flow->add_option("config", flow.config, "Config JSON")->required();
  s_flow->add_option("--pair", flow.pairs, "Term i,j[:c], 1-based, repeatable")->required();
  s_flow->add_option("--dt", flow.dt)->capture_default_str();
  s_flow->add_option("--steps", flow.steps)->capture_default_str();
  s_flow->add_option("--every", flow.every, "Sample every k-th step")->capture_default_str();
  s_flow->add_option("--integrator", flow.integrator, "euler, midpoint or rk4")->capture_default_str();
  s_flow->add_option("--csv", flow.csv, "Trajectory CSV path");
  add_A(s_flow);

  HessianArgs hess;
  auto* s_hess = app.add_subcommand("hessian", "Hessian of f in a twist basis");
  s_hess->add_option("config", hess.config, "Config JSON")->required();
  s_hess->add_option("--basis", hess.basis, "auto, all, or pairs like '1,2;1,3'")->capture_default_str();
  s_hess->add_flag("--normalized", hess.normalized, "Use normalized twists");
  s_hess->add_option("--zero-tol", hess.zero_tol, "Relative zero threshold")->capture_default_str();
  s_hess->add_option("--csv", hess.csv, "Matrix CSV path");
  add_A(s_hess);

  KiteMapArgs kmap;
  auto* s_map = app.add_subcommand("kite-map", "Morse index map of concave kites");
  s_map->add_option("--z3", kmap.z3, "lo:hi:n")->capture_default_str();
  s_map->add_option("--z4", kmap.z4, "lo:hi:n")->capture_default_str();
  s_map->add_option("--csv", kmap.csv, "Cell CSV path");
  s_map->add_option("--pgm", kmap.pgm, "Raster path");
  s_map->add_option("--threads", kmap.threads, "0: hardware concurrency")->capture_default_str();
  s_map->add_option("--zero-tol", kmap.zero_tol, "Rotational zero tolerance")->capture_default_str();
  add_A(s_map);

  CertifyArgs cert;
  auto* s_cert = app.add_subcommand("certify", "Interval certification of kite indices on boxes");
  s_cert->add_option("--z3", cert.z3, "a,b")->required();
  s_cert->add_option("--z4", cert.z4, "c,d")->required();
  s_cert->add_option("--subdivide", cert.subdivide, "k x k sub-boxes")->capture_default_str();
  s_cert->add_option("--threads", cert.threads, "0: hardware concurrency")->capture_default_str();
  s_cert->add_option("--csv", cert.csv, "Certificate CSV path");
  add_A(s_cert);

  LagrangeArgs lag;
  auto* s_lag = app.add_subcommand("lagrange", "Lagrange triangle Hessian: assembled vs closed form");
  s_lag->add_option("--masses", lag.masses, "m1,m2,m3")->capture_default_str();
  s_lag->add_option("--csv", lag.csv, "Matrix CSV path");
  add_A(s_lag);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitInput;
  }

  try {
    if (*s_eval) return cmd_eval(eval, common);
    if (*s_desc) return cmd_descend(desc, common);
    if (*s_flow) return cmd_flow(flow, common);
    if (*s_hess) return cmd_hessian(hess, common);
    if (*s_map) return cmd_kite_map(kmap, common);
    if (*s_cert) return cmd_certify(cert, common);
    if (*s_lag) return cmd_lagrange(lag, common);
  } catch (const twistcc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

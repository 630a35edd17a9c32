#include "diraclap/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "diraclap/clifford.hpp"
#include "diraclap/highenergy.hpp"
#include "diraclap/kernels.hpp"
#include "diraclap/lap.hpp"
#include "diraclap/operator_io.hpp"
#include "diraclap/parallel.hpp"
#include "diraclap/potential.hpp"
#include "diraclap/propagator.hpp"

namespace diraclap {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

SpinorField initial_field(const InitialData& init, const Grid& grid, int spinor_dim) {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < init.center.size() && k < 3; ++k) c[k] = init.center[k];
  CVector spinor = CVector::Zero(spinor_dim);
  if (init.spinor.empty()) {
    spinor(0) = 1.0;
  } else {
    for (int a = 0; a < spinor_dim && a < static_cast<int>(init.spinor.size()); ++a) spinor(a) = init.spinor[a];
  }
  if (spinor.norm() == 0.0) throw ValidationError("initial.spinor must not vanish");
  spinor.normalize();
  SpinorField f = SpinorField::from_function(grid, spinor_dim, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int k = 0; k < grid.n; ++k) r2 += (x[k] - c[k]) * (x[k] - c[k]);
    return CVector(spinor * std::exp(-r2 / (init.width * init.width)));
  });
  if (init.subtract_mean) {
    const Eigen::Index N = grid.num_points();
    for (int a = 0; a < spinor_dim; ++a) {
      cplx mean = 0.0;
      for (Eigen::Index p = 0; p < N; ++p) mean += f.values(p * spinor_dim + a);
      mean /= static_cast<double>(N);
      for (Eigen::Index p = 0; p < N; ++p) f.values(p * spinor_dim + a) -= mean;
    }
  }
  const double nrm = f.l2_norm();
  if (!(nrm > 0.0)) throw ValidationError("initial data vanishes on the grid");
  f.values /= nrm;
  return f;
}

namespace {

// Single-writer CSV table: header first, each row flushed as it is produced.
class CsvTable {
 public:
  CsvTable(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw NumericalError("cannot open " + path.string() + " for writing");
    write_row(header);
  }

  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

std::string num(double x) { return format_double(x); }

class Session {
 public:
  Session(const RunConfig& config, fs::path dir, RunReport& report, std::ostream& log)
      : c(config), dir_(std::move(dir)), rep_(report), log_(log) {}

  CsvTable table(const std::string& name, const std::vector<std::string>& header) {
    rep_.tables.push_back(name);
    return CsvTable(dir_ / name, header);
  }

  fs::path path(const std::string& name) {
    rep_.tables.push_back(name);
    return dir_ / name;
  }

  void stage(const std::string& name, const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    log_ << "[" << c.subcommand << "] " << name << "\n";
    try {
      fn();
    } catch (...) {
      record(name, t0);
      throw;
    }
    record(name, t0);
  }

  void warn(const std::string& w) {
    rep_.warnings.push_back(w);
    log_ << "warning: " << w << "\n";
  }
  void warn_all(const std::vector<std::string>& ws) {
    for (const auto& w : ws) warn(w);
  }

  json& results() { return rep_.results; }

  Grid grid() const { return Grid::make(c.n, c.grid.L, c.grid.points, c.grid.periodic); }

  const RunConfig& c;

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep_.wall_times.emplace_back(name, secs);
  }

  fs::path dir_;
  RunReport& rep_;
  std::ostream& log_;
};

json matrix_json(const CMatrix& M) {
  json rows = json::array();
  for (Eigen::Index a = 0; a < M.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index b = 0; b < M.cols(); ++b) row.push_back(json::array({M(a, b).real(), M(a, b).imag()}));
    rows.push_back(row);
  }
  return rows;
}

void run_matrices(Session& s) {
  DiracMatrices mats;
  s.stage("build", [&] { mats = build_dirac_matrices(s.c.n); });
  s.stage("write", [&] {
    json out;
    out["n"] = mats.dimension;
    out["spinor_dim"] = mats.spinor_dim;
    json alphas = json::array();
    for (const auto& a : mats.alphas) alphas.push_back(matrix_json(a));
    out["alpha"] = alphas;
    out["beta"] = matrix_json(mats.beta);
    out["clifford_defect"] = clifford_defect(mats);
    std::ofstream f(s.path("matrices.json"), std::ios::binary);
    f << out.dump(2) << '\n';
    s.results()["clifford_defect"] = clifford_defect(mats);
  });
}

std::vector<double> default_radii() {
  std::vector<double> r;
  for (int i = 0; i <= 60; ++i) r.push_back(1e-3 * std::pow(10.0, 4.0 * i / 60.0));
  return r;
}

void run_kernel_dump(Session& s) {
  const auto radii = s.c.radii.empty() ? default_radii() : s.c.radii;
  s.stage("kernel", [&] {
    CsvTable t = s.table("kernel.csv", {"r", "Re", "Im", "osc_Re", "osc_Im", "loc_Re", "loc_Im"});
    for (double r : radii) {
      const cplx k = schrodinger_kernel(s.c.n, s.c.z, r, s.c.branch);
      const KernelSplit sp = kernel_split(s.c.n, s.c.z, r, s.c.branch);
      t.write_row({num(r), num(k.real()), num(k.imag()), num(sp.osc.real()), num(sp.osc.imag()), num(sp.loc.real()),
                   num(sp.loc.imag())});
    }
  });
  if (s.c.dump_operator) {
    s.stage("dump_operator", [&] {
      const DiracMatrices mats = build_dirac_matrices(s.c.n);
      const LapProblem problem = LapProblem::make(mats, s.c.m, s.grid(), PotentialSpec{});
      const auto R0 = free_resolvent(problem, s.c.lambda, s.c.branch);
      check_dense_dimension(R0->size(), "resolvent dump");
      write_operator_dump(s.path("resolvent.dlap").string(), R0->to_kernel_operator());
    });
  }
}

std::string flag_of(const LapReport& rep, std::size_t i) { return rep.flags[i]; }

void run_lap_sweep(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  s.warn_all(potential_warnings(s.c.V, DecayHypothesis::Lap));
  LapProblem problem;
  s.stage("setup", [&] { problem = LapProblem::make(mats, s.c.m, s.grid(), s.c.V); });
  LapReport rep;
  SweepOptions opts;
  opts.with_b_bstar = s.c.b_bstar;
  s.stage("sweep", [&] { rep = lap_sweep(problem, s.c.lambda_grid, s.c.sigma, s.c.branch, opts); });
  s.stage("write", [&] {
    CsvTable t = s.table("lap.csv", {"lambda", "gamma", "norm_weighted", "norm_b_bstar", "cond", "flag"});
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
      const double bb = rep.norms_b_bstar.empty() ? std::nan("") : rep.norms_b_bstar[i];
      t.write_row({num(rep.lambdas[i].real()), num(rep.lambdas[i].imag()), num(rep.norms_weighted[i]), num(bb),
                   num(rep.conditions[i]), flag_of(rep, i)});
      if (rep.flags[i] != "ok" && rep.flags[i] != "refined")
        s.warn("lambda = " + num(rep.lambdas[i].real()) + ": " + rep.flags[i]);
    }
    s.results()["sup_weighted_norm"] = rep.sup_norm;
  });
}

void run_complex_sweep(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  s.warn_all(potential_warnings(s.c.V, DecayHypothesis::Lap));
  LapProblem problem;
  s.stage("setup", [&] { problem = LapProblem::make(mats, s.c.m, s.grid(), s.c.V); });
  LapReport rep;
  SweepOptions opts;
  opts.with_b_bstar = s.c.b_bstar;
  s.stage("sweep", [&] { rep = complex_sweep(problem, s.c.lambda, s.c.gamma_grid, s.c.sigma, opts); });
  s.stage("write", [&] {
    CsvTable t = s.table("lap.csv", {"lambda", "gamma", "norm_weighted", "norm_b_bstar", "cond", "flag"});
    CsvTable b = s.table("boundary.csv", {"gamma", "boundary_difference"});
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
      const double bb = rep.norms_b_bstar.empty() ? std::nan("") : rep.norms_b_bstar[i];
      t.write_row({num(rep.lambdas[i].real()), num(rep.lambdas[i].imag()), num(rep.norms_weighted[i]), num(bb),
                   num(rep.conditions[i]), flag_of(rep, i)});
      b.write_row({num(rep.lambdas[i].imag()), num(rep.boundary_differences[i])});
    }
    s.results()["sup_weighted_norm"] = rep.sup_norm;
  });
}

void run_threshold(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  s.warn_all(potential_warnings(s.c.V, s.c.m > 0.0 ? DecayHypothesis::MassiveThreshold : DecayHypothesis::Lap));
  LapProblem problem;
  s.stage("setup", [&] { problem = LapProblem::make(mats, s.c.m, s.grid(), s.c.V); });
  ThresholdReport rep;
  s.stage("regularity", [&] { rep = regularity_check(problem, s.c.sigma, s.c.lambda_offsets); });
  s.results()["smallest_singular_value"] = rep.smallest_singular_value;
  s.results()["regular"] = rep.regular;
  s.stage("write", [&] {
    CsvTable t = s.table("lap.csv", {"lambda", "gamma", "norm_weighted", "norm_b_bstar", "cond", "flag"});
    for (const auto& [lambda, value] : rep.blambda_decay)
      t.write_row({num(lambda), num(0.0), num(value), num(std::nan("")), num(std::nan("")), "threshold_difference"});
  });
  if (!s.c.s_grid.empty()) {
    CouplingSweep sweep;
    s.stage("coupling", [&] { sweep = coupling_sweep(problem, s.c.s_grid, s.c.sigma); });
    CsvTable t = s.table("coupling.csv", {"s", "sigma_min", "stage"});
    for (const auto& [sv, v] : sweep.table) t.write_row({num(sv), num(v), "grid"});
    for (const auto& [sv, v] : sweep.refinements) t.write_row({num(sv), num(v), "refine"});
    s.results()["bracketed"] = sweep.bracketed;
    if (sweep.bracketed) {
      s.results()["s_lo"] = sweep.s_lo;
      s.results()["s_hi"] = sweep.s_hi;
      s.results()["s_star"] = sweep.s_star;
    } else {
      s.warn("no coupling crossing of sigma_min = 1e-3 found on s_grid");
    }
  }
}

std::string spec_label(const std::vector<int>& idx) {
  std::string out;
  for (int i : idx) out += (out.empty() ? "" : "-") + (i == kShortRange ? std::string("d") : std::to_string(i));
  return out;
}

void run_directed(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  LapProblem problem;
  std::unique_ptr<SpherePartition> part;
  s.stage("setup", [&] {
    problem = LapProblem::make(mats, s.c.m, s.grid(), s.c.V);
    part = std::make_unique<SpherePartition>(s.c.n, s.c.delta);
  });
  s.results()["caps"] = part->count();
  s.stage("products", [&] {
    CsvTable t = s.table("directed.csv", {"spec", "class", "z", "M", "norm_lo", "norm_hi", "pass"});
    for (const auto& idx : s.c.products) {
      const ProductClass cls = classify_product(idx, *part);
      for (double z : s.c.z_list) {
        const ProductSpec spec{idx, z, s.c.d};
        const NormBracket b = product_norm(problem, spec, *part, s.c.branch);
        if (!b.converged) s.warn("product " + spec_label(idx) + " at z = " + num(z) + ": norm bracket not converged");
        t.write_row({spec_label(idx), to_string(cls), num(z), std::to_string(spec.length()), num(b.lo), num(b.hi),
                     b.hi <= 0.5 ? "true" : "false"});
      }
    }
  });
}

void run_neumann(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  LapProblem problem;
  s.stage("setup", [&] { problem = LapProblem::make(mats, s.c.m, s.grid(), s.c.V); });
  NeumannFrontier fr;
  s.stage("frontier", [&] { fr = neumann_frontier(problem, s.c.M_list, s.c.z_list, s.c.branch); });
  s.warn_all(fr.warnings);
  s.stage("write", [&] {
    CsvTable t = s.table("neumann.csv", {"spec", "class", "z", "M", "norm_lo", "norm_hi", "pass"});
    json passing = json::array();
    for (const auto& r : fr.results) {
      t.write_row({"L_zR0^" + std::to_string(r.M), "full", num(r.z), std::to_string(r.M), num(r.norm_lo),
                   num(r.norm_hi), r.pass ? "true" : "false"});
      if (r.pass) passing.push_back({{"M", r.M}, {"z", r.z}, {"inverse_bound", r.inverse_bound}});
    }
    s.results()["passing"] = passing;
  });
}

DiscreteHamiltonian build_hamiltonian(Session& s, const DiracMatrices& mats, const Grid& grid) {
  const MultiplicationOperator V = sample_potential(s.c.V, mats, grid);
  DiscreteHamiltonian H = discretize_hamiltonian(mats, s.c.m, V, grid);
  s.warn_all(H.warnings);
  s.results()["flagged_states"] = H.flagged_count();
  s.results()["max_energy"] = H.max_energy();
  return H;
}

void run_evolve(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  const Grid grid = s.grid();
  DiscreteHamiltonian H;
  s.stage("diagonalize", [&] { H = build_hamiltonian(s, mats, grid); });
  const SpinorField f = initial_field(s.c.initial, grid, mats.spinor_dim);
  std::vector<SpinorField> psi;
  s.stage("evolve", [&] { psi = evolve(H, f, s.c.times, false); });
  s.stage("write", [&] {
    const RVector w = weight_vector(grid, mats.spinor_dim, s.c.sigma);
    const double scale = std::sqrt(grid.cell_volume());
    CsvTable t = s.table("evolve.csv", {"t", "l2_norm", "weighted_norm"});
    double drift = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double l2 = psi[i].l2_norm();
      const double wn = scale * (w.cwiseProduct(psi[i].values.cwiseAbs())).norm();
      drift = std::max(drift, std::abs(l2 - 1.0));
      t.write_row({num(s.c.times[i]), num(l2), num(wn)});
    }
    s.results()["unitarity_defect"] = drift;
  });
}

void run_strichartz(Session& s) {
  const DiracMatrices mats = build_dirac_matrices(s.c.n);
  const Grid grid = s.grid();
  DiscreteHamiltonian H;
  s.stage("diagonalize", [&] { H = build_hamiltonian(s, mats, grid); });
  const SpinorField f = initial_field(s.c.initial, grid, mats.spinor_dim);
  s.results()["mean_mode_fraction"] = mean_mode_fraction(f);
  if (!s.c.strichartz.empty()) {
    s.stage("strichartz", [&] {
      CsvTable t = s.table("strichartz.csv", {"p", "q", "theta", "T", "ratio"});
      for (const auto& q : s.c.strichartz)
        t.write_row({num(q.p), num(q.q), num(q.theta), num(q.T), num(strichartz_norm(H, f, q, true))});
    });
  }
  if (!s.c.kato_T.empty()) {
    s.stage("kato", [&] {
      CsvTable t = s.table("kato.csv", {"T", "sigma", "ratio"});
      for (double T : s.c.kato_T) t.write_row({num(T), num(s.c.sigma), num(kato_smoothing_norm(H, f, s.c.sigma, T))});
    });
  }
}

void dispatch(Session& s) {
  const std::string& sub = s.c.subcommand;
  if (sub == "matrices") return run_matrices(s);
  if (sub == "kernel-dump") return run_kernel_dump(s);
  if (sub == "lap-sweep") return run_lap_sweep(s);
  if (sub == "complex-sweep") return run_complex_sweep(s);
  if (sub == "threshold") return run_threshold(s);
  if (sub == "directed") return run_directed(s);
  if (sub == "neumann") return run_neumann(s);
  if (sub == "evolve") return run_evolve(s);
  if (sub == "strichartz") return run_strichartz(s);
  throw ValidationError("unknown subcommand '" + sub + "'");
}

void write_summary(const fs::path& dir, const RunReport& rep, const std::string& hash) {
  json j;
  j["tool_version"] = rep.tool_version;
  j["config_hash"] = hash;
  j["config"] = rep.config_echo;
  j["exit_status"] = rep.exit_status;
  json times = json::array();
  for (const auto& [stage, secs] : rep.wall_times) times.push_back({{"stage", stage}, {"seconds", secs}});
  j["wall_times"] = times;
  j["warnings"] = rep.warnings;
  j["tables"] = rep.tables;
  j["results"] = rep.results.is_null() ? json::object() : rep.results;
  if (!rep.error.empty()) j["error"] = rep.error;
  std::ofstream out(dir / "summary.json", std::ios::binary);
  out << j.dump(2) << '\n';
}

}  // namespace

RunReport run(const RunConfig& config, const std::string& out_dir, std::ostream& log) {
  RunReport rep;
  rep.config_echo = to_json(config);
  const fs::path dir = !out_dir.empty() ? out_dir : (config.output_dir.empty() ? "." : config.output_dir);
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    rep.exit_status = kExitValidation;
    rep.error = e.what();
    log << "error: " << rep.error << "\n";
    return rep;
  }
  Session s(config, dir, rep, log);
  try {
    dispatch(s);
  } catch (const ValidationError& e) {
    rep.exit_status = kExitValidation;
    rep.error = e.what();
  } catch (const NumericalError& e) {
    rep.exit_status = kExitNumerical;
    rep.error = e.what();
  } catch (const std::bad_alloc&) {
    rep.exit_status = kExitNumerical;
    rep.error = "out of memory";
  }
  if (!rep.error.empty()) log << "error: " << rep.error << "\n";
  write_summary(dir, rep, config_hash(config));
  return rep;
}

RunReport run_file(const std::string& config_path, const std::string& subcommand, const std::string& out_dir,
                   std::ostream& log) {
  try {
    const RunConfig config = parse_config_file(config_path, subcommand);
    return run(config, out_dir, log);
  } catch (const ValidationError& e) {
    RunReport rep;
    rep.exit_status = kExitValidation;
    rep.error = e.what();
    log << "error: " << rep.error << "\n";
    return rep;
  }
}

}  // namespace diraclap

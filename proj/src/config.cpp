#include "diraclap/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "diraclap/highenergy.hpp"

namespace diraclap {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "\n  ") + s;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : ValidationError("invalid configuration:\n  " + join(violations)), violations_(std::move(violations)) {}

const std::vector<std::string> kSubcommands = {"matrices", "kernel-dump", "lap-sweep",  "complex-sweep", "threshold",
                                               "directed", "neumann",     "evolve",     "strichartz"};

bool RunConfig::operator==(const RunConfig& o) const { return to_json(*this) == to_json(o); }

namespace {

// Typed field access that records violations instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void fail(const std::string& msg) { errors_.push_back(msg); }

  std::optional<double> number(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string() && (j.get<std::string>() == "inf" || j.get<std::string>() == "infinity"))
      return std::numeric_limits<double>::infinity();
    fail(field + ": expected a number, got " + std::string(j.type_name()));
    return std::nullopt;
  }

  std::optional<int> integer(const json& j, const std::string& field) {
    if (j.is_number_integer()) return j.get<int>();
    if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>()) return static_cast<int>(j.get<double>());
    fail(field + ": expected an integer, got " + std::string(j.type_name()));
    return std::nullopt;
  }

  std::optional<bool> boolean(const json& j, const std::string& field) {
    if (j.is_boolean()) return j.get<bool>();
    fail(field + ": expected true or false, got " + std::string(j.type_name()));
    return std::nullopt;
  }

  std::optional<std::string> string(const json& j, const std::string& field) {
    if (j.is_string()) return j.get<std::string>();
    fail(field + ": expected a string, got " + std::string(j.type_name()));
    return std::nullopt;
  }

  std::vector<double> numbers(const json& j, const std::string& field) {
    std::vector<double> out;
    if (!j.is_array()) {
      fail(field + ": expected a list of numbers, got " + std::string(j.type_name()));
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i)
      if (auto v = number(j[i], field + "[" + std::to_string(i) + "]")) out.push_back(*v);
    return out;
  }

  std::vector<int> integers(const json& j, const std::string& field) {
    std::vector<int> out;
    if (!j.is_array()) {
      fail(field + ": expected a list of integers, got " + std::string(j.type_name()));
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i)
      if (auto v = integer(j[i], field + "[" + std::to_string(i) + "]")) out.push_back(*v);
    return out;
  }

  template <class T, class F>
  void optional(const json& obj, const std::string& key, T& target, F read, const std::string& prefix = "") {
    if (!obj.contains(key)) return;
    if (auto v = read(obj.at(key), prefix + key)) target = *v;
  }

 private:
  std::vector<std::string>& errors_;
};

PotentialSpec parse_potential(const json& j, Reader& r) {
  PotentialSpec V;
  if (j.is_string()) {
    try {
      V.kind = potential_kind_from_string(j.get<std::string>());
    } catch (const ValidationError& e) {
      r.fail(std::string("V: ") + e.what());
    }
    if (V.kind != PotentialKind::Zero) r.fail("V: the string form only accepts \"zero\"; use an object for other kinds");
    return V;
  }
  if (!j.is_object()) {
    r.fail("V: expected \"zero\" or an object, got " + std::string(j.type_name()));
    return V;
  }
  if (!j.contains("kind")) {
    r.fail("V.kind: missing field");
  } else if (auto k = r.string(j.at("kind"), "V.kind")) {
    try {
      V.kind = potential_kind_from_string(*k);
    } catch (const ValidationError& e) {
      r.fail(std::string("V.kind: ") + e.what());
    }
  }
  auto num = [&](const json& x, const std::string& f) { return r.number(x, f); };
  r.optional(j, "coupling", V.coupling, num, "V.");
  r.optional(j, "decay", V.decay, num, "V.");
  r.optional(j, "width", V.width, num, "V.");
  if (V.kind != PotentialKind::Zero && !j.contains("coupling")) r.fail("V.coupling: missing field");
  if (!(V.decay > 0.0)) r.fail("V.decay: rho must be positive");
  if (!(V.width > 0.0)) r.fail("V.width: must be positive");
  if (j.contains("profile")) {
    if (auto p = r.string(j.at("profile"), "V.profile")) {
      try {
        V.profile = matrix_profile_from_string(*p);
      } catch (const ValidationError& e) {
        r.fail(std::string("V.profile: ") + e.what());
      }
    }
  }
  if (V.profile == MatrixProfile::Fixed) {
    if (!j.contains("matrix") || !j.at("matrix").is_array()) {
      r.fail("V.matrix: a fixed profile needs a square matrix of [re, im] pairs");
    } else {
      const json& M = j.at("matrix");
      const std::size_t s = M.size();
      V.matrix = CMatrix::Zero(s, s);
      for (std::size_t a = 0; a < s; ++a) {
        if (!M[a].is_array() || M[a].size() != s) {
          r.fail("V.matrix: row " + std::to_string(a) + " must have " + std::to_string(s) + " entries");
          continue;
        }
        for (std::size_t b = 0; b < s; ++b) {
          const json& e = M[a][b];
          if (e.is_number()) {
            V.matrix(a, b) = e.get<double>();
          } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            V.matrix(a, b) = cplx(e[0].get<double>(), e[1].get<double>());
          } else {
            r.fail("V.matrix[" + std::to_string(a) + "][" + std::to_string(b) + "]: expected a number or [re, im]");
          }
        }
      }
      if ((V.matrix - V.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-14) r.fail("V.matrix: must be Hermitian");
    }
  }
  return V;
}

Branch parse_branch(const json& j, Reader& r) {
  if (auto s = r.string(j, "branch")) {
    if (*s == "+" || *s == "outgoing" || *s == "plus") return Branch::Outgoing;
    if (*s == "-" || *s == "incoming" || *s == "minus") return Branch::Incoming;
    r.fail("branch: expected \"+\" or \"-\", got \"" + *s + "\"");
  }
  return Branch::Outgoing;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void validate(RunConfig& c, const json& j, Reader& r) {
  const std::string& sub = c.subcommand;
  const bool numeric = sub != "matrices";
  if (sub == "matrices") {
    if (c.n < 2) r.fail("n: must be at least 2 (got " + std::to_string(c.n) + ")");
  } else if (c.n != 2 && c.n != 3) {
    r.fail("n: kernel and grid numerics need n in {2, 3} (got " + std::to_string(c.n) + ")");
  }
  if (!(c.m >= 0.0)) r.fail("m: mass must be non-negative");
  const bool needs_grid = sub != "matrices" && sub != "kernel-dump";
  if (needs_grid || j.contains("grid")) {
    if (!j.contains("grid")) r.fail("grid: missing field");
    if (!(c.grid.L > 0.0)) r.fail("grid.L: must be positive");
    if (c.grid.points < 2) r.fail("grid.points: need at least 2 points per axis");
    const bool want_periodic = sub == "evolve" || sub == "strichartz";
    if (needs_grid && want_periodic && !c.grid.periodic) r.fail("grid.periodic: " + sub + " needs a periodic grid");
    if (needs_grid && !want_periodic && c.grid.periodic)
      r.fail("grid.periodic: " + sub + " works on the non-periodic box (set periodic to false)");
    if (want_periodic && c.grid.points % 2 != 0) r.fail("grid.points: periodic grids need an even count");
  }
  auto need_list = [&](const std::vector<double>& v, const char* name) {
    if (v.empty()) r.fail(std::string(name) + ": must be a non-empty list");
  };
  if (sub == "lap-sweep" || sub == "complex-sweep") {
    if (!(c.sigma > 0.5))
      r.fail("sigma: " + fmt(c.sigma) + " violates the LAP requirement sigma > 1/2");
  }
  if (sub == "lap-sweep") {
    need_list(c.lambda_grid, "lambda_grid");
    for (double l : c.lambda_grid)
      if (!(std::abs(l) > c.m)) r.fail("lambda_grid: |lambda| = " + fmt(std::abs(l)) + " must exceed m = " + fmt(c.m));
  }
  if (sub == "complex-sweep") {
    need_list(c.gamma_grid, "gamma_grid");
    for (double g : c.gamma_grid)
      if (!(g > 0.0)) r.fail("gamma_grid: every gamma must be positive (got " + fmt(g) + ")");
    if (!(std::abs(c.lambda) > c.m)) r.fail("lambda: |lambda| must exceed m");
  }
  if (sub == "threshold") {
    if (c.m > 0.0 && !(c.sigma > 1.0))
      r.fail("sigma must exceed 1 when mass > 0 per threshold-suite hypothesis (got " + fmt(c.sigma) + ")");
    if (!(c.sigma > 0.5)) r.fail("sigma must exceed 1/2 per threshold-suite hypothesis (got " + fmt(c.sigma) + ")");
    if (c.n == 2 && c.m > 0.0) r.fail("m: the n = 2 massive threshold case is not supported");
    for (double o : c.lambda_offsets)
      if (!(o > 0.0)) r.fail("lambda_offsets: offsets above the threshold must be positive");
  }
  if (sub == "kernel-dump") {
    if (!(c.z > 0.0)) r.fail("z: must be positive");
    for (double x : c.radii)
      if (!(x > 0.0)) r.fail("radii: every radius must be positive");
    if (c.dump_operator) {
      if (!j.contains("grid")) r.fail("grid: dump_operator needs a grid");
      if (!(std::abs(c.lambda) > c.m)) r.fail("lambda: |lambda| must exceed m for the dumped resolvent");
    }
  }
  if (sub == "directed" || sub == "neumann") {
    need_list(c.z_list, "z_list");
    for (double z : c.z_list) {
      if (!(z > 0.0)) r.fail("z_list: every z must be positive");
      else if (c.grid.points >= 2 && c.grid.L > 0.0 && 2.0 * c.grid.L / c.grid.points > kPi / (4.0 * z))
        r.fail("z_list: z = " + fmt(z) + " is not resolved by h = " + fmt(2.0 * c.grid.L / c.grid.points) +
               " (need h <= pi / (4 z))");
    }
  }
  if (sub == "directed") {
    if (!(c.delta > 0.0 && c.delta < 1.0)) r.fail("delta: must lie in (0, 1)");
    if (!(c.d > 0.0)) r.fail("d: must be positive");
    if (c.products.empty()) r.fail("products: must be a non-empty list of index lists");
    for (const auto& p : c.products)
      if (p.empty()) r.fail("products: index lists must be non-empty");
    if (c.delta > 0.0 && c.delta < 1.0 && (c.n == 2 || c.n == 3)) {
      try {
        const SpherePartition part(c.n, c.delta);
        for (const auto& p : c.products)
          for (int i : p)
            if (i != kShortRange && (i < 0 || i >= part.count()))
              r.fail("products: cap index " + std::to_string(i) + " outside [0, " + std::to_string(part.count()) + ")");
      } catch (const ValidationError& e) {
        r.fail(std::string("delta: ") + e.what());
      }
    }
  }
  if (sub == "neumann") {
    if (c.M_list.empty()) r.fail("M_list: must be a non-empty list");
    for (int M : c.M_list)
      if (M < 1) r.fail("M_list: every M must be at least 1");
  }
  if (sub == "evolve") {
    need_list(c.times, "times");
    for (double t : c.times)
      if (!(t >= 0.0)) r.fail("times: must be non-negative");
    if (!(c.sigma > 0.5)) r.fail("sigma: the weighted norm needs sigma > 1/2");
  }
  if (sub == "strichartz") {
    if (c.strichartz.empty() && c.kato_T.empty()) r.fail("strichartz: give at least one query (or kato_T)");
    for (std::size_t i = 0; i < c.strichartz.size(); ++i) {
      for (const auto& v : strichartz_violations(c.n, c.strichartz[i]))
        r.fail("strichartz[" + std::to_string(i) + "]: " + v);
      if (c.strichartz[i].massive && c.m == 0.0)
        r.fail("strichartz[" + std::to_string(i) + "]: massive query with m = 0");
      if (c.strichartz[i].T > c.grid.L / 2.0)
        r.fail("strichartz[" + std::to_string(i) + "]: T = " + fmt(c.strichartz[i].T) + " exceeds L/2");
    }
    for (double T : c.kato_T)
      if (!(T > 0.0) || T > c.grid.L / 2.0) r.fail("kato_T: every window must lie in (0, L/2]");
    if (!c.kato_T.empty() && !(c.sigma > 0.5)) r.fail("sigma: Kato smoothing needs sigma > 1/2");
  }
  if (!c.initial.center.empty() && static_cast<int>(c.initial.center.size()) != c.n)
    r.fail("initial.center: must have n entries");
  if (!(c.initial.width > 0.0)) r.fail("initial.width: must be positive");
  if (numeric && c.V.profile == MatrixProfile::Fixed && c.V.matrix.rows() != (1 << ((c.n + 1) / 2)))
    r.fail("V.matrix: must be " + std::to_string(1 << ((c.n + 1) / 2)) + " x " +
           std::to_string(1 << ((c.n + 1) / 2)) + " for n = " + std::to_string(c.n));
}

}  // namespace

RunConfig parse_config(const json& j, const std::string& subcommand_override) {
  std::vector<std::string> errors;
  Reader r(errors);
  RunConfig c;
  if (!j.is_object()) throw ConfigError({"config: top level must be a JSON object"});

  static const std::vector<std::string> known = {
      "subcommand", "n",        "m",      "V",       "grid",   "sigma",     "branch",   "lambda_grid",
      "gamma_grid", "lambda",   "b_bstar", "lambda_offsets", "s_grid", "strichartz", "kato_T", "products",
      "delta",      "d",        "M_list", "z_list",  "times",  "initial",   "z",        "radii",
      "dump_operator", "seed",  "output_dir", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) r.fail(it.key() + ": unknown field");

  if (j.contains("subcommand")) {
    if (auto s = r.string(j.at("subcommand"), "subcommand")) c.subcommand = *s;
  }
  if (!subcommand_override.empty()) {
    if (!c.subcommand.empty() && c.subcommand != subcommand_override)
      r.fail("subcommand: config names \"" + c.subcommand + "\" but the command line asks for \"" +
             subcommand_override + "\"");
    c.subcommand = subcommand_override;
  }
  if (c.subcommand.empty()) r.fail("subcommand: missing field");
  else if (std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) == kSubcommands.end())
    r.fail("subcommand: unknown subcommand \"" + c.subcommand + "\"");

  auto num = [&](const json& x, const std::string& f) { return r.number(x, f); };
  auto integer = [&](const json& x, const std::string& f) { return r.integer(x, f); };
  auto boolean = [&](const json& x, const std::string& f) { return r.boolean(x, f); };

  if (!j.contains("n")) r.fail("n: missing field");
  r.optional(j, "n", c.n, integer);
  r.optional(j, "m", c.m, num);
  if (j.contains("V")) c.V = parse_potential(j.at("V"), r);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) {
      r.fail("grid: expected an object");
    } else {
      if (!g.contains("L")) r.fail("grid.L: missing field");
      if (!g.contains("points")) r.fail("grid.points: missing field");
      r.optional(g, "L", c.grid.L, num, "grid.");
      r.optional(g, "points", c.grid.points, integer, "grid.");
      r.optional(g, "periodic", c.grid.periodic, boolean, "grid.");
    }
  }
  r.optional(j, "sigma", c.sigma, num);
  if (j.contains("branch")) c.branch = parse_branch(j.at("branch"), r);
  if (j.contains("lambda_grid")) c.lambda_grid = r.numbers(j.at("lambda_grid"), "lambda_grid");
  if (j.contains("gamma_grid")) c.gamma_grid = r.numbers(j.at("gamma_grid"), "gamma_grid");
  r.optional(j, "lambda", c.lambda, num);
  r.optional(j, "b_bstar", c.b_bstar, boolean);
  if (j.contains("lambda_offsets")) c.lambda_offsets = r.numbers(j.at("lambda_offsets"), "lambda_offsets");
  if (j.contains("s_grid")) c.s_grid = r.numbers(j.at("s_grid"), "s_grid");
  if (j.contains("strichartz")) {
    const json& s = j.at("strichartz");
    if (!s.is_array()) {
      r.fail("strichartz: expected a list of queries");
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string pre = "strichartz[" + std::to_string(i) + "].";
        StrichartzQuery q;
        q.massive = c.m > 0.0;
        if (!s[i].is_object()) {
          r.fail(pre + ": expected an object");
          continue;
        }
        for (const char* key : {"p", "q", "theta", "T"})
          if (!s[i].contains(key)) r.fail(pre + key + ": missing field");
        r.optional(s[i], "p", q.p, num, pre);
        r.optional(s[i], "q", q.q, num, pre);
        r.optional(s[i], "theta", q.theta, num, pre);
        r.optional(s[i], "T", q.T, num, pre);
        r.optional(s[i], "massive", q.massive, boolean, pre);
        r.optional(s[i], "time_samples", q.time_samples, integer, pre);
        c.strichartz.push_back(q);
      }
    }
  }
  if (j.contains("kato_T")) c.kato_T = r.numbers(j.at("kato_T"), "kato_T");
  if (j.contains("products")) {
    const json& p = j.at("products");
    if (!p.is_array()) {
      r.fail("products: expected a list of index lists");
    } else {
      for (std::size_t i = 0; i < p.size(); ++i) {
        std::vector<int> idx;
        if (!p[i].is_array()) {
          r.fail("products[" + std::to_string(i) + "]: expected a list");
          continue;
        }
        for (const json& e : p[i]) {
          if (e.is_string() && e.get<std::string>() == "d") idx.push_back(kShortRange);
          else if (e.is_number_integer()) idx.push_back(e.get<int>());
          else r.fail("products[" + std::to_string(i) + "]: entries must be cap indices or \"d\"");
        }
        c.products.push_back(idx);
      }
    }
  }
  r.optional(j, "delta", c.delta, num);
  r.optional(j, "d", c.d, num);
  if (j.contains("M_list")) c.M_list = r.integers(j.at("M_list"), "M_list");
  if (j.contains("z_list")) c.z_list = r.numbers(j.at("z_list"), "z_list");
  if (j.contains("times")) c.times = r.numbers(j.at("times"), "times");
  if (j.contains("initial")) {
    const json& in = j.at("initial");
    if (!in.is_object()) {
      r.fail("initial: expected an object");
    } else {
      if (in.contains("center")) c.initial.center = r.numbers(in.at("center"), "initial.center");
      if (in.contains("spinor")) c.initial.spinor = r.numbers(in.at("spinor"), "initial.spinor");
      r.optional(in, "width", c.initial.width, num, "initial.");
      r.optional(in, "subtract_mean", c.initial.subtract_mean, boolean, "initial.");
    }
  }
  r.optional(j, "z", c.z, num);
  if (j.contains("radii")) c.radii = r.numbers(j.at("radii"), "radii");
  r.optional(j, "dump_operator", c.dump_operator, boolean);
  if (j.contains("seed")) {
    if (j.at("seed").is_number_unsigned() || (j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      c.seed = j.at("seed").get<std::uint64_t>();
    else
      r.fail("seed: expected a non-negative integer");
  }
  if (j.contains("output_dir")) {
    if (auto s = r.string(j.at("output_dir"), "output_dir")) c.output_dir = *s;
  }
  if (j.contains("threads")) {
    if (auto t = r.integer(j.at("threads"), "threads"); t && *t < 1) r.fail("threads: must be at least 1");
  }
  // Semantic checks run even after field errors so that every violation is reported at once.
  if (std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) != kSubcommands.end()) validate(c, j, r);
  if (!errors.empty()) throw ConfigError(errors);
  return c;
}

RunConfig parse_config_file(const std::string& path, const std::string& subcommand_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path + "'"});
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config: malformed JSON: ") + e.what()});
  }
  return parse_config(j, subcommand_override);
}

namespace {

json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

}  // namespace

json to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["n"] = c.n;
  j["m"] = c.m;
  if (c.V.kind == PotentialKind::Zero && c.V.coupling == 0.0) {
    j["V"] = "zero";
  } else {
    json v;
    v["kind"] = to_string(c.V.kind);
    v["coupling"] = c.V.coupling;
    v["decay"] = c.V.decay;
    v["width"] = c.V.width;
    v["profile"] = to_string(c.V.profile);
    if (c.V.profile == MatrixProfile::Fixed) {
      json M = json::array();
      for (Eigen::Index a = 0; a < c.V.matrix.rows(); ++a) {
        json row = json::array();
        for (Eigen::Index b = 0; b < c.V.matrix.cols(); ++b)
          row.push_back(json::array({c.V.matrix(a, b).real(), c.V.matrix(a, b).imag()}));
        M.push_back(row);
      }
      v["matrix"] = M;
    }
    j["V"] = v;
  }
  j["grid"] = {{"L", c.grid.L}, {"points", c.grid.points}, {"periodic", c.grid.periodic}};
  j["sigma"] = c.sigma;
  j["branch"] = c.branch == Branch::Outgoing ? "+" : "-";
  j["lambda_grid"] = c.lambda_grid;
  j["gamma_grid"] = c.gamma_grid;
  j["lambda"] = c.lambda;
  j["b_bstar"] = c.b_bstar;
  j["lambda_offsets"] = c.lambda_offsets;
  j["s_grid"] = c.s_grid;
  json sq = json::array();
  for (const auto& q : c.strichartz)
    sq.push_back({{"p", number_json(q.p)},
                  {"q", number_json(q.q)},
                  {"theta", q.theta},
                  {"T", q.T},
                  {"massive", q.massive},
                  {"time_samples", q.time_samples}});
  j["strichartz"] = sq;
  j["kato_T"] = c.kato_T;
  json prods = json::array();
  for (const auto& p : c.products) {
    json row = json::array();
    for (int i : p) row.push_back(i == kShortRange ? json("d") : json(i));
    prods.push_back(row);
  }
  j["products"] = prods;
  j["delta"] = c.delta;
  j["d"] = c.d;
  j["M_list"] = c.M_list;
  j["z_list"] = c.z_list;
  j["times"] = c.times;
  j["initial"] = {{"center", c.initial.center},
                  {"width", c.initial.width},
                  {"spinor", c.initial.spinor},
                  {"subtract_mean", c.initial.subtract_mean}};
  j["z"] = c.z;
  j["radii"] = c.radii;
  j["dump_operator"] = c.dump_operator;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

std::string config_hash(const RunConfig& c) {
  const std::string text = to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace diraclap

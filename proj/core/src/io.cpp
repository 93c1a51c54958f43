#include "ktorus/io.hpp"

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ktorus/errors.hpp"

namespace ktorus::io {

using nlohmann::json;

namespace {

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw io_error("read failure on " + path);
  return os.str();
}

void write_all(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw io_error("write failure on " + path);
}

json parse(const std::string& path) {
  const std::string text = read_all(path);
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw validation_error("malformed JSON in " + path);
  return j;
}

void check_schema(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != 1)
    throw validation_error(path + ": missing or unsupported schema version");
}

void save_json(const std::string& path, const json& j) { write_all(path, j.dump(2) + "\n"); }

struct LatticeSpec {
  DualLattice dual;
  std::optional<ThreeLineConfig> pq;
};

LatticeSpec parse_lattice(const json& j, const std::string& path) {
  if (j.contains("pq")) {
    const auto& pq = j["pq"];
    if (!pq.contains("p") || !pq.contains("q"))
      throw validation_error(path + ": pq descriptor needs p and q");
    const ThreeLineConfig cfg =
        pq_config({pq["p"][0].get<int>(), pq["p"][1].get<int>()},
                  {pq["q"][0].get<int>(), pq["q"][1].get<int>()});
    return {cfg.dual(), cfg};
  }
  if (j.contains("basis")) {
    const auto& b = j["basis"];
    if (!b.is_array() || b.size() != 2 || b[0].size() != 2 || b[1].size() != 2)
      throw validation_error(path + ": basis must be two generator vectors");
    Eigen::Matrix2d m;
    m.col(0) = Eigen::Vector2d(b[0][0].get<double>(), b[0][1].get<double>());
    m.col(1) = Eigen::Vector2d(b[1][0].get<double>(), b[1][1].get<double>());
    return {DualLattice(m), std::nullopt};
  }
  throw validation_error(path + ": lattice descriptor needs basis or pq");
}

json lattice_json(const DualLattice& dual, const std::optional<ThreeLineConfig>& pq) {
  if (pq) {
    return json{{"pq", {{"p", {pq->p[0], pq->p[1]}}, {"q", {pq->q[0], pq->q[1]}}}}};
  }
  const Eigen::Matrix2d& b = dual.basis();
  return json{{"basis", {{b(0, 0), b(1, 0)}, {b(0, 1), b(1, 1)}}}};
}

CoeffMap parse_coeffs(const json& j, const std::string& path) {
  CoeffMap half;
  for (const auto& e : j) {
    if (!e.contains("n") || e["n"].size() != 2)
      throw validation_error(path + ": coefficient entry needs n=[n1,n2]");
    const NodeIndex n{e["n"][0].get<int>(), e["n"][1].get<int>()};
    const Complex v{e.value("re", 0.0), e.value("im", 0.0)};
    if (!n.is_origin() && !n.lex_positive())
      throw validation_error(path + ": coefficients must use the zero mode and "
                                    "lexicographically positive indices only");
    if (half.count(n)) throw validation_error(path + ": duplicate coefficient index");
    half[n] = v;
  }
  return half;
}

json coeffs_json(const FourierField& f) {
  json arr = json::array();
  for (const auto& [n, v] : f.coeffs()) {
    if (!n.is_origin() && !n.lex_positive()) continue;  // mirrored on load
    arr.push_back({{"n", {n.n1, n.n2}}, {"re", v.real()}, {"im", v.imag()}});
  }
  return arr;
}

FieldFile parse_field(const json& j, const std::string& path) {
  check_schema(j, path);
  if (!j.contains("lattice")) throw validation_error(path + ": field file needs a lattice");
  const LatticeSpec spec = parse_lattice(j["lattice"], path);
  const CoeffMap half = parse_coeffs(j.value("coeffs", json::array()), path);
  return FieldFile{FourierField::real_field(spec.dual, half), spec.pq};
}

json field_json(const FourierField& f, const std::optional<ThreeLineConfig>& pq) {
  return json{{"schema", 1}, {"lattice", lattice_json(f.dual(), pq)},
              {"coeffs", coeffs_json(f)}};
}

}  // namespace

const char* version() {
#ifdef KTORUS_VERSION
  return KTORUS_VERSION;
#else
  return "0.0.0";
#endif
}

std::string file_digest(const std::string& path) {
  const std::string bytes = read_all(path);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

FieldFile load_field(const std::string& path) { return parse_field(parse(path), path); }

void save_field(const std::string& path, const FourierField& f,
                const std::optional<ThreeLineConfig>& pq) {
  save_json(path, field_json(f, pq));
}

KillingConstants load_constants(const std::string& path) {
  const json j = parse(path);
  check_schema(j, path);
  if (!j.contains("a") || !j.contains("c"))
    throw validation_error(path + ": constants file needs a and c");
  KillingConstants k;
  k.a1 = j["a"][0].get<double>();
  k.a2 = j["a"][1].get<double>();
  k.c1 = j["c"][0].get<double>();
  k.c2 = j["c"][1].get<double>();
  return k;
}

void save_constants(const std::string& path, const KillingConstants& k) {
  save_json(path, json{{"schema", 1}, {"a", {k.a1, k.a2}}, {"c", {k.c1, k.c2}}});
}

TripleSequence load_sequence(const std::string& path) {
  const json j = parse(path);
  check_schema(j, path);
  const int band = j.value("band", 0);
  if (band < 1) throw validation_error(path + ": band must be >= 1");
  std::vector<Complex> x(band), y(band), z(band);
  auto fill = [&](const char* key, std::vector<Complex>& dst) {
    if (!j.contains(key)) return;
    for (const auto& e : j[key]) {
      const int n = e["n"].get<int>();
      if (n < 1 || n > band)
        throw validation_error(path + ": sequence entries must have 1 <= n <= band");
      dst[n - 1] = Complex{e.value("re", 0.0), e.value("im", 0.0)};
    }
  };
  fill("x", x);
  fill("y", y);
  fill("z", z);
  return TripleSequence(std::move(x), std::move(y), std::move(z));
}

void save_sequence(const std::string& path, const TripleSequence& s) {
  auto dump = [&](auto get) {
    json arr = json::array();
    for (int n = 1; n <= s.band(); ++n) {
      const Complex v = get(n);
      arr.push_back({{"n", n}, {"re", v.real()}, {"im", v.imag()}});
    }
    return arr;
  };
  save_json(path, json{{"schema", 1},
                       {"band", s.band()},
                       {"x", dump([&](int n) { return s.x(n); })},
                       {"y", dump([&](int n) { return s.y(n); })},
                       {"z", dump([&](int n) { return s.z(n); })}});
}

Potential load_potential(const std::string& path) {
  const json j = parse(path);
  check_schema(j, path);
  if (!j.contains("linear") || !j.contains("periodic"))
    throw validation_error(path + ": potential file needs linear and periodic");
  const FieldFile periodic = parse_field(j["periodic"], path);
  return Potential{{j["linear"][0].get<double>(), j["linear"][1].get<double>()},
                   periodic.field};
}

void save_potential(const std::string& path, const Potential& u,
                    const std::optional<ThreeLineConfig>& pq) {
  save_json(path, json{{"schema", 1},
                       {"linear", {u.linear.first, u.linear.second}},
                       {"periodic", field_json(u.periodic, pq)}});
}

SearchProblem load_problem(const std::string& path) {
  const json j = parse(path);
  check_schema(j, path);
  if (!j.contains("cfg")) throw validation_error(path + ": problem file needs cfg");
  const LatticeSpec spec = parse_lattice(j["cfg"], path);
  SearchProblem p;
  if (spec.pq)
    p.cfg = *spec.pq;
  else
    p.cfg = spec.dual;
  p.band = j.value("band", 2);
  p.zero_mode = j.value("zeroMode", 1.0);
  p.eta = j.value("eta", 0.0);
  p.seed = j.value("seed", std::uint64_t{0});
  p.max_iters = j.value("maxIters", 200);
  p.init_scale = j.value("initScale", 0.1);
  p.damping_init = j.value("dampingInit", 1e-3);
  p.grad_tol = j.value("gradTol", 1e-12);
  return p;
}

void save_problem(const std::string& path, const SearchProblem& p) {
  json j{{"schema", 1},
         {"band", p.band},
         {"zeroMode", p.zero_mode},
         {"eta", p.eta},
         {"seed", p.seed},
         {"maxIters", p.max_iters},
         {"initScale", p.init_scale},
         {"dampingInit", p.damping_init},
         {"gradTol", p.grad_tol}};
  if (p.is_three_line()) {
    j["cfg"] = lattice_json(p.dual(), std::get<ThreeLineConfig>(p.cfg));
  } else {
    j["cfg"] = lattice_json(std::get<DualLattice>(p.cfg), std::nullopt);
  }
  save_json(path, j);
}

void save_trajectory_csv(const std::string& path, const FourierField& f,
                         const Trajectory& traj) {
  std::ostringstream os;
  os << "t,x,y,vx,vy\n";
  os << std::setprecision(17);
  for (size_t k = 0; k < traj.states.size(); ++k) {
    const GeodesicState& s = traj.states[k];
    const Eigen::Vector2d p = reduce_to_fundamental_domain(f, s.x, s.y);
    os << traj.time(k) << ',' << p.x() << ',' << p.y() << ',' << s.vx << ',' << s.vy << '\n';
  }
  write_all(path, os.str());
}

}  // namespace ktorus::io

#include "mew/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mew/errors.hpp"

namespace mew::cli {

using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(const std::string& v) {
  std::string s = trim(v);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0)
    throw ConfigError("'" + key + "' is not a number: '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) throw ConfigError("'" + key + "' must be an integer: '" + text + "'");
  return static_cast<int>(v);
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vec(const Vec2& v) { return json::array({v[0], v[1]}); }

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json poly_json(const Poly& p) {
  json a = json::array();
  for (int k = 0; k <= p.degree(); ++k) a.push_back(p[k]);
  return a;
}

std::string mode_name(Mode m) { return m == Mode::Real ? "real" : "complex"; }

json settings_json(const Settings& s) {
  return {{"jet_order", s.jet_order},       {"tol_root", s.tol_root},         {"tol_res_low", s.tol_res_low},
          {"tol_res_high", s.tol_res_high}, {"tol_residual", s.tol_residual}, {"tol_flat", s.tol_flat},
          {"tol_m", s.tol_m},               {"tol_p0", s.tol_p0},             {"tracking_step", s.tracking_step}};
}

json metadata(const std::string& command, const std::string& config_path) {
  return {{"tool", "mewcheck"}, {"version", kToolVersion}, {"command", command}, {"config", config_path}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

MoebiusStructure RunConfig::structure() const {
  auto field = [](const char* name, const std::string& src) {
    try {
      return parse(src);
    } catch (const ExprError& e) {
      throw ExprError(std::string(name) + ": " + e.detail, e.offset);
    }
  };
  return MoebiusStructure(field("u", u), field("P11", p11), field("P12", p12), field("P22", p22), orientation);
}

std::vector<Point> RunConfig::nodes() const {
  std::vector<Point> out = region ? region->nodes() : std::vector<Point>{};
  out.insert(out.end(), points.begin(), points.end());
  return out;
}

void RunConfig::validate() const {
  if (region) {
    if (region->nx < 1 || region->ny < 1) throw ConfigError("region: nx and ny must be at least 1");
    if (!(region->xmin < region->xmax) || !(region->ymin < region->ymax))
      throw ConfigError("region: need xmin < xmax and ymin < ymax");
  }
  const Settings& s = settings;
  for (double t : {s.tol_root, s.tol_res_low, s.tol_res_high, s.tol_residual})
    if (!(t > 0)) throw ConfigError("tolerances must be positive");
  if (!(s.tol_res_low <= s.tol_res_high)) throw ConfigError("tol_res_low must not exceed tol_res_high");
  if (s.jet_order < 1) throw ConfigError("jet_order must be at least 1");
  if (orientation != 1 && orientation != -1) throw ConfigError("orientation must be +1 or -1");
}

std::vector<Point> parse_points(std::string_view text) {
  std::vector<Point> out;
  std::string all(text);
  std::stringstream ss(all);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) throw ConfigError("point '" + trim(item) + "' is not of the form x,y");
    out.push_back({to_double("point", trim(item.substr(0, comma))), to_double("point", trim(item.substr(comma + 1)))});
  }
  return out;
}

Mode parse_mode(std::string_view text) {
  const std::string s = trim(text);
  if (s == "real") return Mode::Real;
  if (s == "complex") return Mode::Complex;
  throw ConfigError("mode must be 'real' or 'complex', got '" + s + "'");
}

int parse_orientation(std::string_view text) {
  const std::string s = trim(text);
  if (s == "1" || s == "+1") return 1;
  if (s == "-1") return -1;
  throw ConfigError("orientation must be +1 or -1, got '" + s + "'");
}

RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  auto get = [&](const char* key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return unquote(*v);
    return std::nullopt;
  };
  if (!tree.get_child_optional("structure")) throw ConfigError("config has no [structure] section");
  for (auto [key, dst] : {std::pair{"structure.u", &cfg.u}, std::pair{"structure.P11", &cfg.p11},
                          std::pair{"structure.P12", &cfg.p12}, std::pair{"structure.P22", &cfg.p22}})
    if (auto v = get(key)) *dst = *v;
  if (tree.get_child_optional("region")) {
    GridSpec g;
    auto req = [&](const char* key) {
      auto v = get(key);
      if (!v) throw ConfigError(std::string("missing ") + key);
      return *v;
    };
    g.xmin = to_double("xmin", req("region.xmin"));
    g.xmax = to_double("xmax", req("region.xmax"));
    g.ymin = to_double("ymin", req("region.ymin"));
    g.ymax = to_double("ymax", req("region.ymax"));
    g.nx = to_int("nx", req("region.nx"));
    g.ny = to_int("ny", req("region.ny"));
    cfg.region = g;
  }
  if (auto v = get("points.list")) cfg.points = parse_points(*v);
  Settings& s = cfg.settings;
  for (auto [key, dst] : {std::pair{"tolerances.tol_root", &s.tol_root},
                          std::pair{"tolerances.tol_res_low", &s.tol_res_low},
                          std::pair{"tolerances.tol_res_high", &s.tol_res_high},
                          std::pair{"tolerances.tol_residual", &s.tol_residual}})
    if (auto v = get(key)) *dst = to_double(key, *v);
  if (auto v = get("tolerances.jet_order")) s.jet_order = to_int("jet_order", *v);
  if (auto v = get("options.mode")) cfg.mode = parse_mode(*v);
  if (auto v = get("options.orientation")) cfg.orientation = parse_orientation(*v);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(f);
}

// ---------------------------------------------------------------------------
// JSON

json to_json(const ResidualReport& r) {
  json j{{"F", complex_json(r.f)},
         {"differential", r.differential},
         {"trace", r.trace},
         {"relative", r.relative},
         {"max_abs", r.max_abs()}};
  j["constraint_u"] = r.constraint_u ? json(*r.constraint_u) : json(nullptr);
  j["constraint_w"] = r.constraint_w ? json(*r.constraint_w) : json(nullptr);
  j["gradient_f"] = r.gradient_f ? json(*r.gradient_f) : json(nullptr);
  return j;
}

json to_json(const Verdict& v, Mode mode) {
  json j{{"x", v.point.x}, {"y", v.point.y}, {"verdict", std::string(to_string(v.tag))}, {"note", v.note}};
  j["resultants"] = v.resultants ? json(*v.resultants) : json(nullptr);
  j["indicators"] = v.indicators ? json(*v.indicators) : json(nullptr);
  j["m_norm"] = v.m_norm ? json(*v.m_norm) : json(nullptr);
  json cands = json::array();
  for (const auto& c : v.candidates) {
    json cj{{"F", c.candidate.f},
            {"alpha", vec(c.candidate.alpha)},
            {"source", std::string(to_string(c.candidate.source))},
            {"verified", c.verified},
            {"note", c.note}};
    cj["residuals"] = c.residuals ? to_json(*c.residuals) : json(nullptr);
    cands.push_back(cj);
  }
  j["candidates"] = cands;
  if (mode == Mode::Complex) {
    json cc = json::array();
    for (auto z : v.complex_candidates) cc.push_back(complex_json(z));
    j["complex_candidates"] = cc;
  }
  return j;
}

json to_json(const PointInvariants& inv) {
  json j{{"x", inv.point.x},
         {"y", inv.point.y},
         {"orientation", inv.orientation},
         {"metric_factor", inv.metric_factor},
         {"Y", vec(inv.y)},
         {"U", vec(inv.u)},
         {"W", vec(inv.w)},
         {"L", vec(inv.l)},
         {"grad_rho", vec(inv.grad_rho)},
         {"rho", inv.rho},
         {"mu", inv.mu},
         {"phi", inv.phi},
         {"sigma", inv.sigma},
         {"tau", inv.tau},
         {"ell", inv.ell},
         {"sigma_over_rho", inv.sigma / inv.rho},
         {"uu_hess_rho", inv.uu_hess_rho},
         {"yy_hess_rho", inv.yy_hess_rho},
         {"u_grad_sigma", inv.u_grad_sigma},
         {"y_grad_sigma", inv.y_grad_sigma},
         {"uu_grad_y", inv.uu_grad_y},
         {"yy_grad_u", inv.yy_grad_u},
         {"uu_grad_l", inv.uu_grad_l},
         {"yy_grad_l", inv.yy_grad_l},
         {"eps_grad_l", inv.eps_grad_l},
         {"p_uu", inv.p_uu},
         {"p_yy", inv.p_yy},
         {"p_uy", inv.p_uy},
         {"m", inv.m},
         {"psi", inv.psi}};
  j["k"] = inv.k ? json(*inv.k) : json(nullptr);
  return j;
}

json invariants_json(const MoebiusStructure& s, Point p, const Settings& settings) {
  const CottonYork cy = cotton_york(s, p, settings);
  json yabc = json::array();
  for (std::size_t i = 0; i < cy.yabc.size(); ++i) yabc.push_back(cy.yabc[i].value());
  json j;
  if (cy.flat) {
    j = {{"x", p.x}, {"y", p.y}, {"flat", true}};
  } else {
    const InvariantFields f = invariant_fields(s, p, settings);
    j = to_json(point_invariants(f));
    j["flat"] = false;
    try {
      const MTensor m = compute_m(f, settings);
      j["M"] = {{"components", m.m}, {"alpha", vec(m.alpha)}, {"norm", m.norm}, {"relative_norm", m.relative_norm()}};
    } catch (const SigmaZero&) {
      j["M"] = nullptr;
    }
  }
  j["Y_abc"] = yabc;
  j["Y_norm"] = cy.norm;
  return j;
}

json constraints_json(const MoebiusStructure& s, Point p, const Settings& settings) {
  json j{{"x", p.x}, {"y", p.y}};
  std::optional<PointInvariants> inv;
  try {
    inv = compute_invariants(s, p, settings);
  } catch (const FlatPoint&) {
    j["flat"] = true;
    return j;
  }
  j["flat"] = false;
  const Constraints c = assemble(*inv, settings);
  j["P0"] = poly_json(c.p0);
  j["P1"] = poly_json(c.p1);
  j["P2"] = poly_json(c.p2);
  j["P3"] = poly_json(c.p3);
  const double scale = balancing_scale({c.p1, c.p2, c.p3});
  j["balancing_scale"] = scale;
  j["resultants"] = {sylvester_resultant(c.p1, c.p2).value(), sylvester_resultant(c.p1, c.p3).value(),
                     sylvester_resultant(c.p2, c.p3).value()};
  j["indicators"] = {common_root_indicator(c.p1, c.p2, scale), common_root_indicator(c.p1, c.p3, scale),
                     common_root_indicator(c.p2, c.p3, scale)};
  json roots = json::array();
  for (double r : common_real_roots(c.p1, c.p2, c.p3, c.p0, settings).values()) roots.push_back(r);
  j["common_real_roots"] = roots;
  return j;
}

json structure_json(const RunConfig& cfg) {
  return {{"u", cfg.u}, {"P11", cfg.p11}, {"P12", cfg.p12}, {"P22", cfg.p22}, {"orientation", cfg.orientation}};
}

json report_json(const RunConfig& cfg, const RegionReport& report) {
  json hist = json::object();
  for (auto [tag, count] : report.histogram) hist[std::string(to_string(tag))] = count;
  json nodes = json::array();
  for (const auto& v : report.nodes) nodes.push_back(to_json(v, cfg.mode));
  json j{{"structure", structure_json(cfg)},
         {"mode", mode_name(cfg.mode)},
         {"settings", settings_json(cfg.settings)},
         {"summary", {{"verdict", report.summary}, {"detail", report.detail}, {"histogram", hist}}},
         {"points", nodes}};
  if (cfg.region)
    j["region"] = {{"xmin", cfg.region->xmin}, {"xmax", cfg.region->xmax}, {"ymin", cfg.region->ymin},
                   {"ymax", cfg.region->ymax}, {"nx", cfg.region->nx},     {"ny", cfg.region->ny}};
  return j;
}

std::string grid_csv(const RegionReport& report) {
  std::string out = "x,y,verdict,res12,res13,res23,F_candidates,residual\n";
  for (const auto& v : report.nodes) {
    out += fmt17(v.point.x) + "," + fmt17(v.point.y) + "," + std::string(to_string(v.tag)) + ",";
    for (int i = 0; i < 3; ++i) out += (v.resultants ? fmt17((*v.resultants)[i]) : "") + ",";
    std::string fs;
    std::optional<double> best;
    for (const auto& c : v.candidates) {
      fs += (fs.empty() ? "" : ";") + fmt17(c.candidate.f);
      if (c.residuals) best = std::min(best.value_or(c.residuals->relative), c.residuals->relative);
    }
    out += fs + "," + (best ? fmt17(*best) : "") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Common {
  std::string config;
  std::string out;
  std::string mode, orientation, points;
  std::optional<int> jet_order;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Run configuration file")->required();
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--mode", c.mode, "real or complex");
  sub->add_option("--orientation", c.orientation, "+1 or -1");
  sub->add_option("--jet-order", c.jet_order, "Taylor jet truncation order");
  sub->add_option("--points", c.points, "Points as \"x,y;x,y\"");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (!c.mode.empty()) cfg.mode = parse_mode(c.mode);
  if (!c.orientation.empty()) cfg.orientation = parse_orientation(c.orientation);
  if (c.jet_order) cfg.settings.jet_order = *c.jet_order;
  if (!c.points.empty()) {
    cfg.points = parse_points(c.points);
    cfg.region.reset();
  }
  cfg.validate();
  return cfg;
}

std::vector<Point> require_nodes(const RunConfig& cfg) {
  auto nodes = cfg.nodes();
  if (nodes.empty()) throw ConfigError("no points: give a [region], a [points] list or --points");
  return nodes;
}

// Prints the document and, with --out, stores it as `name` in that directory.
void emit(const Common& c, const std::string& name, const json& doc, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (!c.out.empty()) {
    std::filesystem::create_directories(c.out);
    write_file(std::filesystem::path(c.out) / name, text);
  }
}

int cmd_analyze(const Common& c, std::ostream& out) {
  const RunConfig cfg = resolve(c);
  const MoebiusStructure s = cfg.structure();
  const auto nodes = require_nodes(cfg);
  RegionReport report = scan_points(s, nodes, cfg.settings);
  json doc = report_json(cfg, report);
  doc["metadata"] = metadata("analyze", c.config);
  const std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", doc.dump(2) + "\n");
  write_file(dir / "grid.csv", grid_csv(report));
  out << "summary: " << report.summary << "\n" << report.detail << "\n";
  return kOk;
}

// "e1; e2" -> {e1, e2}; expressions never contain ';'.
std::vector<std::string> split_pair(const char* flag, const std::string& text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  const auto semi = text.find(';');
  if (semi == std::string::npos || text.find(';', semi + 1) != std::string::npos)
    throw ConfigError(std::string(flag) + " takes two expressions separated by ';'");
  return {trim(text.substr(0, semi)), trim(text.substr(semi + 1))};
}

int cmd_verify(const Common& c, const std::string& alpha_text, const std::string& alpha_im_text,
               std::ostream& out) {
  const auto alpha = split_pair("--alpha", alpha_text);
  const auto alpha_im = split_pair("--alpha-im", alpha_im_text);
  const RunConfig cfg = resolve(c);
  const MoebiusStructure s = cfg.structure();
  const auto nodes = require_nodes(cfg);
  auto expr = [](const char* name, const std::string& src) {
    try {
      return parse(src);
    } catch (const ExprError& e) {
      throw ExprError(std::string(name) + ": " + e.detail, e.offset);
    }
  };
  if (cfg.mode == Mode::Real && !alpha_im.empty())
    throw ConfigError("--alpha-im needs --mode complex");
  AlphaExpressions a{{expr("alpha_1", alpha[0]), expr("alpha_2", alpha[1])}, {number(0), number(0)}};
  if (!alpha_im.empty()) a.im = {expr("alpha_im_1", alpha_im[0]), expr("alpha_im_2", alpha_im[1])};
  json pts = json::array();
  double worst = 0.0, worst_abs = 0.0;
  for (Point p : nodes) {
    const ResidualReport r = verify_closed_form(s, a, p, cfg.mode, cfg.settings);
    json pj = to_json(r);
    pj["x"] = p.x;
    pj["y"] = p.y;
    pts.push_back(pj);
    worst = std::max(worst, r.relative);
    worst_abs = std::max(worst_abs, r.max_abs());
  }
  const bool passed = worst < cfg.settings.tol_residual;
  json doc{{"metadata", metadata("verify", c.config)},
           {"structure", structure_json(cfg)},
           {"mode", mode_name(cfg.mode)},
           {"alpha", {{"re", alpha}, {"im", alpha_im.empty() ? std::vector<std::string>{"0", "0"} : alpha_im}}},
           {"tol_residual", cfg.settings.tol_residual},
           {"max_relative_residual", worst},
           {"max_abs_residual", worst_abs},
           {"passed", passed},
           {"points", pts}};
  emit(c, "verify.json", doc, out);
  return passed ? kOk : kCheckFailed;
}

int cmd_dump(const Common& c, const std::string& command, std::ostream& out) {
  const RunConfig cfg = resolve(c);
  const MoebiusStructure s = cfg.structure();
  json pts = json::array();
  for (Point p : require_nodes(cfg))
    pts.push_back(command == "invariants" ? invariants_json(s, p, cfg.settings) : constraints_json(s, p, cfg.settings));
  json doc{{"metadata", metadata(command, c.config)}, {"structure", structure_json(cfg)}, {"points", pts}};
  emit(c, command + ".json", doc, out);
  return kOk;
}

int cmd_rescale(const Common& c, const std::string& omega, std::ostream& out) {
  const RunConfig cfg = resolve(c);
  Expr w;
  try {
    w = parse(omega);
  } catch (const ExprError& e) {
    throw ExprError("omega: " + e.detail, e.offset);
  }
  const MoebiusStructure s = conformal_rescale(cfg.structure(), w);
  json pts = json::array();
  for (Point p : require_nodes(cfg)) {
    const StructureJets j = s.sample(p, 0);
    json pj = invariants_json(s, p, cfg.settings);
    pj["u"] = j.u.value();
    pj["P"] = {j.p11.value(), j.p12.value(), j.p12.value(), j.p22.value()};
    pts.push_back(pj);
  }
  json doc{{"metadata", metadata("rescale", c.config)},
           {"structure", structure_json(cfg)},
           {"omega", omega},
           {"points", pts}};
  emit(c, "rescale.json", doc, out);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local solvability of the scalar-flat Moebius Einstein-Weyl equation", "mewcheck"};
  app.require_subcommand(1);
  Common common;
  std::string alpha, alpha_im;
  std::string omega;
  auto* analyze = app.add_subcommand("analyze", "Classify points and write report.json and grid.csv");
  auto* verify = app.add_subcommand("verify", "Residuals of a closed-form alpha");
  auto* invariants = app.add_subcommand("invariants", "Dump the conformal invariants at points");
  auto* constraints = app.add_subcommand("constraints", "Dump P0..P3 and the resultants at points");
  auto* rescale = app.add_subcommand("rescale", "Invariants of the structure rescaled by exp(2 omega)");
  for (auto* sub : {analyze, verify, invariants, constraints, rescale}) add_common(sub, common);
  verify->add_option("--alpha", alpha, "Real parts of alpha_1 and alpha_2 as \"e1; e2\"")->required();
  verify->add_option("--alpha-im", alpha_im, "Imaginary parts of alpha_1 and alpha_2 as \"e1; e2\"");
  rescale->add_option("--omega", omega, "Log conformal factor omega(x, y)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*analyze) return cmd_analyze(common, out);
    if (*verify) return cmd_verify(common, alpha, alpha_im, out);
    if (*invariants) return cmd_dump(common, "invariants", out);
    if (*constraints) return cmd_dump(common, "constraints", out);
    if (*rescale) return cmd_rescale(common, omega, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const OrderExceeded& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ExprError& e) {
    err << "expression error: " << e.what() << "\n";
    return kExpressionError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace mew::cli

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "frcodes/constructions.hpp"
#include "frcodes/design.hpp"
#include "frcodes/fr_code.hpp"
#include "frcodes/sim.hpp"

using namespace frcodes;

namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommandResult {
  std::string status = "ok";  // ok | violation
  Json payload = Json::object();
  std::string human_summary;
};

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(path + " is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw IoError("failed while writing " + path);
}

uint32_t require_param(uint32_t value, const char* flag,
                       const std::string& family) {
  if (value == 0)
    throw std::invalid_argument("family " + family + " requires " + flag);
  return value;
}

/// Constant cross-class intersection size, the code's beta.
uint32_t derive_beta(const Design& design, const Resolution& res) {
  IntersectionProfile prof = intersection_profile(design, res);
  if (prof.cross.empty()) return 1;
  if (prof.cross.size() != 1)
    throw std::invalid_argument(
        "cross-class intersections are not constant; pass beta explicitly");
  return prof.cross.begin()->first;
}

std::vector<size_t> all_classes(const Resolution& res) {
  std::vector<size_t> all(res.classes.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

struct ConstructArgs {
  std::string family;
  uint32_t q = 0;
  uint32_t m = 0;
  uint32_t s = 0;
  uint32_t r = 0;  // 0 = all classes
  uint32_t v = 0;
};

CommandResult run_construct(const ConstructArgs& a) {
  Design design;
  std::optional<Resolution> res;
  if (a.family == "affine-plane") {
    Constructed c = affine_plane(require_param(a.q, "--q", a.family));
    design = std::move(c.design);
    res = std::move(c.resolution);
  } else if (a.family == "affine-geometry") {
    Constructed c =
        affine_geometry_hyperplanes(require_param(a.q, "--q", a.family),
                                    require_param(a.m, "--m", a.family));
    design = std::move(c.design);
    res = std::move(c.resolution);
  } else if (a.family == "hadamard") {
    Constructed c = hadamard_design(require_param(a.m, "--m", a.family));
    design = std::move(c.design);
    res = std::move(c.resolution);
  } else if (a.family == "grid") {
    Constructed c = fr_from_mols(require_param(a.s, "--s", a.family), {});
    design = std::move(c.design);
    res = std::move(c.resolution);
  } else if (a.family == "mols") {
    uint32_t s = require_param(a.s, "--s", a.family);
    std::vector<LatinSquare> squares = mols_from_field(s);
    uint32_t r = a.r == 0 ? s + 1 : a.r;
    if (r < 2 || r > s + 1)
      throw std::invalid_argument("--r must lie in [2, s+1]");
    squares.resize(r - 2);
    Constructed c = fr_from_mols(s, squares);
    design = std::move(c.design);
    res = std::move(c.resolution);
  } else if (a.family == "complete-graph") {
    design = complete_graph_code(require_param(a.v, "--v", a.family));
  } else {
    throw std::invalid_argument(
        "unknown family '" + a.family +
        "' (catalog: affine-plane, affine-geometry, hadamard, mols, grid, "
        "complete-graph)");
  }

  FRCode code;
  if (res) {
    code = fr_from_classes(design, *res, all_classes(*res),
                           derive_beta(design, *res));
  } else {
    code = fr_from_design(design, 1);
  }

  CommandResult out;
  out.payload = design_to_json(design, res);
  out.human_summary = design.family + ": theta=" + std::to_string(code.theta) +
                      " n=" + std::to_string(code.nodes.size()) +
                      " alpha=" + std::to_string(code.alpha) +
                      " beta=" + std::to_string(code.beta) +
                      " rho=" + std::to_string(code.rho) +
                      " d=" + std::to_string(code.d);
  return out;
}

CommandResult run_verify(const std::string& design_path,
                         const std::vector<std::string>& requested) {
  Json doc = load_json(design_path);
  auto [design, res] = design_from_json(doc);

  std::set<std::string> want(requested.begin(), requested.end());
  const std::set<std::string> known{"all", "bibd", "resolution",
                                    "intersections", "bose"};
  for (const std::string& name : want) {
    if (!known.count(name))
      throw std::invalid_argument("unknown check '" + name + "'");
  }
  if (want.empty() || want.count("all"))
    want = {"bibd", "resolution", "intersections", "bose"};

  BibdReport bibd = verify_bibd(design);
  ResolutionReport res_report;
  if (res) res_report = verify_resolution(design, *res);

  Json checks = Json::array();
  std::vector<std::string> violations;

  if (want.count("bibd")) {
    Json c = Json::object();
    c["name"] = "bibd";
    c["ok"] = bibd.is_bibd;
    c["uniform_block_size"] = bibd.uniform_block_size;
    c["alpha"] = bibd.alpha;
    c["uniform_replication"] = bibd.uniform_replication;
    c["rho"] = bibd.rho;
    c["constant_pair_coverage"] = bibd.constant_pair_coverage;
    c["lambda"] = bibd.lambda;
    c["repeated_blocks"] = bibd.repeated_blocks;
    c["violations"] = bibd.violations;
    checks.push_back(std::move(c));
    if (!bibd.is_bibd) {
      for (const std::string& v : bibd.violations)
        violations.push_back("bibd: " + v);
    }
  }

  if (want.count("resolution")) {
    Json c = Json::object();
    c["name"] = "resolution";
    c["applicable"] = res.has_value();
    c["ok"] = !res || res_report.ok;
    if (res) {
      c["classes"] = res->classes.size();
      c["violations"] = res_report.violations;
      if (!res_report.ok) {
        for (const std::string& v : res_report.violations)
          violations.push_back("resolution: " + v);
      }
    }
    checks.push_back(std::move(c));
  }

  if (want.count("intersections")) {
    Json c = Json::object();
    c["name"] = "intersections";
    const bool applicable = res.has_value() && res_report.ok;
    c["applicable"] = applicable;
    bool ok = true;
    if (applicable) {
      IntersectionProfile prof = intersection_profile(design, *res);
      Json within = Json::object();
      for (const auto& [size, count] : prof.within)
        within[std::to_string(size)] = count;
      Json cross = Json::object();
      for (const auto& [size, count] : prof.cross)
        cross[std::to_string(size)] = count;
      c["within"] = std::move(within);
      c["cross"] = std::move(cross);
      ok = prof.within.empty() ||
           (prof.within.size() == 1 && prof.within.begin()->first == 0);
      bool affine_cross = false;
      if (bibd.uniform_block_size && prof.cross.size() == 1) {
        uint64_t a2 = static_cast<uint64_t>(bibd.alpha) * bibd.alpha;
        affine_cross = a2 % design.theta == 0 &&
                       prof.cross.begin()->first == a2 / design.theta;
      }
      c["affine_cross"] = affine_cross;
      if (!ok)
        violations.push_back("intersections: same-class blocks overlap");
    }
    c["ok"] = ok;
    checks.push_back(std::move(c));
  }

  if (want.count("bose")) {
    Json c = Json::object();
    c["name"] = "bose";
    const bool applicable = bibd.is_bibd && res.has_value() && res_report.ok;
    c["applicable"] = applicable;
    bool ok = true;
    if (applicable) {
      int64_t slack = bose_slack(design, *res);
      c["slack"] = slack;
      c["affine_resolvable"] = slack == 0;
      ok = slack >= 0;
      if (!ok) violations.push_back("bose: n < theta + rho - 1");
    }
    c["ok"] = ok;
    checks.push_back(std::move(c));
  }

  CommandResult out;
  out.status = violations.empty() ? "ok" : "violation";
  out.payload["status"] = out.status;
  out.payload["family"] = design.family;
  out.payload["theta"] = design.theta;
  out.payload["n"] = design.blocks.size();
  out.payload["checks"] = std::move(checks);
  out.payload["violations"] = violations;
  if (violations.empty()) {
    out.human_summary = "verify: ok";
  } else {
    out.human_summary = "verify: VIOLATION";
    for (const std::string& v : violations) out.human_summary += "\n  " + v;
  }
  return out;
}

struct RateArgs {
  std::string design_path;
  std::vector<size_t> classes;
  uint32_t beta = 0;
  uint32_t k = 0;
  std::string mode = "exact";
  uint64_t trials = 1000;
};

CommandResult run_rate(const RateArgs& a, uint64_t seed) {
  Json doc = load_json(a.design_path);
  auto [design, res] = design_from_json(doc);

  FRCode code;
  if (!a.classes.empty()) {
    if (!res)
      throw std::invalid_argument(
          "--classes given but the design has no resolution");
    code = fr_from_classes(design, *res, a.classes, a.beta);
  } else if (res) {
    code = fr_from_classes(design, *res, all_classes(*res), a.beta);
  } else {
    code = fr_from_design(design, a.beta, 0);
  }

  RateOptions opt;
  if (a.mode == "sampled") {
    opt.mode = RateOptions::Mode::sampled;
    opt.trials = a.trials;
    opt.seed = seed;
  }
  RateResult rate = code_rate(code, a.k, opt);
  const int64_t floor_value =
      static_cast<int64_t>(a.k) * code.alpha -
      static_cast<int64_t>(a.k) * (a.k - 1) / 2 * code.beta;
  const int64_t margin = static_cast<int64_t>(rate.value) - floor_value;

  CommandResult out;
  // A sampled value is only an upper bound: it can prove a violation but
  // never certify goodness.
  Json good;
  if (margin < 0) {
    good = false;
  } else if (rate.exact) {
    good = true;
  }
  out.status = margin < 0 ? "violation" : "ok";

  out.payload["status"] = out.status;
  out.payload["family"] = design.family;
  out.payload["n"] = code.nodes.size();
  out.payload["classes"] =
      code.resolution ? Json(code.resolution->classes.size()) : Json(nullptr);
  out.payload["beta"] = code.beta;
  out.payload["k"] = a.k;
  out.payload["mode"] = rate.exact ? "exact" : "sampled";
  out.payload["rate"] = rate.value;
  out.payload["exact"] = rate.exact;
  out.payload["witness"] = rate.witness;
  out.payload["floor"] = floor_value;
  out.payload["margin"] = margin;
  out.payload["good"] = good;
  if (out.status == "violation") {
    out.payload["violations"] =
        std::vector<std::string>{"universal goodness: R_C(k) below the floor"};
  }

  std::string bound_note = rate.exact ? "exact" : "upper bound";
  out.human_summary =
      "R_C(" + std::to_string(a.k) + ") = " + std::to_string(rate.value) +
      " (" + bound_note + "), floor " + std::to_string(floor_value) +
      ", margin " + std::to_string(margin) +
      (good.is_null() ? ", goodness undetermined"
                      : (good.get<bool>() ? ", universally good"
                                          : ", VIOLATES the floor"));
  return out;
}

CommandResult run_simulate(const std::string& scenario_path) {
  Json scenario = load_json(scenario_path);
  std::string design_field;
  try {
    design_field = scenario.at("design").get<std::string>();
  } catch (const Json::exception&) {
    throw std::invalid_argument(
        "scenario must name its design file in a \"design\" key");
  }
  std::filesystem::path design_path(design_field);
  if (design_path.is_relative()) {
    design_path =
        std::filesystem::path(scenario_path).parent_path() / design_path;
  }
  Json design_doc = load_json(design_path.string());

  Json trace = run_scenario(scenario, design_doc);
  const bool ok = trace.at("ok").get<bool>();

  CommandResult out;
  out.status = ok ? "ok" : "violation";
  if (!ok) {
    std::vector<std::string> violations;
    for (const Json& round : trace.at("rounds")) {
      if (!round.at("repair_exact").get<bool>())
        violations.push_back("repair not exact");
      if (round.at("payload_field_ops").get<uint64_t>() != 0)
        violations.push_back("repair touched payloads with field arithmetic");
    }
    if (!trace.at("reconstruction").at("ok").get<bool>())
      violations.push_back("reconstruction mismatch");
    trace["violations"] = violations;
  }
  out.payload = std::move(trace);

  out.human_summary =
      std::string("scenario ") + (ok ? "ok" : "VIOLATION") +
      ": M=" + out.payload.at("M").dump() +
      " k=" + out.payload.at("k").dump() + ", " +
      std::to_string(out.payload.at("rounds").size()) + " repair rounds, " +
      out.payload.at("downloads_total").dump() + " packets downloaded, " +
      out.payload.at("reconstruction").at("checked").dump() +
      " reconstructions checked";
  return out;
}

struct MeasuredRow {
  uint32_t theta = 0;
  uint64_t n = 0;
  uint32_t alpha = 0;
  uint32_t beta = 0;
  uint32_t rho = 0;
};

MeasuredRow measure(const Design& design, const Resolution& res) {
  MeasuredRow row;
  row.theta = design.theta;
  row.n = design.blocks.size();
  BibdReport bibd = verify_bibd(design);
  row.alpha = bibd.uniform_block_size ? bibd.alpha : 0;
  row.rho = bibd.uniform_replication ? bibd.rho : 0;
  IntersectionProfile prof = intersection_profile(design, res);
  if (prof.cross.size() == 1) row.beta = prof.cross.begin()->first;
  return row;
}

Json row_json(const MeasuredRow& row) {
  return Json{{"theta", row.theta},
              {"n", row.n},
              {"alpha", row.alpha},
              {"beta", row.beta},
              {"rho", row.rho}};
}

CommandResult run_table(const std::string& name) {
  CommandResult out;
  Json rows = Json::array();
  std::vector<std::string> violations;

  if (name == "affine-geometries") {
    struct AgRow {
      uint32_t q, m;
      MeasuredRow expect;
    };
    const AgRow table[] = {
        {2, 4, {16, 30, 8, 4, 15}},    {2, 5, {32, 62, 16, 8, 31}},
        {2, 6, {64, 126, 32, 16, 63}}, {3, 3, {27, 39, 9, 3, 13}},
        {3, 4, {81, 120, 27, 9, 40}},  {3, 5, {243, 363, 81, 27, 121}},
    };
    for (const AgRow& spec : table) {
      Constructed c = affine_geometry_hyperplanes(spec.q, spec.m);
      MeasuredRow got = measure(c.design, c.resolution);
      const bool pass =
          got.theta == spec.expect.theta && got.n == spec.expect.n &&
          got.alpha == spec.expect.alpha && got.beta == spec.expect.beta &&
          got.rho == spec.expect.rho;
      rows.push_back(Json{{"q", spec.q},
                          {"m", spec.m},
                          {"expected", row_json(spec.expect)},
                          {"measured", row_json(got)},
                          {"pass", pass}});
      if (!pass)
        violations.push_back("table row q=" + std::to_string(spec.q) +
                             " m=" + std::to_string(spec.m) + " mismatch");
    }
    out.payload["table"] = name;
  } else if (name == "hadamard") {
    struct HadRow {
      uint32_t m;
      MeasuredRow expect;
    };
    const HadRow table[] = {
        {2, {8, 14, 4, 2, 7}},   {3, {12, 22, 6, 3, 11}},
        {5, {20, 38, 10, 5, 19}}, {6, {24, 46, 12, 6, 23}},
        {7, {28, 54, 14, 7, 27}}, {8, {32, 62, 16, 8, 31}},
    };
    for (const HadRow& spec : table) {
      if (spec.m == 5) {
        // The printed table skips m=4: q = 4m-1 = 15 is not a prime power,
        // so no quadratic-residue difference set exists there.
        rows.push_back(Json{{"m", 4},
                            {"skipped", true},
                            {"reason", "q = 15 is not a prime power"}});
      }
      Constructed c = hadamard_design(spec.m);
      MeasuredRow got = measure(c.design, c.resolution);
      const bool pass =
          got.theta == spec.expect.theta && got.n == spec.expect.n &&
          got.alpha == spec.expect.alpha && got.beta == spec.expect.beta &&
          got.rho == spec.expect.rho;
      rows.push_back(Json{{"m", spec.m},
                          {"expected", row_json(spec.expect)},
                          {"measured", row_json(got)},
                          {"pass", pass}});
      if (!pass)
        violations.push_back("table row m=" + std::to_string(spec.m) +
                             " mismatch");
    }
    out.payload["table"] = name;
  } else {
    throw std::invalid_argument(
        "unknown table '" + name + "' (catalog: affine-geometries, hadamard)");
  }

  out.status = violations.empty() ? "ok" : "violation";
  out.payload["status"] = out.status;
  out.payload["rows"] = std::move(rows);
  out.payload["all_pass"] = violations.empty();
  out.payload["violations"] = violations;

  out.human_summary = "table " + name;
  for (const Json& row : out.payload["rows"]) {
    if (row.contains("skipped")) {
      out.human_summary += "\n  m=4: skipped (" +
                           row.at("reason").get<std::string>() + ")";
      continue;
    }
    const Json& m = row.at("measured");
    std::string params;
    if (row.contains("q")) params += "q=" + row.at("q").dump() + " ";
    params += "m=" + row.at("m").dump();
    out.human_summary +=
        "\n  " + params + ": theta=" + m.at("theta").dump() + " n=" +
        m.at("n").dump() + " alpha=" + m.at("alpha").dump() + " beta=" +
        m.at("beta").dump() + " rho=" + m.at("rho").dump() +
        (row.at("pass").get<bool>() ? " pass" : " FAIL");
  }
  out.human_summary +=
      violations.empty() ? "\n  all rows pass" : "\n  MISMATCHES PRESENT";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional repetition code toolkit", "frtool"};
  app.require_subcommand(1);

  std::string out_path;
  uint64_t seed = 0;
  bool json_out = false;
  app.add_option("--out", out_path, "write the command's JSON artifact here");
  app.add_option("--seed", seed, "seed for sampled modes")
      ->capture_default_str();
  app.add_flag("--json", json_out, "print the JSON payload, not the summary");

  auto* construct =
      app.add_subcommand("construct", "build a code family's design");
  construct->fallthrough();
  ConstructArgs construct_args;
  construct
      ->add_option("--family", construct_args.family,
                   "affine-plane | affine-geometry | hadamard | mols | grid | "
                   "complete-graph")
      ->required();
  construct->add_option("--q", construct_args.q, "field order");
  construct->add_option("--m", construct_args.m,
                        "geometry dimension, or the Hadamard parameter");
  construct->add_option("--s", construct_args.s, "square side length");
  construct->add_option("--r", construct_args.r,
                        "parallel classes kept for mols (default s+1)");
  construct->add_option("--v", construct_args.v, "complete-graph vertices");

  auto* verify = app.add_subcommand("verify", "check design properties");
  verify->fallthrough();
  std::string verify_path;
  std::vector<std::string> verify_checks;
  verify->add_option("design", verify_path, "design JSON file")->required();
  verify
      ->add_option("--checks", verify_checks,
                   "all, bibd, resolution, intersections, bose")
      ->delimiter(',');

  auto* rate = app.add_subcommand("rate", "code rate and goodness margin");
  rate->fallthrough();
  RateArgs rate_args;
  rate->add_option("design", rate_args.design_path, "design JSON file")
      ->required();
  rate->add_option("--classes", rate_args.classes,
                   "parallel classes to keep (default: all)")
      ->delimiter(',');
  rate->add_option("--beta", rate_args.beta, "per-helper repair degree")
      ->required();
  rate->add_option("--k", rate_args.k, "reconstruction degree")->required();
  rate->add_option("--mode", rate_args.mode, "exact | sampled")
      ->check(CLI::IsMember({"exact", "sampled"}))
      ->capture_default_str();
  rate->add_option("--trials", rate_args.trials, "sampled-mode trials")
      ->capture_default_str();

  auto* simulate =
      app.add_subcommand("simulate", "run a failure/repair scenario");
  simulate->fallthrough();
  std::string scenario_path;
  simulate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();

  auto* table = app.add_subcommand("table", "regenerate a published table");
  table->fallthrough();
  std::string table_name;
  table->add_option("name", table_name, "affine-geometries | hadamard")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    CommandResult result;
    if (construct->parsed()) {
      result = run_construct(construct_args);
    } else if (verify->parsed()) {
      result = run_verify(verify_path, verify_checks);
    } else if (rate->parsed()) {
      result = run_rate(rate_args, seed);
    } else if (simulate->parsed()) {
      result = run_simulate(scenario_path);
    } else {
      result = run_table(table_name);
    }

    if (!out_path.empty()) write_json(out_path, result.payload);
    if (json_out) {
      std::cout << result.payload.dump(2) << '\n';
    } else {
      std::cout << result.human_summary << '\n';
    }
    return result.status == "ok" ? 0 : 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

// twistlab CLI: census, oracle-census, moments, height, rootnum, csbound.
//
// Exit codes: 0 ok, 2 config error, 3 precision unattainable, 4 domain
// error, 5 internal invariant failure.
#include "twistlab/arith.hpp"
#include "twistlab/census.hpp"
#include "twistlab/config.hpp"
#include "twistlab/heights.hpp"
#include "twistlab/quartic.hpp"
#include "twistlab/rootnum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace twistlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitDomain = 4;
constexpr int kExitInternal = 5;

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Every output file starts with a header recording version, curve and the
// full run config. Thread count is deliberately not part of it: outputs
// must be byte-identical across thread counts.
std::string header_line(const BaseCurve& c, const std::string& cmd, const std::string& params) {
  std::ostringstream os;
  os << "twistlab " << kVersion << " cmd=" << cmd << " curve=" << c.label << " A=" << c.A.get_str()
     << " B=" << c.B.get_str() << " N=" << c.conductor << " w=" << c.base_root_number << " "
     << params;
  return os.str();
}

BigInt parse_bigint(const std::string& s) {
  try {
    return BigInt(s);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not an integer: " + s);
  }
}

BigRat parse_rational(const std::string& s) {
  try {
    BigRat r(s);
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational: " + s);
  }
}

struct CensusArgs {
  std::string curve_path;
  double Y = 0.0;
  std::string mode = "fast";
  double kappa = 4.0;
  double target_error = 1e-3;
  int threads = 0;
  int doubling_cap = 10;
  std::string out = "census";
  std::string cache_dir;
  long boundary_limit = -1;
  // oracle-census only
  long d_max = 500;
  long naive_bound = 0;
};

CensusConfig census_config(const CensusArgs& a) {
  CensusConfig cfg;
  if (a.mode == "fast")
    cfg.mode = RangeMode::fast;
  else if (a.mode == "rigorous")
    cfg.mode = RangeMode::rigorous;
  else
    throw CLI::ValidationError("--mode must be fast or rigorous");
  cfg.kappa = a.kappa;
  cfg.target_error = a.target_error;
  cfg.threads = a.threads;
  cfg.heights.doubling_cap = a.doubling_cap;
  return cfg;
}

// Cache base path for a census-style run. The key carries everything the
// result depends on, so a hit can be replayed byte-for-byte.
std::string cache_base(const BaseCurve& curve, const CensusArgs& args, const std::string& cmd,
                       const std::string& extra) {
  std::ostringstream key;
  key << cmd << "_A" << curve.A.get_str() << "_B" << curve.B.get_str() << "_Y"
      << fmt_real(args.Y) << "_" << args.mode << "_k" << fmt_real(args.kappa) << "_e"
      << fmt_real(args.target_error) << "_c" << args.doubling_cap << extra;
  return args.cache_dir + "/" + key.str();
}

bool replay_cached_outputs(const CensusArgs& args, const std::string& base) {
  namespace fs = std::filesystem;
  if (args.cache_dir.empty() || !fs::exists(base + ".csv") || !fs::exists(base + ".json"))
    return false;
  fs::copy_file(base + ".csv", args.out + ".csv", fs::copy_options::overwrite_existing);
  fs::copy_file(base + ".json", args.out + ".json", fs::copy_options::overwrite_existing);
  return true;
}

int write_census_outputs(const BaseCurve& curve, const CensusReport& rep, const CensusArgs& args,
                         const std::string& cmd, const std::string& params,
                         const std::string& cache_extra) {
  std::string hdr = header_line(curve, cmd, params);

  if (!args.cache_dir.empty()) {
    std::filesystem::create_directories(args.cache_dir);
    std::string base = cache_base(curve, args, cmd, cache_extra);
    std::ofstream cc(base + ".csv"), cj(base + ".json");
    write_census_csv(rep, cc, hdr);
    write_census_json(rep, curve, cj, params);
  }

  std::ofstream csv(args.out + ".csv");
  if (!csv) throw std::invalid_argument("cannot write " + args.out + ".csv");
  write_census_csv(rep, csv, hdr);
  std::ofstream js(args.out + ".json");
  if (!js) throw std::invalid_argument("cannot write " + args.out + ".json");
  write_census_json(rep, curve, js, params);

  std::cout << "count=" << rep.count << " boundary=" << rep.boundary_count
            << " ar_predicted=" << fmt_real(rep.ar_predicted) << "\n";
  if (args.boundary_limit >= 0 && rep.boundary_count > static_cast<u64>(args.boundary_limit))
    return kExitPrecision;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"twistlab: canonical heights, twist censuses and quartic-form moments"};
  app.require_subcommand(1);

  CensusArgs cargs;
  std::string moments_curve, moments_out = "moments";
  std::vector<long> moments_z;
  int moments_threads = 0;
  bool moments_hashed = false;

  std::string height_curve, height_d, height_x, height_y;
  double height_target = 1e-4;
  int height_cap = 10;

  std::string root_curve, root_d;
  bool root_dump = false;

  std::string cs_curve;
  long cs_z = 0;
  int cs_nu = 0;
  int cs_threads = 0;

  auto* census_cmd = app.add_subcommand("census", "build the census H(Y)");
  census_cmd->add_option("--curve", cargs.curve_path, "curve config JSON")->required();
  census_cmd->add_option("--Y", cargs.Y, "census level Y")->required();
  census_cmd->add_option("--mode", cargs.mode, "fast|rigorous (default fast)");
  census_cmd->add_option("--kappa", cargs.kappa, "fast-mode range factor R = kappa*Y^2");
  census_cmd->add_option("--target-error", cargs.target_error, "eta_log precision");
  census_cmd->add_option("--threads", cargs.threads, "worker threads (0 = auto)");
  census_cmd->add_option("--doubling-cap", cargs.doubling_cap, "max exact doublings");
  census_cmd->add_option("--out", cargs.out, "output path prefix");
  census_cmd->add_option("--cache-dir", cargs.cache_dir, "cache directory");
  census_cmd->add_option("--boundary-limit", cargs.boundary_limit,
                         "exit 3 if more twists stay unresolved (-1 = never)");

  auto* oracle_cmd = app.add_subcommand("oracle-census", "brute-force census oracle");
  oracle_cmd->add_option("--curve", cargs.curve_path)->required();
  oracle_cmd->add_option("--Y", cargs.Y)->required();
  oracle_cmd->add_option("--dmax", cargs.d_max, "scan squarefree |d| <= dmax");
  oracle_cmd->add_option("--naive-bound", cargs.naive_bound, "x-height bound (0 = derive)");
  oracle_cmd->add_option("--target-error", cargs.target_error);
  oracle_cmd->add_option("--threads", cargs.threads);
  oracle_cmd->add_option("--doubling-cap", cargs.doubling_cap);
  oracle_cmd->add_option("--out", cargs.out);
  oracle_cmd->add_option("--boundary-limit", cargs.boundary_limit);

  auto* moments_cmd = app.add_subcommand("moments", "quartic-form moment sweep");
  moments_cmd->add_option("--curve", moments_curve)->required();
  moments_cmd->add_option("--Z", moments_z, "box sizes (repeatable)")->required();
  moments_cmd->add_option("--threads", moments_threads);
  moments_cmd->add_flag("--hashed", moments_hashed, "use the hashed multiset fast path");
  moments_cmd->add_option("--out", moments_out, "output path prefix");

  auto* height_cmd = app.add_subcommand("height", "canonical height of one point");
  height_cmd->add_option("--curve", height_curve)->required();
  height_cmd->add_option("--d", height_d, "twist index")->required();
  height_cmd->add_option("--x", height_x, "affine X (rational)")->required();
  height_cmd->add_option("--y", height_y, "affine Y (rational)")->required();
  height_cmd->add_option("--target-error", height_target);
  height_cmd->add_option("--doubling-cap", height_cap);

  auto* root_cmd = app.add_subcommand("rootnum", "twist root number");
  root_cmd->add_option("--curve", root_curve)->required();
  root_cmd->add_option("--d", root_d, "twist index");
  root_cmd->add_flag("--dump", root_dump, "print the residue table");

  auto* cs_cmd = app.add_subcommand("csbound", "Cauchy-Schwarz data inequality");
  cs_cmd->add_option("--curve", cs_curve)->required();
  cs_cmd->add_option("--Z", cs_z, "box size")->required();
  cs_cmd->add_option("--nu", cs_nu, "sign (+1 or -1)")->required();
  cs_cmd->add_option("--threads", cs_threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (census_cmd->parsed() || oracle_cmd->parsed()) {
      const bool oracle = oracle_cmd->parsed();
      BaseCurve curve = load_curve(cargs.curve_path);
      CensusConfig cfg = census_config(cargs);
      std::string cache_extra;
      if (oracle)
        cache_extra = "_D" + std::to_string(cargs.d_max) + "_nb" + std::to_string(cargs.naive_bound);
      if (!cargs.cache_dir.empty() &&
          replay_cached_outputs(cargs, cache_base(curve, cargs, oracle ? "oracle-census" : "census",
                                                  cache_extra))) {
        std::ifstream js(cargs.out + ".json");
        auto j = nlohmann::json::parse(js);
        u64 boundary = j.at("boundary_count").get<u64>();
        std::cout << "count=" << j.at("count").get<u64>() << " boundary=" << boundary
                  << " (cached)\n";
        if (cargs.boundary_limit >= 0 && boundary > static_cast<u64>(cargs.boundary_limit))
          return kExitPrecision;
        return kExitOk;
      }
      CensusReport rep = oracle
                             ? brute_force_census(curve, cargs.Y, cargs.d_max, cargs.naive_bound, cfg)
                             : build_census(curve, cargs.Y, cfg);
      std::ostringstream params;
      params << "Y=" << fmt_real(cargs.Y);
      if (oracle)
        params << " dmax=" << cargs.d_max << " naive_bound=" << cargs.naive_bound;
      else
        params << " mode=" << cargs.mode << " kappa=" << fmt_real(cargs.kappa);
      params << " target_error=" << fmt_real(cargs.target_error) << " doubling_cap="
             << cargs.doubling_cap;
      return write_census_outputs(curve, rep, cargs, oracle ? "oracle-census" : "census",
                                  params.str(), cache_extra);
    }

    if (moments_cmd->parsed()) {
      BaseCurve curve = load_curve(moments_curve);
      RootRule rule = derive_rule(curve);
      QuarticForm form = QuarticForm::of(curve);
      MomentOptions opts;
      opts.threads = moments_threads;
      opts.hashed_fast_path = moments_hashed;
      std::ostringstream params;
      params << "Z=";
      for (std::size_t i = 0; i < moments_z.size(); ++i)
        params << (i ? "," : "") << moments_z[i];
      params << " hashed=" << (moments_hashed ? 1 : 0);
      std::ofstream csv(moments_out + ".csv");
      if (!csv) throw std::invalid_argument("cannot write " + moments_out + ".csv");
      csv << "# " << header_line(curve, "moments", params.str()) << "\n";
      csv << "Z,R_Q,S_plus,S_minus,S_unknown,distinct_plus,distinct_minus,ratio_R,"
             "ratio_S_plus,ratio_S_minus\n";
      for (long z : moments_z) {
        if (z < 1) throw std::invalid_argument("Z must be >= 1");
        MomentReport rep = box_moments(form, z, rule, opts);
        double z2 = static_cast<double>(z) * z;
        csv << z << ',' << rep.R_Q.get_str() << ',' << rep.S_plus << ',' << rep.S_minus << ','
            << rep.S_unknown << ',' << rep.distinct_plus << ',' << rep.distinct_minus << ','
            << fmt_real(rep.R_Q.get_d() / z2) << ',' << fmt_real(rep.S_plus / z2) << ','
            << fmt_real(rep.S_minus / z2) << '\n';
      }
      std::cout << "wrote " << moments_out << ".csv\n";
      return kExitOk;
    }

    if (height_cmd->parsed()) {
      BaseCurve curve = load_curve(height_curve);
      BigInt d = parse_bigint(height_d);
      TwistPoint p = TwistPoint::from_affine(parse_rational(height_x), parse_rational(height_y));
      if (!on_curve(curve, d, p)) {
        std::cerr << "point " << p.str() << " is not on E_" << d.get_str() << "\n";
        return kExitDomain;
      }
      HeightsConfig hcfg;
      hcfg.doubling_cap = height_cap;
      HeightValue h = canonical_height(curve, d, p, height_target, hcfg);
      std::cout << "d=" << d.get_str() << " point=" << p.str() << " target_error="
                << fmt_real(height_target) << " doubling_cap=" << height_cap << "\n";
      std::cout << "h_hat=" << fmt_real(h.value) << " error_bound=" << fmt_real(h.error_bound)
                << "\n";
      return kExitOk;
    }

    if (root_cmd->parsed()) {
      BaseCurve curve = load_curve(root_curve);
      RootRule rule = derive_rule(curve);
      if (root_dump) {
        std::cout << "# modulus=" << rule.modulus
                  << " reflect_negative=" << (rule.reflect_negative ? 1 : 0) << "\n";
        for (auto& [r, w] : rule.table_pos) std::cout << "+ " << r << " " << w << "\n";
        for (auto& [r, w] : rule.table_neg) std::cout << "- " << r << " " << w << "\n";
      }
      if (!root_d.empty()) {
        Omega w = omega(rule, parse_bigint(root_d));
        std::cout << "omega(E_" << root_d << ") = "
                  << (w == Omega::unknown ? std::string("unknown") : std::to_string(omega_int(w)))
                  << "\n";
      }
      return kExitOk;
    }

    if (cs_cmd->parsed()) {
      BaseCurve curve = load_curve(cs_curve);
      if (cs_nu != 1 && cs_nu != -1) throw CLI::ValidationError("--nu must be +1 or -1");
      if (cs_z < 1) throw CLI::ValidationError("--Z must be >= 1");
      RootRule rule = derive_rule(curve);
      MomentOptions opts;
      opts.threads = cs_threads;
      CsCheck chk = cauchy_schwarz_check(QuarticForm::of(curve), cs_z, cs_nu, rule, opts);
      std::cout << "lhs=" << chk.lhs.get_str() << " rhs=" << chk.rhs.get_str() << " holds="
                << (chk.holds ? "true" : "false") << "\n";
      if (!chk.holds) return kExitInternal;  // the inequality is a theorem
      return kExitOk;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PrecisionUnattainable& e) {
    std::cerr << "precision unattainable: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

#include "convforge/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "convforge/approx.hpp"
#include "convforge/errors.hpp"
#include "convforge/factorize.hpp"
#include "convforge/json_io.hpp"
#include "convforge/network.hpp"
#include "rng.hpp"

namespace convforge::cli {

namespace {

using io::json;

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("IoError", "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("MalformedInput", "'" + path + "' is not valid JSON: " + e.what());
  }
}

// temp file + rename, so readers never observe a partial file
void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw InvalidArgument("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> params;
  for (const auto& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InvalidArgument("target parameter '" + item + "' must look like key=value");
    }
    try {
      params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("target parameter '" + item + "' has a non-numeric value");
    }
  }
  return params;
}

struct Run {
  std::string command;
  std::vector<std::string> arguments;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> inputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add_input(const std::string& path) { inputs[path] = file_digest(path); }

  // Writes the primary output plus its manifest, or prints to `out` when no
  // output path was given.
  void emit(const std::string& path, const std::string& content, std::ostream& out,
            const std::map<std::string, std::string>& extra = {}) const {
    if (path.empty()) {
      out << content;
      return;
    }
    write_atomic(path, content);
    std::map<std::string, std::string> outputs{{path, file_digest(path)}};
    for (const auto& [p, body] : extra) {
      write_atomic(p, body);
      outputs[p] = file_digest(p);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = io::document("manifest", {{"command", command},
                                              {"arguments", arguments},
                                              {"seed", seed ? json(*seed) : json(nullptr)},
                                              {"tool_version", kToolVersion},
                                              {"wall_time_seconds", wall},
                                              {"inputs", inputs},
                                              {"outputs", outputs}});
    write_atomic(path + ".manifest.json", manifest.dump(2) + "\n");
  }
};

std::vector<double> evaluate_points(const DeepCnn& net, const std::vector<Eigen::VectorXd>& pts,
                                    int threads) {
  std::vector<double> values(pts.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                              std::max<std::size_t>(pts.size(), 1));
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < pts.size(); i += workers) values[i] = evaluate(net, pts[i]);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  return values;
}

json error_json(const std::string& kind, const std::string& message, int code) {
  return {{"error", kind}, {"message", message}, {"exit_code", code}};
}

}  // namespace

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deep CNN construction from convolutional factorizations", "convforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // factorize
  std::string fz_input, fz_out;
  int fz_s = 0;
  double fz_tol = 1e-10;
  auto* factorize = app.add_subcommand("factorize", "Factor a sequence into masks supported in {0..s}");
  factorize->add_option("--input", fz_input, "Sequence JSON")->required();
  factorize->add_option("--s", fz_s, "Filter length parameter (s >= 2)")->required();
  factorize->add_option("--tol", fz_tol, "Relative reconstruction tolerance");
  factorize->add_option("--out", fz_out, "Output path (stdout when omitted)");

  // fit
  std::string fit_target, fit_out;
  std::vector<std::string> fit_params;
  int fit_d = 0, fit_m = 0;
  std::uint64_t fit_seed = 0;
  auto* fit = app.add_subcommand("fit", "Fit a ramp-ridge expansion to a preset target");
  fit->add_option("--target", fit_target, "gaussian | quadratic | cosine-ridge | linear | ramp")->required();
  fit->add_option("--param", fit_params, "Target parameter key=value (repeatable)");
  fit->add_option("--d", fit_d, "Input dimension")->required();
  fit->add_option("--m", fit_m, "Number of ramp terms")->required();
  fit->add_option("--seed", fit_seed, "RNG seed")->required();
  fit->add_option("--out", fit_out, "Output path (stdout when omitted)");

  // build
  std::string bd_ridge, bd_out;
  int bd_s = 0, bd_J = 0;
  double bd_bound = 1.0, bd_tol = 1e-9;
  auto* build = app.add_subcommand("build", "Build the deep CNN realizing a ridge expansion");
  build->add_option("--ridge", bd_ridge, "Ridge expansion JSON")->required();
  build->add_option("--s", bd_s, "Filter length parameter (2 <= s <= d)")->required();
  build->add_option("--J", bd_J, "Depth")->required();
  build->add_option("--domain-bound", bd_bound, "B^(0): max |x_k| over the domain");
  build->add_option("--factor-tol", bd_tol, "Relative tolerance of the mask factorization");
  build->add_option("--out", bd_out, "Output path (stdout when omitted)");

  // eval
  std::string ev_net, ev_points, ev_out;
  int ev_threads = 1;
  auto* eval = app.add_subcommand("eval", "Evaluate a network on points");
  eval->add_option("--net", ev_net, "Network JSON")->required();
  eval->add_option("--points", ev_points, "Points JSON")->required();
  eval->add_option("--threads", ev_threads, "Worker threads")->check(CLI::PositiveNumber);
  eval->add_option("--out", ev_out, "Output path (stdout when omitted)");

  // verify
  std::string vf_net, vf_ridge;
  int vf_samples = 1000, vf_threads = 1;
  std::uint64_t vf_seed = 0;
  double vf_tol = 1e-8;
  auto* verify = app.add_subcommand("verify", "Check that a network reproduces its ridge expansion");
  verify->add_option("--net", vf_net, "Network JSON")->required();
  verify->add_option("--ridge", vf_ridge, "Ridge expansion JSON")->required();
  verify->add_option("--samples", vf_samples, "Random points in [-B0,B0]^d")->check(CLI::PositiveNumber);
  verify->add_option("--seed", vf_seed, "Seed of the sample points");
  verify->add_option("--tol", vf_tol, "Tolerance relative to max(1, B^(j), |F_m|)");
  verify->add_option("--threads", vf_threads, "Worker threads")->check(CLI::PositiveNumber);

  // rate-study
  std::string rs_target, rs_out, rs_csv;
  std::vector<std::string> rs_params;
  std::vector<int> rs_J;
  int rs_d = 0, rs_s = 0, rs_samples = 4096, rs_threads = 1;
  std::uint64_t rs_seed = 0;
  auto* rate = app.add_subcommand("rate-study", "Sup error of fitted networks across depths");
  rate->add_option("--target", rs_target, "gaussian | quadratic | cosine-ridge | linear | ramp")->required();
  rate->add_option("--param", rs_params, "Target parameter key=value (repeatable)");
  rate->add_option("--d", rs_d, "Input dimension")->required();
  rate->add_option("--s", rs_s, "Filter length parameter")->required();
  rate->add_option("--J", rs_J, "Comma-separated depths")->required()->delimiter(',');
  rate->add_option("--seed", rs_seed, "RNG seed")->required();
  rate->add_option("--samples", rs_samples, "Latin-hypercube points for the sup norm")->check(CLI::PositiveNumber);
  rate->add_option("--threads", rs_threads, "Worker threads")->check(CLI::PositiveNumber);
  rate->add_option("--out", rs_out, "Report JSON path (stdout when omitted)");
  rate->add_option("--csv", rs_csv, "Also write the rows as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("UsageError", e.what(), kValidationError).dump() << "\n";
    return kValidationError;
  }

  Run run;
  run.arguments.assign(args.begin(), args.end());
  try {
    if (factorize->parsed()) {
      run.command = "factorize";
      if (fz_s < 2) throw InvalidArgument("s must be ≥ 2");
      const json in = read_json(fz_input);
      run.add_input(fz_input);
      const FiniteSequence W = io::sequence_from_json(in.contains("sequence") ? in.at("sequence") : in);
      const FactorizationResult result = factorize_mask(W, fz_s, fz_tol);
      run.emit(fz_out, io::to_json(result, fz_s).dump(2) + "\n", out);
    } else if (fit->parsed()) {
      run.command = "fit";
      run.seed = fit_seed;
      const TargetFunction target = make_target(fit_target, fit_d, parse_params(fit_params));
      const RidgeExpansion ridge = fit_ridge(target, fit_d, fit_m, fit_seed);
      json doc = io::to_json(ridge);
      doc["target"] = {{"name", target.name}, {"params", target.params}};
      run.emit(fit_out, doc.dump(2) + "\n", out);
    } else if (build->parsed()) {
      run.command = "build";
      const RidgeExpansion ridge = io::ridge_from_json(read_json(bd_ridge));
      run.add_input(bd_ridge);
      const DeepCnn net = build_network(ridge, bd_s, bd_J, bd_bound, {bd_tol});
      run.emit(bd_out, io::to_json(net).dump(2) + "\n", out);
    } else if (eval->parsed()) {
      run.command = "eval";
      const DeepCnn net = io::network_from_json(read_json(ev_net));
      const auto pts = io::points_from_json(read_json(ev_points));
      run.add_input(ev_net);
      run.add_input(ev_points);
      const auto values = evaluate_points(net, pts, ev_threads);
      run.emit(ev_out, io::document("evaluation", {{"outputs", values}}).dump(2) + "\n", out);
    } else if (verify->parsed()) {
      run.command = "verify";
      const DeepCnn net = io::network_from_json(read_json(vf_net));
      const RidgeExpansion ridge = io::ridge_from_json(read_json(vf_ridge));
      if (ridge.d() != net.config().d) {
        throw DimensionMismatch("ridge expansion and network disagree on d");
      }
      const double bound = net.bound_ledger().front();
      detail::Rng rng(vf_seed);
      std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(vf_samples), Eigen::VectorXd(ridge.d()));
      for (auto& x : pts) {
        for (int i = 0; i < ridge.d(); ++i) x[i] = rng.uniform(-bound, bound);
      }
      const auto values = evaluate_points(net, pts, vf_threads);
      RealizationCheck check;
      for (double b : net.bound_ledger()) check.scale = std::max(check.scale, std::abs(b));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double target = ridge(pts[i]);
        check.scale = std::max(check.scale, std::abs(target));
        check.max_deviation = std::max(check.max_deviation, std::abs(values[i] - target));
      }
      const long long params = count_free_parameters(net);
      const bool pass = check.relative() <= vf_tol;
      json report = io::document("verification",
                                 {{"samples", vf_samples},
                                  {"seed", vf_seed},
                                  {"max_deviation", check.max_deviation},
                                  {"scale", check.scale},
                                  {"relative_deviation", check.relative()},
                                  {"tolerance", vf_tol},
                                  {"param_count", params},
                                  {"param_formula", free_parameter_formula(net.config().s, net.config().d, net.config().J)},
                                  {"pass", pass}});
      out << report.dump(2) << "\n";
      if (!pass) {
        err << error_json("RealizationMismatch",
                          "network deviates from the ridge expansion beyond tolerance",
                          kNumericalFailure)
                   .dump()
            << "\n";
        return kNumericalFailure;
      }
    } else if (rate->parsed()) {
      run.command = "rate-study";
      run.seed = rs_seed;
      const TargetFunction target = make_target(rs_target, rs_d, parse_params(rs_params));
      RateStudyOptions opts;
      opts.samples = rs_samples;
      opts.threads = rs_threads;
      const auto rows = rate_study(target, rs_d, rs_s, rs_J, rs_seed, opts);
      json doc = io::document("rate-study", {{"target", {{"name", target.name}, {"params", target.params}}},
                                             {"d", rs_d},
                                             {"s", rs_s},
                                             {"seed", rs_seed},
                                             {"rows", io::to_json(rows)}});
      if (rows.size() >= 2) doc["log_log_slope"] = log_log_slope(rows);
      std::map<std::string, std::string> extra;
      if (!rs_csv.empty()) extra[rs_csv] = io::to_csv(rows);
      if (rs_out.empty() && !rs_csv.empty()) write_atomic(rs_csv, io::to_csv(rows));
      run.emit(rs_out, doc.dump(2) + "\n", out, extra);
    }
  } catch (const DepthTooSmall& e) {
    json j = error_json(e.kind(), e.what(), kValidationError);
    j["minimal_J"] = e.minimal_depth();
    err << j.dump() << "\n";
    return kValidationError;
  } catch (const DidNotConverge& e) {
    json j = error_json(e.kind(), e.what(), kNumericalFailure);
    j["worst_residual"] = e.worst_residual();
    err << j.dump() << "\n";
    return kNumericalFailure;
  } catch (const ValidationError& e) {
    err << error_json(e.kind(), e.what(), kValidationError).dump() << "\n";
    return kValidationError;
  } catch (const NumericalError& e) {
    err << error_json(e.kind(), e.what(), kNumericalFailure).dump() << "\n";
    return kNumericalFailure;
  } catch (const json::exception& e) {
    err << error_json("MalformedInput", e.what(), kValidationError).dump() << "\n";
    return kValidationError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << error_json("IoError", e.what(), kValidationError).dump() << "\n";
    return kValidationError;
  }
  return kSuccess;
}

}  // namespace convforge::cli

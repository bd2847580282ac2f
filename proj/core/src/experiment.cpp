#include "rwp/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace rwp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

Eigen::VectorXd vec_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw Error("config field '" + key + "' must be a non-empty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error("config field '" + key + "' must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (plant_name != "uuv" && plant_name != "mc") {
    throw Error("config field 'plant': unknown benchmark '" + plant_name + "'");
  }
  repair_method_from_name(method);  // throws with the offending name
  if (K < 1) throw Error("config field 'K' must be >= 1");
  if (lambda < 0.0) throw Error("config field 'lambda' must be >= 0");
  if (sigma < 0.0) throw Error("config field 'sigma' must be >= 0");
  if (tau0 <= 0.0) throw Error("config field 'tau0' must be > 0");
  if (alpha <= 0.0 || alpha >= 1.0) throw Error("config field 'alpha' must lie in (0, 1)");
  if (max_iter < 1) throw Error("config field 'max_iter' must be >= 1");
  if (refine_depth < 0) throw Error("config field 'refine_depth' must be >= 0");
  if (max_outer_iter < 1) throw Error("config field 'max_outer_iter' must be >= 1");
  if (synth_budget < 1) throw Error("config field 'synth_budget' must be >= 1");
  const bool have_box = init_lower.size() > 0 || init_upper.size() > 0 || steps.size() > 0;
  if (have_box) {
    if (init_lower.size() != init_upper.size() || init_lower.size() != steps.size()) {
      throw Error("config fields 'init_lower'/'init_upper'/'steps' must agree in length");
    }
    for (Eigen::Index i = 0; i < steps.size(); ++i) {
      if (!(steps[i] > 0.0)) throw Error("config field 'steps' must be positive");
      if (!(init_upper[i] > init_lower[i])) {
        throw Error("config field 'init_upper' must exceed 'init_lower' in every dimension");
      }
    }
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what(), 0);
  }
  if (!j.is_object()) throw Error("config root must be an object");

  ExperimentConfig cfg;
  for (const auto& [key, val] : j.items()) {
    if (key == "plant") cfg.plant_name = val.get<std::string>();
    else if (key == "formula") cfg.formula_text = val.get<std::string>();
    else if (key == "init_lower") cfg.init_lower = vec_from_json(val, key);
    else if (key == "init_upper") cfg.init_upper = vec_from_json(val, key);
    else if (key == "steps") cfg.steps = vec_from_json(val, key);
    else if (key == "weights") cfg.weights_path = val.get<std::string>();
    else if (key == "synth_budget") cfg.synth_budget = val.get<int>();
    else if (key == "method") cfg.method = val.get<std::string>();
    else if (key == "K") cfg.K = val.get<int>();
    else if (key == "lambda") cfg.lambda = val.get<double>();
    else if (key == "sigma") cfg.sigma = val.get<double>();
    else if (key == "tau0") cfg.tau0 = val.get<double>();
    else if (key == "alpha") cfg.alpha = val.get<double>();
    else if (key == "max_iter") cfg.max_iter = val.get<int>();
    else if (key == "refine_depth") cfg.refine_depth = val.get<int>();
    else if (key == "max_outer_iter") cfg.max_outer_iter = val.get<int>();
    else if (key == "seed") cfg.seed = val.get<std::uint64_t>();
    else if (key == "out_dir") cfg.out_dir = val.get<std::string>();
    else throw Error("config: unknown key '" + key + "'");
  }
  if (!cfg.weights_path.empty() && fs::path(cfg.weights_path).is_relative()) {
    cfg.weights_path = (fs::path(path).parent_path() / cfg.weights_path).string();
  }
  cfg.validate();
  return cfg;
}

namespace {

std::string render_verify_log(const std::vector<VerifyRecord>& before,
                              const std::vector<VerifyRecord>& after) {
  std::ostringstream out;
  out << "rwp-verify-log v1\n";
  out << "phase region_id result refine_depth\n";
  for (const auto& r : before) {
    out << "before " << r.region_id << ' ' << r.result << ' ' << r.refine_depth << '\n';
  }
  for (const auto& r : after) {
    out << "after " << r.region_id << ' ' << r.result << ' ' << r.refine_depth << '\n';
  }
  return out.str();
}

std::string render_iter_log(const std::vector<IterationRecord>& iters) {
  std::ostringstream out;
  out << "rwp-iter-log v1\n";
  out << "outer iter tau energy delta accepted safeguard_ok min_rob\n";
  for (const auto& r : iters) {
    out << r.outer << ' ' << r.iter << ' ' << fmt17(r.tau) << ' ' << fmt17(r.energy) << ' '
        << fmt17(r.delta) << ' ' << (r.accepted ? 1 : 0) << ' ' << (r.safeguard_ok ? 1 : 0) << ' '
        << fmt17(r.min_rob) << '\n';
  }
  return out.str();
}

std::string render_regions(const PartitionState& st) {
  std::ostringstream out;
  const Eigen::Index d = st.regions.empty() ? 0 : st.regions.front().lower.size();
  out << "rwp-regions v1 " << d << '\n';
  out << "id lower... upper... class\n";
  for (std::size_t i = 0; i < st.regions.size(); ++i) {
    out << st.regions[i].id;
    for (Eigen::Index k = 0; k < d; ++k) out << ' ' << fmt17(st.regions[i].lower[k]);
    for (Eigen::Index k = 0; k < d; ++k) out << ' ' << fmt17(st.regions[i].upper[k]);
    out << ' ' << region_class_name(st.cls[i]) << '\n';
  }
  return out.str();
}

json stats_json(const RobStats& s) {
  return {{"mean", s.mean}, {"stddev", s.stddev}, {"count", s.count}};
}

json sizes_json(const SetSizes& s) {
  return {{"verified", s.verified}, {"unknown", s.unknown}, {"failed", s.failed}};
}

json report_json(const RepairResult& r) {
  json j;
  j["format"] = "rwp-report v1";
  j["method"] = r.report.method;
  j["before"] = sizes_json(r.report.before);
  j["after"] = sizes_json(r.report.after);
  j["broken"] = r.report.broken;
  j["repaired"] = r.report.repaired;
  j["broken_ids"] = r.report.broken_ids;
  j["repaired_ids"] = r.report.repaired_ids;
  j["protected_unverified_ids"] = r.report.protected_unverified_ids;
  j["min_rob"] = {
      {"before", {{"failed", stats_json(r.report.before_min_rob_failed)},
                  {"success", stats_json(r.report.before_min_rob_success)},
                  {"overall", stats_json(r.report.before_min_rob_overall)}}},
      {"after", {{"failed", stats_json(r.report.after_min_rob_failed)},
                 {"success", stats_json(r.report.after_min_rob_success)},
                 {"overall", stats_json(r.report.after_min_rob_overall)}}}};
  j["outer_iters"] = r.report.outer_iters;
  j["failed_counts"] = r.failed_counts;
  return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (cfg.out_dir.empty()) throw Error("config field 'out_dir' is required to run an experiment");
  if (threads < 1) throw Error("threads must be >= 1");

  auto plant = make_plant(cfg.plant_name);
  FormulaPtr formula = cfg.formula_text.empty() ? plant->task_formula()
                                                : parse_formula(cfg.formula_text, plant->vars());

  MlpParams theta0 = cfg.weights_path.empty()
                         ? synthesize_seed_controller(*plant, *formula, cfg.synth_budget, cfg.seed)
                         : load_mlp(cfg.weights_path);

  Eigen::VectorXd lo = cfg.init_lower.size() > 0 ? cfg.init_lower : plant->init_lower();
  Eigen::VectorXd hi = cfg.init_upper.size() > 0 ? cfg.init_upper : plant->init_upper();
  Eigen::VectorXd steps = cfg.steps;
  if (steps.size() == 0) steps = (hi - lo) / 10.0;  // 10x10 default grid
  std::vector<Region> regions = partition(lo, hi, steps);

  RepairOptions opt;
  opt.method = repair_method_from_name(cfg.method);
  opt.energy.K = cfg.K;
  opt.energy.lambda = cfg.lambda;
  opt.anneal.sigma = cfg.sigma;
  opt.anneal.tau0 = cfg.tau0;
  opt.anneal.alpha = cfg.alpha;
  opt.anneal.max_iter = cfg.max_iter;
  opt.refine_depth = cfg.refine_depth;
  opt.max_outer_iter = cfg.max_outer_iter;
  opt.seed = cfg.seed;
  opt.threads = threads;

  ExperimentResult res;
  res.repair = run_repair(*plant, *formula, theta0, regions, opt);
  res.out_dir = cfg.out_dir;

  fs::create_directories(cfg.out_dir);
  fs::path out(cfg.out_dir);
  save_mlp((out / "weights_final.txt").string(), res.repair.theta);
  write_file((out / "verification_log.txt").string(),
             render_verify_log(res.repair.verify_before_records,
                               res.repair.verify_after_records));
  write_file((out / "iteration_log.txt").string(), render_iter_log(res.repair.iterations));
  write_file((out / "regions_before.txt").string(), render_regions(res.repair.before));
  write_file((out / "regions_after.txt").string(), render_regions(res.repair.after));
  write_file((out / "report.json").string(), report_json(res.repair).dump(2) + "\n");

  // Wall-clock times live in a sidecar so everything above stays
  // bit-reproducible from (config, seed).
  json timing = {{"format", "rwp-timing v1"},
                 {"verify_before_s", res.repair.times.verify_before},
                 {"sample_s", res.repair.times.sample},
                 {"repair_s", res.repair.times.repair},
                 {"verify_after_s", res.repair.times.verify_after}};
  write_file((out / "timing.json").string(), timing.dump(2) + "\n");
  return res;
}

namespace {

std::string fmt_count(int n, int denom, bool applicable) {
  if (!applicable) return "N/A";
  char buf[64];
  if (n == 0 || denom == 0) {
    std::snprintf(buf, sizeof buf, "%d (0%%)", n);
  } else {
    std::snprintf(buf, sizeof buf, "%d (%.1f%%)", n, 100.0 * n / denom);
  }
  return buf;
}

std::string fmt_pm(const json& stats) {
  if (stats.at("count").get<int>() == 0) return "N/A";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%g ± %g", stats.at("mean").get<double>(),
                stats.at("stddev").get<double>());
  return buf;
}

}  // namespace

std::string report_render(const std::string& report_path) {
  json j;
  try {
    j = json::parse(read_file(report_path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what(), 0);
  }
  if (!j.is_object() || j.value("format", "") != "rwp-report v1") {
    throw Error("report: not a v1 report document");
  }

  const json& before = j.at("before");
  const json& after = j.at("after");
  auto triple = [](const json& s) {
    return std::to_string(s.at("verified").get<int>()) + ":" +
           std::to_string(s.at("unknown").get<int>()) + ":" +
           std::to_string(s.at("failed").get<int>());
  };
  const bool repaired_run = j.at("method").get<std::string>() != "verify-only";
  const bool empty_run = before.at("verified").get<int>() + before.at("unknown").get<int>() +
                             before.at("failed").get<int>() ==
                         0;

  std::vector<std::string> headers = {"Method",       "|Ss|:|Su|:|Sf|", "Broken",
                                      "Repaired",     "Min rob (Sf)",   "Min rob (Ss+Su)",
                                      "Min rob (all)"};
  std::vector<std::vector<std::string>> rows;
  if (!empty_run) rows.push_back({"Before repair", triple(before), "N/A", "N/A",
                  fmt_pm(j.at("min_rob").at("before").at("failed")),
                  fmt_pm(j.at("min_rob").at("before").at("success")),
                  fmt_pm(j.at("min_rob").at("before").at("overall"))});
  if (repaired_run && !empty_run) {
    rows.push_back({j.at("method").get<std::string>(), triple(after),
                    fmt_count(j.at("broken").get<int>(), before.at("verified").get<int>(), true),
                    fmt_count(j.at("repaired").get<int>(), before.at("failed").get<int>(), true),
                    fmt_pm(j.at("min_rob").at("after").at("failed")),
                    fmt_pm(j.at("min_rob").at("after").at("success")),
                    fmt_pm(j.at("min_rob").at("after").at("overall"))});
  }

  std::vector<std::size_t> width(headers.size());
  auto cell_width = [](const std::string& s) {
    // the plus-minus sign is two bytes of UTF-8 but one column
    std::size_t w = s.size();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (static_cast<unsigned char>(s[i]) == 0xc2 && static_cast<unsigned char>(s[i + 1]) == 0xb1)
        --w;
    }
    return w;
  };
  for (std::size_t c = 0; c < headers.size(); ++c) width[c] = cell_width(headers[c]);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], cell_width(row[c]));
  }

  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c] << std::string(width[c] - cell_width(row[c]), ' ');
      out << (c + 1 == row.size() ? "\n" : "  ");
    }
  };
  emit_row(headers);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c + 1 == width.size() ? 0 : 2);
  out << std::string(total, '-') << '\n';
  for (const auto& row : rows) emit_row(row);
  return out.str();
}

std::string emit_plot_data(const std::string& regions_path) {
  std::istringstream in(read_file(regions_path));
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, version;
  int dim = 0;
  hs >> magic >> version >> dim;
  if (magic != "rwp-regions" || version != "v1" || dim < 1) {
    throw Error("plot-data: not a v1 regions file");
  }
  std::string columns;
  std::getline(in, columns);

  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int id;
    ls >> id;
    std::string tok;
    std::vector<std::string> fields;
    while (ls >> tok) fields.push_back(tok);
    if (static_cast<int>(fields.size()) != 2 * dim + 1) {
      throw ParseError("plot-data: malformed region row", 0);
    }
    region_class_from_name(fields.back());  // validates the label
    for (std::size_t i = 0; i < fields.size(); ++i) {
      out << fields[i] << (i + 1 == fields.size() ? "\n" : "\t");
    }
  }
  return out.str();
}

}  // namespace rwp

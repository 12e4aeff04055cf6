#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "topodist/datagen.hpp"
#include "topodist/harness.hpp"
#include "topodist/io.hpp"
#include "topodist/metrics.hpp"
#include "topodist/persistence.hpp"

namespace {

using namespace topodist;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_score(ScoreReport report, double wall_time_seconds, const std::string& out_path) {
  report.wall_time_seconds = wall_time_seconds;
  if (std::isfinite(report.value)) {
    std::cout << format_double(report.value) << "\n";
  } else {
    std::cout << "inf\n";
  }
  if (!out_path.empty()) io::write_report(report, out_path);
}

FeatureMatrix load_features(const std::string& path, const std::string& format) {
  return io::read_features(path, io::parse_format(format));
}

double parse_q(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    return std::stod(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "cannot parse q value: " + text);
  }
}

void write_matrix_csv(const MatrixResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path + " for writing");
  }
  out << "label";
  for (const std::string& label : result.labels) out << "," << label;
  out << "\n";
  for (Eigen::Index i = 0; i < result.scores.rows(); ++i) {
    out << result.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < result.scores.cols(); ++j) {
      out << "," << format_double(result.scores(i, j));
    }
    out << "\n";
  }
  if (!out.good()) {
    throw Error(ErrorCode::io_failure, "error writing " + path);
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Topology distance and related generative-model evaluation metrics"};
  app.require_subcommand(1);

  // Shared option storage. Each subcommand registers only the flags it uses.
  std::string path_a, path_b, probs_path, out_path, report_path, format = "binary";
  std::vector<std::string> paths_a, paths_b;
  std::uint64_t seed = 0;
  double inf_factor = 1.05;
  std::size_t i_max = 100;
  std::size_t splits = 1;
  bool inputs_are_diagrams = false;
  double wasserstein_p = 1.0;
  std::string wasserstein_q = "inf";

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Feature file format")
        ->check(CLI::IsMember({"binary", "csv"}))
        ->capture_default_str();
  };
  auto add_common = [&](CLI::App* cmd) {
    add_format(cmd);
    cmd->add_option("--seed", seed, "Seed recorded in the report")->capture_default_str();
    cmd->add_option("--out", out_path, "Write a json score report here");
  };

  auto pair_metadata = [&](const FeatureMatrix& a, const FeatureMatrix& b) {
    nlohmann::json meta;
    meta["n_a"] = a.count();
    meta["n_b"] = b.count();
    meta["m"] = a.dim();
    meta["seed"] = seed;
    meta["input_a"] = path_a;
    meta["input_b"] = path_b;
    return meta;
  };

  // --- score subcommands -------------------------------------------------
  auto* td_cmd = app.add_subcommand("td", "Topology distance between two feature files");
  td_cmd->add_option("--a", path_a, "Reference features")->required();
  td_cmd->add_option("--b", path_b, "Generated features")->required();
  td_cmd->add_option("--inf-factor", inf_factor, "Infinite-longevity substitution factor")
      ->capture_default_str();
  add_common(td_cmd);
  td_cmd->callback([&]() {
    Stopwatch timer;
    const FeatureMatrix a = load_features(path_a, format);
    const FeatureMatrix b = load_features(path_b, format);
    ScoreReport report{"td", td(a, b, InfinityPolicy{inf_factor}), pair_metadata(a, b)};
    report.metadata["inf_factor"] = inf_factor;
    emit_score(std::move(report), timer.seconds(), out_path);
  });

  auto* fid_cmd = app.add_subcommand("fid", "Frechet distance between Gaussian fits");
  fid_cmd->add_option("--a", path_a)->required();
  fid_cmd->add_option("--b", path_b)->required();
  add_common(fid_cmd);
  fid_cmd->callback([&]() {
    Stopwatch timer;
    const FeatureMatrix a = load_features(path_a, format);
    const FeatureMatrix b = load_features(path_b, format);
    ScoreReport report{"fid", fid(estimate_gaussian(a), estimate_gaussian(b)), pair_metadata(a, b)};
    emit_score(std::move(report), timer.seconds(), out_path);
  });

  auto* kid_cmd = app.add_subcommand("kid", "Unbiased kernel MMD^2 with the cubic kernel");
  kid_cmd->add_option("--a", path_a)->required();
  kid_cmd->add_option("--b", path_b)->required();
  add_common(kid_cmd);
  kid_cmd->callback([&]() {
    Stopwatch timer;
    const FeatureMatrix a = load_features(path_a, format);
    const FeatureMatrix b = load_features(path_b, format);
    ScoreReport report{"kid", kid(a, b), pair_metadata(a, b)};
    emit_score(std::move(report), timer.seconds(), out_path);
  });

  std::string probs_format = "csv";
  auto* is_cmd = app.add_subcommand("is", "Inception score of a probability matrix");
  is_cmd->add_option("--probs", probs_path, "CSV of per-sample class probabilities")->required();
  is_cmd->add_option("--splits", splits, "Number of consecutive splits")->capture_default_str();
  is_cmd->add_option("--format", probs_format, "Probability file format")
      ->check(CLI::IsMember({"binary", "csv"}))
      ->capture_default_str();
  is_cmd->add_option("--seed", seed, "Seed recorded in the report")->capture_default_str();
  is_cmd->add_option("--out", out_path, "Write a json score report here");
  is_cmd->callback([&]() {
    Stopwatch timer;
    const ProbabilityMatrix probs(load_features(probs_path, probs_format).values());
    ScoreReport report;
    report.metric = "is";
    report.metadata["n"] = probs.count();
    report.metadata["classes"] = probs.classes();
    report.metadata["seed"] = seed;
    report.metadata["input"] = probs_path;
    report.metadata["splits"] = splits;
    if (splits <= 1) {
      report.value = inception_score(probs);
    } else {
      const SplitScore score = inception_score_splits(probs, splits);
      report.value = score.mean;
      report.metadata["split_std"] = score.stddev;
    }
    emit_score(std::move(report), timer.seconds(), out_path);
  });

  auto* gs_cmd = app.add_subcommand("gs", "Geometry score between two lists of clouds");
  gs_cmd->add_option("--a", paths_a, "Reference feature files")->required();
  gs_cmd->add_option("--b", paths_b, "Generated feature files")->required();
  gs_cmd->add_option("--i-max", i_max, "RLT truncation length")->capture_default_str();
  add_common(gs_cmd);
  gs_cmd->callback([&]() {
    Stopwatch timer;
    std::vector<DistanceMatrix> a, b;
    for (const std::string& p : paths_a) a.push_back(pairwise_distances(load_features(p, format)));
    for (const std::string& p : paths_b) b.push_back(pairwise_distances(load_features(p, format)));
    ScoreReport report;
    report.metric = "gs";
    report.value = gs(a, b, i_max);
    report.metadata = {{"clouds_a", paths_a}, {"clouds_b", paths_b}, {"i_max", i_max}, {"seed", seed}};
    emit_score(std::move(report), timer.seconds(), out_path);
  });

  auto add_diagram_distance = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--a", path_a)->required();
    cmd->add_option("--b", path_b)->required();
    cmd->add_flag("--diagrams", inputs_are_diagrams,
                  "Treat inputs as diagram json documents instead of feature files");
    if (name == "wasserstein") {
      cmd->add_option("--p", wasserstein_p, "Outer power")->capture_default_str();
      cmd->add_option("--q", wasserstein_q, "Inner norm (number or 'inf')")->capture_default_str();
    }
    add_common(cmd);
    cmd->callback([&, name]() {
      Stopwatch timer;
      auto load_diagram = [&](const std::string& p) {
        if (inputs_are_diagrams) return io::read_diagram(p);
        return persistence_dim0(build_filtration(pairwise_distances(load_features(p, format))));
      };
      const PersistenceDiagram a = load_diagram(path_a);
      const PersistenceDiagram b = load_diagram(path_b);
      ScoreReport report;
      report.metric = name;
      report.metadata = {{"input_a", path_a}, {"input_b", path_b}, {"seed", seed},
                         {"from_diagrams", inputs_are_diagrams}};
      if (name == "bottleneck") {
        report.value = diagram_bottleneck(a, b);
      } else {
        const double q = parse_q(wasserstein_q);
        report.value = diagram_wasserstein(a, b, wasserstein_p, q);
        report.metadata["p"] = wasserstein_p;
        report.metadata["q"] = wasserstein_q;
      }
      emit_score(std::move(report), timer.seconds(), out_path);
    });
  };
  add_diagram_distance("bottleneck", "Bottleneck distance between persistence diagrams");
  add_diagram_distance("wasserstein", "Wasserstein distance between persistence diagrams");

  // --- diagram serialization ----------------------------------------------
  int diagram_dim = 0;
  double max_scale = 0.0;
  auto* diagram_cmd = app.add_subcommand("diagram", "Compute a persistence diagram and write it as json");
  diagram_cmd->add_option("--input", path_a, "Feature file")->required();
  diagram_cmd->add_option("--out", out_path, "Diagram json path")->required();
  diagram_cmd->add_option("--dim", diagram_dim, "Homology dimension (0 or 1)")
      ->check(CLI::IsMember({0, 1}))
      ->capture_default_str();
  diagram_cmd->add_option("--max-scale", max_scale,
                          "Filtration cutoff for dim 1 (default: largest pairwise distance)");
  add_format(diagram_cmd);
  diagram_cmd->add_option("--seed", seed, "Seed recorded in the metadata")->capture_default_str();
  diagram_cmd->callback([&]() {
    const FeatureMatrix features = load_features(path_a, format);
    const DistanceMatrix dist = pairwise_distances(features);
    PersistenceDiagram diagram;
    if (diagram_dim == 0) {
      diagram = persistence_dim0(build_filtration(dist));
    } else {
      double scale = max_scale;
      if (scale <= 0.0) scale = dist.entries().maxCoeff();
      diagram = persistence_dim1(dist, scale);
    }
    nlohmann::json meta = {{"seed", seed}, {"source", path_a}};
    io::write_diagram(diagram, out_path, meta);
  });

  // --- matrix --------------------------------------------------------------
  std::string metric_flag = "td";
  auto* matrix_cmd = app.add_subcommand("matrix", "Pairwise score matrix over two lists of groups");
  matrix_cmd->add_option("--metric", metric_flag, "td|fid|kid|gs|bottleneck|wasserstein")
      ->capture_default_str();
  matrix_cmd->add_option("--a", paths_a, "Group files, side A")->required();
  matrix_cmd->add_option("--b", paths_b, "Group files, side B")->required();
  matrix_cmd->add_option("--out", out_path, "Matrix csv path")->required();
  matrix_cmd->add_option("--report", report_path, "Optional json report path");
  matrix_cmd->add_option("--inf-factor", inf_factor)->capture_default_str();
  matrix_cmd->add_option("--i-max", i_max)->capture_default_str();
  matrix_cmd->add_option("--p", wasserstein_p)->capture_default_str();
  matrix_cmd->add_option("--q", wasserstein_q)->capture_default_str();
  add_format(matrix_cmd);
  matrix_cmd->add_option("--seed", seed, "Seed recorded in the report")->capture_default_str();
  matrix_cmd->callback([&]() {
    Stopwatch timer;
    const Metric metric = parse_metric(metric_flag);
    HarnessOptions options;
    options.inf_policy.factor = inf_factor;
    options.i_max = i_max;
    options.wasserstein_p = wasserstein_p;
    options.wasserstein_q = parse_q(wasserstein_q);
    std::vector<FeatureMatrix> a, b;
    for (const std::string& p : paths_a) a.push_back(load_features(p, format));
    for (const std::string& p : paths_b) b.push_back(load_features(p, format));
    const MatrixResult result = score_matrix(metric, a, b, options);
    write_matrix_csv(result, out_path);

    ScoreReport report;
    report.metric = "matrix:" + metric_flag;
    report.value = result.cross_median;
    report.metadata = {{"within_a_median", result.within_a_median},
                       {"within_b_median", result.within_b_median},
                       {"within_median", result.within_median},
                       {"cross_median", result.cross_median},
                       {"groups_a", paths_a},
                       {"groups_b", paths_b},
                       {"matrix_csv", out_path},
                       {"seed", seed}};
    std::cout << io::report_payload(report)["metadata"].dump() << "\n";
    if (!report_path.empty()) {
      report.wall_time_seconds = timer.seconds();
      io::write_report(report, report_path);
    }
  });

  // --- sweep -----------------------------------------------------------------
  std::vector<double> severities;
  std::size_t groups = 10, group_size = 500, dim = 16;
  std::string perturbation = "gaussian";
  auto* sweep_cmd = app.add_subcommand("sweep", "Severity sweep on synthetic features");
  sweep_cmd->add_option("--metric", metric_flag, "td|fid|kid|gs|bottleneck|wasserstein")
      ->capture_default_str();
  sweep_cmd->add_option("--severities", severities, "Severity levels")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--groups", groups)->capture_default_str();
  sweep_cmd->add_option("--group-size", group_size)->capture_default_str();
  sweep_cmd->add_option("--dim", dim)->capture_default_str();
  sweep_cmd->add_option("--seed", seed)->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "Sweep csv path")->required();
  sweep_cmd->add_option("--report", report_path, "Optional json report path");
  sweep_cmd->add_option("--perturbation", perturbation, "gaussian|constant")
      ->check(CLI::IsMember({"gaussian", "constant"}))
      ->capture_default_str();
  sweep_cmd->add_option("--inf-factor", inf_factor)->capture_default_str();
  sweep_cmd->callback([&]() {
    Stopwatch timer;
    const Metric metric = parse_metric(metric_flag);
    HarnessOptions options;
    options.inf_policy.factor = inf_factor;
    const Perturbation kind = perturbation == "constant" ? Perturbation::constant_noise
                                                         : Perturbation::gaussian_noise;
    const std::vector<SweepPoint> points =
        noise_sweep(metric, severities, groups, group_size, dim, seed, kind, options);

    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io_failure, "cannot open " + out_path + " for writing");
    }
    out << "severity,mean,std\n";
    std::cout << "severity,mean,std\n";
    for (const SweepPoint& p : points) {
      const std::string line =
          format_double(p.severity) + "," + format_double(p.mean) + "," + format_double(p.stddev);
      out << line << "\n";
      std::cout << line << "\n";
    }
    if (!out.good()) {
      throw Error(ErrorCode::io_failure, "error writing " + out_path);
    }
    if (!report_path.empty()) {
      ScoreReport report;
      report.metric = "sweep:" + metric_flag;
      report.value = points.back().mean;
      nlohmann::json table = nlohmann::json::array();
      for (const SweepPoint& p : points) {
        table.push_back({{"severity", p.severity}, {"mean", p.mean}, {"std", p.stddev}});
      }
      report.metadata = {{"table", table},        {"groups", groups}, {"group_size", group_size},
                         {"dim", dim},            {"seed", seed},     {"perturbation", perturbation},
                         {"sweep_csv", out_path}};
      report.wall_time_seconds = timer.seconds();
      io::write_report(report, report_path);
    }
  });

  // --- generators --------------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen", "Seeded synthetic data generators");
  gen_cmd->require_subcommand(1);

  std::size_t gen_n = 600;
  std::size_t gen_dim = 16;
  double mean_e1 = 0.0, matched_offset = 0.0, mixture_offset = 5.0;

  auto* gen_gauss = gen_cmd->add_subcommand("gaussian", "Single Gaussian cloud");
  gen_gauss->add_option("--n", gen_n)->capture_default_str();
  gen_gauss->add_option("--dim", gen_dim)->capture_default_str();
  gen_gauss->add_option("--seed", seed)->capture_default_str();
  gen_gauss->add_option("--out", out_path)->required();
  gen_gauss->add_option("--mean-e1", mean_e1, "Mean shift along the first axis")
      ->capture_default_str();
  gen_gauss
      ->add_option("--matched-offset", matched_offset,
                   "Match the moments of a mixture with this component offset")
      ->capture_default_str();
  add_format(gen_gauss);
  gen_gauss->callback([&]() {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gen_dim));
    mean(0) = mean_e1;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(gen_dim),
                                                    static_cast<Eigen::Index>(gen_dim));
    cov(0, 0) += matched_offset * matched_offset;
    io::write_features(sample_gaussian(mean, cov, gen_n, seed), out_path, io::parse_format(format));
  });

  auto* gen_mix = gen_cmd->add_subcommand("mixture", "Balanced two-component Gaussian mixture");
  gen_mix->add_option("--n", gen_n)->capture_default_str();
  gen_mix->add_option("--dim", gen_dim)->capture_default_str();
  gen_mix->add_option("--offset", mixture_offset, "Component offset along the first axis")
      ->capture_default_str();
  gen_mix->add_option("--seed", seed)->capture_default_str();
  gen_mix->add_option("--out", out_path)->required();
  add_format(gen_mix);
  gen_mix->callback([&]() {
    MixtureSpec spec;
    spec.component_offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gen_dim));
    spec.component_offset(0) = mixture_offset;
    spec.component_cov = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(gen_dim),
                                                   static_cast<Eigen::Index>(gen_dim));
    io::write_features(sample_matched_mixture(spec, gen_n, seed), out_path,
                       io::parse_format(format));
  });

  // --- image manipulations -------------------------------------------------------
  std::string manip_kind;
  std::size_t img_count = 100, img_h = 16, img_w = 16, img_c = 1;
  std::string out_orig, out_manip;
  auto* manip_cmd =
      app.add_subcommand("manip", "Generate images, apply a manipulation, write both as features");
  manip_cmd->add_option("--kind", manip_kind, "pixel-noise|patch-mask|patch-exchange")
      ->required()
      ->check(CLI::IsMember({"pixel-noise", "patch-mask", "patch-exchange"}));
  manip_cmd->add_option("--count", img_count)->capture_default_str();
  manip_cmd->add_option("--height", img_h)->capture_default_str();
  manip_cmd->add_option("--width", img_w)->capture_default_str();
  manip_cmd->add_option("--channels", img_c)->capture_default_str();
  manip_cmd->add_option("--seed", seed)->capture_default_str();
  manip_cmd->add_option("--out-orig", out_orig, "Flattened original images")->required();
  manip_cmd->add_option("--out-manip", out_manip, "Flattened manipulated images")->required();
  add_format(manip_cmd);
  manip_cmd->callback([&]() {
    const std::vector<ImageTensor> originals =
        random_images(img_count, img_h, img_w, img_c, derive_seed(seed, 100, 0));
    std::vector<ImageTensor> manipulated;
    manipulated.reserve(originals.size());
    for (std::size_t k = 0; k < originals.size(); ++k) {
      const std::uint64_t img_seed = derive_seed(seed, 101, k);
      if (manip_kind == "pixel-noise") {
        manipulated.push_back(pixel_noise(originals[k], img_seed));
      } else if (manip_kind == "patch-mask") {
        manipulated.push_back(patch_mask(originals[k], img_seed));
      } else {
        manipulated.push_back(patch_exchange(originals[k], img_seed));
      }
    }
    io::write_features(flatten_images(originals), out_orig, io::parse_format(format));
    io::write_features(flatten_images(manipulated), out_manip, io::parse_format(format));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const topodist::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

// Command-line front end: dataset generation, training, descrambling,
// analysis, heatmaps, and the DSP replica, plus a pipeline meta-command
// chaining them. Exit codes: 0 success, 2 usage/config error, 3 numerical
// failure; error lines go to stderr as "error: <category>: <message>".
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dsg/analysis.hpp"
#include "dsg/cayley.hpp"
#include "dsg/dataset.hpp"
#include "dsg/deer.hpp"
#include "dsg/descramble.hpp"
#include "dsg/heatmap.hpp"
#include "dsg/matrix.hpp"
#include "dsg/netlab.hpp"
#include "dsg/network.hpp"
#include "dsg/replica.hpp"
#include "dsg/spectral.hpp"

namespace fs = std::filesystem;
using namespace dsg;

namespace {

std::vector<double> column_of(const DenseMatrix& m, std::size_t j) {
  std::vector<double> v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
  return v;
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::pair<double, double>>& rows) {
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path.string());
  out << header << '\n';
  for (const auto& [a, b] : rows)
    out << format_double(a) << ',' << format_double(b) << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path.string());
  out << text;
}

std::vector<LayerSpec> parse_topology(const std::string& text) {
  // "64:tanh-sigmoid,64:log-sigmoid"
  std::vector<LayerSpec> topo;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw config_error("topology item '" + item + "' must be dim:activation");
    LayerSpec spec;
    spec.dim = std::stoul(item.substr(0, colon));
    spec.activation = activation_from_name(item.substr(colon + 1));
    topo.push_back(spec);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (topo.empty()) throw config_error("topology is empty");
  return topo;
}

std::string train_report_text(const TrainReport& r) {
  std::string text;
  text += "seed " + std::to_string(r.seed) + "\n";
  text += "epochs " + std::to_string(r.config.epochs) + "\n";
  text += "batch_size " + std::to_string(r.config.batch_size) + "\n";
  text += "learning_rate " + format_double(r.config.learning_rate) + "\n";
  text += "adam_beta1 " + format_double(r.config.adam_beta1) + "\n";
  text += "adam_beta2 " + format_double(r.config.adam_beta2) + "\n";
  text += "adam_eps " + format_double(r.config.adam_eps) + "\n";
  text += "validation_fraction " +
          format_double(r.config.validation_fraction) + "\n";
  text += "epoch train_loss val_loss\n";
  for (const auto& e : r.epochs)
    text += std::to_string(e.epoch) + " " + format_double(e.train_loss) + " " +
            format_double(e.val_loss) + "\n";
  return text;
}

FirFilter load_taps(const fs::path& path) {
  DenseMatrix m = load_matrix(path);
  if (m.cols() != 1) throw structure_error("taps file must be a single column");
  FirFilter f;
  f.taps = m.data();
  f.order = f.taps.size() - 1;
  return f;
}

struct DescrambleArgs {
  std::string net_path, data_path, out_dir;
  std::size_t layer = 1;
  std::string position = "pre";
  std::string functional = "tikhonov";
  double alpha = 0.0;
  std::string d_kind = "fourier-spectral";
  std::size_t max_iters = 5000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string init = "zero";
};

int run_descramble(const DescrambleArgs& a) {
  FeedForwardNet net = load_network(a.net_path);
  DeerDataset data = load_dataset(a.data_path);
  WiretapSpec spec;
  spec.layer_index = a.layer;
  if (a.position == "pre")
    spec.position = WiretapPosition::pre_activation;
  else if (a.position == "post")
    spec.position = WiretapPosition::post_activation;
  else
    throw config_error("position must be pre or post");
  spec.link_smoothing_weight = a.alpha;

  if (a.layer < 1 || a.layer > net.depth())
    throw config_error("layer index out of range");
  std::size_t dim = net.layer(a.layer).weights.rows();

  DescramblingProblem prob;
  if (a.functional == "tikhonov") {
    DiffKind kind;
    if (a.d_kind == "fourier-spectral")
      kind = DiffKind::fourier_spectral_second;
    else if (a.d_kind == "finite-difference")
      kind = DiffKind::finite_difference_second;
    else
      throw config_error("d-kind must be fourier-spectral or finite-difference");
    double spacing = data.time_grid.size() > 1
                         ? data.time_grid[1] - data.time_grid[0]
                         : 1.0;
    DiffMatrix d = build_second_derivative(dim, spacing, kind);
    prob = assemble_problem(net, data.inputs, spec, d);
  } else if (a.functional == "mds") {
    prob = make_mds_problem(net.layer(a.layer).weights);
  } else if (a.functional == "mdns") {
    prob = make_mdns_problem(net.layer(a.layer).weights);
  } else {
    throw config_error("functional must be tikhonov, mds or mdns");
  }

  OptimizerConfig cfg;
  cfg.max_iters = a.max_iters;
  cfg.grad_tol = a.tol;
  cfg.seed = a.seed;
  if (a.init == "zero")
    cfg.init = InitKind::zero;
  else if (a.init == "random-small")
    cfg.init = InitKind::random_small;
  else
    throw config_error("init must be zero or random-small");

  DescrambleResult res = optimize(prob, cfg);

  fs::create_directories(a.out_dir);
  fs::path out(a.out_dir);
  save_matrix(res.p.p, out / "p.dmat");
  save_matrix(DenseMatrix(res.q.q_upper.size(), 1,
                          std::vector<double>(res.q.q_upper)),
              out / "q.dmat");
  auto view = apply_descrambler(net, spec, res.p);
  save_matrix(view.weight, out / "descrambled.dmat");
  if (view.next_weight)
    save_matrix(*view.next_weight, out / "next_conjugate.dmat");

  Mat pm = to_eigen(res.p.p);
  double ortho =
      (pm.transpose() * pm - Mat::Identity(pm.rows(), pm.cols())).norm();
  std::string report;
  report += "functional " + a.functional + "\n";
  report += "layer " + std::to_string(a.layer) + "\n";
  report += "position " + a.position + "\n";
  report += "alpha " + format_double(a.alpha) + "\n";
  report += "dim " + std::to_string(dim) + "\n";
  report += "iterations " + std::to_string(res.iterations) + "\n";
  report += std::string("converged ") + (res.converged ? "true" : "false") + "\n";
  report += std::string("line_search_failed ") +
            (res.line_search_failed ? "true" : "false") + "\n";
  report += "objective_initial " + format_double(res.objective_trace.front()) + "\n";
  report += "objective_final " + format_double(res.objective_trace.back()) + "\n";
  report += "orthogonality_residual " + format_double(ortho) + "\n";
  report += "det_sign " + std::string(det_sign(res.p.p) > 0 ? "+1" : "-1") + "\n";
  report += "trace\n";
  for (std::size_t i = 0; i < res.objective_trace.size(); ++i)
    report += std::to_string(i) + " " + format_double(res.objective_trace[i]) + "\n";
  write_text(out / "report.txt", report);
  std::cout << "descrambled layer " << a.layer << " (" << a.functional
            << "), iterations=" << res.iterations
            << ", objective=" << format_double(res.objective_trace.back())
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"neural network descrambling toolkit"};
  app.require_subcommand(1);

  // ---- gen-deer ----------------------------------------------------------
  auto* gen = app.add_subcommand("gen-deer", "generate a synthetic dataset");
  DeerGridConfig gcfg;
  std::size_t gen_n = 100;
  std::string gen_out;
  gen->add_option("--n", gen_n, "number of traces");
  gen->add_option("--time-points", gcfg.time_points);
  gen->add_option("--t-max", gcfg.t_max);
  gen->add_option("--dist-points", gcfg.dist_points);
  gen->add_option("--r-min", gcfg.r_min);
  gen->add_option("--r-max", gcfg.r_max);
  gen->add_option("--noise-lo", gcfg.noise_sigma_range.first);
  gen->add_option("--noise-hi", gcfg.noise_sigma_range.second);
  gen->add_option("--lambda-lo", gcfg.modulation_depth_range.first);
  gen->add_option("--lambda-hi", gcfg.modulation_depth_range.second);
  gen->add_option("--bg-lo", gcfg.background_rate_range.first);
  gen->add_option("--bg-hi", gcfg.background_rate_range.second);
  gen->add_option("--max-gaussians", gcfg.n_gaussians_max);
  gen->add_option("--seed", gcfg.seed);
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->callback([&] {
    save_dataset(generate_dataset(gcfg, gen_n), gen_out);
    std::cout << "wrote " << gen_n << " traces to " << gen_out << "\n";
  });

  // ---- train -------------------------------------------------------------
  auto* tr = app.add_subcommand("train", "train a network on a dataset");
  std::string tr_data, tr_out, tr_topology = "64:tanh-sigmoid,64:log-sigmoid";
  std::string tr_report;
  TrainConfig tcfg;
  tr->add_option("--data", tr_data, "dataset directory")->required();
  tr->add_option("--topology", tr_topology, "dim:activation,...");
  tr->add_option("--epochs", tcfg.epochs);
  tr->add_option("--batch", tcfg.batch_size);
  tr->add_option("--lr", tcfg.learning_rate);
  tr->add_option("--val-frac", tcfg.validation_fraction);
  tr->add_option("--seed", tcfg.seed);
  tr->add_option("--out", tr_out, "network manifest path")->required();
  tr->add_option("--report", tr_report, "training report path");
  tr->callback([&] {
    DeerDataset data = load_dataset(tr_data);
    auto topo = parse_topology(tr_topology);
    TrainResult res = train(topo, data, tcfg);
    if (auto dir = fs::path(tr_out).parent_path(); !dir.empty())
      fs::create_directories(dir);
    save_network(res.net, tr_out);
    std::string rpath = tr_report.empty() ? tr_out + ".report" : tr_report;
    write_text(rpath, train_report_text(res.report));
    std::cout << "trained " << topo.size() << "-layer net";
    if (!res.report.epochs.empty())
      std::cout << ", final val loss "
                << format_double(res.report.epochs.back().val_loss);
    std::cout << "\n";
  });

  // ---- descramble --------------------------------------------------------
  auto* de = app.add_subcommand("descramble", "optimize a descrambler");
  DescrambleArgs dargs;
  de->add_option("--net", dargs.net_path)->required();
  de->add_option("--data", dargs.data_path)->required();
  de->add_option("--layer", dargs.layer);
  de->add_option("--position", dargs.position, "pre or post");
  de->add_option("--functional", dargs.functional, "tikhonov, mds or mdns");
  de->add_option("--alpha", dargs.alpha, "link smoothing weight");
  de->add_option("--d-kind", dargs.d_kind,
                 "fourier-spectral or finite-difference");
  de->add_option("--max-iters", dargs.max_iters);
  de->add_option("--tol", dargs.tol);
  de->add_option("--seed", dargs.seed);
  de->add_option("--init", dargs.init, "zero or random-small");
  de->add_option("--out", dargs.out_dir, "output directory")->required();
  de->callback([&] { run_descramble(dargs); });

  // ---- analyze -----------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "inspection tools");
  an->require_subcommand(1);

  auto* fc = an->add_subcommand("fourier-conjugate", "F+ W F-");
  std::string fc_in, fc_prefix;
  fc->add_option("--in", fc_in)->required();
  fc->add_option("--out-prefix", fc_prefix)->required();
  fc->callback([&] {
    DenseMatrix w = load_matrix(fc_in);
    ComplexMatrix c = fourier_conjugate(w);
    save_matrix(c.re, fc_prefix + "_re.dmat");
    save_matrix(c.im, fc_prefix + "_im.dmat");
    DenseMatrix mag = c.magnitude();
    save_matrix(mag, fc_prefix + "_mag.dmat");
    if (mag.rows() == mag.cols()) {
      double offdiag = 0;
      for (std::size_t i = 0; i < mag.rows(); ++i)
        for (std::size_t j = 0; j < mag.cols(); ++j)
          if (i != j) offdiag = std::max(offdiag, mag(i, j));
      std::cout << "offdiag_max=" << format_double(offdiag) << "\n";
    }
  });

  auto* sp = an->add_subcommand("spectrum2d", "centered |2D DFT|");
  std::string sp_in, sp_out;
  sp->add_option("--in", sp_in)->required();
  sp->add_option("--out", sp_out)->required();
  sp->callback([&] { save_matrix(spectrum2d(load_matrix(sp_in)), sp_out); });

  auto* sv = an->add_subcommand("svd", "U, S, V of a matrix");
  std::string sv_in, sv_prefix;
  sv->add_option("--in", sv_in)->required();
  sv->add_option("--out-prefix", sv_prefix)->required();
  sv->callback([&] {
    SvdResult r = svd_inspect(load_matrix(sv_in));
    save_matrix(r.u, sv_prefix + "_u.dmat");
    save_matrix(r.v, sv_prefix + "_v.dmat");
    std::vector<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < r.s.size(); ++i)
      rows.emplace_back(static_cast<double>(i), r.s[i]);
    write_csv(sv_prefix + "_s.csv", "index,singular_value", rows);
  });

  auto* ac = an->add_subcommand("autocorr", "row autocorrelation");
  std::string ac_in, ac_out;
  ac->add_option("--in", ac_in)->required();
  ac->add_option("--out", ac_out)->required();
  ac->callback([&] {
    auto v = row_autocorrelation(load_matrix(ac_in));
    std::vector<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < v.size(); ++i)
      rows.emplace_back(static_cast<double>(i), v[i]);
    write_csv(ac_out, "lag,autocorrelation", rows);
  });

  auto* ba = an->add_subcommand("block-average", "column block average");
  std::string ba_in, ba_out;
  std::size_t ba_cols = 0, ba_keep = 1;
  ba->add_option("--in", ba_in)->required();
  ba->add_option("--block-cols", ba_cols)->required();
  ba->add_option("--sv-keep", ba_keep);
  ba->add_option("--out", ba_out)->required();
  ba->callback([&] {
    auto res = block_average(load_matrix(ba_in), ba_cols, ba_keep);
    if (res.dropped_partial)
      std::cerr << "warning: trailing partial block dropped\n";
    save_matrix(res.m, ba_out);
  });

  auto* dsgn = an->add_subcommand("det-sign", "sign of the determinant");
  std::string ds_in;
  dsgn->add_option("--in", ds_in)->required();
  dsgn->callback([&] {
    int s = det_sign(load_matrix(ds_in));
    std::cout << (s > 0 ? "+1" : s < 0 ? "-1" : "0") << "\n";
  });

  // ---- heatmap -----------------------------------------------------------
  auto* hm = app.add_subcommand("heatmap", "render a matrix as SVG");
  std::string hm_in, hm_out;
  int hm_cell = 8;
  hm->add_option("--in", hm_in)->required();
  hm->add_option("--out", hm_out)->required();
  hm->add_option("--cell", hm_cell, "cell size in pixels");
  hm->callback([&] { write_text(hm_out, svg_heatmap(load_matrix(hm_in), hm_cell)); });

  // ---- replica -----------------------------------------------------------
  auto* rep = app.add_subcommand("replica", "DSP replica of the network");
  rep->require_subcommand(1);

  auto* rd = rep->add_subcommand("design", "design an FIR filter");
  std::string rd_kind = "lowpass", rd_out;
  std::size_t rd_order = 32;
  double rd_pass = 0.01, rd_stop = 0.3;
  rd->add_option("--kind", rd_kind, "lowpass or notch");
  rd->add_option("--order", rd_order);
  rd->add_option("--pass", rd_pass);
  rd->add_option("--stop", rd_stop);
  rd->add_option("--out", rd_out, "taps .dmat path")->required();
  rd->callback([&] {
    FirKind kind;
    if (rd_kind == "lowpass")
      kind = FirKind::low_pass;
    else if (rd_kind == "notch")
      kind = FirKind::high_pass_notch;
    else
      throw config_error("kind must be lowpass or notch");
    FirFilter f = design_fir(kind, rd_order, rd_pass, rd_stop);
    save_matrix(DenseMatrix(f.taps.size(), 1, std::vector<double>(f.taps)),
                rd_out);
    std::string echo;
    echo += "kind " + rd_kind + "\n";
    echo += "order " + std::to_string(f.order) + "\n";
    echo += "passband_edge " + format_double(f.passband_edge) + "\n";
    echo += "stopband_edge " + format_double(f.stopband_edge) + "\n";
    echo += "cutoff " + format_double(f.cutoff) + "\n";
    write_text(rd_out + ".spec", echo);
    std::cout << "designed " << rd_kind << " order " << f.order << "\n";
  });

  auto* rf = rep->add_subcommand("fit", "fit the regularized transform");
  std::string rf_data, rf_lp, rf_notch, rf_prefix;
  double rf_lo = 0, rf_hi = 0;
  std::size_t rf_count = 0;
  rf->add_option("--data", rf_data)->required();
  rf->add_option("--lowpass", rf_lp)->required();
  rf->add_option("--notch", rf_notch)->required();
  rf->add_option("--lambda-lo", rf_lo, "grid start (absolute)");
  rf->add_option("--lambda-hi", rf_hi, "grid end (absolute)");
  rf->add_option("--lambda-count", rf_count, "grid size");
  rf->add_option("--out-prefix", rf_prefix)->required();
  rf->callback([&] {
    DeerDataset data = load_dataset(rf_data);
    FirFilter lp = load_taps(rf_lp), hp = load_taps(rf_notch);
    DenseMatrix filtered(data.inputs.rows(), data.inputs.cols());
    for (std::size_t j = 0; j < data.inputs.cols(); ++j) {
      auto f = apply_fir(hp, apply_fir(lp, column_of(data.inputs, j)));
      for (std::size_t i = 0; i < filtered.rows(); ++i) filtered(i, j) = f[i];
    }
    std::vector<double> grid;
    bool defaulted = true;
    if (rf_count > 0) {
      if (!(rf_lo > 0) || !(rf_hi > rf_lo))
        throw config_error("lambda grid needs 0 < lo < hi");
      defaulted = false;
      for (std::size_t i = 0; i < rf_count; ++i) {
        double u = rf_count == 1
                       ? 0.0
                       : static_cast<double>(i) /
                             static_cast<double>(rf_count - 1);
        grid.push_back(rf_lo * std::pow(rf_hi / rf_lo, u));
      }
    }
    RegularizedTransform t = fit_transform(filtered, data.targets, grid);
    save_matrix(t.t, rf_prefix + "_t.dmat");
    std::string report;
    report += std::string("lambda_grid ") +
              (defaulted ? "default(40 log-spaced, 1e-8..1e2 x tr(FF^T)/n_t)"
                         : "explicit") +
              "\n";
    report += "grid_size " + std::to_string(t.lcurve_trace.size()) + "\n";
    report += "selected_lambda " + format_double(t.lambda) + "\n";
    report += "lambda residual_norm solution_norm\n";
    {
      std::ofstream lc(rf_prefix + "_lcurve.csv");
      if (!lc) throw error("cannot write lcurve csv");
      lc << "lambda,residual_norm,solution_norm\n";
      for (const auto& p : t.lcurve_trace) {
        lc << format_double(p.lambda) << ',' << format_double(p.residual_norm)
           << ',' << format_double(p.solution_norm) << '\n';
        report += format_double(p.lambda) + " " +
                  format_double(p.residual_norm) + " " +
                  format_double(p.solution_norm) + "\n";
      }
    }
    write_text(rf_prefix + "_report.txt", report);
    std::cout << "selected lambda " << format_double(t.lambda) << "\n";
  });

  auto* rr = rep->add_subcommand("run", "run the replica on a trace");
  std::string rr_data, rr_lp, rr_notch, rr_t, rr_out;
  std::size_t rr_index = 0;
  rr->add_option("--data", rr_data)->required();
  rr->add_option("--index", rr_index, "trace column index");
  rr->add_option("--lowpass", rr_lp)->required();
  rr->add_option("--notch", rr_notch)->required();
  rr->add_option("--transform", rr_t)->required();
  rr->add_option("--out", rr_out, "distance CSV")->required();
  rr->callback([&] {
    DeerDataset data = load_dataset(rr_data);
    if (rr_index >= data.n_traces())
      throw config_error("trace index out of range");
    FirFilter lp = load_taps(rr_lp), hp = load_taps(rr_notch);
    RegularizedTransform t;
    t.t = load_matrix(rr_t);
    t.lambda = 1.0;
    auto out = replica_pipeline(column_of(data.inputs, rr_index), lp, hp, t);
    if (out.degenerate) std::cerr << "warning: degenerate (all-zero) output\n";
    std::vector<std::pair<double, double>> rows;
    for (std::size_t i = 0; i < out.distribution.size(); ++i)
      rows.emplace_back(data.dist_grid[i], out.distribution[i]);
    write_csv(rr_out, "r_nm,p", rows);
  });

  // ---- pipeline ----------------------------------------------------------
  auto* pl = app.add_subcommand(
      "pipeline", "gen-deer -> train -> descramble -> analyze in one run");
  std::string pl_out;
  std::size_t pl_n = 2000, pl_epochs = 300;
  std::uint64_t pl_seed = 0;
  pl->add_option("--out", pl_out, "output directory")->required();
  pl->add_option("--n", pl_n, "traces");
  pl->add_option("--epochs", pl_epochs);
  pl->add_option("--seed", pl_seed);
  pl->callback([&] {
    fs::path out(pl_out);
    fs::create_directories(out);
    std::vector<std::string> manifest;

    DeerGridConfig cfg;
    cfg.seed = pl_seed;
    DeerDataset data = generate_dataset(cfg, pl_n);
    save_dataset(data, out / "dataset");
    manifest.push_back("dataset " + (out / "dataset").string());

    TrainConfig tcfg2;
    tcfg2.epochs = pl_epochs;
    tcfg2.seed = pl_seed;
    tcfg2.learning_rate = 2e-3;
    tcfg2.batch_size = 100;
    TrainResult trained = train({{64, Activation::tanh_sigmoid},
                                 {64, Activation::log_sigmoid}},
                                data, tcfg2);
    save_network(trained.net, out / "model.net");
    write_text(out / "model.net.report", train_report_text(trained.report));
    manifest.push_back("network " + (out / "model.net").string());
    manifest.push_back("train_report " + (out / "model.net.report").string());

    DescrambleArgs da;
    da.net_path = (out / "model.net").string();
    da.data_path = (out / "dataset").string();
    da.out_dir = (out / "descramble").string();
    da.seed = pl_seed;
    run_descramble(da);
    manifest.push_back("descrambler " + (out / "descramble/p.dmat").string());
    manifest.push_back("descrambled_weight " +
                       (out / "descramble/descrambled.dmat").string());
    manifest.push_back("descramble_report " +
                       (out / "descramble/report.txt").string());

    DenseMatrix dw = load_matrix(out / "descramble/descrambled.dmat");
    ComplexMatrix cj = fourier_conjugate(dw);
    save_matrix(cj.magnitude(), out / "conjugate_mag.dmat");
    manifest.push_back("conjugate_mag " + (out / "conjugate_mag.dmat").string());
    save_matrix(spectrum2d(dw), out / "spectrum2d.dmat");
    manifest.push_back("spectrum2d " + (out / "spectrum2d.dmat").string());
    write_text(out / "conjugate_mag.svg",
               svg_heatmap(load_matrix(out / "conjugate_mag.dmat")));
    manifest.push_back("heatmap " + (out / "conjugate_mag.svg").string());
    int sign = det_sign(load_matrix(out / "descramble/p.dmat"));
    write_text(out / "det_sign.txt",
               std::string(sign > 0 ? "+1" : sign < 0 ? "-1" : "0") + "\n");
    manifest.push_back("det_sign " + (out / "det_sign.txt").string());

    std::string mtext;
    for (const auto& line : manifest) mtext += line + "\n";
    write_text(out / "manifest.txt", mtext);
    std::cout << "pipeline complete; manifest at "
              << (out / "manifest.txt").string() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const divergence_error& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 3;
  } catch (const dsg::error& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Returns the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dsg/analysis.hpp"
#include "dsg/cayley.hpp"
#include "dsg/dataset.hpp"
#include "dsg/deer.hpp"
#include "dsg/descramble.hpp"
#include "dsg/matrix.hpp"
#include "dsg/netlab.hpp"
#include "dsg/network.hpp"
#include "dsg/replica.hpp"
#include "dsg/rng.hpp"
#include "dsg/spectral.hpp"

using namespace dsg;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back("FAILED: " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng,
                          double scale = 1.0) {
  DenseMatrix m(r, c);
  for (double& v : m.data()) v = scale * rng.uniform(-1.0, 1.0);
  return m;
}

AntisymParams random_antisym(std::size_t dim, Rng& rng, double scale = 1.0) {
  AntisymParams q = AntisymParams::zero(dim);
  for (double& v : q.q_upper) v = scale * rng.uniform(-1.0, 1.0);
  return q;
}

double simpson(const std::function<double(double)>& f, double a, double b,
               std::size_t panels) {
  double h = (b - a) / static_cast<double>(2 * panels);
  double acc = f(a) + f(b);
  for (std::size_t i = 1; i < 2 * panels; ++i)
    acc += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

AntisymParams fd_gradient(const std::function<double(const AntisymParams&)>& f,
                          const AntisymParams& q, double step) {
  AntisymParams g = AntisymParams::zero(q.dim);
  for (std::size_t i = 0; i < q.q_upper.size(); ++i) {
    AntisymParams qp = q, qm = q;
    qp.q_upper[i] += step;
    qm.q_upper[i] -= step;
    g.q_upper[i] = (f(qp) - f(qm)) / (2.0 * step);
  }
  return g;
}

double rel_inf_error(const AntisymParams& got, const AntisymParams& want) {
  double diff = 0, base = 0;
  for (std::size_t i = 0; i < got.q_upper.size(); ++i) {
    diff = std::max(diff, std::abs(got.q_upper[i] - want.q_upper[i]));
    base = std::max(base, std::abs(want.q_upper[i]));
  }
  return diff / std::max(base, 1e-30);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---- criterion 1: Cayley group membership -------------------------------

Check cayley_group_membership() {
  Check c;
  Rng rng(1001);
  for (std::size_t n : {2, 8, 32, 128}) {
    for (int rep = 0; rep < 20; ++rep) {
      Mat p = to_eigen(cayley_map(random_antisym(n, rng)).p);
      double resid =
          (p.transpose() * p - Mat::Identity(p.rows(), p.cols())).norm();
      c.expect(resid <= 1e-10 * static_cast<double>(n),
               "orthogonality residual " + format_double(resid) + " at dim " +
                   std::to_string(n));
      double det = p.determinant();
      c.expect(std::abs(det - 1.0) <= 1e-8,
               "det " + format_double(det) + " at dim " + std::to_string(n));
    }
  }
  return c;
}

// ---- criterion 2: gradient oracles --------------------------------------

Check gradient_oracles() {
  Check c;
  Rng rng(1002);
  for (std::size_t n : {4, 8, 16}) {
    DiffMatrix d =
        build_second_derivative(n, 1.0, DiffKind::fourier_spectral_second);
    auto tik = make_tikhonov_problem(random_matrix(n, 3 * n, rng), d);
    auto mds = make_mds_problem(random_matrix(n, n, rng));
    auto mdns = make_mdns_problem(random_matrix(n, n, rng));
    for (int rep = 0; rep < 10; ++rep) {
      AntisymParams q = random_antisym(n, rng, 0.5);
      double e1 = rel_inf_error(
          grad_tikhonov(q, tik),
          fd_gradient([&](const AntisymParams& p) { return eval_tikhonov(p, tik); },
                      q, 1e-5));
      double e2 = rel_inf_error(
          grad_mds(q, mds),
          fd_gradient([&](const AntisymParams& p) { return eval_mds(p, mds); },
                      q, 1e-5));
      double e3 = rel_inf_error(
          grad_mdns(q, mdns),
          fd_gradient([&](const AntisymParams& p) { return eval_mdns(p, mdns); },
                      q, 1e-5));
      c.expect(e1 <= 1e-6, "tikhonov gradient error " + format_double(e1));
      c.expect(e2 <= 1e-6, "mds gradient error " + format_double(e2));
      c.expect(e3 <= 1e-6, "mdns gradient error " + format_double(e3));
    }
  }
  return c;
}

// ---- criterion 3: plant-and-recover (tikhonov) ---------------------------

Check plant_recover_tikhonov() {
  Check c;
  Rng rng(1003);
  const std::size_t n = 16;
  // Columns of M are sampled low-order harmonics.
  Mat basis(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t order = j % 7;  // harmonics up to order 3, cos/sin pairs
    for (std::size_t i = 0; i < n; ++i) {
      double ang = 2.0 * std::numbers::pi *
                   static_cast<double>(((order + 1) / 2) * i) /
                   static_cast<double>(n);
      basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          order == 0 ? 1.0 : (order % 2 ? std::cos(ang) : std::sin(ang));
    }
  }
  Mat r = to_eigen(cayley_map(random_antisym(n, rng, 0.5)).p);
  Mat w = r * basis;
  // 16 x 200 random smooth inputs: combinations of low-order harmonics.
  Mat smooth_basis(n, 7);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < 7; ++k) {
      double ang = 2.0 * std::numbers::pi * static_cast<double>(((k + 1) / 2) * i) /
                   static_cast<double>(n);
      smooth_basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          k == 0 ? 1.0 : (k % 2 ? std::cos(ang) : std::sin(ang));
    }
  Mat coef(7, 200);
  for (Eigen::Index j = 0; j < coef.cols(); ++j)
    for (Eigen::Index i = 0; i < coef.rows(); ++i)
      coef(i, j) = rng.uniform(-1.0, 1.0);
  Mat x = smooth_basis * coef;
  Mat s = w * x;
  DiffMatrix d =
      build_second_derivative(n, 1.0, DiffKind::fourier_spectral_second);
  auto prob = make_tikhonov_problem(to_dense(s), d);
  double eta_planted = (to_eigen(d.d) * (r.transpose() * s)).squaredNorm();
  DescrambleResult res = optimize(prob, OptimizerConfig{});
  c.note("eta_final=" + format_double(res.objective_trace.back()) +
         " eta_planted=" + format_double(eta_planted));
  c.expect(res.objective_trace.back() <= 1.001 * eta_planted,
           "final objective above 1.001 x planted value");
  return c;
}

// ---- criterion 4: plant-and-recover (mdns) -------------------------------

Check plant_recover_mdns() {
  Check c;
  Rng rng(1004);
  const std::size_t n = 8;
  Mat r = to_eigen(cayley_map(random_antisym(n, rng, 0.5)).p);
  Mat diag = Mat::Zero(n, n);
  double sum_sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 1.0 + static_cast<double>(i) * 0.7;  // positive, distinct
    diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v;
    sum_sq += v * v;
  }
  auto prob = make_mdns_problem(to_dense(Mat(r.transpose() * diag)));
  DescrambleResult res = optimize(prob, OptimizerConfig{});
  c.note("eta_final=" + format_double(res.objective_trace.back()) +
         " sum_d_sq=" + format_double(sum_sq));
  c.expect(res.objective_trace.back() >= 0.99 * sum_sq,
           "optimized diagonal norm-square below 0.99 x planted");
  return c;
}

// ---- criterion 5: physics oracles ----------------------------------------

Check physics_oracles() {
  Check c;
  for (int i = 0; i <= 40; ++i) {
    double x = 10.0 * static_cast<double>(i) / 40.0;
    std::size_t panels = 20000 * static_cast<std::size_t>(std::max(1.0, x));
    double want_c = simpson([](double t) { return std::cos(t * t); }, 0, x, panels);
    double want_s = simpson([](double t) { return std::sin(t * t); }, 0, x, panels);
    c.expect(std::abs(fresnel_c(x) - want_c) <= 1e-8,
             "fresnel_c(" + format_double(x) + ")");
    c.expect(std::abs(fresnel_s(x) - want_s) <= 1e-8,
             "fresnel_s(" + format_double(x) + ")");
  }
  for (int i = 0; i < 10; ++i) {
    double r = 1.8 + 0.4 * static_cast<double>(i);
    c.expect(std::abs(deer_kernel(r, 0.0) - 1.0) <= 1e-6, "gamma(r, 0) = 1");
    for (int j = 0; j < 10; ++j) {
      double t = 0.05 + 0.3 * static_cast<double>(j);
      double d = dipolar_constant_rad_per_us_nm3() / (r * r * r);
      double want = simpson(
          [&](double u) { return std::cos(d * t * (1.0 - 3.0 * u * u)); }, 0, 1,
          20000);
      c.expect(std::abs(deer_kernel(r, t) - want) <= 1e-6,
               "kernel at r=" + format_double(r) + " t=" + format_double(t));
    }
  }
  return c;
}

// ---- criterion 6: output invariance --------------------------------------

Check output_invariance() {
  Check c;
  DeerGridConfig gcfg;
  gcfg.seed = 1006;
  DeerDataset ds = generate_dataset(gcfg, 200);
  TrainConfig tcfg;
  tcfg.epochs = 10;
  tcfg.seed = 6;
  TrainResult trained = train(
      {{64, Activation::tanh_sigmoid}, {64, Activation::log_sigmoid}}, ds, tcfg);
  DenseMatrix x(ds.inputs.rows(), 100);
  for (std::size_t j = 0; j < 100; ++j)
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, j) = ds.inputs(i, j);
  DenseMatrix base = forward(trained.net, x);
  Rng rng(1066);
  for (auto pos :
       {WiretapPosition::pre_activation, WiretapPosition::post_activation}) {
    Descrambler p = cayley_map(random_antisym(64, rng));
    WiretapSpec spec{1, pos, 0.0};
    DenseMatrix tapped = forward_with_wiretap(trained.net, x, spec, p);
    double rel =
        (to_eigen(tapped) - to_eigen(base)).norm() / to_eigen(base).norm();
    c.note("relative deviation " + format_double(rel));
    c.expect(rel <= 1e-10, "output changed by " + format_double(rel));
  }
  return c;
}

// ---- criterion 7: desk-scale filter structure ----------------------------

// The conjugated matrix has two frequency axes (hidden/link rows, input
// columns). Regions: the zero-frequency cross is row 0 union column 0; the
// passband is both axes below 0.25 of the sampling rate (off the cross);
// the top quarter is either axis at or above 0.375.
bool filter_structure_for_seed(std::uint64_t seed, Check& c) {
  DeerGridConfig gcfg;
  gcfg.seed = seed;
  DeerDataset ds = generate_dataset(gcfg, 2000);
  TrainConfig tcfg;
  tcfg.epochs = 300;
  tcfg.batch_size = 100;
  tcfg.learning_rate = 2e-3;
  tcfg.seed = seed;
  TrainResult trained = train(
      {{64, Activation::tanh_sigmoid}, {64, Activation::log_sigmoid}}, ds, tcfg);

  WiretapSpec spec{1, WiretapPosition::pre_activation, 0.0};
  double spacing = ds.time_grid[1] - ds.time_grid[0];
  DiffMatrix d =
      build_second_derivative(64, spacing, DiffKind::fourier_spectral_second);
  auto prob = assemble_problem(trained.net, ds.inputs, spec, d);
  DescrambleResult res = optimize(prob, OptimizerConfig{});
  auto view = apply_descrambler(trained.net, spec, res.p);
  DenseMatrix mag = fourier_conjugate(view.weight).magnitude();

  const std::size_t n = 64;
  auto freq = [&](std::size_t j) {
    return static_cast<double>(std::min(j, n - j)) / static_cast<double>(n);
  };
  std::vector<double> cross, passband, top_quarter;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      if (u == 0 || v == 0) {
        cross.push_back(mag(u, v));
        continue;
      }
      double fu = freq(u), fv = freq(v);
      if (fu < 0.25 && fv < 0.25) passband.push_back(mag(u, v));
      if (fu >= 0.375 || fv >= 0.375) top_quarter.push_back(mag(u, v));
    }
  }
  double dc = median(cross);
  double pass_med = median(passband);
  double top_med = median(top_quarter);
  bool notch_ok = dc <= 0.7 * pass_med;
  bool lowpass_ok = top_med <= 0.5 * pass_med;
  c.note("seed " + std::to_string(seed) + ": zero-cross=" + format_double(dc) +
         " passband=" + format_double(pass_med) +
         " top=" + format_double(top_med) +
         " notch=" + (notch_ok ? "ok" : "MISS") +
         " lowpass=" + (lowpass_ok ? "ok" : "MISS") +
         " val_loss=" + format_double(trained.report.epochs.back().val_loss));
  return notch_ok && lowpass_ok;
}

Check filter_structure() {
  Check c;
  int passes = 0;
  for (std::uint64_t seed : {1, 2, 3})
    if (filter_structure_for_seed(seed, c)) ++passes;
  c.note("seeds passing: " + std::to_string(passes) + "/3");
  c.expect(passes >= 2, "fewer than 2/3 seeds show the notch+lowpass structure");
  return c;
}

// ---- criterion 8: replica pipeline ----------------------------------------

Check replica_pipeline_check() {
  Check c;
  DeerGridConfig cfg;
  cfg.time_points = 64;
  cfg.t_max = 3.0;
  cfg.dist_points = 48;
  cfg.r_min = 2.6;
  cfg.r_max = 3.6;
  cfg.n_gaussians_max = 1;

  FirFilter lp = design_fir(FirKind::low_pass, 32, 0.01, 0.3);
  FirFilter hp = design_fir(FirKind::high_pass_notch, 62, 0.06, 0.01);
  auto filter2 = [&](const std::vector<double>& v) {
    return apply_fir(hp, apply_fir(lp, v));
  };

  // Transform fitted on an independent noisy training set.
  DeerGridConfig train_cfg = cfg;
  train_cfg.noise_sigma_range = {0.02, 0.02};
  train_cfg.seed = 1881;
  DeerDataset train_ds = generate_dataset(train_cfg, 400);
  DenseMatrix f_train(train_ds.inputs.rows(), train_ds.inputs.cols());
  for (std::size_t j = 0; j < train_ds.inputs.cols(); ++j) {
    std::vector<double> col(train_ds.inputs.rows());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = train_ds.inputs(i, j);
    auto f = filter2(col);
    for (std::size_t i = 0; i < col.size(); ++i) f_train(i, j) = f[i];
  }
  RegularizedTransform tr = fit_transform(f_train, train_ds.targets);
  c.note("selected lambda " + format_double(tr.lambda));

  // Paired noisy/clean traces: identical seeds, noise only in one.
  DeerGridConfig noisy_cfg = cfg;
  noisy_cfg.noise_sigma_range = {0.02, 0.02};
  noisy_cfg.seed = 1889;
  DeerGridConfig clean_cfg = cfg;
  clean_cfg.noise_sigma_range = {0.0, 0.0};
  clean_cfg.seed = 1889;
  DeerDataset noisy = generate_dataset(noisy_cfg, 100);
  DeerDataset clean = generate_dataset(clean_cfg, 100);

  auto pearson = [](const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += (a[i] - ma) * (b[i] - mb);
      da += (a[i] - ma) * (a[i] - ma);
      db += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(da * db);
  };

  std::vector<double> corrs;
  double rmse_sum = 0;
  for (std::size_t j = 0; j < 100; ++j) {
    std::vector<double> vn(noisy.inputs.rows()), vc(clean.inputs.rows());
    for (std::size_t i = 0; i < vn.size(); ++i) {
      vn[i] = noisy.inputs(i, j);
      vc[i] = clean.inputs(i, j);
    }
    auto fn = filter2(vn);
    auto fc = filter2(vc);
    corrs.push_back(pearson(fn, fc));
    auto out = replica_pipeline(vn, lp, hp, tr);
    double se = 0;
    for (std::size_t i = 0; i < out.distribution.size(); ++i) {
      double diff = out.distribution[i] - noisy.targets(i, j);
      se += diff * diff;
    }
    rmse_sum += std::sqrt(se / static_cast<double>(out.distribution.size()));
  }
  double med_corr = median(corrs);
  c.note("median filtered-trace correlation " + format_double(med_corr));
  c.note("mean distance-domain RMSE vs true p(r): " +
         format_double(rmse_sum / 100.0) + " (reported, no threshold)");
  c.expect(med_corr >= 0.95, "median correlation below 0.95");
  return c;
}

// ---- criterion 9: determinism & I/O ---------------------------------------

Check determinism_io() {
  Check c;
  DeerGridConfig gcfg;
  gcfg.seed = 1009;
  DeerDataset a = generate_dataset(gcfg, 50);
  DeerDataset b = generate_dataset(gcfg, 50);
  c.expect(a.inputs == b.inputs && a.targets == b.targets,
           "dataset generation not bit-identical");

  TrainConfig tcfg;
  tcfg.epochs = 3;
  tcfg.batch_size = 10;
  tcfg.seed = 9;
  auto na = train({{16, Activation::tanh_sigmoid}, {64, Activation::log_sigmoid}},
                  a, tcfg);
  auto nb = train({{16, Activation::tanh_sigmoid}, {64, Activation::log_sigmoid}},
                  b, tcfg);
  c.expect(na.net == nb.net, "training not bit-identical");

  WiretapSpec spec{1, WiretapPosition::pre_activation, 0.0};
  DiffMatrix d =
      build_second_derivative(16, 1.0, DiffKind::fourier_spectral_second);
  auto prob = assemble_problem(na.net, a.inputs, spec, d);
  DescrambleResult ra = optimize(prob, OptimizerConfig{});
  DescrambleResult rb = optimize(prob, OptimizerConfig{});
  c.expect(ra.p.p == rb.p.p && ra.q.q_upper == rb.q.q_upper,
           "descrambling not bit-identical");

  Rng rng(1099);
  auto path = fs::temp_directory_path() / "dsg_acceptance_roundtrip.dmat";
  for (int rep = 0; rep < 1000; ++rep) {
    std::size_t rows = 1 + rng.uniform_int(0, 6);
    std::size_t cols = 1 + rng.uniform_int(0, 6);
    DenseMatrix m(rows, cols);
    for (double& v : m.data()) {
      int scale = static_cast<int>(rng.uniform_int(0, 40)) - 20;
      v = rng.uniform(-1.0, 1.0) * std::pow(10.0, scale);
    }
    save_matrix(m, path);
    if (!(load_matrix(path) == m)) {
      c.expect(false, "round-trip mismatch at rep " + std::to_string(rep));
      break;
    }
  }
  return c;
}

// ---- criterion 10: regularized pseudoinverse ------------------------------

Check regularized_pseudoinverse() {
  Check c;
  Rng rng(1010);
  const std::size_t n_t = 24, n_r = 16, n = 500;
  Mat t0(n_r, n_t);
  for (Eigen::Index i = 0; i < t0.rows(); ++i)
    for (Eigen::Index j = 0; j < t0.cols(); ++j) t0(i, j) = rng.uniform(-1, 1);
  Mat f(n_t, n);
  for (Eigen::Index j = 0; j < f.cols(); ++j)
    for (Eigen::Index i = 0; i < f.rows(); ++i) f(i, j) = rng.uniform(-1, 1);
  Mat p = t0 * f;
  RegularizedTransform tiny = fit_transform(
      to_dense(f), to_dense(p), std::vector<double>{1e-10, 1e-9, 1e-8});
  double rel = (to_eigen(tiny.t) - t0).norm() / t0.norm();
  c.note("planted recovery relative error " + format_double(rel));
  c.expect(rel <= 1e-3, "planted linear map not recovered to 1e-3");

  RegularizedTransform full = fit_transform(to_dense(f), to_dense(p));
  Mat fft = f * f.transpose();
  Mat fpt = f * p.transpose();
  for (const auto& pt : full.lcurve_trace) {
    Mat normal = fft + pt.lambda * Mat::Identity(n_t, n_t);
    Mat zt = Eigen::LLT<Mat>(normal).solve(fpt);
    double resid = (normal * zt - fpt).norm();
    double scale = normal.norm() * zt.norm() + fpt.norm();
    c.expect(resid <= 1e-8 * scale,
             "normal-equation residual at lambda " + format_double(pt.lambda));
  }
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    double budget_s;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "cayley-group-membership", 10.0, cayley_group_membership},
      {2, "gradient-oracles", 30.0, gradient_oracles},
      {3, "plant-and-recover-tikhonov", 10.0, plant_recover_tikhonov},
      {4, "plant-and-recover-mdns", 10.0, plant_recover_mdns},
      {5, "physics-oracles", 60.0, physics_oracles},
      {6, "output-invariance", 120.0, output_invariance},
      {7, "desk-scale-filter-structure", 900.0, filter_structure},
      {8, "replica-pipeline", 120.0, replica_pipeline_check},
      {9, "determinism-and-io", 30.0, determinism_io},
      {10, "regularized-pseudoinverse", 30.0, regularized_pseudoinverse},
  };

  int failures = 0;
  for (auto& cr : criteria) {
    auto start = std::chrono::steady_clock::now();
    Check res;
    try {
      res = cr.run();
    } catch (const std::exception& e) {
      res.ok = false;
      res.notes.push_back(std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (secs > cr.budget_s) {
      res.ok = false;
      res.notes.push_back("runtime " + format_double(secs) +
                          "s exceeds budget " + format_double(cr.budget_s) + "s");
    }
    std::printf("[%s] %2d %s (%.1fs)\n", res.ok ? "PASS" : "FAIL", cr.number,
                cr.name, secs);
    for (const auto& n : res.notes) std::printf("       %s\n", n.c_str());
    if (!res.ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}

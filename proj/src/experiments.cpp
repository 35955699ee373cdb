#include "signrec/experiments.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "signrec/errors.hpp"
#include "signrec/generate.hpp"
#include "signrec/io.hpp"
#include "signrec/parallel.hpp"
#include "signrec/recovery_bound.hpp"

namespace signrec {

namespace {

// Stream namespaces under the master seed.  Tuning and evaluation never share
// a child id, so adding or removing cells cannot shift anyone else's draws.
constexpr std::uint64_t kCalibrationStream = 10;
constexpr std::uint64_t kKnockoffStream = 20;
constexpr std::uint64_t kFullNullStream = 30;
constexpr std::uint64_t kEvalStream = 40;

bool needs_lambda_l(Estimator e) {
  return e == Estimator::L || e == Estimator::aL;
}
bool needs_amp(Estimator e) {
  return e == Estimator::aL || e == Estimator::Lk || e == Estimator::Lks;
}
bool needs_knockoff_tau(Estimator e) {
  return e == Estimator::BPk || e == Estimator::Lk || e == Estimator::Lks;
}

std::uint64_t estimator_id(Estimator e) { return static_cast<std::uint64_t>(e); }

AmpProblem amp_problem_for(const ExperimentPlan& plan, int k, double t) {
  AmpProblem prob;
  prob.delta = static_cast<double>(plan.design->n()) /
               static_cast<double>(plan.design->p());
  prob.gamma = static_cast<double>(k) / static_cast<double>(plan.design->p());
  prob.t = t;
  prob.sigma = plan.sigma;
  return prob;
}

std::function<Vec(RngStream)> cell_response_maker(const ExperimentPlan& plan,
                                                  int k, double t) {
  const DesignMatrix& X = *plan.design;
  double sigma = plan.sigma;
  SignMode mode = plan.sign_mode;
  return [&X, sigma, mode, k, t](RngStream st) {
    SignVector s = sample_sign_vector(X.p(), k, mode, st.child(0));
    RngStream noise = st.child(1);
    Vec eps = sigma * normal_vector(X.n(), noise);
    return Vec(X.entries * (t * s.values.cast<double>()) + eps);
  };
}

AugmentedEstimator knockoff_estimator(const ExperimentPlan& plan,
                                      Estimator est, double lambda_amp) {
  LassoConfig cfg = plan.solver;
  switch (est) {
    case Estimator::BPk:
      return [](const DesignMatrix& aug, const Vec& y) {
        return basis_pursuit(y, aug).estimate;
      };
    case Estimator::Lk:
      return [cfg, lambda_amp](const DesignMatrix& aug, const Vec& y) {
        return lasso(y, aug, lambda_amp, cfg).estimate;
      };
    case Estimator::Lks:
      return [cfg, lambda_amp](const DesignMatrix& aug, const Vec& y) {
        return lasso(y, aug, 0.5 * lambda_amp, cfg).estimate;
      };
    default:
      throw ParameterError("knockoff_estimator: estimator has no knockoff threshold");
  }
}

// Runs every tuning computation the plan's cells require.  With a collector,
// failures are recorded against the affected cells and tuning continues;
// without one the first failure propagates.
void tune(ExperimentPlan& plan, PlanResult* collect) {
  plan.validate();
  const RngStream master(plan.master_seed);

  auto record = [&](Estimator est, int k, double t, const std::string& msg) {
    if (!collect) throw CalibrationError(msg);
    collect->errors.push_back({est, k, t, msg});
  };

  bool any_lambda_l = false, any_bp_tau = false;
  for (Estimator e : plan.estimators) {
    any_lambda_l = any_lambda_l || needs_lambda_l(e);
    any_bp_tau = any_bp_tau || (e == Estimator::BP);
  }

  if (any_lambda_l && !plan.lambda_l) {
    try {
      plan.lambda_l = calibrate_lambda(
          *plan.design, plan.calibration_k, plan.sigma,
          plan.calibration_target, plan.calibration_signs,
          plan.calibration_draws, plan.sign_mode,
          master.child(kCalibrationStream), plan.threads);
    } catch (const Error& e) {
      for (Estimator est : plan.estimators) {
        if (!needs_lambda_l(est)) continue;
        for (int k : plan.k_list)
          for (double t : plan.t_grid)
            record(est, k, t, std::string("penalty calibration failed: ") + e.what());
      }
      if (!collect) throw;
    }
  }

  if (any_bp_tau && !plan.fn_tau) {
    try {
      plan.fn_tau = full_null_threshold(
          *plan.design, plan.sigma, plan.fn_alpha, plan.fn_replicates,
          master.child(kFullNullStream), plan.threads);
    } catch (const Error& e) {
      for (int k : plan.k_list)
        for (double t : plan.t_grid)
          record(Estimator::BP, k, t,
                 std::string("full-null threshold failed: ") + e.what());
    }
  }

  for (std::size_t ki = 0; ki < plan.k_list.size(); ++ki) {
    int k = plan.k_list[ki];
    for (std::size_t ti = 0; ti < plan.t_grid.size(); ++ti) {
      double t = plan.t_grid[ti];

      bool amp_needed = false;
      for (Estimator e : plan.estimators) amp_needed = amp_needed || needs_amp(e);
      if (amp_needed && !plan.amp.count({k, t})) {
        try {
          plan.amp[{k, t}] = optimal_lambda_amp(amp_problem_for(plan, k, t));
        } catch (const Error& e) {
          for (Estimator est : plan.estimators)
            if (needs_amp(est))
              record(est, k, t, std::string("penalty tuning failed: ") + e.what());
          continue;  // dependent knockoff thresholds are unreachable too
        }
      }

      for (Estimator est : plan.estimators) {
        if (!needs_knockoff_tau(est)) continue;
        if (plan.taus.count({est, k, t})) continue;
        double lambda_amp = 0.0;
        if (est != Estimator::BPk) {
          auto it = plan.amp.find({k, t});
          if (it == plan.amp.end()) continue;  // already recorded above
          lambda_amp = it->second.lambda;
        }
        try {
          RngStream st = master.child(kKnockoffStream)
                             .child(estimator_id(est))
                             .child(ki)
                             .child(ti);
          plan.taus[{est, k, t}] = knockoff_threshold(
              *plan.design, cell_response_maker(plan, k, t),
              knockoff_estimator(plan, est, lambda_amp), plan.knockoff, st,
              plan.threads);
        } catch (const Error& e) {
          record(est, k, t,
                 std::string("knockoff threshold failed: ") + e.what());
        }
      }
    }
  }
}

}  // namespace

std::string estimator_code(Estimator e) {
  switch (e) {
    case Estimator::L: return "L";
    case Estimator::aL: return "aL";
    case Estimator::BP: return "BP";
    case Estimator::BPk: return "BPk";
    case Estimator::Lk: return "Lk";
    case Estimator::Lks: return "Lks";
  }
  return "?";
}

std::optional<Estimator> parse_estimator(const std::string& code) {
  for (Estimator e : {Estimator::L, Estimator::aL, Estimator::BP,
                      Estimator::BPk, Estimator::Lk, Estimator::Lks})
    if (estimator_code(e) == code) return e;
  return std::nullopt;
}

void ExperimentPlan::validate() const {
  if (!design) throw ParameterError("ExperimentPlan: no design");
  design->validate();
  if (k_list.empty()) throw ParameterError("ExperimentPlan: empty k list");
  for (int k : k_list)
    if (k < 1 || k > design->p())
      throw ParameterError("ExperimentPlan: k outside [1, p]");
  if (t_grid.empty()) throw ParameterError("ExperimentPlan: empty t grid");
  for (double t : t_grid)
    if (!(t > 0)) throw ParameterError("ExperimentPlan: t must be positive");
  if (estimators.empty())
    throw ParameterError("ExperimentPlan: no estimators selected");
  if (n_replicates < 1)
    throw ParameterError("ExperimentPlan: n_replicates must be >= 1");
  if (!(sigma > 0)) throw ParameterError("ExperimentPlan: sigma must be > 0");
  if (!(calibration_target > 0 && calibration_target < 1))
    throw ParameterError("ExperimentPlan: calibration target must lie in (0,1)");
}

void prepare_tuning(ExperimentPlan& plan) { tune(plan, nullptr); }

CellResult run_cell(const ExperimentPlan& plan, int k, double t, Estimator est,
                    const RngStream& rng) {
  plan.validate();
  const DesignMatrix& X = *plan.design;
  const Eigen::Index p = X.p();
  const Eigen::Index n = X.n();

  // Look up every tuning value the estimator needs up front.
  double lambda_l = 0.0, lambda_amp = 0.0, tau = 0.0;
  if (needs_lambda_l(est)) {
    if (!plan.lambda_l)
      throw ParameterError("run_cell: calibrated penalty missing from plan");
    lambda_l = *plan.lambda_l;
  }
  if (needs_amp(est)) {
    auto it = plan.amp.find({k, t});
    if (it == plan.amp.end())
      throw ParameterError("run_cell: MSE-optimal penalty missing from plan");
    lambda_amp = it->second.lambda;
  }
  if (needs_knockoff_tau(est)) {
    auto it = plan.taus.find({est, k, t});
    if (it == plan.taus.end())
      throw ParameterError("run_cell: knockoff threshold missing from plan");
    tau = it->second;
  }
  if (est == Estimator::BP) {
    if (!plan.fn_tau)
      throw ParameterError("run_cell: full-null threshold missing from plan");
    tau = *plan.fn_tau;
  }

  const long reps = plan.n_replicates;
  std::vector<char> fp(static_cast<std::size_t>(reps), 0);
  std::vector<char> exact(static_cast<std::size_t>(reps), 0);
  std::vector<char> supp(static_cast<std::size_t>(reps), 0);
  std::vector<double> bounds;
  const bool with_bound = (est == Estimator::L);
  if (with_bound) bounds.assign(static_cast<std::size_t>(reps), 0.0);

  parallel_for(reps, plan.threads, [&](long r) {
    RngStream rep = rng.child(static_cast<std::uint64_t>(r));
    SignVector s = sample_sign_vector(p, k, plan.sign_mode, rep.child(0));
    RngStream noise = rep.child(1);
    Vec eps = plan.sigma * normal_vector(n, noise);
    Vec y = X.entries * (t * s.values.cast<double>()) + eps;

    Vec estimate;
    switch (est) {
      case Estimator::L:
        estimate = lasso(y, X, lambda_l, plan.solver).estimate;
        break;
      case Estimator::aL: {
        Vec pilot = lasso(y, X, lambda_amp, plan.solver).estimate;
        estimate = adaptive_lasso(y, X, lambda_l, pilot, plan.solver).estimate;
        break;
      }
      case Estimator::BP:
      case Estimator::BPk:
        estimate = apply_threshold(basis_pursuit(y, X).estimate, tau);
        break;
      case Estimator::Lk:
        estimate =
            apply_threshold(lasso(y, X, lambda_amp, plan.solver).estimate, tau);
        break;
      case Estimator::Lks:
        estimate = apply_threshold(
            lasso(y, X, 0.5 * lambda_amp, plan.solver).estimate, tau);
        break;
    }

    RecoveryFlags f = recovery_flags(s, estimate);
    fp[static_cast<std::size_t>(r)] = f.false_positive;
    exact[static_cast<std::size_t>(r)] = f.exact_recovery;
    supp[static_cast<std::size_t>(r)] = f.support_recovered;

    if (with_bound) {
      ZetaContext ctx = build_zeta_context(X, s, plan.sigma, lambda_l);
      bounds[static_cast<std::size_t>(r)] =
          mc_bound(ctx, plan.mc_bound_draws, rep.child(2)).p_hat;
    }
  });

  long nfp = 0, nexact = 0, nsupp = 0;
  for (long r = 0; r < reps; ++r) {
    nfp += fp[static_cast<std::size_t>(r)];
    nexact += exact[static_cast<std::size_t>(r)];
    nsupp += supp[static_cast<std::size_t>(r)];
  }
  auto rate = [reps](long c) {
    return static_cast<double>(c) / static_cast<double>(reps);
  };
  auto se = [reps](double q) {
    return std::sqrt(std::max(q * (1.0 - q), 0.0) / static_cast<double>(reps));
  };

  CellResult cell;
  cell.setting = plan.setting_label;
  cell.estimator = est;
  cell.k = k;
  cell.t = t;
  cell.n_replicates = reps;
  cell.fwer = rate(nfp);
  cell.fwer_se = se(cell.fwer);
  cell.recovery_prob = rate(nexact);
  cell.recovery_se = se(cell.recovery_prob);
  cell.support_power = rate(nsupp);
  cell.seed = plan.master_seed;
  if (with_bound) {
    double sum = 0.0;
    for (double b : bounds) sum += b;
    cell.mc_bound = sum / static_cast<double>(reps);
  }
  switch (est) {
    case Estimator::L:
    case Estimator::aL:
      cell.lambda_used = lambda_l;
      break;
    case Estimator::Lk:
      cell.lambda_used = lambda_amp;
      cell.tau_used = tau;
      break;
    case Estimator::Lks:
      cell.lambda_used = 0.5 * lambda_amp;
      cell.tau_used = tau;
      break;
    case Estimator::BP:
    case Estimator::BPk:
      cell.tau_used = tau;
      break;
  }
  return cell;
}

PlanResult run_plan(ExperimentPlan& plan) {
  PlanResult out;
  tune(plan, &out);
  const RngStream master(plan.master_seed);

  for (std::size_t ki = 0; ki < plan.k_list.size(); ++ki) {
    for (std::size_t ti = 0; ti < plan.t_grid.size(); ++ti) {
      for (Estimator est : plan.estimators) {
        int k = plan.k_list[ki];
        double t = plan.t_grid[ti];
        bool already_failed = false;
        for (const auto& e : out.errors)
          if (e.estimator == est && e.k == k && e.t == t) already_failed = true;
        if (already_failed) continue;
        try {
          RngStream st = master.child(kEvalStream)
                             .child(estimator_id(est))
                             .child(ki)
                             .child(ti);
          out.cells.push_back(run_cell(plan, k, t, est, st));
        } catch (const Error& e) {
          out.errors.push_back({est, k, t, e.what()});
        }
      }
    }
  }
  return out;
}

void write_results_csv(const std::filesystem::path& path,
                       const ExperimentPlan& plan, const PlanResult& result) {
  std::ofstream out(path);
  if (!out)
    throw ParameterError(path.string() + ": cannot open for writing");
  out << "# signrec-results v1\n"
      << "setting,estimator,k,t,n_replicates,fwer,fwer_se,recovery_prob,"
         "recovery_se,support_power,mc_bound,lambda_used,tau_used,seed\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  for (const auto& c : result.cells) {
    out << c.setting << ',' << estimator_code(c.estimator) << ',' << c.k << ','
        << format_double(c.t) << ',' << c.n_replicates << ','
        << format_double(c.fwer) << ',' << format_double(c.fwer_se) << ','
        << format_double(c.recovery_prob) << ',' << format_double(c.recovery_se)
        << ',' << format_double(c.support_power) << ',' << opt(c.mc_bound)
        << ',' << opt(c.lambda_used) << ',' << opt(c.tau_used) << ','
        << c.seed << '\n';
  }
  if (!out) throw ParameterError(path.string() + ": write failed");
  (void)plan;
}

}  // namespace signrec

// Copyright 2026 The athres Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed
// under the License is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR
// CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

#include "athres/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "athres/distributed_waste.hpp"
#include "athres/envelope.hpp"
#include "athres/estimators.hpp"
#include "athres/factorization_check.hpp"
#include "athres/fast_sampler.hpp"
#include "athres/heap_sampler.hpp"
#include "athres/ingest.hpp"
#include "athres/lazy_sampler.hpp"
#include "athres/logistic_sim.hpp"
#include "athres/m_estimation.hpp"
#include "athres/merge.hpp"
#include "athres/multi_objective_sampler.hpp"
#include "athres/stratified_sampler.hpp"
#include "athres/u_statistics.hpp"
#include "athres/unbiasedness.hpp"

namespace athres {

namespace {

using nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw_error(errc::io_error, "cannot open '" + out_path + "' for writing");
  out << text;
}

PriorityFamily family_from_name(const std::string& name) {
  if (name == "uniform") return PriorityFamily::uniform();
  if (name == "exponential") return PriorityFamily::exponential();
  if (name.rfind("power:", 0) == 0) return PriorityFamily::power_shape(std::stod(name.substr(6)));
  throw_error(errc::parse_error, "unknown family '" + name + "' (uniform|exponential|power:<g>)");
}

IngestFormat format_from_name(const std::string& name) {
  if (name == "jsonl") return IngestFormat::jsonl;
  if (name == "csv") return IngestFormat::csv;
  throw_error(errc::parse_error, "unknown format '" + name + "' (jsonl|csv)");
}

// --- athres sample ---------------------------------------------------------

struct SampleArgs {
  std::string sampler = "heap";
  std::string rule;
  std::string family = "uniform";
  std::string format = "jsonl";
  std::string in = "-";
  std::string out = "-";
  std::string objectives;
  int k = 100;
  std::size_t capacity = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 1;
  bool keyed = false;
  bool paper_formula = false;
  double weight_bound = 0.0;
  std::string beta_convention = "size";
};

MultiObjectiveSampler::Config parse_objectives(const std::string& text, int default_k,
                                               std::uint64_t seed) {
  MultiObjectiveSampler::Config config;
  config.seed = seed;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    MultiObjectiveSampler::Objective objective;
    objective.k = default_k;
    std::string spec = part;
    if (auto colon = spec.find(":k="); colon != std::string::npos) {
      objective.k = std::stoi(spec.substr(colon + 3));
      spec = spec.substr(0, colon);
    }
    if (spec == "weight") {
      objective.weight.source = ObjectiveWeight::Source::item_weight;
    } else if (spec == "unit") {
      objective.weight.source = ObjectiveWeight::Source::unit;
    } else if (spec.rfind("x", 0) == 0) {
      objective.weight.source = ObjectiveWeight::Source::payload_index;
      objective.weight.payload_index = static_cast<std::size_t>(std::stoul(spec.substr(1)));
    } else {
      throw_error(errc::parse_error, "objective must be weight|unit|x<i>[:k=<k>]");
    }
    config.objectives.push_back(objective);
  }
  return config;
}

int run_sample(const SampleArgs& args) {
  IngestStats stats;
  Sample sample;
  PriorityFamily family = family_from_name(args.family);
  IngestFormat format = format_from_name(args.format);

  if (args.sampler == "heap") {
    HeapSampler sampler({args.k, family, args.seed, args.keyed});
    stats = ingest_path(args.in, format, [&](WeightedItem item) { sampler.add(item); });
    sample = sampler.finalize();
  } else if (args.sampler == "fast") {
    FastSampler::Config config;
    config.k = args.k;
    config.seed = args.seed;
    if (args.weight_bound > 0.0) config.weight_bound = args.weight_bound;
    config.beta = args.beta_convention == "size-minus-one"
                      ? FastSampler::BetaConvention::reservoir_size_minus_one
                      : FastSampler::BetaConvention::reservoir_size;
    FastSampler sampler(config);
    stats = ingest_path(args.in, format, [&](WeightedItem item) { sampler.add(item); });
    sample = sampler.finalize();
  } else if (args.sampler == "lazy") {
    LazySampler::Config config;
    config.rule = parse_rule(args.rule.empty() ? "fixed_k:" + std::to_string(args.k) : args.rule,
                             args.paper_formula);
    config.capacity = args.capacity != 0 ? args.capacity : config.rule->natural_capacity();
    config.family = family;
    config.seed = args.seed;
    config.keyed_uniforms = args.keyed;
    LazySampler sampler(config);
    stats = ingest_path(args.in, format, [&](WeightedItem item) { sampler.add(item); });
    sample = sampler.finalize();
  } else if (args.sampler == "stratified") {
    StratifiedSampler sampler({args.budget != 0 ? args.budget : static_cast<std::size_t>(args.k),
                               args.seed, args.keyed});
    stats = ingest_path(args.in, format, [&](WeightedItem item) { sampler.add(item); });
    sample = sampler.finalize();
  } else if (args.sampler == "multi") {
    MultiObjectiveSampler sampler(parse_objectives(args.objectives, args.k, args.seed));
    stats = ingest_path(args.in, format, [&](WeightedItem item) { sampler.add(item); });
    sample = sampler.finalize();
  } else {
    throw_error(errc::parse_error, "unknown sampler '" + args.sampler + "'");
  }

  emit(serialize_envelope(sample), args.out);
  std::cerr << "ingested " << stats.accepted << " items (" << stats.rejected_records
            << " rejected, " << stats.malformed_lines << " malformed), retained "
            << sample.items.size() << "\n";
  return kExitPass;
}

// --- athres estimate -------------------------------------------------------

struct EstimateArgs {
  std::string estimator = "subset_sum_ht";
  std::string in;
  std::string out = "-";
  std::string statistic = "subset_sum_ht";
  double x = 0.0;
  double q = 0.5;
  double alpha = 0.0;
  std::uint64_t n_population = 0;
  int v = 0;
  int b = 200;
  std::size_t covariates = 1;
  std::uint64_t seed = 1;
};

json estimate_to_json(const Estimate& e) {
  json j;
  j["value"] = e.value.size() == 1 ? json(e.value[0]) : json(e.value);
  if (e.variance) {
    j["variance"] = e.variance->size() == 1 ? json((*e.variance)[0]) : json(*e.variance);
  } else {
    j["variance"] = nullptr;
  }
  j["degree_used"] = e.degree_used;
  j["n_effective"] = e.n_effective;
  j["converged"] = e.converged;
  return j;
}

std::function<double(const Sample&)> scalar_statistic(const std::string& name) {
  if (name == "subset_sum_ht") return [](const Sample& s) { return subset_sum_ht(s).scalar(); };
  if (name == "weighted_mean") {
    return [](const Sample& s) {
      return weighted_loss_fit(s, SquaredLoss{}).scalar();
    };
  }
  throw_error(errc::parse_error, "unknown statistic '" + name + "'");
}

int run_estimate(const EstimateArgs& args) {
  Sample sample = read_envelope_file(args.in);
  Estimate result;
  if (args.estimator == "subset_sum_ht") {
    result = subset_sum_ht(sample);
  } else if (args.estimator == "subset_sum_variance") {
    result = subset_sum_variance(sample);
  } else if (args.estimator == "threshold_inclusion") {
    result = threshold_inclusion_estimate(
        sample, [](const Sample& s) { return subset_sum_ht(s).scalar(); });
  } else if (args.estimator == "weighted_cdf") {
    double value = args.alpha > 0.0
                       ? weighted_cdf(sample, args.x, AlphaMode::exact, args.alpha)
                       : weighted_cdf(sample, args.x, AlphaMode::plug_in);
    result = Estimate::of(value, 1, sample.size());
  } else if (args.estimator == "weighted_quantile") {
    result = Estimate::of(weighted_quantile(sample, args.q), 1, sample.size());
  } else if (args.estimator == "u_stat_variance") {
    if (args.n_population < 2) {
      throw_error(errc::parse_error, "u_stat_variance needs --n-population");
    }
    result = u_statistic_degree2(sample, variance_kernel, args.n_population);
  } else if (args.estimator == "weighted_mean") {
    result = weighted_loss_fit(sample, SquaredLoss{});
  } else if (args.estimator == "logistic_fit") {
    result = weighted_loss_fit(sample, LogisticLoss{args.covariates});
  } else if (args.estimator == "bootstrap") {
    Rng rng(args.seed);
    int v = args.v > 0 ? args.v : static_cast<int>(sample.size());
    result = subsampled_bootstrap(sample, scalar_statistic(args.statistic), v, args.b, rng);
  } else {
    throw_error(errc::parse_error, "unknown estimator '" + args.estimator + "'");
  }
  emit(estimate_to_json(result).dump() + "\n", args.out);
  return kExitPass;
}

// --- athres merge ----------------------------------------------------------

struct MergeArgs {
  std::vector<std::string> files;
  std::string strategy = "min";
  std::string out = "-";
  std::size_t naive_k = 0;
  bool report = false;
};

int run_merge(const MergeArgs& args) {
  std::vector<Sample> envelopes;
  envelopes.reserve(args.files.size());
  for (const std::string& f : args.files) envelopes.push_back(read_envelope_file(f));
  if (args.strategy == "min") {
    Sample merged = merge_samples(envelopes);
    emit(serialize_envelope(merged), args.out);
    if (args.report) {
      WasteReport r = waste_report(envelopes, MergeStrategy::min_merge);
      std::cerr << "min-merge retained " << r.retained << "/" << r.transferred << " (ratio "
                << r.retention_ratio << "), tau " << r.tau_used << "\n";
    }
    return kExitPass;
  }
  if (args.strategy == "naive") {
    std::size_t k = args.naive_k != 0 ? args.naive_k : envelopes.front().items.size();
    WasteReport r = waste_report(envelopes, MergeStrategy::naive_topk, k);
    std::ostringstream s;
    s << "strategy naive_topk\nnodes " << r.nodes << "\ntransferred " << r.transferred
      << "\nretained " << r.retained << "\nretention_ratio " << r.retention_ratio << "\ntau "
      << r.tau_used << "\n";
    emit(s.str(), args.out);
    return kExitPass;
  }
  throw_error(errc::parse_error, "unknown strategy '" + args.strategy + "' (min|naive)");
}

// --- athres check factorization -------------------------------------------

struct CheckArgs {
  std::string rule = "fixed_k:3";
  std::string family = "uniform";
  std::string weights;
  int n = 6;
  int v = 2;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  std::string out = "-";
  bool paper_formula = false;
};

std::vector<double> parse_weights(const std::string& text, int n) {
  std::vector<double> weights;
  if (text.empty()) {
    for (int i = 1; i <= n; ++i) weights.push_back(static_cast<double>(i));
    return weights;
  }
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) weights.push_back(std::stod(part));
  return weights;
}

std::string lambda_name(const std::vector<int>& indices) {
  std::string s = "{";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(indices[i]);
  }
  return s + "}";
}

int run_check(const CheckArgs& args) {
  RulePtr rule = parse_rule(args.rule, args.paper_formula);
  std::vector<double> weights = parse_weights(args.weights, args.n);
  FactorizationReport report = check_factorization(*rule, family_from_name(args.family), weights,
                                                   args.v, args.trials, args.seed);
  std::ostringstream s;
  s << "factorization check: rule " << report.subject << ", n " << weights.size() << ", v "
    << report.v << ", trials " << report.trials << "\n";
  for (const auto& row : report.rows) {
    s << "  lambda " << lambda_name(row.indices) << " mean " << row.mean << " se " << row.se
      << " z " << row.z << "\n";
  }
  s << "max |z| " << report.max_abs_z << "\n";
  s << (report.pass ? "PASS" : "FAIL") << "\n";
  emit(s.str(), args.out);
  return report.pass ? kExitPass : kExitFail;
}

// --- athres verify unbiasedness --------------------------------------------

struct VerifyArgs {
  std::string rule = "fixed_k:4";
  std::string estimators = "subset_sum_ht";
  int n = 10;
  std::uint64_t replicates = 100000;
  std::uint64_t seed = 1;
  std::string out = "-";
  bool paper_formula = false;
};

int run_verify(const VerifyArgs& args) {
  RulePtr rule = parse_rule(args.rule, args.paper_formula);
  // Fixed population x_i = w_i = i.
  std::vector<WeightedItem> population;
  double truth_sum = 0.0;
  for (int i = 1; i <= args.n; ++i) {
    population.emplace_back(std::to_string(i - 1), static_cast<double>(i),
                            static_cast<double>(i));
    truth_sum += i;
  }
  auto run = [&](std::uint64_t seed) {
    LazySampler::Config config;
    config.capacity = rule->natural_capacity();  // 0 = rule not size-driven
    config.rule = rule;
    config.seed = seed;
    LazySampler sampler(config);
    for (const auto& item : population) sampler.add(item);
    return sampler.finalize();
  };

  std::vector<EstimatorBinding> bindings;
  std::stringstream ss(args.estimators);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name == "subset_sum_ht") {
      bindings.push_back({name, [](const Sample& s) { return subset_sum_ht(s).scalar(); },
                          truth_sum});
    } else if (name == "threshold_inclusion") {
      bindings.push_back({name,
                          [](const Sample& s) {
                            return threshold_inclusion_estimate(
                                       s, [](const Sample& b) { return subset_sum_ht(b).scalar(); })
                                .scalar();
                          },
                          truth_sum});
    } else if (name == "subset_sum_variance") {
      // Mean of the variance estimator is checked against the empirical
      // variance of the HT estimator, computed in the same pass.
      bindings.push_back({name, [](const Sample& s) { return subset_sum_variance(s).scalar(); },
                          0.0});
    } else {
      throw_error(errc::parse_error, "unknown estimator '" + name + "' for verify");
    }
  }

  UnbiasednessReport report = verify_unbiasedness(run, bindings, args.replicates, args.seed);

  // Resolve the variance row's truth from the HT row's empirical variance.
  bool pass = true;
  std::ostringstream s;
  s << "unbiasedness: rule " << rule->name() << ", n " << args.n << ", replicates "
    << report.replicates << "\n";
  const UnbiasednessReport::Row* ht_row = nullptr;
  for (const auto& row : report.rows) {
    if (row.name == "subset_sum_ht") ht_row = &row;
  }
  for (auto row : report.rows) {
    if (row.refused) {
      s << "  " << row.name << " REFUSED (" << row.refusal << ")\n";
      pass = false;
      continue;
    }
    if (row.name == "subset_sum_variance") {
      if (!ht_row) {
        s << "  " << row.name << " SKIPPED (needs subset_sum_ht in the same run)\n";
        continue;
      }
      row.truth = ht_row->empirical_variance;
      row.z = row.se > 0.0 ? (row.mc_mean - row.truth) / row.se : 0.0;
      row.pass = std::fabs(row.z) <= 4.0;
    }
    s << "  " << row.name << " mean " << row.mc_mean << " truth " << row.truth << " z " << row.z
      << (row.pass ? " ok" : " FAIL") << "\n";
    pass = pass && row.pass;
  }
  s << (pass ? "PASS" : "FAIL") << "\n";
  emit(s.str(), args.out);
  return pass ? kExitPass : kExitFail;
}

// --- athres experiment ------------------------------------------------------

struct WasteArgs {
  std::size_t m = 10;
  std::size_t k = 100;
  std::size_t n = 10000;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::string out = "-";
};

int run_waste(const WasteArgs& args) {
  DistributedWasteResult r =
      run_distributed_waste({args.m, args.k, args.n, args.replicates, args.seed});
  std::ostringstream s;
  s << "distributed waste: m " << args.m << ", k " << args.k << ", n " << args.n
    << ", replicates " << args.replicates << "\n";
  s << "mean node tau " << r.mean_node_tau << "\n";
  s << "mean min tau " << r.mean_min_tau << "\n";
  s << "min-merge retained " << r.min_merge.retained << "/" << r.min_merge.transferred
    << " (ratio " << r.min_merge.retention_ratio << ")\n";
  s << "naive retained " << r.naive.retained << "/" << r.naive.transferred << " (ratio "
    << r.naive.retention_ratio << ")\n";
  emit(s.str(), args.out);
  return kExitPass;
}

struct LogisticArgs {
  std::size_t n = 1000000;
  double c = 2.8;
  std::size_t batch = 50;
  double decay = 6.931471805599453;
  std::size_t k = 1000;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string series;
};

int run_logistic(const LogisticArgs& args) {
  LogisticSimSpec spec;
  spec.n_points = args.n;
  spec.c = args.c;
  spec.batch = args.batch;
  spec.decay = args.decay;
  spec.k = args.k;
  spec.seed = args.seed;
  LogisticSimResult r = run_logistic_sim(spec);
  std::ostringstream s;
  s << "logistic experiment: n " << args.n << ", c " << args.c << ", k " << args.k << ", batch "
    << args.batch << ", decay " << args.decay << "\n";
  s << "optimal prediction error " << r.optimal_error_estimate << "\n";
  s << "decay-only L2 error " << r.decay_only_l2 << "\n";
  s << "case-control L2 error " << r.case_control_l2 << "\n";
  s << "error ratio (decay / case-control) " << r.error_ratio << "\n";
  s << "nonconvergent refits " << r.nonconvergent_refits << "\n";
  emit(s.str(), args.out);
  if (!args.series.empty()) {
    std::ostringstream t;
    t << "t\terr_decay\terr_case_control\n";
    for (const auto& row : r.series) {
      t << row.t << "\t" << row.err_decay << "\t" << row.err_case_control << "\n";
    }
    emit(t.str(), args.series);
  }
  return kExitPass;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"adaptive threshold sampling toolkit"};
  app.require_subcommand(1);

  SampleArgs sample_args;
  CLI::App* sample = app.add_subcommand("sample", "draw a sample from a stream");
  sample->add_option("--sampler", sample_args.sampler, "heap|fast|lazy|stratified|multi");
  sample->add_option("--rule", sample_args.rule, "threshold rule, e.g. fixed_k:8, wegman:8");
  sample->add_option("--family", sample_args.family, "uniform|exponential|power:<gamma>");
  sample->add_option("--format", sample_args.format, "jsonl|csv");
  sample->add_option("--in", sample_args.in, "input path or - for stdin");
  sample->add_option("--out,-o", sample_args.out, "output envelope path");
  sample->add_option("-k,--k", sample_args.k, "sample size");
  sample->add_option("--capacity", sample_args.capacity, "lazy sampler capacity");
  sample->add_option("--budget", sample_args.budget, "stratified memory budget");
  sample->add_option("--seed", sample_args.seed, "generator seed");
  sample->add_option("--objectives", sample_args.objectives,
                     "multi sampler objectives, e.g. weight:k=4,unit:k=4");
  sample->add_flag("--keyed", sample_args.keyed, "derive uniforms from (seed, id)");
  sample->add_flag("--paper-formula", sample_args.paper_formula,
                   "use the printed variance-adapted size formula");
  sample->add_option("--weight-bound", sample_args.weight_bound,
                     "upper weight bound enabling the steady-state fast path");
  sample->add_option("--beta-convention", sample_args.beta_convention,
                     "size|size-minus-one (fast sampler threshold draw)");

  EstimateArgs estimate_args;
  CLI::App* estimate = app.add_subcommand("estimate", "run an estimator on an envelope");
  estimate->add_option("--estimator", estimate_args.estimator,
                       "subset_sum_ht|subset_sum_variance|threshold_inclusion|weighted_cdf|"
                       "weighted_quantile|u_stat_variance|weighted_mean|logistic_fit|bootstrap");
  estimate->add_option("--in", estimate_args.in, "envelope path")->required();
  estimate->add_option("--out,-o", estimate_args.out, "output path");
  estimate->add_option("--x", estimate_args.x, "evaluation point for weighted_cdf");
  estimate->add_option("--q", estimate_args.q, "quantile level");
  estimate->add_option("--alpha", estimate_args.alpha, "known total weight (weighted_cdf exact)");
  estimate->add_option("--n-population", estimate_args.n_population, "population size (u_stat)");
  estimate->add_option("--v", estimate_args.v, "bootstrap subset size");
  estimate->add_option("--B", estimate_args.b, "bootstrap resamples");
  estimate->add_option("--statistic", estimate_args.statistic, "bootstrap statistic");
  estimate->add_option("--covariates", estimate_args.covariates, "logistic fit covariates");
  estimate->add_option("--seed", estimate_args.seed, "bootstrap seed");

  MergeArgs merge_args;
  CLI::App* merge = app.add_subcommand("merge", "merge sample envelopes");
  merge->add_option("files", merge_args.files, "envelope files")->required()->expected(-2);
  merge->add_option("--strategy", merge_args.strategy, "min|naive");
  merge->add_option("--out,-o", merge_args.out, "output path");
  merge->add_option("-k,--k", merge_args.naive_k, "final size for the naive strategy");
  merge->add_flag("--report", merge_args.report, "print retention accounting to stderr");

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("check", "verification harnesses");
  CLI::App* fact = check->add_subcommand("factorization", "substitution-compatibility check");
  fact->add_option("--rule", check_args.rule, "threshold rule under test");
  fact->add_option("--family", check_args.family, "priority family");
  fact->add_option("--weights", check_args.weights, "comma-separated population weights");
  fact->add_option("--n", check_args.n, "population size when --weights is absent (w_i = i)");
  fact->add_option("--v", check_args.v, "max interaction degree");
  fact->add_option("--trials", check_args.trials, "Monte-Carlo trials");
  fact->add_option("--seed", check_args.seed, "seed");
  fact->add_option("--out,-o", check_args.out, "output path");
  fact->add_flag("--paper-formula", check_args.paper_formula, "printed var_adapt size formula");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "statistical verification");
  CLI::App* unb = verify->add_subcommand("unbiasedness", "Monte-Carlo unbiasedness check");
  unb->add_option("--rule", verify_args.rule, "threshold rule");
  unb->add_option("--estimators", verify_args.estimators,
                  "comma list: subset_sum_ht,subset_sum_variance,threshold_inclusion");
  unb->add_option("--n", verify_args.n, "population size (x_i = w_i = i)");
  unb->add_option("--replicates", verify_args.replicates, "Monte-Carlo replicates");
  unb->add_option("--seed", verify_args.seed, "seed");
  unb->add_option("--out,-o", verify_args.out, "output path");
  unb->add_flag("--paper-formula", verify_args.paper_formula, "printed var_adapt size formula");

  WasteArgs waste_args;
  LogisticArgs logistic_args;
  CLI::App* experiment = app.add_subcommand("experiment", "simulation experiments");
  CLI::App* waste = experiment->add_subcommand("distributed-waste", "distributed merge waste");
  waste->add_option("--m", waste_args.m, "nodes");
  waste->add_option("-k,--k", waste_args.k, "records transferred per node");
  waste->add_option("--n", waste_args.n, "items per node");
  waste->add_option("--replicates", waste_args.replicates, "replicates");
  waste->add_option("--seed", waste_args.seed, "seed");
  waste->add_option("--out,-o", waste_args.out, "output path");

  CLI::App* logistic = experiment->add_subcommand("logistic", "streaming logistic regression");
  logistic->add_option("--n", logistic_args.n, "stream length");
  logistic->add_option("--c", logistic_args.c, "coefficient scale");
  logistic->add_option("--batch", logistic_args.batch, "pilot-refit batch size");
  logistic->add_option("--decay", logistic_args.decay, "forward-decay rate");
  logistic->add_option("-k,--k", logistic_args.k, "sample capacity");
  logistic->add_option("--seed", logistic_args.seed, "seed");
  logistic->add_option("--out,-o", logistic_args.out, "report path");
  logistic->add_option("--series", logistic_args.series, "series (plot data) path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*sample) return run_sample(sample_args);
    if (*estimate) return run_estimate(estimate_args);
    if (*merge) return run_merge(merge_args);
    if (*check && *fact) return run_check(check_args);
    if (*verify && *unb) return run_verify(verify_args);
    if (*experiment && *waste) return run_waste(waste_args);
    if (*experiment && *logistic) return run_logistic(logistic_args);
    std::cerr << "missing subcommand\n";
    return kExitUsage;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == errc::parse_error ? kExitUsage : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace athres

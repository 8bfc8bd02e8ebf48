// Copyright 2026 The stackelsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "stackelsim/analysis.hpp"
#include "stackelsim/attack.hpp"
#include "stackelsim/error.hpp"
#include "stackelsim/games.hpp"
#include "stackelsim/mechanisms.hpp"
#include "stackelsim/stats.hpp"

namespace stackelsim::cli {
namespace {

using json = nlohmann::ordered_json;
using stats::DistributionSpec;
using stats::ValuationProfile;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string num(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string flag(bool b) { return b ? "true" : "false"; }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Document {
  json body;
  Table table;
};

json amount_json(const Amount& a, double eps) {
  return json{{"value", a.value(eps)}, {"base", a.base}, {"eps", a.eps}};
}

json header_json(const std::string& command, std::uint64_t seed) {
  return json{{"schema_version", kSchemaVersion},
              {"command", command},
              {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Shared option groups.

struct AuctionArgs {
  std::string kind = "eip1559";
  int n = 0;
  int m = 0;
  double base_fee = 0.0;
  double eps = kDefaultQuantum;
  std::vector<double> values;
  std::string dist;
  double shape = 2.0;
};

void add_auction_options(CLI::App* app, AuctionArgs& a, bool require_m) {
  app->add_option("--kind", a.kind, "first-price, second-price or eip1559")
      ->capture_default_str();
  app->add_option("--n", a.n, "Number of agents (with --dist)");
  auto* m = app->add_option("--m", a.m, "Number of items (block capacity)");
  if (require_m) m->required();
  app->add_option("--B", a.base_fee, "Base fee (eip1559 only)")
      ->capture_default_str();
  app->add_option("--eps", a.eps, "Currency quantum")->capture_default_str();
  app->add_option("--values", a.values,
                  "Strictly increasing valuations, comma separated")
      ->delimiter(',');
  app->add_option("--dist", a.dist, "Sample valuations: uniform or pareto");
  app->add_option("--shape", a.shape, "Pareto shape p")->capture_default_str();
}

DistributionSpec parse_dist(const std::string& name, double shape) {
  if (name == "uniform") return DistributionSpec::uniform();
  if (name == "pareto") return DistributionSpec::pareto(shape);
  throw UsageError("unknown distribution '" + name + "'");
}

mech::AuctionConfig make_config(const AuctionArgs& a, int n) {
  mech::AuctionConfig config;
  config.n = n;
  config.m = a.m;
  config.base_fee = a.base_fee;
  config.eps = a.eps;
  config.kind = mech::parse_mechanism_kind(a.kind);
  config.validate();
  return config;
}

ValuationProfile resolve_values(const AuctionArgs& a, std::uint64_t seed) {
  if (!a.values.empty()) {
    if (a.n != 0 && a.n != static_cast<int>(a.values.size())) {
      throw UsageError("--n does not match the number of --values");
    }
    return ValuationProfile::from_values(a.values);
  }
  if (a.dist.empty()) throw UsageError("need --values or --dist");
  if (a.n < 1) throw UsageError("--dist needs --n");
  return stats::sample_valuations(parse_dist(a.dist, a.shape), a.n,
                                  derive_seed(seed, 0));
}

json values_json(const ValuationProfile& v) {
  json out = json::array();
  for (double x : v.values()) out.push_back(x);
  return out;
}

json config_json(const mech::AuctionConfig& c) {
  return json{{"kind", std::string(mech::to_string(c.kind))},
              {"n", c.n},
              {"m", c.m},
              {"base_fee", c.base_fee},
              {"eps", c.eps}};
}

void merge(json& into, const json& from) {
  for (auto it = from.begin(); it != from.end(); ++it) into[it.key()] = it.value();
}

// Per-agent outcome, shared by `mech` and `attack simulate`.
void outcome_document(Document& doc, const mech::AuctionConfig& config,
                      const ValuationProfile& v, const mech::BidProfile& bids,
                      const mech::AllocationOutcome& o) {
  const double eps = config.eps;
  json winners = json::array();
  for (int w : o.winners) winners.push_back(w + 1);
  json agents = json::array();
  doc.table.header = {"agent",   "valuation", "tip",     "win_probability",
                      "winner",  "payment",   "utility", "expected_utility"};
  for (int i = 0; i < config.n; ++i) {
    const bool winner =
        std::binary_search(o.winners.begin(), o.winners.end(), i);
    agents.push_back(json{{"agent", i + 1},
                          {"valuation", v[i]},
                          {"tip", amount_json(bids.tips[i], eps)},
                          {"win_probability", o.win_probability[i]},
                          {"winner", winner},
                          {"payment", amount_json(o.payments[i], eps)},
                          {"utility", amount_json(o.utilities[i], eps)},
                          {"expected_utility",
                           amount_json(o.expected_utilities[i], eps)}});
    doc.table.rows.push_back({std::to_string(i + 1), num(v[i]),
                              num(bids.tips[i].value(eps)),
                              num(o.win_probability[i]), flag(winner),
                              num(o.payments[i].value(eps)),
                              num(o.utilities[i].value(eps)),
                              num(o.expected_utilities[i].value(eps))});
  }
  doc.body["winners"] = winners;
  doc.body["agents"] = agents;
  doc.body["auctioneer_revenue"] = amount_json(o.auctioneer_revenue, eps);
  doc.body["burned"] = amount_json(o.burned, eps);
  if (config.kind == mech::MechanismKind::kSecondPrice) {
    doc.body["clearing_price"] = amount_json(o.clearing_price, eps);
  }
}

json plan_json(const attack::AttackPlan& plan) {
  json coalition = json::array();
  for (int c : plan.coalition) coalition.push_back(c + 1);
  json order = json::array();
  for (int c : plan.contract_order) order.push_back(c + 1);
  return json{{"leader", plan.leading + 1},
              {"k", plan.k()},
              {"coalition", coalition},
              {"contract_order", order}};
}

// ---------------------------------------------------------------------------
// Commands.

struct MechArgs {
  AuctionArgs auction;
  std::vector<std::string> tips;
  bool eq_bids = false;
};

Document cmd_mech(const MechArgs& a, std::uint64_t seed) {
  const ValuationProfile v = resolve_values(a.auction, seed);
  const mech::AuctionConfig config = make_config(a.auction, v.n());
  mech::BidProfile bids;
  if (a.eq_bids) {
    if (!a.tips.empty()) throw UsageError("--tips and --eq-bids are exclusive");
    bids = mech::equilibrium_bids(config, v);
  } else {
    if (a.tips.empty()) throw UsageError("need --tips or --eq-bids");
    for (const auto& t : a.tips) bids.tips.push_back(parse_amount(t));
    if (static_cast<int>(bids.tips.size()) != config.n) {
      throw UsageError("expected " + std::to_string(config.n) + " tips, got " +
                       std::to_string(bids.tips.size()));
    }
  }
  const mech::AllocationOutcome o =
      mech::allocate(config, v, bids, derive_seed(seed, 1));
  Document doc;
  doc.body = header_json("mech", seed);
  merge(doc.body, config_json(config));
  doc.body["valuations"] = values_json(v);
  outcome_document(doc, config, v, bids, o);
  return doc;
}

struct AttackArgs {
  AuctionArgs auction;
  int leader = 0;
  int k = 1;
};

Document cmd_attack_check(const AttackArgs& a, std::uint64_t seed) {
  const ValuationProfile v = resolve_values(a.auction, seed);
  const mech::AuctionConfig config = make_config(a.auction, v.n());
  const attack::AttackPlan plan =
      attack::coalition_select(v, config, a.leader - 1, a.k);
  const attack::SufficientCondition suff =
      attack::sufficient_condition(v, config, a.k);
  const attack::ComplianceReport exact =
      attack::exact_feasibility(plan, v, config);
  const double eps = config.eps;

  Document doc;
  doc.body = header_json("attack check", seed);
  merge(doc.body, config_json(config));
  doc.body["valuations"] = values_json(v);
  doc.body["plan"] = plan_json(plan);
  doc.body["sufficient"] = json{{"holds", suff.holds},
                                {"lhs", suff.lhs},
                                {"rhs", suff.rhs},
                                {"margin", suff.margin}};
  json agents = json::array();
  doc.table.header = {"agent",  "in_coalition", "comply",   "defy",
                      "margin", "complies",     "feasible", "sufficient"};
  for (const auto& ag : exact.agents) {
    agents.push_back(json{{"agent", ag.agent + 1},
                          {"in_coalition", ag.in_coalition},
                          {"comply", amount_json(ag.comply, eps)},
                          {"defy", amount_json(ag.defy, eps)},
                          {"margin", amount_json(ag.margin, eps)},
                          {"complies", ag.complies}});
    doc.table.rows.push_back({std::to_string(ag.agent + 1),
                              flag(ag.in_coalition), num(ag.comply.value(eps)),
                              num(ag.defy.value(eps)), num(ag.margin_value),
                              flag(ag.complies), flag(exact.feasible),
                              flag(suff.holds)});
  }
  doc.body["exact"] = json{{"feasible", exact.feasible},
                           {"binding_agent", exact.binding_agent + 1},
                           {"agents", agents}};
  return doc;
}

Document cmd_attack_simulate(const AttackArgs& a, std::uint64_t seed) {
  const ValuationProfile v = resolve_values(a.auction, seed);
  const mech::AuctionConfig config = make_config(a.auction, v.n());
  const attack::AttackPlan plan =
      attack::coalition_select(v, config, a.leader - 1, a.k);
  const mech::AllocationOutcome o =
      attack::attacked_outcome(plan, v, config, derive_seed(seed, 1));
  const analysis::RevenueReport revenue =
      analysis::revenue_report(v, config, plan);
  Document doc;
  doc.body = header_json("attack simulate", seed);
  merge(doc.body, config_json(config));
  doc.body["valuations"] = values_json(v);
  doc.body["plan"] = plan_json(plan);
  outcome_document(doc, config, v, attack::compliant_bids(plan, config.n), o);
  doc.body["revenue"] = json{{"honest", amount_json(revenue.honest, config.eps)},
                             {"attacked", amount_json(revenue.attacked, config.eps)},
                             {"loss", amount_json(revenue.loss, config.eps)}};
  doc.body["welfare"] = amount_json(analysis::welfare(o), config.eps);
  return doc;
}

struct PodArgs {
  AuctionArgs auction;
  double alpha = 0.0;
  int k = 1;
  bool expected_values = false;
  int trials = 200;
};

Document cmd_pod(const PodArgs& a, std::uint64_t seed, int workers) {
  Document doc;
  doc.body = header_json("pod", seed);
  const std::string dist_name = a.auction.dist.empty() ? "uniform" : a.auction.dist;
  const DistributionSpec dist = parse_dist(dist_name, a.auction.shape);

  const bool instance = a.expected_values || !a.auction.values.empty();
  if (instance) {
    ValuationProfile v;
    if (a.expected_values) {
      if (!a.auction.values.empty()) {
        throw UsageError("--values and --expected-values are exclusive");
      }
      if (dist.kind != DistributionSpec::Kind::kUniform01) {
        throw UsageError("--expected-values needs --dist uniform");
      }
      if (!(a.alpha > 0.0)) throw UsageError("--expected-values needs --alpha > 0");
      v = stats::uniform_expected_profile(
          static_cast<int>(std::lround((1.0 + a.alpha) * a.auction.m)));
    } else {
      v = ValuationProfile::from_values(a.auction.values);
    }
    const mech::AuctionConfig config = make_config(a.auction, v.n());
    const analysis::PodReport r =
        analysis::defiance_report(v, config, a.k, derive_seed(seed, 1));
    merge(doc.body, config_json(config));
    doc.body["mode"] = "instance";
    doc.body["k"] = a.k;
    doc.body["valuations"] = values_json(v);
    doc.body["pod"] = r.pod;
    doc.body["numerator"] = r.numerator;
    doc.body["denominator"] = r.denominator;
    doc.body["best_leader"] = r.best_leader < 0 ? json(nullptr) : json(r.best_leader + 1);
    if (a.expected_values && a.k == 1) {
      doc.body["closed_form"] =
          analysis::pod_closed_form_uniform(config.n, config.m, config.eps);
    }
    json leaders = json::array();
    doc.table.header = {"leader", "feasible", "binding_agent", "binding_margin",
                        "welfare"};
    for (const auto& row : r.leaders) {
      leaders.push_back(json{{"leader", row.leader + 1},
                             {"feasible", row.feasible},
                             {"binding_agent", row.binding_agent + 1},
                             {"binding_margin", row.binding_margin},
                             {"welfare", amount_json(row.welfare, config.eps)}});
      doc.table.rows.push_back({std::to_string(row.leader + 1),
                                flag(row.feasible),
                                std::to_string(row.binding_agent + 1),
                                num(row.binding_margin),
                                num(row.welfare.limit(config.eps))});
    }
    doc.body["leaders"] = leaders;
    return doc;
  }

  analysis::ExperimentSpec spec;
  spec.dist = dist;
  spec.m = a.auction.m;
  spec.alpha = a.alpha;
  spec.k = a.k;
  spec.trials = a.trials;
  spec.master_seed = seed;
  spec.base_fee = a.auction.base_fee;
  spec.eps = a.auction.eps;
  spec.kind = mech::parse_mechanism_kind(a.auction.kind);
  spec.workers = workers;
  const analysis::PodSummary s = analysis::mc_pod(spec);
  merge(doc.body, config_json(spec.auction()));
  doc.body["mode"] = "monte-carlo";
  doc.body["distribution"] = dist.name();
  doc.body["alpha"] = a.alpha;
  doc.body["k"] = s.k;
  doc.body["trials"] = s.trials;
  doc.body["feasible_trials"] = s.feasible_trials;
  doc.body["infeasible_trials"] = s.infeasible_trials;
  doc.body["mean"] = s.mean;
  doc.body["stddev"] = s.stddev;
  doc.body["ci"] = json::array({s.ci.low, s.ci.high});
  doc.body["bound"] = s.bound;
  json pods = json::array();
  doc.table.header = {"trial", "feasible", "pod"};
  for (std::size_t t = 0; t < s.pods.size(); ++t) {
    pods.push_back(s.pods[t]);
    doc.table.rows.push_back({std::to_string(t + 1),
                              flag(!std::isnan(s.pods[t])), num(s.pods[t])});
  }
  doc.body["pods"] = pods;
  return doc;
}

struct SweepArgs {
  std::vector<double> params;
  std::vector<double> alphas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<int> ms = {100, 500};
  int trials = 200;
};

Document cmd_sweep(analysis::SweepFamily family, const SweepArgs& a,
                   std::uint64_t seed, int workers) {
  analysis::SweepSpec spec;
  spec.family = family;
  spec.params = a.params;
  if (spec.params.empty()) {
    spec.params = {family == analysis::SweepFamily::kUniform ? 0.69 : 2.0};
  }
  spec.alphas = a.alphas;
  spec.ms = a.ms;
  spec.trials = a.trials;
  spec.master_seed = seed;
  spec.workers = workers;
  const std::vector<analysis::SweepRow> rows = analysis::threshold_sweep(spec);

  Document doc;
  doc.body = header_json(family == analysis::SweepFamily::kUniform
                             ? "sweep uniform"
                             : "sweep pareto",
                         seed);
  doc.body["trials"] = spec.trials;
  json ms = json::array();
  for (int m : spec.ms) ms.push_back(m);
  doc.body["ms"] = ms;
  doc.table.header = {"family", "param", "alpha", "alpha_star_analytic"};
  for (int m : spec.ms) doc.table.header.push_back("freq_m" + std::to_string(m));
  json out_rows = json::array();
  for (const auto& row : rows) {
    json freqs = json::object();
    std::vector<std::string> line = {row.family, num(row.param), num(row.alpha),
                                     num(row.alpha_star)};
    for (std::size_t i = 0; i < spec.ms.size(); ++i) {
      freqs["m" + std::to_string(spec.ms[i])] = row.frequencies[i];
      line.push_back(num(row.frequencies[i]));
    }
    out_rows.push_back(json{{"family", row.family},
                            {"param", row.param},
                            {"alpha", row.alpha},
                            {"alpha_star_analytic", row.alpha_star},
                            {"frequencies", freqs}});
    doc.table.rows.push_back(std::move(line));
  }
  doc.body["rows"] = out_rows;
  return doc;
}

struct GameArgs {
  std::string file;
  int k = 0;
  std::vector<int> contracts;
  std::uint64_t budget = 1'000'000;
};

games::GameTree load_tree(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read tree file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return games::parse_tree(ss.str());
}

// 1-based position of a leaf among the tree's leaves in textual order.
int leaf_ordinal(const games::GameTree& tree, games::NodeId leaf) {
  const games::LeafSet all = tree.leaves();
  return static_cast<int>(std::lower_bound(all.begin(), all.end(), leaf) -
                          all.begin()) + 1;
}

json utilities_json(const games::GameTree& tree, games::NodeId leaf) {
  json u = json::array();
  for (double x : tree.utilities(leaf)) u.push_back(x);
  return u;
}

std::vector<std::string> utility_header(int players) {
  std::vector<std::string> h;
  for (int p = 1; p <= players; ++p) h.push_back("u" + std::to_string(p));
  return h;
}

Document cmd_game(const std::string& which, const GameArgs& a,
                  std::uint64_t seed) {
  const games::GameTree tree = load_tree(a.file);
  games::ExpansionBudget budget;
  budget.max_commitments = a.budget;
  Document doc;
  doc.body = header_json("game " + which, seed);
  doc.body["players"] = tree.players();
  doc.body["leaves"] = tree.leaves().size();

  if (which == "spe") {
    games::Solution s;
    if (a.contracts.empty()) {
      s = games::spe(tree);
    } else {
      games::ContractOrder order;
      for (int p : a.contracts) order.players.push_back(p - 1);
      s = games::contract_spe(tree, order, budget);
      json c = json::array();
      for (int p : a.contracts) c.push_back(p);
      doc.body["contracts"] = c;
    }
    doc.body["leaf"] = leaf_ordinal(tree, s.leaf);
    doc.body["utilities"] = utilities_json(tree, s.leaf);
    doc.table.header = {"leaf"};
    auto h = utility_header(tree.players());
    doc.table.header.insert(doc.table.header.end(), h.begin(), h.end());
    std::vector<std::string> row = {std::to_string(leaf_ordinal(tree, s.leaf))};
    for (double x : s.utilities) row.push_back(num(x));
    doc.table.rows.push_back(row);
  } else if (which == "inducible") {
    const games::LeafSet region = games::inducible_region(tree);
    json leaves = json::array();
    doc.table.header = {"leaf"};
    auto h = utility_header(tree.players());
    doc.table.header.insert(doc.table.header.end(), h.begin(), h.end());
    for (games::NodeId leaf : region) {
      leaves.push_back(json{{"leaf", leaf_ordinal(tree, leaf)},
                            {"utilities", utilities_json(tree, leaf)}});
      std::vector<std::string> row = {std::to_string(leaf_ordinal(tree, leaf))};
      for (double x : tree.utilities(leaf)) row.push_back(num(x));
      doc.table.rows.push_back(row);
    }
    doc.body["region"] = leaves;
    const games::Solution best = games::two_contract_spe(tree);
    doc.body["two_contract_spe"] = json{{"leaf", leaf_ordinal(tree, best.leaf)},
                                        {"utilities", utilities_json(tree, best.leaf)}};
  } else {
    const bool resilient = games::side_contract_resilient(tree, a.k, budget);
    doc.body["k"] = a.k;
    doc.body["resilient"] = resilient;
    doc.table.header = {"k", "resilient"};
    doc.table.rows.push_back({std::to_string(a.k), flag(resilient)});
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Output and config handling.

void write_document(const Document& doc, const std::string& format,
                    std::ostream& os) {
  if (format == "json") {
    os << doc.body.dump(2) << "\n";
    return;
  }
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << csv_field(row[i]);
    }
    os << "\r\n";
  };
  write_row(doc.table.header);
  for (const auto& row : doc.table.rows) write_row(row);
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Appends `--key value` for every config-file entry whose flag is not
// already on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) +
                       ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    if (key.empty()) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    const std::string opt = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const auto& a) {
      return a == opt || a.rfind(opt + "=", 0) == 0;
    });
    if (given || value == "false") continue;
    extra.push_back(opt);
    if (value != "true") extra.push_back(value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           const Environment& env, std::ostream& err) {
  if (flag_seed) return *flag_seed;
  if (env.seed && !env.seed->empty()) {
    std::uint64_t seed = 0;
    const std::string& s = *env.seed;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw UsageError("STACKELSIM_SEED is not an unsigned integer: '" + s + "'");
    }
    return seed;
  }
  std::random_device rd;
  const std::uint64_t seed =
      (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
  err << "stackelsim: no seed given, using --seed " << seed << "\n";
  return seed;
}

}  // namespace

Environment Environment::from_process() {
  Environment env;
  if (const char* s = std::getenv("STACKELSIM_SEED")) env.seed = s;
  return env;
}

Amount parse_amount(std::string_view token) {
  static const std::string number =
      R"([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)";
  static const std::string coef = R"((?:\d+\.?\d*|\.\d+)?)";
  static const std::regex plain("^(" + number + ")$");
  static const std::regex quanta("^(" + coef + R"()\*?eps$)");
  static const std::regex mixed("^(" + number + R"()\+()" + coef +
                                R"()\*?eps$)");
  std::string text(token);
  text.erase(std::remove_if(text.begin(), text.end(),
                            [](unsigned char c) { return std::isspace(c); }),
             text.end());
  std::smatch match;
  auto multiple = [](const std::ssub_match& m) {
    return m.length() > 0 ? std::stod(m.str()) : 1.0;
  };
  if (std::regex_match(text, match, plain)) return Amount(std::stod(match[1]));
  if (std::regex_match(text, match, quanta)) {
    return Amount::quanta(multiple(match[1]));
  }
  if (std::regex_match(text, match, mixed)) {
    return Amount(std::stod(match[1]), multiple(match[2]));
  }
  throw InvalidArgument("cannot parse amount '" + std::string(token) +
                        "' (expected a number, eps, 2eps or a+eps)");
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out,
        std::ostream& err, const Environment& env) {
  CLI::App app{"Commitment attacks on multi-unit auctions and contract games",
               "stackelsim"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string format = "json";
  std::string output;
  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  int workers = 0;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--output,-o", output, "Write the document to this file");
  app.add_option("--config", config_path,
                 "Flat key=value file; command-line flags win");
  app.add_option("--seed", seed_flag,
                 "Master seed (default: $STACKELSIM_SEED, else random)");
  app.add_option("--workers", workers, "Worker threads (0 = all cores)")
      ->capture_default_str();

  MechArgs mech_args;
  auto* mech_cmd = app.add_subcommand("mech", "Run one auction");
  add_auction_options(mech_cmd, mech_args.auction, true);
  mech_cmd->add_option("--tips", mech_args.tips,
                       "Tips, comma separated; accepts eps, 2eps, 1+eps")
      ->delimiter(',');
  mech_cmd->add_flag("--eq-bids", mech_args.eq_bids,
                     "Use the no-contract equilibrium bids");

  AttackArgs attack_args;
  auto* attack_cmd = app.add_subcommand("attack", "Commitment attack");
  attack_cmd->require_subcommand(1);
  auto* check_cmd = attack_cmd->add_subcommand("check", "Feasibility margins");
  auto* simulate_cmd =
      attack_cmd->add_subcommand("simulate", "Outcome when everybody complies");
  for (auto* c : {check_cmd, simulate_cmd}) {
    add_auction_options(c, attack_args.auction, true);
    c->add_option("--leader", attack_args.leader, "Leading agent (1-based)")
        ->required();
    c->add_option("--k", attack_args.k, "Coalition size")->capture_default_str();
  }

  PodArgs pod_args;
  auto* pod_cmd = app.add_subcommand("pod", "Price of defiance");
  add_auction_options(pod_cmd, pod_args.auction, true);
  pod_cmd->add_option("--alpha", pod_args.alpha, "Congestion, n = round((1+alpha) m)");
  pod_cmd->add_option("--k", pod_args.k, "Coalition size")->capture_default_str();
  pod_cmd->add_flag("--expected-values", pod_args.expected_values,
                    "Use v_i = i/(n+1) instead of sampling");
  pod_cmd->add_option("--trials", pod_args.trials, "Monte Carlo trials")
      ->capture_default_str();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Congestion threshold sweep");
  sweep_cmd->require_subcommand(1);
  auto* sweep_uniform = sweep_cmd->add_subcommand("uniform", "Uniform valuations");
  auto* sweep_pareto = sweep_cmd->add_subcommand("pareto", "Pareto valuations");
  sweep_uniform->add_option("--delta", sweep_args.params, "Coalition fractions")
      ->delimiter(',');
  sweep_pareto->add_option("--p", sweep_args.params, "Pareto shapes")
      ->delimiter(',');
  for (auto* c : {sweep_uniform, sweep_pareto}) {
    c->add_option("--alpha", sweep_args.alphas, "Congestion grid")
        ->delimiter(',');
    c->add_option("--m", sweep_args.ms, "Capacities")->delimiter(',');
    c->add_option("--trials", sweep_args.trials, "Trials per cell")
        ->capture_default_str();
  }

  GameArgs game_args;
  auto* game_cmd = app.add_subcommand("game", "Game-tree engine");
  game_cmd->require_subcommand(1);
  auto* game_spe = game_cmd->add_subcommand("spe", "Subgame perfect equilibrium");
  auto* game_ind = game_cmd->add_subcommand("inducible", "Inducible region");
  auto* game_res =
      game_cmd->add_subcommand("resilience", "Side-contract resilience");
  for (auto* c : {game_spe, game_ind, game_res}) {
    c->add_option("--file", game_args.file, "Tree file")->required();
    c->add_option("--budget", game_args.budget, "Commitments per contract")
        ->capture_default_str();
  }
  game_spe->add_option("--contracts", game_args.contracts,
                       "Contract players, leading first (1-based)")
      ->delimiter(',');
  game_res->add_option("--k", game_args.k, "Number of contracts")->required();

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "stackelsim: " << e.what() << "\nRun with --help for usage.\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "stackelsim: " << e.what() << "\n";
    return kUsage;
  }

  try {
    const std::uint64_t seed = resolve_seed(seed_flag, env, err);
    Document doc;
    if (mech_cmd->parsed()) {
      doc = cmd_mech(mech_args, seed);
    } else if (check_cmd->parsed()) {
      doc = cmd_attack_check(attack_args, seed);
    } else if (simulate_cmd->parsed()) {
      doc = cmd_attack_simulate(attack_args, seed);
    } else if (pod_cmd->parsed()) {
      doc = cmd_pod(pod_args, seed, workers);
    } else if (sweep_uniform->parsed()) {
      doc = cmd_sweep(analysis::SweepFamily::kUniform, sweep_args, seed, workers);
    } else if (sweep_pareto->parsed()) {
      doc = cmd_sweep(analysis::SweepFamily::kPareto, sweep_args, seed, workers);
    } else if (game_spe->parsed()) {
      doc = cmd_game("spe", game_args, seed);
    } else if (game_ind->parsed()) {
      doc = cmd_game("inducible", game_args, seed);
    } else {
      doc = cmd_game("resilience", game_args, seed);
    }
    if (output.empty()) {
      write_document(doc, format, out);
    } else {
      std::ofstream file(output, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + output + "'");
      write_document(doc, format, file);
    }
    return kOk;
  } catch (const InfeasiblePlan& e) {
    err << "stackelsim: infeasible plan: " << e.what() << "\n";
    return kInfeasible;
  } catch (const ParseError& e) {
    err << "stackelsim: " << game_args.file << ":" << e.what() << "\n";
    return kParse;
  } catch (const UsageError& e) {
    err << "stackelsim: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    err << "stackelsim: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "stackelsim: error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace stackelsim::cli

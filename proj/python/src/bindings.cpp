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

// Python bindings. Agent and player indices are 0-based, as in C++.

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stackelsim/amount.hpp"
#include "stackelsim/analysis.hpp"
#include "stackelsim/attack.hpp"
#include "stackelsim/error.hpp"
#include "stackelsim/games.hpp"
#include "stackelsim/mechanisms.hpp"
#include "stackelsim/stats.hpp"

namespace py = pybind11;

namespace stackelsim {
namespace {

std::string amount_repr(const Amount& a) {
  std::ostringstream os;
  os << "Amount(" << a.base << ", eps=" << a.eps << ")";
  return os.str();
}

void bind_amount(py::module_& m) {
  py::class_<Amount>(m, "Amount", "base + eps * quantum")
      .def(py::init<double, double>(), py::arg("base") = 0.0, py::arg("eps") = 0.0)
      .def_static("quanta", &Amount::quanta)
      .def_readwrite("base", &Amount::base)
      .def_readwrite("eps", &Amount::eps)
      .def("value", &Amount::value, py::arg("quantum"))
      .def("limit", &Amount::limit, py::arg("quantum"),
           py::arg("rel") = kQuantumDropTolerance)
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * double())
      .def(double() * py::self)
      .def(-py::self)
      .def(py::self == py::self)
      .def("__repr__", &amount_repr);
}

void bind_stats(py::module_& m) {
  using namespace stats;
  py::class_<DistributionSpec>(m, "DistributionSpec")
      .def_static("uniform", &DistributionSpec::uniform)
      .def_static("pareto", &DistributionSpec::pareto, py::arg("shape"))
      .def_readonly("shape", &DistributionSpec::shape)
      .def("mean", &DistributionSpec::mean)
      .def("name", &DistributionSpec::name)
      .def("__repr__", &DistributionSpec::name);

  py::class_<ValuationProfile>(m, "ValuationProfile")
      .def_static("from_values", &ValuationProfile::from_values, py::arg("values"))
      .def_property_readonly("values",
                             [](const ValuationProfile& v) {
                               const auto s = v.values();
                               return std::vector<double>(s.begin(), s.end());
                             })
      .def_property_readonly("n", &ValuationProfile::n)
      .def_property_readonly("redraws", &ValuationProfile::redraws)
      .def("__len__", &ValuationProfile::size)
      .def("__getitem__", [](const ValuationProfile& v, std::size_t i) {
        if (i >= v.size()) throw py::index_error();
        return v[i];
      });

  m.def("sample_valuations", &sample_valuations, py::arg("dist"), py::arg("n"),
        py::arg("seed"));
  m.def("uniform_expected_profile", &uniform_expected_profile, py::arg("n"));
  m.def(
      "ratio_tail_probability",
      [](const DistributionSpec& dist, int n, int i, int j, double threshold) {
        return ratio_tail_probability(RatioDensity{dist, n, i, j}, threshold);
      },
      py::arg("dist"), py::arg("n"), py::arg("i"), py::arg("j"), py::arg("threshold"),
      "Pr[X_(j) / X_(i) >= threshold] with 1-based order-statistic indices.");
  m.def("uniform_threshold_exponent", &uniform_threshold_exponent, py::arg("alpha"),
        py::arg("delta"));
  m.def("uniform_alpha_threshold", &uniform_alpha_threshold, py::arg("delta"));
  m.def("pareto_alpha_threshold", &pareto_alpha_threshold, py::arg("p"));
  m.def("pareto_coalition_fraction", &pareto_coalition_fraction, py::arg("p"));
}

void bind_mechanisms(py::module_& m) {
  using namespace mech;
  py::enum_<MechanismKind>(m, "MechanismKind")
      .value("FIRST_PRICE", MechanismKind::kFirstPrice)
      .value("SECOND_PRICE", MechanismKind::kSecondPrice)
      .value("EIP1559", MechanismKind::kEip1559);

  py::class_<AuctionConfig>(m, "AuctionConfig")
      .def(py::init([](int n, int m, MechanismKind kind, double base_fee, double eps) {
             AuctionConfig c;
             c.n = n;
             c.m = m;
             c.kind = kind;
             c.base_fee = base_fee;
             c.eps = eps;
             c.validate();
             return c;
           }),
           py::arg("n"), py::arg("m"), py::arg("kind") = MechanismKind::kFirstPrice,
           py::arg("base_fee") = 0.0, py::arg("eps") = kDefaultQuantum)
      .def_readonly("n", &AuctionConfig::n)
      .def_readonly("m", &AuctionConfig::m)
      .def_readonly("base_fee", &AuctionConfig::base_fee)
      .def_readonly("eps", &AuctionConfig::eps)
      .def_readonly("kind", &AuctionConfig::kind)
      .def("congestion", &AuctionConfig::congestion);

  py::class_<BidProfile>(m, "BidProfile")
      .def(py::init<std::vector<Amount>>(), py::arg("tips"))
      .def_readwrite("tips", &BidProfile::tips);

  py::class_<AllocationOutcome>(m, "AllocationOutcome")
      .def_readonly("winners", &AllocationOutcome::winners)
      .def_readonly("payments", &AllocationOutcome::payments)
      .def_readonly("utilities", &AllocationOutcome::utilities)
      .def_readonly("win_probability", &AllocationOutcome::win_probability)
      .def_readonly("expected_utilities", &AllocationOutcome::expected_utilities)
      .def_readonly("auctioneer_revenue", &AllocationOutcome::auctioneer_revenue)
      .def_readonly("burned", &AllocationOutcome::burned)
      .def_readonly("clearing_price", &AllocationOutcome::clearing_price);

  m.def("allocate", &allocate, py::arg("config"), py::arg("valuations"), py::arg("bids"),
        py::arg("seed"));
  m.def("equilibrium_bids", &equilibrium_bids, py::arg("config"), py::arg("valuations"));
  m.def("equilibrium_outcome", &equilibrium_outcome, py::arg("config"),
        py::arg("valuations"), py::arg("seed"));
}

void bind_attack(py::module_& m) {
  using namespace attack;
  py::class_<AttackPlan>(m, "AttackPlan")
      .def_readonly("leading", &AttackPlan::leading)
      .def_readonly("coalition", &AttackPlan::coalition)
      .def_readonly("contract_order", &AttackPlan::contract_order)
      .def_property_readonly("k", &AttackPlan::k);

  py::class_<SufficientCondition>(m, "SufficientCondition")
      .def_readonly("holds", &SufficientCondition::holds)
      .def_readonly("lhs", &SufficientCondition::lhs)
      .def_readonly("rhs", &SufficientCondition::rhs)
      .def_readonly("margin", &SufficientCondition::margin);

  py::class_<AgentCompliance>(m, "AgentCompliance")
      .def_readonly("agent", &AgentCompliance::agent)
      .def_readonly("in_coalition", &AgentCompliance::in_coalition)
      .def_readonly("comply", &AgentCompliance::comply)
      .def_readonly("defy", &AgentCompliance::defy)
      .def_readonly("margin", &AgentCompliance::margin)
      .def_readonly("margin_value", &AgentCompliance::margin_value)
      .def_readonly("complies", &AgentCompliance::complies);

  py::class_<ComplianceReport>(m, "ComplianceReport")
      .def_readonly("agents", &ComplianceReport::agents)
      .def_readonly("feasible", &ComplianceReport::feasible)
      .def_readonly("binding_agent", &ComplianceReport::binding_agent);

  m.def("sufficient_condition", &sufficient_condition, py::arg("valuations"),
        py::arg("config"), py::arg("k"));
  m.def("coalition_select", &coalition_select, py::arg("valuations"), py::arg("config"),
        py::arg("leading"), py::arg("k"));
  m.def("exact_feasibility", &exact_feasibility, py::arg("plan"), py::arg("valuations"),
        py::arg("config"));
  m.def("attacked_outcome", &attacked_outcome, py::arg("plan"), py::arg("valuations"),
        py::arg("config"), py::arg("seed"));
}

void bind_analysis(py::module_& m) {
  using namespace analysis;
  py::class_<LeaderRow>(m, "LeaderRow")
      .def_readonly("leader", &LeaderRow::leader)
      .def_readonly("feasible", &LeaderRow::feasible)
      .def_readonly("binding_agent", &LeaderRow::binding_agent)
      .def_readonly("binding_margin", &LeaderRow::binding_margin)
      .def_readonly("welfare", &LeaderRow::welfare);

  py::class_<PodReport>(m, "PodReport")
      .def_readonly("numerator", &PodReport::numerator)
      .def_readonly("denominator", &PodReport::denominator)
      .def_readonly("pod", &PodReport::pod)
      .def_readonly("best_leader", &PodReport::best_leader)
      .def_readonly("leaders", &PodReport::leaders);

  py::class_<ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("dist", &ExperimentSpec::dist)
      .def_readwrite("m", &ExperimentSpec::m)
      .def_readwrite("alpha", &ExperimentSpec::alpha)
      .def_readwrite("k", &ExperimentSpec::k)
      .def_readwrite("delta", &ExperimentSpec::delta)
      .def_readwrite("trials", &ExperimentSpec::trials)
      .def_readwrite("master_seed", &ExperimentSpec::master_seed)
      .def_readwrite("base_fee", &ExperimentSpec::base_fee)
      .def_readwrite("eps", &ExperimentSpec::eps)
      .def_readwrite("kind", &ExperimentSpec::kind)
      .def_readwrite("workers", &ExperimentSpec::workers)
      .def_property_readonly("n", &ExperimentSpec::n)
      .def_property_readonly("coalition_size", &ExperimentSpec::coalition_size);

  py::class_<Interval>(m, "Interval")
      .def_readonly("low", &Interval::low)
      .def_readonly("high", &Interval::high);

  py::class_<AttackProbability>(m, "AttackProbability")
      .def_readonly("n", &AttackProbability::n)
      .def_readonly("k", &AttackProbability::k)
      .def_readonly("trials", &AttackProbability::trials)
      .def_readonly("successes", &AttackProbability::successes)
      .def_readonly("frequency", &AttackProbability::frequency)
      .def_readonly("wilson", &AttackProbability::wilson);

  py::class_<PodSummary>(m, "PodSummary")
      .def_readonly("n", &PodSummary::n)
      .def_readonly("k", &PodSummary::k)
      .def_readonly("trials", &PodSummary::trials)
      .def_readonly("feasible_trials", &PodSummary::feasible_trials)
      .def_readonly("infeasible_trials", &PodSummary::infeasible_trials)
      .def_readonly("mean", &PodSummary::mean)
      .def_readonly("stddev", &PodSummary::stddev)
      .def_readonly("ci", &PodSummary::ci)
      .def_readonly("bound", &PodSummary::bound)
      .def_readonly("pods", &PodSummary::pods);

  m.def("welfare", &welfare, py::arg("outcome"));
  m.def("defiance_report", &defiance_report, py::arg("valuations"), py::arg("config"),
        py::arg("k"), py::arg("seed") = 0);
  m.def("pod_closed_form_uniform", &pod_closed_form_uniform, py::arg("n"), py::arg("m"),
        py::arg("eps") = kDefaultQuantum);
  m.def("mc_attack_probability", &mc_attack_probability, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("mc_pod", &mc_pod, py::arg("spec"), py::call_guard<py::gil_scoped_release>());
}

void bind_games(py::module_& m) {
  using namespace games;
  py::class_<GameTree>(m, "GameTree")
      .def_property_readonly("players", &GameTree::players)
      .def_property_readonly("size", &GameTree::size)
      .def_property_readonly("root", &GameTree::root)
      .def("is_leaf", &GameTree::is_leaf)
      .def("leaves", &GameTree::leaves)
      .def("utilities",
           [](const GameTree& t, NodeId leaf) {
             const auto u = t.utilities(leaf);
             return std::vector<double>(u.begin(), u.end());
           })
      .def("generic", &GameTree::generic)
      .def("__str__", &to_text);

  py::class_<Solution>(m, "Solution")
      .def_readonly("leaf", &Solution::leaf)
      .def_readonly("utilities", &Solution::utilities);

  m.def("parse_tree", &parse_tree, py::arg("text"));
  m.def("to_text", &to_text, py::arg("tree"));
  m.def("spe", &spe, py::arg("tree"));
  m.def("inducible_region", &inducible_region, py::arg("tree"));
  m.def("two_contract_spe", &two_contract_spe, py::arg("tree"));
  m.def(
      "contract_spe",
      [](const GameTree& t, std::vector<int> players) {
        return contract_spe(t, ContractOrder{std::move(players)});
      },
      py::arg("tree"), py::arg("players"));
  m.def(
      "side_contract_resilient",
      [](const GameTree& t, int k) { return side_contract_resilient(t, k); },
      py::arg("tree"), py::arg("k"));
}

}  // namespace
}  // namespace stackelsim

PYBIND11_MODULE(_core, m) {
  using namespace stackelsim;
  m.doc() = "Commitment attacks on multi-unit auctions and contract games.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", error.ptr());
  py::register_exception<InfeasiblePlan>(m, "InfeasiblePlan", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  m.attr("DEFAULT_QUANTUM") = kDefaultQuantum;
  bind_amount(m);
  bind_stats(m);
  bind_mechanisms(m);
  bind_attack(m);
  bind_analysis(m);
  bind_games(m);
}

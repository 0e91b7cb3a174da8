#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <set>

#include "disjstream/clean.hpp"
#include "disjstream/disj_instance.hpp"
#include "disjstream/disj_protocols.hpp"
#include "disjstream/distributions.hpp"
#include "disjstream/errors.hpp"
#include "disjstream/ignoring_set.hpp"
#include "disjstream/lowrank.hpp"
#include "disjstream/protocol.hpp"
#include "disjstream/reductions.hpp"
#include "disjstream/sketches.hpp"
#include "disjstream/sparse_recovery.hpp"
#include "disjstream/turnstile_hh.hpp"

namespace py = pybind11;
using namespace disjstream;

namespace {

FiniteDistribution dist_from(const std::map<Atom, double>& m) { return FiniteDistribution(m); }

py::dict decomposition_dict(const Decomposition& d) {
  py::dict out;
  out["common"] = d.common.probs();
  out["zero_part"] = d.zeroPart.probs();
  out["one_part"] = d.onePart.probs();
  out["delta"] = d.delta;
  out["alpha"] = d.alpha;
  return out;
}

py::dict instance_dict(const DisjInstance& inst) {
  py::dict out;
  std::vector<std::vector<std::size_t>> rows;
  for (std::size_t j = 0; j < inst.k(); ++j) rows.push_back(inst.row(j));
  out["n"] = inst.n();
  out["k"] = inst.k();
  out["l"] = inst.l();
  out["rows"] = rows;
  out["label"] = to_string(inst.label);
  out["star"] = inst.star ? py::cast(*inst.star) : py::none();
  return out;
}

DisjInstance instance_from(std::size_t n, std::size_t l, const std::vector<std::vector<std::size_t>>& rows) {
  DisjInstance inst(n, rows.size(), l);
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (auto i : rows[j]) inst.set_bit(j, i, true);
  return inst;
}

py::dict transcript_dict(const Transcript& t, int players) {
  py::dict out;
  out["output"] = t.output.value_or(false);
  out["bits"] = t.bit_cost();
  out["bits_per_player"] = t.bits_per_player(players);
  out["messages"] = t.size();
  return out;
}

std::vector<std::int64_t> final_vector(const ReducedStream& rs) { return rs.final_vector(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Set disjointness protocols, stream reductions and deterministic heavy hitters";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<PromiseViolation>(m, "PromiseViolation", PyExc_RuntimeError);
  py::register_exception<StateSpaceOverflow>(m, "StateSpaceOverflow", PyExc_OverflowError);

  // distributions
  m.def("tv_distance", [](const std::map<Atom, double>& p, const std::map<Atom, double>& q) {
    return tv_distance(dist_from(p), dist_from(q));
  }, py::arg("p"), py::arg("q"));
  m.def("kl_divergence", [](const std::map<Atom, double>& p, const std::map<Atom, double>& q) {
    return kl_divergence(dist_from(p), dist_from(q));
  }, py::arg("p"), py::arg("q"));
  m.def("js_divergence", [](const std::map<Atom, double>& p, const std::map<Atom, double>& q) {
    return js_divergence(dist_from(p), dist_from(q));
  }, py::arg("p"), py::arg("q"));
  m.def("decompose", [](const std::map<Atom, double>& d0, const std::map<Atom, double>& d1, double alpha) {
    return decomposition_dict(decompose(dist_from(d0), dist_from(d1), alpha));
  }, py::arg("d0"), py::arg("d1"), py::arg("alpha"));
  m.def("gamma_c", &gamma_c, py::arg("c"));

  // instances
  m.def("adversarial_instance", [](std::size_t n, std::size_t k, std::size_t l, const std::string& label, std::uint64_t seed) {
    return instance_dict(label_from_string(label) == Label::kYes ? adversarial_yes(n, k, l, seed)
                                                                  : adversarial_no(n, k, l, seed));
  }, py::arg("n"), py::arg("k"), py::arg("l"), py::arg("label"), py::arg("seed"));
  m.def("sample_eta", [](std::size_t n, std::size_t k, std::size_t l, int z, std::uint64_t seed) {
    return instance_dict(sample_eta(n, k, l, z, seed).instance);
  }, py::arg("n"), py::arg("k"), py::arg("l"), py::arg("z"), py::arg("seed"));
  m.def("verify_promise", [](std::size_t n, std::size_t l, const std::vector<std::vector<std::size_t>>& rows) {
    const auto rep = verify_promise(instance_from(n, l, rows));
    py::dict out;
    out["label"] = rep.label ? py::cast(to_string(*rep.label)) : py::none();
    out["star"] = rep.star ? py::cast(*rep.star) : py::none();
    out["violating_columns"] = rep.violating_columns;
    out["reason"] = rep.reason;
    return out;
  }, py::arg("n"), py::arg("l"), py::arg("rows"));

  // protocols
  m.def("run_protocol", [](const std::string& name, std::size_t n, std::size_t l,
                           const std::vector<std::vector<std::size_t>>& rows, double eps, std::uint64_t seed) {
    const auto inst = instance_from(n, l, rows);
    const std::size_t k = inst.k();
    std::optional<ProtocolSpec> spec;
    if (name == "deterministic")
      spec = deterministic_disj_protocol(n, k);
    else if (name == "eps-publish")
      spec = epsilon_publish_protocol(n, k, l, eps);
    else if (name == "pigeonhole")
      spec = pigeonhole_promise_protocol(n, k);
    else
      throw InvalidArgument("unknown protocol " + name);
    return transcript_dict(run_protocol(*spec, inst.row_masks(), seed), static_cast<int>(k));
  }, py::arg("name"), py::arg("n"), py::arg("l"), py::arg("rows"), py::arg("eps") = 1.0, py::arg("seed") = 0);
  m.def("epsilon_publish_failure_probability", &epsilon_publish_failure_probability, py::arg("l"), py::arg("eps"));
  m.def("clean_simulation_check", [](int players, int rounds, std::uint64_t seed, int player) {
    RandomTabularOptions opts;
    opts.players = players;
    opts.rounds = rounds;
    const auto base = random_tabular_protocol(opts, seed).to_spec();
    const auto clean = clean_simulate(base, player);
    double diff = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << players); ++mask) {
      std::vector<PlayerInput> in(static_cast<std::size_t>(players));
      for (int j = 0; j < players; ++j) in[static_cast<std::size_t>(j)] = (mask >> j) & 1;
      const auto a = transcript_distribution(base, in), b = transcript_distribution(clean, in);
      std::set<Atom> atoms;
      for (const auto& [s, _] : a.probs()) atoms.insert(s);
      for (const auto& [s, _] : b.probs()) atoms.insert(s);
      for (auto s : atoms) diff = std::max(diff, std::abs(a(s) - b(s)));
    }
    std::vector<PlayerInput> zero(static_cast<std::size_t>(players), 0), unit = zero;
    unit[static_cast<std::size_t>(player)] = 1;
    py::dict out;
    out["max_atom_diff"] = diff;
    out["observation_probability"] = observation_probability(clean, player);
    out["tv"] = tv_distance(transcript_distribution(base, zero), transcript_distribution(base, unit));
    return out;
  }, py::arg("players"), py::arg("rounds"), py::arg("seed"), py::arg("player") = 0);
  m.def("find_ignoring_set", [](const std::map<Atom, double>& joint, int k, double c) {
    const auto s = find_ignoring_set(dist_from(joint), k, c);
    py::dict out;
    out["players"] = s.players;
    out["prob"] = s.prob;
    out["bound"] = s.bound;
    out["gamma"] = s.gamma;
    out["mean_weight"] = s.mean_weight;
    out["precondition_holds"] = s.precondition_holds;
    return out;
  }, py::arg("joint"), py::arg("k"), py::arg("c"));

  // reductions
  m.def("hh_reduction_params", [](std::size_t n, double p, double eps) {
    const auto r = hh_reduction_params(n, p, eps);
    return py::make_tuple(r.k, r.l);
  }, py::arg("n"), py::arg("p"), py::arg("eps"));
  m.def("hh_stream_vector", [](std::size_t n, std::size_t l, const std::vector<std::vector<std::size_t>>& rows, double p, double eps) {
    return final_vector(to_hh_stream(instance_from(n, l, rows), p, eps));
  }, py::arg("n"), py::arg("l"), py::arg("rows"), py::arg("p"), py::arg("eps"));
  m.def("fp_params", [](std::size_t n, double p) {
    const auto r = fp_params(n, p);
    return py::make_tuple(r.k, r.l);
  }, py::arg("n"), py::arg("p"));
  m.def("powerlaw_params", [](std::size_t n, double p, double zeta) {
    const auto r = powerlaw_params(n, p, zeta);
    return py::make_tuple(r.k, r.l);
  }, py::arg("n"), py::arg("p"), py::arg("zeta"));
  m.def("harmonic_zeta", &harmonic_zeta, py::arg("m"));
  m.def("lp_heavy_hitters", [](const std::vector<std::int64_t>& f, double p, double eps) {
    return lp_heavy_hitters(f, p, eps);
  }, py::arg("f"), py::arg("p"), py::arg("eps"));
  m.def("linear_sketch_adversary", [](const Eigen::MatrixXd& M) {
    const auto a = linear_sketch_adversary(M);
    return py::make_tuple(a.x1, a.x2, a.istar);
  }, py::arg("M"));

  // sketches
  py::class_<MisraGriesSummary>(m, "MisraGries")
      .def(py::init<std::size_t>(), py::arg("capacity"))
      .def("update", &MisraGriesSummary::update, py::arg("item"))
      .def("estimate", &MisraGriesSummary::estimate, py::arg("item"))
      .def_property_readonly("processed", &MisraGriesSummary::processed)
      .def("counters", &MisraGriesSummary::counters);

  py::class_<CountSketch>(m, "CountSketch")
      .def(py::init<std::size_t, std::size_t, std::uint64_t>(), py::arg("width"), py::arg("depth"), py::arg("seed"))
      .def("update", &CountSketch::update, py::arg("item"), py::arg("delta") = 1)
      .def("estimate", &CountSketch::estimate, py::arg("item"))
      .def("heavy_hitters", &CountSketch::heavy_hitters, py::arg("eps"), py::arg("universe"));

  py::class_<SyndromeSketch>(m, "SyndromeSketch")
      .def(py::init<std::uint64_t, std::size_t>(), py::arg("universe"), py::arg("sparsity"))
      .def("update", &SyndromeSketch::update, py::arg("index"), py::arg("delta"))
      .def("decode", &SyndromeSketch::decode)
      .def("merge", &SyndromeSketch::merge)
      .def("syndromes", &SyndromeSketch::syndromes)
      .def("serialize", [](const SyndromeSketch& s) {
        const auto b = s.serialize();
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });

  py::class_<BoundedTurnstileHH>(m, "TurnstileHH")
      .def_static("strict", &BoundedTurnstileHH::strict, py::arg("universe"), py::arg("eps"), py::arg("length_bound"))
      .def_static("linf", &BoundedTurnstileHH::linf, py::arg("universe"), py::arg("eps"), py::arg("length_bound"))
      .def("update", &BoundedTurnstileHH::update, py::arg("index"), py::arg("sign"))
      .def("query_strict", &BoundedTurnstileHH::query_strict)
      .def("query_linf", [](const BoundedTurnstileHH& h) {
        const auto z = h.query_linf();
        return py::make_tuple(z.values, z.error_bound);
      })
      .def_property_readonly("sparsity", &BoundedTurnstileHH::sparsity)
      .def("word_count", &BoundedTurnstileHH::word_count);

  // low rank
  m.def("gen_lowrank_instance", [](std::size_t d, const std::string& label, std::uint64_t seed) {
    const auto inst = gen_lowrank_instance(d, label_from_string(label), seed);
    py::dict out;
    out["d"] = inst.d;
    out["sets"] = inst.sets;
    out["label"] = to_string(inst.label);
    out["star"] = inst.star ? py::cast(*inst.star) : py::none();
    out["first_half_rows"] = inst.first_half_rows();
    out["second_half_rows"] = inst.second_half_rows();
    return out;
  }, py::arg("d"), py::arg("label"), py::arg("seed"));
  m.def("residual_rank1", [](std::size_t d, const std::vector<std::size_t>& rows, const Eigen::VectorXd& v) {
    return residual_rank1(CountsProfile::from_rows(d, rows), v);
  }, py::arg("d"), py::arg("rows"), py::arg("v"));
  m.def("top_singular_vector", [](std::size_t d, const std::vector<std::size_t>& rows) {
    return top_singular_vector(CountsProfile::from_rows(d, rows));
  }, py::arg("d"), py::arg("rows"));
  m.def("identify_star", [](const Eigen::VectorXd& v, double tau, const std::vector<std::size_t>& second) {
    return to_string(identify_star(v, tau, second));
  }, py::arg("v"), py::arg("tau"), py::arg("second_half_rows"));
}

#pragma once

#include "lielab/analyze.hpp"
#include "lielab/experiment.hpp"

#include <json.hpp>

#include <sstream>

namespace lielab {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json subspace_json(const Subspace& s, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (const auto& v : s.basis()) out.push_back(combination_text(v, names));
  return out;
}

inline Json extended_json(const std::optional<Extended>& e) {
  if (!e) return nullptr;
  if (e->is_infinite()) return "inf";
  return e->value();
}

inline Json side_json(const SideReport& r, const StructureTensor& t, const Subspace& delta) {
  const auto& names = t.names();
  Json g = Json::array();
  for (const auto& layer : r.grading.layers()) g.push_back(subspace_json(layer, names));
  Json alphas = Json::object();
  if (r.side == Side::asymptotic) {
    alphas["alpha1_inf"] = extended_json(r.alphas.alpha1_inf);
    alphas["alpha2_inf"] = extended_json(r.alphas.alpha2_inf);
    alphas["alpha_inf"] = extended_json(r.alphas.alpha_inf);
  } else {
    alphas["alpha0"] = extended_json(r.alphas.alpha0);
  }
  const CqiCertificate cert = check_cqi(t, r.grading, delta, r.beta.witness);
  Json cqi = {{"ideal", subspace_json(r.beta.witness, names)},
              {"is_ideal", cert.is_ideal},
              {"quotient_stratified", cert.quotient_stratified},
              {"distribution_in_first_layer", cert.distribution_in_first},
              {"quotient_layer_dims", Json::array()}};
  for (const auto& l : cert.quotient_layers) cqi["quotient_layer_dims"].push_back(l.dim());
  Json out = {{"grading", g},
              {"kinds",
               {{"asymptotic", r.kinds.asymptotic},
                {"tangent", r.kinds.tangent},
                {"stratification", r.kinds.stratification}}},
              {"alphas", alphas},
              {"beta", {{"value", r.beta.beta_hat}, {"exhaustive", r.beta.exhaustive}, {"witness", cqi}}}};
  const auto rate = r.rate();
  out["rate"] = rate ? Json(*rate) : Json("exact");
  return out;
}

}  // namespace detail

/// Machine-readable analysis. Field order and content are deterministic.
inline Json analysis_json(const Analysis& a, const AlgebraFile& f) {
  const auto& t = f.tensor;
  Json out;
  out["schema"] = 1;
  out["name"] = a.name;
  out["dim"] = a.dim;
  out["basis"] = t.names();
  out["jacobi"] = a.algebra.jacobi_ok;
  out["step"] = a.algebra.nilpotency_step ? Json(*a.algebra.nilpotency_step) : Json(nullptr);
  Json lcs = Json::array();
  for (const auto& s : a.algebra.lower_central_series) lcs.push_back(s.dim());
  out["lower_central_series_dims"] = lcs;
  out["distribution"] = detail::subspace_json(a.distribution, t.names());
  Json filt = Json::array();
  for (const auto& s : a.filtration.cumulative) filt.push_back(s.dim());
  out["distribution_filtration_dims"] = filt;
  out["carnot"] = a.asymptotic ? Json(a.carnot()) : Json(nullptr);
  out["asymptotic"] = a.asymptotic ? detail::side_json(*a.asymptotic, t, a.distribution) : Json(nullptr);
  out["tangent"] = a.tangent ? detail::side_json(*a.tangent, t, a.distribution) : Json(nullptr);
  Json ex = Json::array();
  for (const auto& [k, e, v] : a.expectation_results)
    ex.push_back({{"key", k}, {"expected", e}, {"actual", v}, {"ok", e == v}});
  out["expectations"] = ex;
  out["notes"] = a.notes;
  return out;
}

inline std::string analysis_text(const Analysis& a, const AlgebraFile& f) {
  const auto& names = f.tensor.names();
  std::ostringstream os;
  auto span_text = [&](const Subspace& s) {
    std::string r = "span(";
    for (std::size_t i = 0; i < s.basis().size(); ++i)
      r += (i ? ", " : "") + detail::combination_text(s.basis()[i], names);
    return r + ")";
  };
  auto ext = [](const std::optional<Extended>& e) { return e ? e->str() : std::string("n/a"); };
  os << "algebra " << (a.name.empty() ? "(unnamed)" : a.name) << ", dim " << a.dim << "\n";
  os << "step " << (a.algebra.nilpotency_step ? std::to_string(*a.algebra.nilpotency_step) : "none (not nilpotent)")
     << "\n";
  os << "distribution " << span_text(a.distribution) << "\n";
  auto side = [&](const char* label, const SideReport& r) {
    os << label << " grading:\n";
    for (int j = 1; j <= r.grading.depth(); ++j) os << "  layer " << j << ": " << span_text(r.grading.layer(j)) << "\n";
    os << "  kinds: asymptotic=" << r.kinds.asymptotic << " tangent=" << r.kinds.tangent
       << " stratification=" << r.kinds.stratification << "\n";
    if (r.side == Side::asymptotic)
      os << "  alpha1_inf=" << ext(r.alphas.alpha1_inf) << " alpha2_inf=" << ext(r.alphas.alpha2_inf)
         << " alpha_inf=" << ext(r.alphas.alpha_inf) << "\n";
    else
      os << "  alpha0=" << ext(r.alphas.alpha0) << "\n";
    os << "  beta=" << r.beta.beta_hat << (r.beta.exhaustive ? "" : " (upper bound)") << " witness "
       << span_text(r.beta.witness) << "\n";
    const auto rate = r.rate();
    os << "  rate " << (rate ? std::to_string(*rate) : std::string("exact")) << "\n";
  };
  if (a.asymptotic) side("asymptotic", *a.asymptotic);
  if (a.tangent) side("tangent", *a.tangent);
  for (const auto& n : a.notes) os << "note: " << n << "\n";
  for (const auto& [k, e, v] : a.expectation_results)
    os << "expect " << k << " = " << e << ": " << (e == v ? "ok" : "MISMATCH (got " + v + ")") << "\n";
  return os.str();
}

inline std::string verdict_text(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::unusable: return "UNUSABLE";
  }
  return "?";
}

inline std::string experiment_text(const ExperimentResult& r) {
  std::ostringstream os;
  os << "mode " << to_string(r.mode) << ", " << r.rows.size() << " rows, " << r.failed_rows << " failed\n";
  for (const auto& [eps, err] : r.aggregated) os << "  eps " << eps << "  err " << err << "\n";
  if (r.fit)
    os << "slope " << r.fit->slope << " (intercept " << r.fit->intercept << ", rms residual " << r.fit->residual
       << ", " << r.fit->used << " rows)\n";
  os << "theory " << (r.theory ? std::to_string(*r.theory) : std::string("exact")) << " [" << r.theory_label << "]\n";
  os << verdict_text(r.verdict) << ": " << r.message << "\n";
  return os.str();
}

}  // namespace lielab

#include "chaoslab/serialize.hpp"

namespace chaoslab {

Json to_json(const ExactDyadic& d) { return d.to_string(); }

Json to_json(const MomentResult& m) {
  Json j;
  j["p"] = m.p;
  j["value"] = m.value;
  j["mode"] = to_string(m.mode);
  if (m.mode == MomentMode::exact_enumeration)
    j["pattern_count"] = m.count;
  else
    j["sample_count"] = m.count;
  if (m.exact_power.has_value()) j["exact_power"] = to_json(*m.exact_power);
  if (m.std_error.has_value()) j["stderr"] = *m.std_error;
  return j;
}

Json to_json(const NormCertificate& c) {
  Json j;
  j["value"] = c.value;
  j["method"] = c.method;
  Json w = Json::array();
  for (const auto& var : c.witness) {
    Json v = Json::array();
    for (std::int8_t s : var) v.push_back(static_cast<int>(s));
    w.push_back(std::move(v));
  }
  j["witness"] = std::move(w);
  return j;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["theorem"] = r.context.theorem;
  j["m"] = r.context.m;
  j["dims"] = r.context.dims;
  j["r"] = r.context.r;
  j["p"] = r.context.p;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["constant_used"] = r.constant_used;
  j["exponent_used"] = r.exponent_used;
  j["ratio"] = r.ratio;
  j["holds"] = r.holds;
  if (r.moment.has_value()) j["moment"] = to_json(*r.moment);
  return j;
}

Json to_json(const FitResult& f) {
  Json j;
  Json pts = Json::array();
  for (const auto& [n, v] : f.points) pts.push_back(Json::array({n, v}));
  j["points"] = std::move(pts);
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["max_residual"] = f.max_residual;
  return j;
}

Json to_json(const KszCertificate& c) {
  Json j;
  j["m"] = c.form.order();
  j["n"] = c.form.var_degree(0);
  j["certified_norm"] = c.certified_norm;
  j["k_hat"] = c.k_hat;
  j["budget"] = c.budget;
  j["seed"] = c.seed;
  j["trials_run"] = c.trials_run;
  j["best_trial"] = c.best_trial;
  j["form"] = format_form(c.form);
  return j;
}

Json to_json(const SliceLowerBound& s) {
  Json j;
  j["bound"] = s.bound;
  j["report"] = to_json(s.report);
  Json moments = Json::array();
  for (const auto& m : s.slice_moments) moments.push_back(to_json(m));
  j["slice_moments"] = std::move(moments);
  if (s.moment_sum_exact.has_value())
    j["moment_sum_exact"] = to_json(*s.moment_sum_exact);
  if (s.slice_lr_pow_exact.has_value()) {
    Json masses = Json::array();
    for (const auto& v : *s.slice_lr_pow_exact) masses.push_back(v.str());
    j["slice_lr_pow_exact"] = std::move(masses);
  }
  return j;
}

Json to_json(const CoefficientTensor& a) {
  Json j;
  j["order"] = a.order();
  j["dims"] = a.dims();
  Json e = Json::array();
  for (std::int64_t i = 0; i < a.size(); ++i) e.push_back(a.flat(i));
  j["entries"] = std::move(e);
  j["integer"] = a.integer_flag();
  return j;
}

Json to_json(const SearchResult& s) {
  Json j;
  Json cfg;
  cfg["m"] = s.config.m;
  cfg["n"] = s.config.n;
  cfg["r"] = s.config.r;
  cfg["p"] = s.config.p;
  cfg["strategy"] = to_string(s.config.strategy);
  cfg["budget"] = s.config.budget;
  cfg["seed"] = s.config.seed;
  cfg["restarts"] = s.config.restarts;
  j["config"] = std::move(cfg);
  j["best_ratio"] = s.best_ratio;
  j["best_tensor"] = to_json(s.best_tensor);
  Json tr = Json::array();
  for (const auto& [step, ratio] : s.trace) tr.push_back(Json::array({step, ratio}));
  j["trace"] = std::move(tr);
  return j;
}

}  // namespace chaoslab

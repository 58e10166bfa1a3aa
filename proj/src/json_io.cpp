#include "convforge/json_io.hpp"

#include <sstream>

#include "convforge/errors.hpp"

namespace convforge::io {

namespace {

json vector_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array of numbers");
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

json document(const std::string& kind, json body) {
  body["schema"] = kSchema;
  body["kind"] = kind;
  return body;
}

void expect_document(const json& j, const std::string& kind) {
  if (!j.is_object()) throw InvalidArgument("expected a JSON object of kind '" + kind + "'");
  if (j.value("schema", "") != kSchema) {
    throw InvalidArgument(std::string("expected schema '") + kSchema + "'");
  }
  if (j.value("kind", "") != kind) {
    throw InvalidArgument("expected document kind '" + kind + "', got '" + j.value("kind", "") +
                          "'");
  }
}

json to_json(const FiniteSequence& seq) {
  return {{"coeffs", std::vector<double>(seq.coeffs().begin(), seq.coeffs().end())},
          {"support_hint", seq.support_hint()}};
}

FiniteSequence sequence_from_json(const json& j) {
  auto coeffs = field(j, "coeffs").get<std::vector<double>>();
  if (j.contains("support_hint")) return FiniteSequence(std::move(coeffs), j.at("support_hint").get<int>());
  return FiniteSequence(std::move(coeffs));
}

json to_json(const FactorizationResult& result, int s) {
  json masks = json::array();
  for (const auto& m : result.masks) masks.push_back(to_json(m));
  return document("factorization", {{"s", s},
                                    {"J", result.J()},
                                    {"masks", std::move(masks)},
                                    {"reconstruction", to_json(result.reconstruction)},
                                    {"max_rel_error", result.max_rel_error}});
}

json to_json(const RidgeExpansion& ridge) {
  json terms = json::array();
  for (const auto& t : ridge.terms) {
    terms.push_back({{"beta", t.beta}, {"alpha", vector_json(t.alpha)}, {"t", t.t}});
  }
  return document("ridge", {{"d", ridge.d()},
                            {"beta0", ridge.beta0},
                            {"alpha0", vector_json(ridge.alpha0)},
                            {"v", ridge.v},
                            {"terms", std::move(terms)}});
}

RidgeExpansion ridge_from_json(const json& j) {
  expect_document(j, "ridge");
  RidgeExpansion ridge;
  ridge.beta0 = field(j, "beta0").get<double>();
  ridge.alpha0 = vector_from(field(j, "alpha0"), "alpha0");
  ridge.v = field(j, "v").get<double>();
  for (const auto& t : field(j, "terms")) {
    ridge.terms.push_back({field(t, "beta").get<double>(), vector_from(field(t, "alpha"), "alpha"),
                           field(t, "t").get<double>()});
  }
  ridge.validate();
  return ridge;
}

json to_json(const DeepCnn& net) {
  const auto& cfg = net.config();
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    layers.push_back({{"mask", to_json(layer.mask)},
                      {"bias", vector_json(layer.bias.entries)},
                      {"structured", layer.bias.structured}});
  }
  return document("network",
                  {{"config", {{"d", cfg.d}, {"s", cfg.s}, {"J", cfg.J}, {"widths", cfg.widths()}}},
                   {"layers", std::move(layers)},
                   {"output_coeffs", vector_json(net.output_coeffs())},
                   {"B_ledger", net.bound_ledger()}});
}

DeepCnn network_from_json(const json& j) {
  expect_document(j, "network");
  const json& c = field(j, "config");
  const NetworkConfig cfg{field(c, "d").get<int>(), field(c, "s").get<int>(),
                          field(c, "J").get<int>()};
  if (c.contains("widths") && c.at("widths").get<std::vector<int>>() != cfg.widths()) {
    throw DimensionMismatch("config widths disagree with d + j s");
  }
  std::vector<Layer> layers;
  for (const auto& l : field(j, "layers")) {
    layers.push_back({sequence_from_json(field(l, "mask")),
                      {vector_from(field(l, "bias"), "bias"), l.value("structured", false)}});
  }
  return DeepCnn(cfg, std::move(layers), vector_from(field(j, "output_coeffs"), "output_coeffs"),
                 field(j, "B_ledger").get<std::vector<double>>());
}

json to_json(const std::vector<ErrorReport>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"J", r.J},
                   {"m", r.m},
                   {"sup_error", r.sup_error},
                   {"grid", r.grid},
                   {"param_count", r.param_count}});
  }
  return out;
}

std::string to_csv(const std::vector<ErrorReport>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "J,m,sup_error,grid,param_count\n";
  for (const auto& r : rows) {
    out << r.J << ',' << r.m << ',' << r.sup_error << ',' << r.grid << ',' << r.param_count << '\n';
  }
  return out.str();
}

std::vector<Eigen::VectorXd> points_from_json(const json& j) {
  const json& arr = j.is_object() ? field(j, "points") : j;
  if (!arr.is_array()) throw InvalidArgument("points must be an array of coordinate arrays");
  std::vector<Eigen::VectorXd> pts;
  for (const auto& p : arr) pts.push_back(vector_from(p, "point"));
  return pts;
}

}  // namespace convforge::io

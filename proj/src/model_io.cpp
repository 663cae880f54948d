#include "nsgp/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nsgp/errors.hpp"

namespace nsgp {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

json state_json(const LatentState& s) {
  return {{"ell", to_json(s.ell)}, {"sigma", to_json(s.sigma)}, {"omega", to_json(s.omega)}};
}

LatentState state_from(const json& j, Index n, const VariantFlags& flags) {
  LatentState s = LatentState::zeros(n, flags);
  s.ell = vector_from(j.at("ell"));
  s.sigma = vector_from(j.at("sigma"));
  s.omega = vector_from(j.at("omega"));
  s.validate();
  return s;
}

json mll_json(const MLLValue& v) {
  return {{"total", v.total},
          {"data_term", v.data_term},
          {"prior_ell", v.prior_ell},
          {"prior_sigma", v.prior_sigma},
          {"prior_omega", v.prior_omega}};
}

MLLValue mll_from(const json& j) {
  MLLValue v;
  v.total = j.at("total").get<double>();
  v.data_term = j.at("data_term").get<double>();
  v.prior_ell = j.at("prior_ell").get<double>();
  v.prior_sigma = j.at("prior_sigma").get<double>();
  v.prior_omega = j.at("prior_omega").get<double>();
  return v;
}

}  // namespace

void save_model(std::ostream& out, const FittedModel& model) {
  std::ostringstream cfg;
  write_config(cfg, model.config);
  json j;
  j["format"] = kFormatVersion;
  j["config"] = cfg.str();
  j["inference"] = std::string(name_of(model.inference));
  j["norm"] = {{"x_offset", model.norm.x_offset},
               {"x_scale", model.norm.x_scale},
               {"y_offset", model.norm.y_offset},
               {"y_scale", model.norm.y_scale}};
  j["train_x"] = to_json(model.train_x);
  j["train_y"] = to_json(model.train_y);
  if (model.outcome.map) {
    j["map"] = {{"state", state_json(model.outcome.map->state)},
                {"mll", mll_json(model.outcome.map->mll)},
                {"converged", model.outcome.map->converged}};
  }
  if (model.outcome.samples) {
    json draws = json::array();
    for (const PosteriorSample& s : model.outcome.samples->samples) {
      draws.push_back({{"chain", s.chain},
                       {"index", s.index},
                       {"mll", s.mll},
                       {"state", state_json(s.state)}});
    }
    j["samples"] = std::move(draws);
  }
  out << j.dump(1) << '\n';
}

FittedModel load_model(std::istream& in) {
  FittedModel m;
  try {
    const json j = json::parse(in);
    if (j.at("format").get<int>() != kFormatVersion) throw ParseError("unsupported model format");
    std::istringstream cfg(j.at("config").get<std::string>());
    m.config = parse_config(cfg);
    m.inference = inference_from_name(j.at("inference").get<std::string>());
    m.outcome.inference = m.inference;
    const json& norm = j.at("norm");
    m.norm.x_offset = norm.at("x_offset").get<double>();
    m.norm.x_scale = norm.at("x_scale").get<double>();
    m.norm.y_offset = norm.at("y_offset").get<double>();
    m.norm.y_scale = norm.at("y_scale").get<double>();
    m.train_x = vector_from(j.at("train_x"));
    m.train_y = vector_from(j.at("train_y"));
    if (m.train_x.size() != m.train_y.size()) throw ParseError("train_x and train_y differ");
    const Index n = m.train_x.size();
    if (j.contains("map")) {
      MapResult r;
      r.state = state_from(j["map"].at("state"), n, m.config.flags);
      r.mll = mll_from(j["map"].at("mll"));
      r.converged = j["map"].at("converged").get<bool>();
      r.restarts_run = 1;
      m.outcome.map = std::move(r);
    }
    if (j.contains("samples")) {
      SampleSet set;
      for (const json& d : j["samples"]) {
        set.samples.push_back({state_from(d.at("state"), n, m.config.flags),
                               d.at("mll").get<double>(), d.at("chain").get<int>(),
                               d.at("index").get<int>()});
      }
      m.outcome.samples = std::move(set);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  } catch (const DimensionError& e) {
    throw ParseError(std::string("model file: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  if (m.inference == Inference::map && !m.outcome.map) throw ParseError("model file: no MAP state");
  if (m.inference == Inference::hmc && (!m.outcome.samples || m.outcome.samples->samples.empty())) {
    throw ParseError("model file: no posterior samples");
  }
  return m;
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_model(in);
}

}  // namespace nsgp

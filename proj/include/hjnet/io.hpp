#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "hjnet/network.hpp"
#include "hjnet/training.hpp"
#include "json.hpp"

namespace hjnet {

/// 17 significant digits: enough for an exact double round trip.
inline std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::json params_to_json(const NetworkParams<double>& net) {
  nlohmann::json j;
  j["n"] = net.dim();
  j["m"] = net.pieces();
  nlohmann::json pieces = nlohmann::json::array();
  for (Index i = 0; i < net.pieces(); ++i) {
    nlohmann::json piece;
    piece["p"] = std::vector<double>(net.slope(i).begin(), net.slope(i).end());
    piece["theta"] = net.rate(i);
    piece["gamma"] = net.offset(i);
    pieces.push_back(std::move(piece));
  }
  j["neurons"] = std::move(pieces);
  return j;
}

inline NetworkParams<double> params_from_json(const nlohmann::json& j) {
  if (!j.contains("n") || !j.contains("m") || !j.contains("neurons"))
    throw std::runtime_error("parameter file needs keys n, m and neurons");
  const Index n = j.at("n").get<Index>();
  const Index m = j.at("m").get<Index>();
  const auto& pieces = j.at("neurons");
  if (!pieces.is_array() || Index(pieces.size()) != m)
    throw std::runtime_error("m must equal the length of the neurons array");
  if (m < 1 || n < 1) throw std::runtime_error("n and m must be positive");
  RowMajorMatrix<double> flat(m, n + 2);
  for (Index i = 0; i < m; ++i) {
    const auto& piece = pieces.at(std::size_t(i));
    const auto& p = piece.at("p");
    if (!p.is_array() || Index(p.size()) != n)
      throw std::runtime_error("every p must have length n");
    for (Index c = 0; c < n; ++c) flat(i, c) = p.at(std::size_t(c)).get<double>();
    flat(i, n) = piece.at("theta").get<double>();
    flat(i, n + 1) = piece.at("gamma").get<double>();
  }
  return NetworkParams<double>::from_flat(n, std::move(flat));
}

inline NetworkParams<double> load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return params_from_json(j);
}

inline void save_params(const std::string& path, const NetworkParams<double>& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << params_to_json(net).dump(2) << "\n";
}

/// Training configuration from JSON; absent keys keep their defaults. The
/// seed is not read here, it always comes from the command line.
inline TrainConfig<double> config_from_json(const nlohmann::json& j) {
  TrainConfig<double> c;
  if (j.contains("m")) c.pieces = j.at("m").get<Index>();
  if (j.contains("steps")) c.steps = j.at("steps").get<long>();
  if (j.contains("batch_size")) c.batch_size = j.at("batch_size").get<Index>();
  if (j.contains("learning_rate"))
    c.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("beta1")) c.beta1 = j.at("beta1").get<double>();
  if (j.contains("beta2")) c.beta2 = j.at("beta2").get<double>();
  if (j.contains("adam_epsilon"))
    c.adam_epsilon = j.at("adam_epsilon").get<double>();
  if (j.contains("n_train")) c.sample_count = j.at("n_train").get<Index>();
  if (j.contains("init_scale")) c.init_scale = j.at("init_scale").get<double>();
  if (j.contains("history_stride"))
    c.history_stride = j.at("history_stride").get<long>();
  if (j.contains("effective_probes"))
    c.effective_probes = j.at("effective_probes").get<Index>();
  return c;
}

inline TrainConfig<double> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

}  // namespace hjnet

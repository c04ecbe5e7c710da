#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nullcollapse/functionals.hpp"
#include "nullcollapse/sampler.hpp"

namespace nullcollapse {

// 17 significant digits: round-trips every double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes to a sibling temporary and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// Header "row,re_<label>,im_<label>,..."; one row per cylinder.
inline std::string table_to_csv(const DecoherenceTable& t) {
  std::ostringstream os;
  os << "row";
  for (const auto& l : t.labels) os << ",re_" << l << ",im_" << l;
  os << '\n';
  for (std::size_t r = 0; r < t.dimension(); ++r) {
    os << t.labels[r];
    for (std::size_t c = 0; c < t.dimension(); ++c) {
      const cplx v = t.at(r, c);
      os << ',' << format_double(v.real()) << ',' << format_double(v.imag());
    }
    os << '\n';
  }
  return os.str();
}

inline nlohmann::json table_to_json(const DecoherenceTable& t) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (std::size_t r = 0; r < t.dimension(); ++r) {
    nlohmann::json rr = nlohmann::json::array(), ri = nlohmann::json::array();
    for (std::size_t c = 0; c < t.dimension(); ++c) {
      rr.push_back(t.at(r, c).real());
      ri.push_back(t.at(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"functional", t.functional}, {"extent", t.extent}, {"factors", t.factors},
          {"labels", t.labels},         {"re", std::move(re)},  {"im", std::move(im)}};
}

inline nlohmann::json state_to_json(const StateVector& s) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& z : s.amplitudes()) a.push_back({z.real(), z.imag()});
  return a;
}

inline nlohmann::json trajectory_to_json(const TrajectoryRecord& r) {
  nlohmann::json dists = nlohmann::json::array();
  for (const auto& p : r.distributions) dists.push_back({p[0], p[1], p[2], p[3]});
  nlohmann::json j = {{"index", r.index},
                      {"seed", r.seed},
                      {"history", r.history.str()},
                      {"conditionals", r.conditionals},
                      {"distributions", std::move(dists)},
                      {"chain_probability", r.chain_probability}};
  if (r.final_state.dimension() > 0) j["final_state"] = state_to_json(r.final_state);
  return j;
}

// One JSON object per line.
inline std::string trajectories_to_jsonl(const std::vector<TrajectoryRecord>& records) {
  std::string out;
  for (const auto& r : records) out += trajectory_to_json(r).dump() + "\n";
  return out;
}

// Empirical cylinder frequencies next to the exact mu_c. With no trajectories
// only the exact column is written.
inline std::string frequency_summary_csv(const std::vector<TrajectoryRecord>& records, const ClassicalFunctional& c,
                                         int steps) {
  const auto& mu = c.weights(steps);
  std::ostringstream os;
  if (records.empty()) {
    os << "config,mu_c\n";
    for (std::size_t k = 0; k < mu.size(); ++k) os << cylinder_label(k, steps, 1) << ',' << format_double(mu[k]) << '\n';
    return os.str();
  }
  std::vector<std::uint64_t> counts(mu.size(), 0);
  for (const auto& r : records) ++counts.at(r.history.bits);
  const double total = static_cast<double>(records.size());
  os << "config,count,frequency,mu_c,binomial_sigma\n";
  for (std::size_t k = 0; k < mu.size(); ++k) {
    os << cylinder_label(k, steps, 1) << ',' << counts[k] << ',' << format_double(counts[k] / total) << ','
       << format_double(mu[k]) << ',' << format_double(std::sqrt(mu[k] * (1.0 - mu[k]) / total)) << '\n';
  }
  return os.str();
}

}  // namespace nullcollapse

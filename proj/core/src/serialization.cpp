#include "flambe/serialization.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace flambe {

namespace {

constexpr int kSchemaVersion = 1;

Json vec_to_json(const Vec& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vec vec_from_json(const Json& j) {
  Vec v(static_cast<int>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

Json mat_to_json_rowmajor(const Mat& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
  return out;
}

Mat mat_from_json_rowmajor(const Json& j, int rows, int cols) {
  if (static_cast<long>(j.size()) != static_cast<long>(rows) * cols) {
    throw ConfigError("serialization: matrix payload has the wrong size");
  }
  Mat m(rows, cols);
  std::size_t idx = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = j[idx++].get<double>();
  }
  return m;
}

void check_schema(const Json& j, const std::string& name) {
  if (!j.contains("schema") || j.at("schema").get<std::string>() != name) {
    throw ConfigError("serialization: expected schema '" + name + "'");
  }
  if (j.at("version").get<int>() != kSchemaVersion) {
    throw ConfigError("serialization: unsupported schema version");
  }
}

}  // namespace

Json phi_to_json(const PhiMap& phi) {
  Json j;
  j["d"] = phi.dim();
  j["m"] = phi.action_dim();
  j["n_states"] = phi.n_states();
  if (const auto* cosine = dynamic_cast<const CosinePhi*>(&phi)) {
    j["family"] = "cosine";
    Json blocks = Json::array();
    for (const Mat& w : cosine->weights()) blocks.push_back(mat_to_json_rowmajor(w));
    j["weights"] = std::move(blocks);
    return j;
  }
  if (const auto* affine = dynamic_cast<const AffinePhi*>(&phi)) {
    j["family"] = "affine";
    Json bias = Json::array();
    for (const Vec& b : affine->bias()) bias.push_back(vec_to_json(b));
    Json slope = Json::array();
    for (const Mat& g : affine->slope()) slope.push_back(mat_to_json_rowmajor(g));
    j["bias"] = std::move(bias);
    j["slope"] = std::move(slope);
    return j;
  }
  throw ConfigError("serialization: unknown embedding family");
}

PhiPtr phi_from_json(const Json& j) {
  const int d = j.at("d").get<int>();
  const int m = j.at("m").get<int>();
  const int n_states = j.at("n_states").get<int>();
  const std::string family = j.at("family").get<std::string>();
  if (family == "cosine") {
    std::vector<Mat> weights;
    for (const Json& block : j.at("weights")) {
      weights.push_back(mat_from_json_rowmajor(block, d, m + 1));
    }
    if (static_cast<int>(weights.size()) != n_states) {
      throw ConfigError("serialization: cosine weight table size mismatch");
    }
    return std::make_shared<CosinePhi>(d, m, std::move(weights));
  }
  if (family == "affine") {
    std::vector<Vec> bias;
    for (const Json& b : j.at("bias")) bias.push_back(vec_from_json(b));
    std::vector<Mat> slope;
    for (const Json& g : j.at("slope")) {
      slope.push_back(mat_from_json_rowmajor(g, d, m));
    }
    return std::make_shared<AffinePhi>(d, m, std::move(bias), std::move(slope));
  }
  throw ConfigError("serialization: unknown embedding family '" + family + "'");
}

Json mdp_to_json(const LowRankMDP& mdp) {
  Json j;
  j["schema"] = "flambe.mdp";
  j["version"] = kSchemaVersion;
  j["n_states"] = mdp.n_states();
  j["m"] = mdp.action_dim();
  j["d"] = mdp.rank();
  j["horizon"] = mdp.horizon();
  j["rho"] = vec_to_json(mdp.rho());
  Json steps = Json::array();
  for (int h = 0; h < mdp.horizon(); ++h) {
    Json step;
    step["phi"] = phi_to_json(mdp.phi(h));
    step["psi"] = mat_to_json_rowmajor(mdp.psi(h));
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  return j;
}

LowRankMDP mdp_from_json(const Json& j) {
  check_schema(j, "flambe.mdp");
  const int n_states = j.at("n_states").get<int>();
  const int m = j.at("m").get<int>();
  const int d = j.at("d").get<int>();
  const int horizon = j.at("horizon").get<int>();
  Vec rho = vec_from_json(j.at("rho"));
  std::vector<PhiPtr> phi;
  std::vector<Mat> psi;
  for (const Json& step : j.at("steps")) {
    phi.push_back(phi_from_json(step.at("phi")));
    psi.push_back(mat_from_json_rowmajor(step.at("psi"), n_states, d));
  }
  return LowRankMDP(m, d, horizon, std::move(rho), std::move(phi),
                    std::move(psi));
}

Json policy_to_json(const Policy& policy) {
  Json j;
  j["schema"] = "flambe.policy";
  j["version"] = kSchemaVersion;
  j["kind"] = to_string(policy.kind());
  j["m"] = policy.action_dim();
  switch (policy.kind()) {
    case PolicyKind::GridMixture: {
      const auto& gm = static_cast<const GridMixturePolicy&>(policy);
      j["horizon"] = gm.horizon();
      j["n_states"] = gm.n_states();
      j["g"] = gm.g();
      Json table = Json::array();
      for (int h = 0; h < gm.horizon(); ++h) {
        Json row = Json::array();
        for (int s = 0; s < gm.n_states(); ++s) {
          row.push_back(vec_to_json(gm.cell_probabilities(h, s)));
        }
        table.push_back(std::move(row));
      }
      j["cells"] = std::move(table);
      break;
    }
    case PolicyKind::Deterministic: {
      const auto& det = static_cast<const DeterministicPolicy&>(policy);
      Json table = Json::array();
      for (int h = 0; h < det.horizon(); ++h) {
        Json row = Json::array();
        for (int s = 0; s < det.n_states(); ++s) {
          row.push_back(vec_to_json(det.action(h, s)));
        }
        table.push_back(std::move(row));
      }
      j["actions"] = std::move(table);
      break;
    }
    case PolicyKind::UniformRandom:
      break;
    case PolicyKind::Smoothed: {
      const auto& sm = static_cast<const SmoothedPolicy&>(policy);
      j["k"] = sm.k();
      j["base"] = policy_to_json(sm.base());
      break;
    }
    case PolicyKind::UniformTail: {
      const auto& ut = static_cast<const UniformTailPolicy&>(policy);
      j["uniform_from"] = ut.uniform_from();
      j["base"] = policy_to_json(ut.base());
      break;
    }
    case PolicyKind::FiniteMixture: {
      const auto& mix = static_cast<const FiniteMixturePolicy&>(policy);
      Json weights = Json::array();
      Json components = Json::array();
      for (std::size_t i = 0; i < mix.n_components(); ++i) {
        weights.push_back(mix.weight(i));
        components.push_back(policy_to_json(*mix.component(i)));
      }
      j["weights"] = std::move(weights);
      j["components"] = std::move(components);
      break;
    }
  }
  return j;
}

PolicyPtr policy_from_json(const Json& j) {
  check_schema(j, "flambe.policy");
  const std::string kind = j.at("kind").get<std::string>();
  const int m = j.at("m").get<int>();
  if (kind == "grid_mixture") {
    const int horizon = j.at("horizon").get<int>();
    const int n_states = j.at("n_states").get<int>();
    const int g = j.at("g").get<int>();
    std::vector<std::vector<Vec>> table;
    for (const Json& row : j.at("cells")) {
      std::vector<Vec> states;
      for (const Json& cell : row) states.push_back(vec_from_json(cell));
      table.push_back(std::move(states));
    }
    return std::make_shared<GridMixturePolicy>(horizon, n_states, m, g,
                                               std::move(table));
  }
  if (kind == "deterministic") {
    std::vector<std::vector<Action>> actions;
    for (const Json& row : j.at("actions")) {
      std::vector<Action> states;
      for (const Json& a : row) states.push_back(vec_from_json(a));
      actions.push_back(std::move(states));
    }
    return std::make_shared<DeterministicPolicy>(m, std::move(actions));
  }
  if (kind == "uniform_random") {
    return std::make_shared<UniformRandomPolicy>(m);
  }
  if (kind == "smoothed") {
    return std::make_shared<SmoothedPolicy>(policy_from_json(j.at("base")),
                                            j.at("k").get<double>());
  }
  if (kind == "uniform_tail") {
    return std::make_shared<UniformTailPolicy>(
        policy_from_json(j.at("base")), j.at("uniform_from").get<int>());
  }
  if (kind == "finite_mixture") {
    std::vector<PolicyPtr> components;
    std::vector<double> weights;
    for (const Json& c : j.at("components")) {
      components.push_back(policy_from_json(c));
    }
    for (const Json& w : j.at("weights")) weights.push_back(w.get<double>());
    return std::make_shared<FiniteMixturePolicy>(std::move(components),
                                                 std::move(weights));
  }
  throw ConfigError("serialization: unknown policy kind '" + kind + "'");
}

Json hypothesis_class_to_json(const HypothesisClass& cls) {
  Json j;
  j["schema"] = "flambe.class";
  j["version"] = kSchemaVersion;
  Json phis = Json::array();
  for (const PhiPtr& phi : cls.phis()) phis.push_back(phi_to_json(*phi));
  j["phis"] = std::move(phis);
  Json psis = Json::array();
  for (const Mat& psi : cls.psis()) {
    Json block;
    block["rows"] = static_cast<int>(psi.rows());
    block["cols"] = static_cast<int>(psi.cols());
    block["data"] = mat_to_json_rowmajor(psi);
    psis.push_back(std::move(block));
  }
  j["psis"] = std::move(psis);
  j["true_phi"] = Json::array();
  j["true_psi"] = Json::array();
  for (int h = 0; h < cls.horizon(); ++h) {
    j["true_phi"].push_back(cls.true_phi_index(h));
    j["true_psi"].push_back(cls.true_psi_index(h));
  }
  j["min_tv_separation"] = cls.min_tv_separation();
  return j;
}

HypothesisClass hypothesis_class_from_json(const Json& j) {
  check_schema(j, "flambe.class");
  std::vector<PhiPtr> phis;
  for (const Json& p : j.at("phis")) phis.push_back(phi_from_json(p));
  std::vector<Mat> psis;
  for (const Json& block : j.at("psis")) {
    psis.push_back(mat_from_json_rowmajor(block.at("data"),
                                          block.at("rows").get<int>(),
                                          block.at("cols").get<int>()));
  }
  std::vector<int> true_phi;
  for (const Json& v : j.at("true_phi")) true_phi.push_back(v.get<int>());
  std::vector<int> true_psi;
  for (const Json& v : j.at("true_psi")) true_psi.push_back(v.get<int>());
  return HypothesisClass(std::move(phis), std::move(psis), std::move(true_phi),
                         std::move(true_psi),
                         j.at("min_tv_separation").get<double>());
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  Json j;
  in >> j;
  return j;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::string& config_hash, std::uint64_t seed,
                     bool timestamp) {
  out_.open(path);
  if (!out_) throw ConfigError("cannot open for writing: " + path.string());
  if (timestamp) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out_ << "# generated_at=" << buf << '\n';
  }
  out_ << "# config_hash=" << config_hash << " seed=" << seed << " version="
       << kVersion << '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ',';
    out_ << columns[i];
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::field(const std::string& value) {
  if (row_started_) out_ << ',';
  out_ << value;
  row_started_ = true;
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(format_double(value)); }

CsvWriter& CsvWriter::field(long value) { return field(std::to_string(value)); }

void CsvWriter::end_row() {
  out_ << '\n';
  row_started_ = false;
}

std::string CsvWriter::format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

}  // namespace flambe

#include "hvrfif/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "hvrfif/error.hpp"
#include "json.hpp"

namespace hvrfif {

namespace {

using Json = nlohmann::ordered_json;

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto pos = line.find(sep);
    out.push_back(trim(line.substr(0, pos)));
    if (pos == std::string_view::npos) return out;
    line.remove_prefix(pos + 1);
  }
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    throw Error(ErrorCode::ParseError, fmt::format("line {}: '{}' is not a number", line, field));
  return v;
}

// Non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const auto pos = text.find('\n');
    const auto line = trim(text.substr(0, pos));
    if (!line.empty()) out.emplace_back(number, line);
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

std::vector<std::vector<double>> parse_table(std::string_view text, const std::vector<std::string_view>& header) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty CSV");
  if (split(lines.front().second, ',') != header)
    throw Error(ErrorCode::ParseError, fmt::format("line {}: expected header {}", lines.front().first,
                                                   fmt::join(header, ",")));
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 1; j < lines.size(); ++j) {
    const auto [number, line] = lines[j];
    const auto fields = split(line, ',');
    if (fields.size() != header.size())
      throw Error(ErrorCode::ParseError,
                  fmt::format("line {}: {} fields, expected {}", number, fields.size(), header.size()));
    std::vector<double> row;
    for (auto f : fields) row.push_back(parse_double(f, number));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json factor_to_json(const FactorSpec& spec) {
  Json j;
  j["family"] = std::string(to_string(spec.family));
  j["params"] = spec.params;
  if (spec.family == FactorFamily::table) j["lipschitz"] = spec.lipschitz;
  return j;
}

FactorSpec factor_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "factor entry must be an object");
  FactorSpec spec;
  spec.family = factor_family_from_string(j.at("family").get<std::string>());
  spec.params = j.at("params").get<std::vector<double>>();
  if (j.contains("lipschitz")) spec.lipschitz = j.at("lipschitz").get<double>();
  return spec;
}

std::vector<FactorSpec> factor_list(const Json& factors, const char* key, std::size_t regions) {
  if (!factors.contains(key)) throw Error(ErrorCode::ParseError, fmt::format("factors.{} is missing", key));
  const auto& entry = factors.at(key);
  if (entry.is_object()) return std::vector<FactorSpec>(regions, factor_from_json(entry));
  if (!entry.is_array()) throw Error(ErrorCode::ParseError, fmt::format("factors.{} must be a list", key));
  if (entry.size() == 1) return std::vector<FactorSpec>(regions, factor_from_json(entry.front()));
  if (entry.size() != regions)
    throw Error(ErrorCode::ParseError,
                fmt::format("factors.{} has {} entries for {} regions", key, entry.size(), regions));
  std::vector<FactorSpec> out;
  for (const auto& e : entry) out.push_back(factor_from_json(e));
  return out;
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "increasing") return Orientation::increasing;
  if (s == "decreasing") return Orientation::decreasing;
  throw Error(ErrorCode::ParseError, fmt::format("orientation '{}' is neither increasing nor decreasing", s));
}

ModelConfig config_from_json(const Json& j, std::size_t regions) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "config must be a JSON object");
  for (const char* key : {"domains", "gamma", "factors"})
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, fmt::format("config field '{}' is missing", key));

  ModelConfig cfg;
  for (const auto& d : j.at("domains")) {
    const auto pair = d.get<std::vector<long long>>();
    if (pair.size() != 2 || pair[0] < 0 || pair[1] < 0)
      throw Error(ErrorCode::ParseError, "each domain is a pair [s, e] of node indices");
    cfg.partition.domains.push_back({static_cast<std::size_t>(pair[0]), static_cast<std::size_t>(pair[1])});
  }
  const auto gamma = j.at("gamma").get<std::vector<long long>>();
  if (gamma.size() != regions)
    throw Error(ErrorCode::ParseError, fmt::format("gamma has {} entries for {} regions", gamma.size(), regions));
  for (const auto k : gamma) {
    if (k < 1) throw Error(ErrorCode::ParseError, fmt::format("gamma entry {} is not a 1-based domain index", k));
    cfg.partition.gamma.push_back(static_cast<std::size_t>(k - 1));
  }
  if (j.contains("orientation"))
    for (const auto& o : j.at("orientation")) cfg.partition.orientation.push_back(orientation_from_string(o));
  if (j.contains("allow_single_domain")) cfg.partition.allow_single_domain = j.at("allow_single_domain").get<bool>();

  const auto& f = j.at("factors");
  if (!f.is_object()) throw Error(ErrorCode::ParseError, "factors must be an object with s, sp, st, stp");
  const auto s = factor_list(f, "s", regions);
  const auto sp = factor_list(f, "sp", regions);
  const auto st = factor_list(f, "st", regions);
  const auto stp = factor_list(f, "stp", regions);
  for (std::size_t i = 0; i < regions; ++i) cfg.factors.push_back({s[i], sp[i], st[i], stp[i]});
  return cfg;
}

template <class F>
auto parse_json_guarded(std::string_view what, F&& body) {
  try {
    return body();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, fmt::format("{}: {}", what, e.what()));
  }
}

Json constants_json(const StabilityConstants& c) {
  Json j;
  j["omega"] = c.omega;
  j["omega_tilde"] = c.omega_tilde;
  j["N"] = c.N;
  j["tau"] = c.tau;
  j["L1"] = c.L1;
  j["L2"] = c.L2;
  j["y_max"] = c.y_max;
  j["z_max"] = c.z_max;
  j["domain_min"] = c.domain_min;
  return j;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write {}", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::IoError, fmt::format("write to {} failed", path.string()));
}

ExtendedDataset parse_dataset_csv(std::string_view text) {
  std::vector<Node> nodes;
  for (const auto& row : parse_table(text, {"x", "y", "z"})) nodes.push_back({row[0], row[1], row[2]});
  return validate_dataset(std::move(nodes));
}

ExtendedDataset read_dataset_csv(const std::filesystem::path& path) { return parse_dataset_csv(read_text(path)); }

ModelConfig parse_config_json(std::string_view text, std::size_t regions) {
  return parse_json_guarded("config", [&] { return config_from_json(Json::parse(text), regions); });
}

ModelConfig read_config(const std::filesystem::path& path, std::size_t regions) {
  return parse_config_json(read_text(path), regions);
}

RifsModel build_model(const ExtendedDataset& data, const ModelConfig& config) {
  return assemble(data, config.partition, make_factor_set(data, config.factors));
}

std::string model_to_json(const RifsModel& model) {
  const auto& src = model.source_data();
  const auto& partition = model.partition();
  const auto scale = model.scale();
  Json j;
  j["format"] = "hvrfif-model";
  j["version"] = 1;

  Json nodes = Json::array();
  for (const auto& n : src.nodes()) nodes.push_back({n.x, n.y, n.z});
  j["nodes"] = std::move(nodes);

  Json part;
  Json domains = Json::array();
  for (std::size_t k = 0; k < partition.domain_count(); ++k)
    domains.push_back({partition.domain(k).start, partition.domain(k).end});
  part["domains"] = std::move(domains);
  Json gamma = Json::array(), orientation = Json::array();
  for (std::size_t i = 0; i < partition.region_count(); ++i) {
    gamma.push_back(partition.gamma(i) + 1);
    orientation.push_back(std::string(to_string(partition.orientation(i))));
  }
  part["gamma"] = std::move(gamma);
  part["orientation"] = std::move(orientation);
  part["allow_single_domain"] = partition.spec().allow_single_domain;
  j["partition"] = std::move(part);

  Json factors;
  for (const char* key : {"s", "sp", "st", "stp"}) factors[key] = Json::array();
  for (const auto& row : model.source_factors().rows()) {
    factors["s"].push_back(factor_to_json(row.s.spec()));
    factors["sp"].push_back(factor_to_json(row.sp.spec()));
    factors["st"].push_back(factor_to_json(row.st.spec()));
    factors["stp"].push_back(factor_to_json(row.stp.spec()));
  }
  j["factors"] = std::move(factors);

  // Informational: images of the domain ends in user coordinates.
  Json maps = Json::array();
  for (std::size_t i = 0; i < model.region_count(); ++i) {
    const auto& r = model.region(i);
    Json m;
    m["region"] = i + 1;
    m["domain"] = r.domain + 1;
    m["from"] = {scale.from_unit(r.domain_interval.lo), scale.from_unit(r.domain_interval.hi)};
    m["to"] = {scale.from_unit(r.L(r.domain_interval.lo)), scale.from_unit(r.L(r.domain_interval.hi))};
    maps.push_back(std::move(m));
  }
  j["maps"] = std::move(maps);

  Json matrix = Json::array();
  const auto& cm = model.connection();
  for (std::size_t s = 0; s < cm.size(); ++s) {
    Json row = Json::array();
    for (std::size_t t = 0; t < cm.size(); ++t) row.push_back(to_string(cm(s, t)));
    matrix.push_back(std::move(row));
  }
  j["connection_matrix"] = std::move(matrix);

  const auto& meta = model.metadata();
  j["metadata"] = {{"s_bar", meta.s_bar}, {"ratio_max", meta.ratio_max}, {"ratio_min", meta.ratio_min}};
  return j.dump(2) + "\n";
}

RifsModel model_from_json(std::string_view text) {
  return parse_json_guarded("model file", [&] {
    const auto j = Json::parse(text);
    if (!j.is_object() || j.value("format", std::string()) != "hvrfif-model")
      throw Error(ErrorCode::ParseError, "not a model file");
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
      const auto v = n.get<std::vector<double>>();
      if (v.size() != 3) throw Error(ErrorCode::ParseError, "each node is [x, y, z]");
      nodes.push_back({v[0], v[1], v[2]});
    }
    const auto data = validate_dataset(std::move(nodes));

    Json cfg = j.at("partition");
    cfg["factors"] = j.at("factors");
    auto model = build_model(data, config_from_json(cfg, data.regions()));

    const auto& stored = j.at("connection_matrix");
    const auto& cm = model.connection();
    bool same = stored.size() == cm.size();
    for (std::size_t s = 0; same && s < cm.size(); ++s) {
      same = stored[s].size() == cm.size();
      for (std::size_t t = 0; same && t < cm.size(); ++t)
        same = rational_from_string(stored[s][t].get<std::string>()) == cm(s, t);
    }
    if (!same) throw Error(ErrorCode::ParseError, "stored connection matrix does not match the partition");
    return model;
  });
}

std::string grid_to_csv(const EvaluationGrid& grid, AbscissaScale scale) {
  std::string out = "x,f1,f2\n";
  for (std::size_t j = 0; j < grid.xs.size(); ++j)
    out += fmt::format("{},{},{}\n", num(scale.from_unit(grid.xs[j])), num(grid.f1[j]), num(grid.f2[j]));
  return out;
}

EvaluationGrid grid_from_csv(std::string_view text, AbscissaScale scale) {
  EvaluationGrid grid;
  for (const auto& row : parse_table(text, {"x", "f1", "f2"})) {
    grid.xs.push_back(scale.to_unit(row[0]));
    grid.f1.push_back(row[1]);
    grid.f2.push_back(row[2]);
  }
  if (grid.xs.size() < 2) throw Error(ErrorCode::ParseError, "grid needs at least two rows");
  grid.xs.front() = 0.0;
  grid.xs.back() = 1.0;
  for (std::size_t j = 1; j < grid.xs.size(); ++j)
    if (!(grid.xs[j] > grid.xs[j - 1])) throw Error(ErrorCode::NonIncreasingAbscissas, "grid abscissas must increase");
  grid.resolution = grid.xs.size();
  return grid;
}

std::string samples_to_csv(const OrbitSampleSet& samples, AbscissaScale scale) {
  std::string out = "x,f1,f2,region\n";
  for (const auto& s : samples.samples)
    out += fmt::format("{},{},{},{}\n", num(scale.from_unit(s.x)), num(s.f1), num(s.f2), s.region + 1);
  return out;
}

std::string render_svg(const EvaluationGrid& grid, const RifsModel& model) {
  constexpr double width = 800, height = 400, margin = 40;
  double lo = grid.f1.front(), hi = grid.f1.front();
  for (double v : grid.f1) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const auto px = [&](double x) { return margin + x * (width - 2 * margin); };
  const auto py = [&](double y) { return height - margin - (y - lo) / (hi - lo) * (height - 2 * margin); };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n", width,
      height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\"/>\n", px(0),
                     height - margin, px(1), height - margin);
  for (const auto& n : model.data().nodes())
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                       px(n.x), height - margin, height - margin + 6);

  out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\" points=\"";
  for (std::size_t j = 0; j < grid.xs.size(); ++j)
    out += fmt::format("{}{:.2f},{:.2f}", j ? " " : "", px(grid.xs[j]), py(grid.f1[j]));
  out += "\"/>\n";
  for (const auto& n : model.data().nodes())
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"crimson\"/>\n", px(n.x), py(n.y));
  out += "</svg>\n";
  return out;
}

std::string smoothness_to_json(const SmoothnessReport& r, const std::optional<HolderEstimate>& estimate) {
  Json j;
  j["case"] = std::string(to_string(r.regime));
  j["near_critical"] = r.near_critical;
  j["delta"] = r.delta;
  j["L1"] = r.L1;
  j["L2"] = r.L2;
  j["tau1"] = r.tau1;
  j["tau2"] = r.tau2;
  j["ratio_max"] = r.ratio_max;
  j["ratio_min"] = r.ratio_min;
  j["M_k"] = r.M_k;
  j["M_tilde_k"] = r.M_tilde_k;
  j["M"] = r.M;
  j["D"] = r.D;
  j["f1_bound"] = r.f1_bound;
  j["f2_bound"] = r.f2_bound;
  j["alpha"] = r.alpha;
  if (estimate) {
    Json e;
    e["tau1"] = estimate->tau1;
    e["tau2"] = estimate->tau2;
    e["degenerate1"] = estimate->degenerate1;
    e["degenerate2"] = estimate->degenerate2;
    e["scales"] = estimate->scales;
    e["osc1"] = estimate->osc1;
    e["osc2"] = estimate->osc2;
    j["empirical"] = std::move(e);
  }
  return j.dump(2) + "\n";
}

std::string stability_to_json(const TrialSummary& summary, const std::vector<StabilityReport>& rows) {
  Json j;
  j["bound"] = summary.bound_id;
  j["seed"] = summary.seed;
  j["trials"] = rows.size();
  j["requested"] = {{"max_dx", summary.magnitudes.dx}, {"max_dy", summary.magnitudes.dy},
                    {"max_dz", summary.magnitudes.dz}};
  j["violations"] = summary.violations;
  if (!rows.empty()) {
    j["budget"] = rows.front().budget;
    j["constants"] = constants_json(rows.front().constants);
    j["notes"] = rows.front().notes;
  }
  Json out = Json::array();
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const auto& r = rows[t];
    Json row;
    row["trial"] = t;
    row["max_dx"] = r.max_dx;
    row["max_dy"] = r.max_dy;
    row["max_dz"] = r.max_dz;
    row["bound"] = r.theoretical_bound;
    row["empirical"] = r.empirical_sup;
    row["margin"] = r.margin;
    row["passed"] = r.passed;
    row["N"] = r.constants.N;
    out.push_back(std::move(row));
  }
  j["rows"] = std::move(out);
  return j.dump(2) + "\n";
}

}  // namespace hvrfif

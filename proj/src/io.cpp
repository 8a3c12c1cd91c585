#include "selinf/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "selinf/errors.hpp"

namespace selinf {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits one CSV record; double quotes protect commas and "" is a literal
// quote. Records spanning lines are not supported.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(trim(cell));
  return out;
}

bool parse_number(const std::string& s, double& x) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(x);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string name_of(Index j, const std::vector<std::string>& names) {
  if (j >= 0 && static_cast<std::size_t>(j) < names.size()) return names[static_cast<std::size_t>(j)];
  return "x" + std::to_string(j + 1);
}

std::vector<std::string> sim_names(const SimConfig& c) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < c.p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

Json names_json(const std::vector<Index>& vars, const std::vector<std::string>& names) {
  Json out = Json::array();
  for (Index j : vars) out.push_back(name_of(j, names));
  return out;
}

std::string format_cutoff(double c) {
  std::ostringstream os;
  os << c;
  return os.str();
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

Dataset parse_dataset(std::istream& in, const std::string& response, bool center, bool unit_norm,
                      const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty file, header row required");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_csv(line);
  std::size_t resp = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == response) resp = c;
  }
  if (resp == header.size()) throw DataError(source + ": response column '" + response + "' not found");
  if (header.size() < 2) throw DataError(source + ": need at least one predictor column");

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != resp) names.push_back(header[c]);
  }
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_number(cells[c], row[c])) {
        throw DataError(source + ": non-numeric cell '" + cells[c] + "' at line " + std::to_string(line_no) +
                        ", column '" + header[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(source + ": no data rows");

  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(header.size() - 1);
  MatrixXd X(n, p);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    Index col = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == resp) {
        y[i] = row[c];
      } else {
        X(i, col++) = row[c];
      }
    }
  }
  try {
    return standardize(std::move(X), std::move(y), std::move(names), center, unit_norm);
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
}

Dataset parse_dataset(const std::string& path, const std::string& response, bool center, bool unit_norm) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");
  return parse_dataset(in, response, center, unit_norm, path);
}

Json json_real(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "+inf" : "-inf";
  return x;
}

double real_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "+inf" || s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw DataError("expected a number or \"+inf\"/\"-inf\", got " + j.dump());
}

std::string csv_real(double x) {
  if (!std::isfinite(x)) return {};
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

Json to_json(const PathTrace& trace, const std::vector<std::string>& names) {
  Json steps = Json::array();
  for (std::size_t l = 0; l < trace.size(); ++l) {
    const PathStep& st = trace.steps[l];
    Json s;
    s["step"] = l + 1;
    s["action"] = st.kind == StepKind::Add ? "add" : "delete";
    s["variable"] = name_of(st.variable, names);
    s["variable_index"] = st.variable;
    s["sign"] = st.sign;
    s["knot"] = st.knot ? json_real(*st.knot) : Json(nullptr);
    s["active"] = names_json(st.active_after, names);
    s["active_index"] = st.active_after;
    s["signs"] = st.signs_after;
    steps.push_back(std::move(s));
  }
  Json out;
  out["method"] = to_string(trace.method);
  out["n"] = trace.n;
  out["p"] = trace.p;
  out["steps"] = std::move(steps);
  out["termination"] = trace.termination;
  return out;
}

PathTrace trace_from_json(const Json& j) {
  try {
    PathTrace t;
    t.method = method_from_string(j.at("method").get<std::string>());
    t.n = j.at("n").get<Index>();
    t.p = j.at("p").get<Index>();
    t.termination = get_or<std::string>(j, "termination", "");
    for (const Json& s : j.at("steps")) {
      PathStep st;
      const std::string action = s.at("action").get<std::string>();
      if (action != "add" && action != "delete") throw DataError("unknown path action '" + action + "'");
      st.kind = action == "add" ? StepKind::Add : StepKind::Delete;
      st.variable = s.at("variable_index").get<Index>();
      st.sign = s.at("sign").get<int>();
      if (!s.at("knot").is_null()) st.knot = real_from_json(s.at("knot"));
      st.active_after = s.at("active_index").get<std::vector<Index>>();
      st.signs_after = s.at("signs").get<std::vector<int>>();
      t.steps.push_back(std::move(st));
    }
    return t;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed path JSON: ") + e.what());
  }
}

Json to_json(const InferenceResult& r, const std::vector<std::string>& names) {
  Json out;
  out["step"] = r.step;
  out["variable"] = name_of(r.variable, names);
  out["variable_index"] = r.variable;
  out["sign"] = r.sign;
  out["statistic"] = json_real(r.statistic);
  out["p_value"] = json_real(r.p_value);
  out["ci_low"] = r.ci ? json_real(r.ci->lo) : Json(nullptr);
  out["ci_high"] = r.ci ? json_real(r.ci->hi) : Json(nullptr);
  out["test"] = to_string(r.test);
  out["sided"] = to_string(r.sided);
  out["conditioning"] = r.conditioning;
  if (r.bounds) {
    out["v_lo"] = json_real(r.bounds->v_lo);
    out["v_up"] = json_real(r.bounds->v_up);
    out["v_zero"] = json_real(r.bounds->v_zero);
  }
  return out;
}

std::string results_csv(const std::vector<InferenceResult>& results, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "step,variable,variable_index,sign,statistic,p_value,ci_low,ci_high,test,sided,conditioning\n";
  for (const InferenceResult& r : results) {
    os << r.step << ',' << csv_field(name_of(r.variable, names)) << ',' << r.variable << ',' << r.sign << ','
       << csv_real(r.statistic) << ',' << csv_real(r.p_value) << ',' << (r.ci ? csv_real(r.ci->lo) : "") << ','
       << (r.ci ? csv_real(r.ci->hi) : "") << ',' << to_string(r.test) << ',' << to_string(r.sided) << ','
       << csv_field(r.conditioning) << '\n';
  }
  return os.str();
}

Json to_json(const RuleOutcome& r, const std::vector<std::string>& names) {
  Json out;
  out["rule"] = to_string(r.rule);
  out["alpha"] = r.alpha;
  out["k_chosen"] = r.k_chosen;
  out["selected"] = names_json(r.selected, names);
  out["selected_index"] = r.selected;
  Json ps = Json::array();
  for (double p : r.per_variable_p) ps.push_back(json_real(p));
  out["per_variable_p"] = std::move(ps);
  return out;
}

Json to_json(const SimReport& report) {
  const SimConfig& c = report.config;
  Json cfg;
  cfg["n"] = c.n;
  cfg["p"] = c.p;
  cfg["beta_star"] = std::vector<double>(c.beta_star.data(), c.beta_star.data() + c.beta_star.size());
  cfg["sigma"] = c.sigma;
  cfg["design"] = to_string(c.design);
  cfg["n_reps"] = c.n_reps;
  cfg["steps"] = c.steps;
  cfg["method"] = to_string(c.method);
  Json tests = Json::array();
  for (TestKind t : c.tests) tests.push_back(test_key(t));
  cfg["tests"] = std::move(tests);
  cfg["intervals"] = c.intervals;
  cfg["alpha"] = c.alpha;
  cfg["sided"] = to_string(c.sided);
  cfg["seed"] = c.seed;
  cfg["redraw_x"] = c.redraw_x;
  cfg["max_t_sims"] = c.max_t_sims;
  cfg["power_cutoffs"] = c.power_cutoffs;

  Json summaries = Json::array();
  for (const StepSummary& s : report.summaries) {
    Json js;
    js["step"] = s.step;
    js["test"] = to_string(s.test);
    Json counts, power;
    for (const auto& [cls, ps] : s.qq) counts[cls] = ps.size();
    for (const auto& [cls, fr] : s.power) {
      Json row;
      for (std::size_t i = 0; i < fr.size() && i < c.power_cutoffs.size(); ++i) {
        row[format_cutoff(c.power_cutoffs[i])] = fr[i];
      }
      power[cls] = std::move(row);
    }
    js["count"] = std::move(counts);
    js["power"] = std::move(power);
    const auto all = s.qq.find("all");
    if (all != s.qq.end() && !all->second.empty()) {
      const KsResult ks = ks_uniformity(all->second);
      const KsResult sup = ks_super_uniformity(all->second);
      js["ks_uniform"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"pass_1pct", ks.pass_1pct}};
      js["ks_super_uniform"] = {{"statistic", sup.statistic}, {"p_value", sup.p_value}, {"pass_1pct", sup.pass_1pct}};
    }
    if (s.coverage.total() > 0) {
      auto tally = [](const Tally& t) {
        return Json{{"covered", t.covered},
                    {"total", t.total()},
                    {"rate", static_cast<double>(t.covered) / static_cast<double>(t.total())}};
      };
      js["coverage"] = tally(s.coverage);
      Json by;
      for (const auto& [cls, t] : s.coverage_by_class) {
        if (t.total() > 0) by[cls] = tally(t);
      }
      js["coverage_by_class"] = std::move(by);
    }
    summaries.push_back(std::move(js));
  }

  Json out;
  out["config"] = std::move(cfg);
  out["records"] = report.records.size();
  out["early_terminations"] = report.early_terminations;
  out["failures"] = report.failures;
  out["summaries"] = std::move(summaries);
  return out;
}

std::string records_csv(const SimReport& report) {
  const auto names = sim_names(report.config);
  std::ostringstream os;
  os.precision(17);
  os << "rep,step,test,variable,variable_index,sign,p_value,ci_low,ci_high,target,correct,null_true\n";
  for (const SimRecord& r : report.records) {
    os << r.rep << ',' << r.step << ',' << to_string(r.test) << ',' << name_of(r.variable, names) << ','
       << r.variable << ',' << r.sign << ',' << csv_real(r.p_value) << ',' << (r.ci ? csv_real(r.ci->lo) : "")
       << ',' << (r.ci ? csv_real(r.ci->hi) : "") << ',' << csv_real(r.target) << ',' << int(r.correct) << ','
       << int(r.null_true) << '\n';
  }
  return os.str();
}

SimConfig sim_config_from_json(const Json& j) {
  try {
    SimConfig c;
    c.n = get_or<std::size_t>(j, "n", c.n);
    c.p = get_or<std::size_t>(j, "p", c.p);
    if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
    if (j.contains("design")) c.design = design_from_string(j.at("design").get<std::string>());
    if (j.contains("x")) {
      const auto rows = j.at("x").get<std::vector<std::vector<double>>>();
      if (rows.empty() || rows.front().empty()) throw DataError("\"x\" must be a non-empty matrix");
      c.custom_x.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw DataError("\"x\" rows differ in length");
        for (std::size_t k = 0; k < rows[i].size(); ++k) {
          c.custom_x(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
        }
      }
      c.design = Design::Custom;
      c.n = rows.size();
      c.p = rows.front().size();
    }
    const auto beta = get_or<std::vector<double>>(j, "beta_star", {});
    if (beta.size() > c.p) throw DataError("beta_star has more than p entries");
    c.beta_star = VectorXd::Zero(static_cast<Index>(c.p));
    for (std::size_t i = 0; i < beta.size(); ++i) c.beta_star[static_cast<Index>(i)] = beta[i];
    c.sigma = get_or<double>(j, "sigma", c.sigma);
    c.n_reps = get_or<std::size_t>(j, "n_reps", c.n_reps);
    c.steps = get_or<std::size_t>(j, "steps", c.steps);
    for (const auto& t : get_or<std::vector<std::string>>(j, "tests", {"tg"})) {
      c.tests.push_back(test_from_string(t, c.method));
    }
    c.intervals = get_or<bool>(j, "intervals", c.intervals);
    c.alpha = get_or<double>(j, "alpha", c.alpha);
    if (j.contains("sided")) c.sided = sided_from_string(j.at("sided").get<std::string>());
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.threads = get_or<std::size_t>(j, "threads", c.threads);
    c.redraw_x = get_or<bool>(j, "redraw_x", c.redraw_x);
    c.max_t_sims = get_or<std::size_t>(j, "max_t_sims", c.max_t_sims);
    c.power_cutoffs = get_or<std::vector<double>>(j, "power_cutoffs", c.power_cutoffs);
    return c;
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed simulation config: ") + e.what());
  }
}

}  // namespace selinf

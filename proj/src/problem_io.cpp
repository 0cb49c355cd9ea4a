#include "coherence/problem_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace coherence {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at(const std::string& text, size_t byte, const std::string& message) {
  size_t line = 1;
  for (size_t i = 0; i + 1 < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  throw ValidationError("line " + std::to_string(line) + ": " + message);
}

std::vector<double> parse_number_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("'" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw ValidationError("'" + field + "' must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> parse_string_array(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("'" + field + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw ValidationError("'" + field + "' must contain strings only");
    out.push_back(x.get<std::string>());
  }
  return out;
}

}  // namespace

namespace {
ProblemFile parse_checked(const json& j);
}

ProblemFile parse_problem_file(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail_at(text, e.byte, e.what());
  }
  try {
    return parse_checked(j);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed problem file: ") + e.what());
  }
}

namespace {

ProblemFile parse_checked(const json& j) {
  if (!j.is_object()) throw ValidationError("problem file must be a JSON object");

  static const std::set<std::string> known = {"atoms",   "events",        "credences",
                                              "weights", "experts",       "report_events",
                                              "matrix",  "probe_values"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ValidationError("unknown field '" + key + "'");
  }

  ProblemFile pf;
  if (j.contains("matrix")) {
    const auto& m = j["matrix"];
    if (!m.is_array() || m.empty()) throw ValidationError("'matrix' must be a nonempty array");
    const size_t cols = m[0].size();
    Mat v(m.size(), cols);
    for (size_t i = 0; i < m.size(); ++i) {
      const auto row = parse_number_array(m[i], "matrix");
      if (row.size() != cols) throw ValidationError("'matrix' rows must have equal length");
      for (size_t c = 0; c < cols; ++c) v(static_cast<int>(i), static_cast<int>(c)) = row[c];
    }
    pf.matrix = std::move(v);
  }
  if (j.contains("atoms")) pf.atoms = parse_string_array(j["atoms"], "atoms");
  if (j.contains("events")) {
    if (!j["events"].is_array()) throw ValidationError("'events' must be an array");
    for (const auto& e : j["events"]) {
      if (!e.is_object() || !e.contains("name") || !e.contains("atoms"))
        throw ValidationError("each event needs 'name' and 'atoms'");
      pf.events.push_back({e["name"].get<std::string>(), parse_string_array(e["atoms"], "atoms")});
    }
  }
  if (j.contains("credences")) pf.credences = parse_number_array(j["credences"], "credences");
  if (j.contains("weights")) pf.weights = parse_number_array(j["weights"], "weights");
  if (j.contains("experts")) {
    if (!j["experts"].is_array()) throw ValidationError("'experts' must be an array");
    for (const auto& e : j["experts"]) {
      if (!e.is_object() || !e.contains("events") || !e.contains("credences"))
        throw ValidationError("each expert needs 'events' and 'credences'");
      ExpertSpec spec;
      spec.event_names = parse_string_array(e["events"], "expert events");
      spec.credences = parse_number_array(e["credences"], "expert credences");
      if (e.contains("weights")) spec.weights = parse_number_array(e["weights"], "expert weights");
      pf.experts.push_back(std::move(spec));
    }
  }
  if (j.contains("report_events"))
    pf.report_events = parse_string_array(j["report_events"], "report_events");
  if (j.contains("probe_values")) {
    const auto& pv = j["probe_values"];
    if (!pv.is_array() || pv.empty()) throw ValidationError("'probe_values' must be a nonempty array");
    for (const auto& probe : pv) {
      if (!probe.is_array()) throw ValidationError("'probe_values' must nest probe -> event -> rephrasing");
      std::vector<std::vector<double>> rows;
      for (const auto& ev : probe) rows.push_back(parse_number_array(ev, "probe_values"));
      pf.probe_values.push_back(std::move(rows));
    }
  }
  if (pf.matrix && (!pf.atoms.empty() || !pf.events.empty()))
    throw ValidationError("give either 'matrix' or 'atoms'+'events', not both");
  return pf;
}

}  // namespace

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read problem file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_problem_file(text);
}

// ---------------------------------------------------------------------------
// Canonical writer

std::string JsonWriter::format_double(double v) {
  if (v == 0.0) return "0";  // canonicalize the sign of zero
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void JsonWriter::sep() {
  if (after_key_) {
    after_key_ = false;
    return;
  }
  if (!fresh_) out_ << ',';
  fresh_ = false;
}

void JsonWriter::key(const std::string& k) {
  sep();
  out_ << '"' << k << "\":";
  after_key_ = true;
}

void JsonWriter::value(double v) {
  sep();
  out_ << format_double(v);
}

void JsonWriter::value(long v) {
  sep();
  out_ << v;
}

void JsonWriter::value(bool v) {
  sep();
  out_ << (v ? "true" : "false");
}

void JsonWriter::value(const std::string& s) {
  sep();
  out_ << '"';
  for (char c : s) {
    switch (c) {
      case '"': out_ << "\\\""; break;
      case '\\': out_ << "\\\\"; break;
      case '\n': out_ << "\\n"; break;
      case '\t': out_ << "\\t"; break;
      default: out_ << c;
    }
  }
  out_ << '"';
}

void JsonWriter::number_array(const Vec& v) {
  begin_array();
  for (int i = 0; i < v.size(); ++i) value(v[i]);
  end_array();
}

std::string serialize_problem_file(const ProblemFile& pf) {
  JsonWriter w;
  w.begin_object();
  if (pf.matrix) {
    w.key("matrix");
    w.begin_array();
    for (int i = 0; i < pf.matrix->rows(); ++i) w.number_array(pf.matrix->row(i).transpose());
    w.end_array();
  } else {
    w.key("atoms");
    w.begin_array();
    for (const auto& a : pf.atoms) w.value(a);
    w.end_array();
    w.key("events");
    w.begin_array();
    for (const auto& e : pf.events) {
      w.begin_object();
      w.key("name");
      w.value(e.name);
      w.key("atoms");
      w.begin_array();
      for (const auto& a : e.atoms) w.value(a);
      w.end_array();
      w.end_object();
    }
    w.end_array();
  }
  if (!pf.credences.empty()) {
    w.key("credences");
    w.begin_array();
    for (double c : pf.credences) w.value(c);
    w.end_array();
  }
  if (!pf.weights.empty()) {
    w.key("weights");
    w.begin_array();
    for (double x : pf.weights) w.value(x);
    w.end_array();
  }
  if (!pf.experts.empty()) {
    w.key("experts");
    w.begin_array();
    for (const auto& e : pf.experts) {
      w.begin_object();
      w.key("events");
      w.begin_array();
      for (const auto& name : e.event_names) w.value(name);
      w.end_array();
      w.key("credences");
      w.begin_array();
      for (double c : e.credences) w.value(c);
      w.end_array();
      if (!e.weights.empty()) {
        w.key("weights");
        w.begin_array();
        for (double x : e.weights) w.value(x);
        w.end_array();
      }
      w.end_object();
    }
    w.end_array();
  }
  if (!pf.report_events.empty()) {
    w.key("report_events");
    w.begin_array();
    for (const auto& name : pf.report_events) w.value(name);
    w.end_array();
  }
  if (!pf.probe_values.empty()) {
    w.key("probe_values");
    w.begin_array();
    for (const auto& probe : pf.probe_values) {
      w.begin_array();
      for (const auto& row : probe) {
        w.begin_array();
        for (double x : row) w.value(x);
        w.end_array();
      }
      w.end_array();
    }
    w.end_array();
  }
  w.end_object();
  return w.str();
}

// ---------------------------------------------------------------------------
// Conversions

namespace {

std::vector<double> clamped(std::vector<double> q, double eps) {
  if (eps > 0.0)
    for (double& x : q) x = std::min(std::max(x, eps), 1.0 - eps);
  return q;
}

}  // namespace

CredenceBase to_base(const ProblemFile& pf, double clamp_epsilon) {
  if (pf.matrix) {
    if (pf.credences.empty()) throw ValidationError("'credences' is required with 'matrix'");
    const auto q = clamped(pf.credences, clamp_epsilon);
    if (static_cast<int>(q.size()) != pf.matrix->rows())
      throw ValidationError("credence count must match the matrix row count");
    Vec qv = Eigen::Map<const Vec>(q.data(), static_cast<Eigen::Index>(q.size()));
    Vec wv;
    if (!pf.weights.empty()) {
      if (pf.weights.size() != q.size())
        throw ValidationError("weight count must match the matrix row count");
      wv = Eigen::Map<const Vec>(pf.weights.data(), static_cast<Eigen::Index>(pf.weights.size()));
    }
    return make_base(*pf.matrix, std::move(qv), std::move(wv));
  }
  if (pf.atoms.empty() || pf.events.empty())
    throw ValidationError("problem file needs 'atoms' and 'events' (or 'matrix')");
  if (pf.credences.size() != pf.events.size())
    throw ValidationError("'credences' must give one value per event");
  std::vector<std::pair<std::string, std::vector<std::string>>> events;
  for (const auto& e : pf.events) events.emplace_back(e.name, e.atoms);
  return build_base(pf.atoms, events, clamped(pf.credences, clamp_epsilon), pf.weights);
}

std::vector<CredenceBase> to_expert_bases(const ProblemFile& pf, double clamp_epsilon) {
  if (!pf.has_experts()) throw ValidationError("problem file declares no experts");
  if (pf.atoms.empty() || pf.events.empty())
    throw ValidationError("expert files need shared 'atoms' and 'events'");

  // The shared atom space must stay un-merged so all experts line up: build
  // each expert over the declared atoms directly.
  std::vector<CredenceBase> bases;
  for (const auto& expert : pf.experts) {
    if (expert.event_names.empty()) throw ValidationError("expert with no events");
    if (expert.event_names.size() != expert.credences.size())
      throw ValidationError("expert credence count must match its event count");
    Mat v = Mat::Zero(static_cast<Eigen::Index>(expert.event_names.size()),
                      static_cast<Eigen::Index>(pf.atoms.size()));
    for (size_t i = 0; i < expert.event_names.size(); ++i) {
      const auto it = std::find_if(pf.events.begin(), pf.events.end(),
                                   [&](const NamedEvent& e) { return e.name == expert.event_names[i]; });
      if (it == pf.events.end())
        throw ValidationError("expert references unknown event '" + expert.event_names[i] + "'");
      for (const auto& atom : it->atoms) {
        const auto at = std::find(pf.atoms.begin(), pf.atoms.end(), atom);
        if (at == pf.atoms.end())
          throw ValidationError("event '" + it->name + "' uses unknown atom '" + atom + "'");
        v(static_cast<Eigen::Index>(i), at - pf.atoms.begin()) = 1.0;
      }
    }
    const auto q = clamped(expert.credences, clamp_epsilon);
    Vec qv = Eigen::Map<const Vec>(q.data(), static_cast<Eigen::Index>(q.size()));
    Vec wv;
    if (!expert.weights.empty()) {
      if (expert.weights.size() != q.size())
        throw ValidationError("expert weight count must match its event count");
      wv = Eigen::Map<const Vec>(expert.weights.data(),
                                 static_cast<Eigen::Index>(expert.weights.size()));
    } else {
      wv = Vec::Ones(static_cast<Eigen::Index>(q.size()));
    }
    AtomSpace atoms{pf.atoms};
    bases.push_back(CredenceBase{std::move(atoms), std::move(v), std::move(qv), std::move(wv)});
    bases.back().validate();
  }
  return bases;
}

std::vector<std::pair<std::string, EventVector>> report_events(const ProblemFile& pf) {
  std::vector<std::pair<std::string, EventVector>> out;
  std::vector<std::string> names = pf.report_events;
  if (names.empty()) {
    std::set<std::string> seen;
    for (const auto& expert : pf.experts)
      for (const auto& n : expert.event_names)
        if (seen.insert(n).second) names.push_back(n);
    if (names.empty())
      for (const auto& e : pf.events) names.push_back(e.name);
  }
  for (const auto& name : names) {
    const auto it = std::find_if(pf.events.begin(), pf.events.end(),
                                 [&](const NamedEvent& e) { return e.name == name; });
    if (it == pf.events.end())
      throw ValidationError("report event '" + name + "' is not declared");
    Vec v = Vec::Zero(static_cast<Eigen::Index>(pf.atoms.size()));
    for (const auto& atom : it->atoms) {
      const auto at = std::find(pf.atoms.begin(), pf.atoms.end(), atom);
      if (at == pf.atoms.end())
        throw ValidationError("event '" + name + "' uses unknown atom '" + atom + "'");
      v[at - pf.atoms.begin()] = 1.0;
    }
    out.emplace_back(name, EventVector{std::move(v)});
  }
  return out;
}

ProbeCredences to_probe_credences(const ProblemFile& pf, double clamp_epsilon) {
  if (pf.probe_values.empty()) throw ValidationError("problem file has no 'probe_values'");
  const CredenceBase shape = [&] {
    // Reuse the event parsing; credences are irrelevant here.
    ProblemFile tmp = pf;
    tmp.credences.assign(pf.matrix ? static_cast<size_t>(pf.matrix->rows()) : pf.events.size(), 0.5);
    tmp.weights.clear();
    return to_base(tmp);
  }();
  ProbeCredences pc;
  pc.events = shape.events;
  pc.probes = static_cast<int>(pf.probe_values.size());
  const int n = pc.num_events();
  int rephrasings = -1;
  for (const auto& probe : pf.probe_values) {
    if (static_cast<int>(probe.size()) != n)
      throw ValidationError("each probe needs one value row per event");
    for (const auto& row : probe) {
      if (rephrasings < 0) rephrasings = static_cast<int>(row.size());
      if (static_cast<int>(row.size()) != rephrasings)
        throw ValidationError("every event needs the same number of rephrasings");
    }
  }
  pc.rephrasings = std::max(rephrasings, 1);
  for (const auto& probe : pf.probe_values)
    for (const auto& row : probe)
      for (double x : row) {
        if (clamp_epsilon > 0.0) x = std::min(std::max(x, clamp_epsilon), 1.0 - clamp_epsilon);
        pc.values.push_back(x);
      }
  pc.validate();
  return pc;
}

}  // namespace coherence

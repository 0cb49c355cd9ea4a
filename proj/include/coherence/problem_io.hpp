#pragma once

#include "coherence/credence.hpp"
#include "coherence/elicitation.hpp"

#include <sstream>

namespace coherence {

struct NamedEvent {
  std::string name;
  std::vector<std::string> atoms;
};

struct ExpertSpec {
  std::vector<std::string> event_names;
  std::vector<double> credences;
  std::vector<double> weights;  // optional, empty = all ones
};

/// The on-disk problem description. Either named events over declared atoms or
/// an explicit 0/1 matrix; experts / probe values extend the same file.
struct ProblemFile {
  std::vector<std::string> atoms;
  std::vector<NamedEvent> events;
  std::vector<double> credences;
  std::vector<double> weights;
  std::vector<ExpertSpec> experts;
  std::vector<std::string> report_events;
  // probe credences, values[probe][event][rephrasing]
  std::vector<std::vector<std::vector<double>>> probe_values;

  std::optional<Mat> matrix;  // alternative to atoms/events

  bool has_experts() const { return !experts.empty(); }
};

/// Parses and validates; error messages carry the 1-based input line.
ProblemFile parse_problem_file(const std::string& text);
ProblemFile read_problem_file(const std::string& path);

/// Canonical form: fixed field order, 17 significant digits, 2-space indent.
/// parse -> serialize is byte-stable on canonical input.
std::string serialize_problem_file(const ProblemFile& pf);

/// The single-base view (validation errors when fields are missing).
CredenceBase to_base(const ProblemFile& pf, double clamp_epsilon = 0.0);
/// One base per expert over the shared atom space.
std::vector<CredenceBase> to_expert_bases(const ProblemFile& pf, double clamp_epsilon = 0.0);
/// Requested report events as vectors over the shared atoms (falls back to all
/// distinct stated events when the file names none).
std::vector<std::pair<std::string, EventVector>> report_events(const ProblemFile& pf);
ProbeCredences to_probe_credences(const ProblemFile& pf, double clamp_epsilon = 0.0);

/// Minimal deterministic JSON writer: insertion order, "%.17g" numbers.
class JsonWriter {
 public:
  std::string str() const { return out_.str(); }

  void begin_object() { sep(); out_ << '{'; fresh_ = true; depth_++; }
  void end_object() { out_ << '}'; fresh_ = false; depth_--; }
  void begin_array() { sep(); out_ << '['; fresh_ = true; depth_++; }
  void end_array() { out_ << ']'; fresh_ = false; depth_--; }
  void key(const std::string& k);
  void value(double v);
  void value(long v);
  void value(int v) { value(static_cast<long>(v)); }
  void value(bool v);
  void value(const std::string& s);
  void value(const char* s) { value(std::string(s)); }
  void number_array(const Vec& v);

  static std::string format_double(double v);

 private:
  void sep();
  std::ostringstream out_;
  bool fresh_ = true;
  bool after_key_ = false;
  int depth_ = 0;
};

}  // namespace coherence

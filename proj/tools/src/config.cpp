#include "sphereflow/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace sphereflow::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"domain", {"dim", "lengths", "sizes"}},
      {"flow",
       {"p", "integrator", "dt", "T", "renormalize", "multiplier", "sample_every", "stop_residual",
        "fixed_point_tol", "fixed_point_cap", "cg_tol", "cg_max_iterations", "fractional_norms",
        "frac_alpha", "frac_beta", "seed", "initial", "initial_norm", "stationary_tol"}},
      {"cutoff", {"K", "lambda1"}},
      {"yosida", {"mu"}},
      {"output", {"snapshots", "plotdata"}},
  };
  return s;
}

class Reader {
 public:
  Reader(const std::map<std::string, Section>& sections, const std::string& source)
      : sections_(sections), source_(source) {}

  bool has_section(const std::string& name) const { return sections_.count(name) != 0; }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  [[noreturn]] void fail(const Entry& e, const std::string& section, const std::string& key,
                         const std::string& what) const {
    throw ConfigError(source_, e.line, section + "." + key, what);
  }

  void number(const std::string& section, const std::string& key, double& out) const {
    if (const Entry* e = find(section, key)) {
      const auto v = to_double(e->value);
      if (!v) fail(*e, section, key, "expected a number, got '" + e->value + "'");
      out = *v;
    }
  }

  void count(const std::string& section, const std::string& key, std::size_t& out) const {
    if (const Entry* e = find(section, key)) {
      const auto v = to_uint(e->value);
      if (!v) fail(*e, section, key, "expected a nonnegative integer, got '" + e->value + "'");
      out = static_cast<std::size_t>(*v);
    }
  }

  void flag(const std::string& section, const std::string& key, bool& out) const {
    if (const Entry* e = find(section, key)) {
      std::string v = e->value;
      std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
      if (v == "true" || v == "on" || v == "yes" || v == "1") {
        out = true;
      } else if (v == "false" || v == "off" || v == "no" || v == "0") {
        out = false;
      } else {
        fail(*e, section, key, "expected a boolean, got '" + e->value + "'");
      }
    }
  }

 private:
  const std::map<std::string, Section>& sections_;
  const std::string& source_;
};

std::vector<std::size_t> parse_mode_index(std::string_view s) {
  std::vector<std::size_t> idx;
  for (auto part : split(s, 'x')) {
    const auto v = to_uint(part);
    if (!v || *v == 0) throw InvalidArgument("mode index entries must be positive integers");
    idx.push_back(static_cast<std::size_t>(*v));
  }
  return idx;
}

InitialSpec parse_initial(std::string_view text) {
  InitialSpec spec;
  text = trim(text);
  const std::size_t space = text.find_first_of(" \t");
  const std::string_view kind = text.substr(0, space);
  const std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(text.substr(space));
  if (kind == "modes") {
    spec.kind = InitialKind::modes;
    std::istringstream in{std::string(rest)};
    std::string term;
    while (in >> term) {
      const std::size_t colon = term.find(':');
      ModeTerm m;
      m.index = parse_mode_index(std::string_view(term).substr(0, colon));
      if (colon != std::string::npos) {
        const auto c = to_double(std::string_view(term).substr(colon + 1));
        if (!c) throw InvalidArgument("bad mode coefficient in '" + term + "'");
        m.coefficient = *c;
      }
      spec.modes.push_back(std::move(m));
    }
    if (spec.modes.empty()) throw InvalidArgument("'modes' needs at least one term, e.g. modes 1:0.8 2:0.6");
  } else if (kind == "random") {
    spec.kind = InitialKind::random;
    if (rest.empty() || rest == "low_pass") {
      spec.population = FieldPopulation::low_pass;
    } else if (rest == "rough") {
      spec.population = FieldPopulation::rough;
    } else {
      throw InvalidArgument("random population must be low_pass or rough");
    }
  } else if (kind == "snapshot") {
    spec.kind = InitialKind::snapshot;
    if (rest.empty()) throw InvalidArgument("'snapshot' needs a path");
    spec.snapshot = std::string(rest);
  } else {
    throw InvalidArgument("initial condition must start with modes, random or snapshot");
  }
  return spec;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& key,
                         const std::string& what)
    : InvalidArgument(source + ":" + std::to_string(line) + ": " + key + ": " + what),
      line_(line),
      key_(key) {}

Domain DomainSpec::build() const { return make_domain(dim, lengths, sizes); }

double parse_length(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  const std::size_t pi = s.find("pi");
  if (pi == std::string::npos) {
    const auto v = to_double(s);
    if (!v) throw InvalidArgument("bad length '" + std::string(text) + "'");
    return *v;
  }
  std::string_view head = std::string_view(s).substr(0, pi);
  std::string_view tail = std::string_view(s).substr(pi + 2);
  if (!head.empty() && head.back() == '*') head.remove_suffix(1);
  double value = std::numbers::pi;
  if (!head.empty()) {
    const auto c = to_double(head);
    if (!c) throw InvalidArgument("bad length '" + std::string(text) + "'");
    value *= *c;
  }
  if (!tail.empty()) {
    if (tail.front() != '/') throw InvalidArgument("bad length '" + std::string(text) + "'");
    const auto d = to_double(tail.substr(1));
    if (!d || *d == 0.0) throw InvalidArgument("bad length '" + std::string(text) + "'");
    value /= *d;
  }
  return value;
}

RunConfig parse_config_text(std::string_view text, const std::string& source_name) {
  std::map<std::string, Section> sections;
  std::string current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const std::size_t c = line.find_first_of(";#"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source_name, line_no, std::string(line), "unterminated section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (schema().count(current) == 0) throw ConfigError(source_name, line_no, current, "unknown section");
      sections[current];
    } else {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(source_name, line_no, std::string(line), "expected key = value");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (current.empty()) throw ConfigError(source_name, line_no, key, "key outside of a section");
      if (schema().at(current).count(key) == 0) {
        throw ConfigError(source_name, line_no, current + "." + key, "unknown key");
      }
      auto& section = sections[current];
      if (section.count(key) != 0) throw ConfigError(source_name, line_no, current + "." + key, "duplicate key");
      section[key] = Entry{value, line_no};
    }
    if (end == text.size()) break;
  }

  const Reader r(sections, source_name);
  RunConfig cfg;
  cfg.source_text = std::string(text);
  cfg.source_name = source_name;

  std::size_t dim = 1;
  r.count("domain", "dim", dim);
  cfg.domain.dim = static_cast<int>(dim);
  if (const Entry* e = r.find("domain", "lengths")) {
    try {
      for (auto part : split(e->value, ',')) cfg.domain.lengths.push_back(parse_length(part));
    } catch (const InvalidArgument& ex) {
      r.fail(*e, "domain", "lengths", ex.what());
    }
  } else {
    cfg.domain.lengths.assign(dim, std::numbers::pi);
  }
  if (const Entry* e = r.find("domain", "sizes")) {
    for (auto part : split(e->value, ',')) {
      const auto v = to_uint(part);
      if (!v) r.fail(*e, "domain", "sizes", "expected positive integers, got '" + e->value + "'");
      cfg.domain.sizes.push_back(static_cast<std::size_t>(*v));
    }
  } else {
    cfg.domain.sizes.assign(dim, 63);
  }
  if (cfg.domain.lengths.size() == 1 && dim > 1) cfg.domain.lengths.assign(dim, cfg.domain.lengths[0]);
  if (cfg.domain.sizes.size() == 1 && dim > 1) cfg.domain.sizes.assign(dim, cfg.domain.sizes[0]);

  FlowConfig& f = cfg.flow;
  r.number("flow", "p", f.p);
  if (const Entry* e = r.find("flow", "integrator")) {
    const auto v = parse_integrator(e->value);
    if (!v) r.fail(*e, "flow", "integrator", "expected projected_euler, imex, backward_euler or etd");
    f.integrator = *v;
  }
  r.number("flow", "dt", f.dt);
  r.number("flow", "T", f.T);
  r.flag("flow", "renormalize", f.renormalize);
  if (const Entry* e = r.find("flow", "multiplier")) {
    const auto v = parse_multiplier_form(e->value);
    if (!v) r.fail(*e, "flow", "multiplier", "expected projected or closed_form");
    f.multiplier = *v;
  }
  r.count("flow", "sample_every", f.sample_every);
  if (r.find("flow", "stop_residual") != nullptr) {
    double v = 0.0;
    r.number("flow", "stop_residual", v);
    f.stop_residual = v;
  }
  r.number("flow", "fixed_point_tol", f.fixed_point_tol);
  r.count("flow", "fixed_point_cap", f.fixed_point_cap);
  r.number("flow", "cg_tol", f.linear_solver.rel_tol);
  r.count("flow", "cg_max_iterations", f.linear_solver.max_iterations);
  r.flag("flow", "fractional_norms", f.fractional_norms);
  r.number("flow", "frac_alpha", f.frac_alpha);
  r.number("flow", "frac_beta", f.frac_beta);
  std::size_t seed = 0;
  r.count("flow", "seed", seed);
  f.seed = seed;
  r.number("flow", "stationary_tol", cfg.stationary_tol);
  if (const Entry* e = r.find("flow", "initial")) {
    try {
      cfg.initial = parse_initial(e->value);
    } catch (const InvalidArgument& ex) {
      r.fail(*e, "flow", "initial", ex.what());
    }
  } else {
    cfg.initial.modes = {ModeTerm{std::vector<std::size_t>(dim, 1), 1.0}};
  }
  r.number("flow", "initial_norm", cfg.initial.norm);

  if (r.has_section("cutoff")) {
    const Entry* k = r.find("cutoff", "K");
    if (k == nullptr) throw ValidationError("[cutoff] requires K");
    CutoffParams params;
    r.number("cutoff", "K", params.K);
    params.p = f.p;
    if (const Entry* e = r.find("cutoff", "lambda1")) {
      if (e->value == "discrete") {
        cfg.cutoff_lambda = CutoffLambda::discrete;
      } else if (e->value == "continuum") {
        cfg.cutoff_lambda = CutoffLambda::continuum;
      } else {
        cfg.cutoff_lambda = CutoffLambda::explicit_value;
        r.number("cutoff", "lambda1", params.lambda1);
      }
    }
    f.cutoff = params;
  }
  if (r.has_section("yosida")) {
    if (r.find("yosida", "mu") == nullptr) throw ValidationError("[yosida] requires mu");
    double mu = 0.0;
    r.number("yosida", "mu", mu);
    f.yosida_mu = mu;
  }
  r.flag("output", "snapshots", cfg.output.snapshots);
  r.flag("output", "plotdata", cfg.output.plotdata);

  validate(cfg);
  if (f.cutoff && cfg.cutoff_lambda != CutoffLambda::explicit_value) {
    const Domain d = cfg.domain.build();
    f.cutoff->lambda1 = cfg.cutoff_lambda == CutoffLambda::discrete ? d.lambda1_discrete() : d.lambda1();
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

void validate(const RunConfig& c) {
  const auto& d = c.domain;
  if (d.dim < 1 || d.dim > 3) throw ValidationError("domain.dim must be 1, 2 or 3");
  if (d.lengths.size() != static_cast<std::size_t>(d.dim)) {
    throw ValidationError("domain.lengths needs one entry per axis");
  }
  if (d.sizes.size() != static_cast<std::size_t>(d.dim)) throw ValidationError("domain.sizes needs one entry per axis");
  for (double L : d.lengths) {
    if (!(L > 0.0)) throw ValidationError("domain.lengths must be positive");
  }
  for (std::size_t n : d.sizes) {
    if (n < 2) throw ValidationError("domain.sizes must be at least 2");
  }
  const FlowConfig& f = c.flow;
  if (!(f.p >= 2.0)) throw ValidationError("p ≥ 2 required");
  if (!(f.T > 0.0)) throw ValidationError("flow.T must be positive");
  if (!(f.dt > 0.0)) throw ValidationError("flow.dt must be positive");
  if (!(f.dt < f.T)) throw ValidationError("flow.flow.dt must be smaller than flow.T");
  if (f.sample_every == 0) throw ValidationError("flow.sample_every must be at least 1");
  if (f.stop_residual && !(*f.stop_residual > 0.0)) throw ValidationError("flow.stop_residual must be positive");
  if (!(c.stationary_tol > 0.0)) throw ValidationError("flow.stationary_tol must be positive");
  if (!(c.initial.norm > 0.0)) throw ValidationError("flow.initial_norm must be positive");
  if (f.cutoff) {
    if (!(f.cutoff->K > 0.0)) throw ValidationError("cutoff.K must be positive");
    if (c.cutoff_lambda == CutoffLambda::explicit_value && !(f.cutoff->lambda1 > 0.0)) {
      throw ValidationError("cutoff.lambda1 must be positive");
    }
  } else if (c.initial.norm != 1.0) {
    throw ValidationError("flow.initial_norm other than 1 requires [cutoff]");
  }
  if (f.yosida_mu && !(*f.yosida_mu > 0.0)) throw ValidationError("yosida.mu must be positive");
  if (f.cutoff && f.yosida_mu) throw ValidationError("[cutoff] and [yosida] are mutually exclusive");
  if (c.initial.kind == InitialKind::modes) {
    for (const auto& m : c.initial.modes) {
      if (m.index.size() != static_cast<std::size_t>(d.dim)) {
        throw ValidationError("flow.initial mode indices need one entry per axis (e.g. 1x2)");
      }
      for (int a = 0; a < d.dim; ++a) {
        if (m.index[static_cast<std::size_t>(a)] > d.sizes[static_cast<std::size_t>(a)]) {
          throw ValidationError("flow.initial mode index exceeds the grid size");
        }
      }
    }
  }
  try {
    FlowConfig check = f;
    if (check.cutoff) check.cutoff->lambda1 = 1.0;
    check.validate();
  } catch (const InvalidArgument& e) {
    throw ValidationError(e.what());
  }
}

std::string to_string(const InitialSpec& initial) {
  std::ostringstream out;
  switch (initial.kind) {
    case InitialKind::modes: {
      out << "modes";
      for (const auto& m : initial.modes) {
        out << ' ';
        for (std::size_t i = 0; i < m.index.size(); ++i) out << (i ? "x" : "") << m.index[i];
        char buf[32];
        std::snprintf(buf, sizeof buf, ":%.17g", m.coefficient);
        out << buf;
      }
      break;
    }
    case InitialKind::random:
      out << "random " << (initial.population == FieldPopulation::low_pass ? "low_pass" : "rough");
      break;
    case InitialKind::snapshot:
      out << "snapshot " << initial.snapshot.string();
      break;
  }
  return out.str();
}

}  // namespace sphereflow::cli

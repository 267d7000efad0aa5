#include "phaseshift/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "phaseshift/errors.hpp"
#include "phaseshift/forward_solver.hpp"
#include "phaseshift/objective.hpp"
#include "phaseshift/ode_oracle.hpp"

namespace phaseshift::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& where, std::string_view field, const std::string& what) {
  std::string msg = where.empty() ? std::string() : where + ": ";
  msg += std::string(field) + ": " + what;
  throw ValidationError(msg);
}

double to_double(std::string_view text, const std::string& where, std::string_view field) {
  auto s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    bad(where, field, "expected a finite number, got '" + std::string(trim(text)) + "'");
  return v;
}

double positive(std::string_view text, const std::string& where, std::string_view field) {
  double v = to_double(text, where, field);
  if (!(v > 0.0)) bad(where, field, "must be positive, got " + std::string(trim(text)));
  return v;
}

long long to_integer(std::string_view text, const std::string& where, std::string_view field,
                     long long lo, long long hi) {
  auto s = trim(text);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    bad(where, field, "expected an integer, got '" + std::string(s) + "'");
  if (v < lo || v > hi)
    bad(where, field,
        "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
            std::string(s));
  return v;
}

std::uint64_t to_seed(std::string_view text, const std::string& where) {
  auto s = trim(text);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.remove_prefix(2);
    base = 16;
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    bad(where, "seed", "expected an unsigned integer or 'time', got '" +
                           std::string(trim(text)) + "'");
  return v;
}

bool to_bool(std::string_view text, const std::string& where, std::string_view field) {
  auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(where, field, "expected true or false, got '" + std::string(s) + "'");
}

// One layer "r,v" appended to c, keeping radii strictly increasing.
void append_layer(Configuration& c, std::string_view text, const std::string& where,
                  std::string_view field, char sep) {
  auto pos = text.find(sep);
  if (pos == std::string_view::npos)
    bad(where, field, std::string("expected r") + sep + "v, got '" + std::string(trim(text)) + "'");
  double r = to_double(text.substr(0, pos), where, field);
  double v = to_double(text.substr(pos + 1), where, field);
  if (!(r > 0.0)) bad(where, field, "radius must be positive");
  if (!c.radii.empty() && !(r > c.radii.back()))
    bad(where, field, "radii must increase (" + format_exact(r) + " after " +
                          format_exact(c.radii.back()) + ")");
  c.radii.push_back(r);
  c.values.push_back(v);
}

std::string row(int l, const std::vector<std::string>& cells, int width) {
  std::ostringstream os;
  os << std::setw(4) << l;
  for (const auto& c : cells) os << "  " << std::setw(width) << c;
  return os.str();
}

std::string csv_from(const PhaseShiftTable& t) {
  std::string s = "l,delta\n";
  for (int l = 0; l <= t.l_max; ++l)
    s += std::to_string(l) + "," + format_exact(t.delta[static_cast<std::size_t>(l)]) + "\n";
  return s;
}

std::string read_text(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(std::string(what) + ": cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Target shifts from a CSV "l,delta" with rows l = 0, 1, 2, ... in order.
std::vector<double> read_shift_csv(const std::filesystem::path& path) {
  auto text = read_text(path, "target_shifts");
  std::vector<double> delta;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(n);
    auto comma = s.find(',');
    if (comma == std::string_view::npos) bad(where, "target_shifts", "expected l,delta");
    auto lpart = trim(s.substr(0, comma));
    if (lpart == "l") continue;  // header
    auto l = to_integer(lpart, where, "l", 0, 100000);
    if (l != static_cast<long long>(delta.size()))
      bad(where, "l", "expected " + std::to_string(delta.size()));
    delta.push_back(to_double(s.substr(comma + 1), where, "delta"));
  }
  return delta;
}

Potential potential_of(const Configuration& c, std::string_view what) {
  try {
    return c.to_potential();
  } catch (const Error& e) {
    throw ValidationError(std::string(what) + ": " + e.what());
  }
}

void require_k(const RunConfig& cfg) {
  if (!cfg.k_set) throw ValidationError("k: required (set `k = ...` or pass --k)");
}

Potential candidate_of(const RunConfig& cfg) {
  if (cfg.from_results.empty()) return potential_of(cfg.layers, "layers");
  auto entries = read_results(cfg.from_results);
  if (cfg.rank < 1 || cfg.rank > entries.size())
    throw ValidationError("rank: " + std::to_string(cfg.rank) + " out of range, '" +
                          cfg.from_results + "' has " + std::to_string(entries.size()) +
                          " entries");
  return potential_of(entries[cfg.rank - 1].config, "from_results");
}

ShiftTarget target_of(const RunConfig& cfg, const std::optional<Potential>& original) {
  const double coupling = cfg.effective_coupling();
  ShiftTarget t;
  try {
    if (original) {
      if (original->empty())
        throw ValidationError("target_layers: the original potential is identically zero");
      return make_target(*original, cfg.k, cfg.l_start, cfg.l_end, coupling);
    }
    t.k = cfg.k;
    t.delta_tilde = read_shift_csv(cfg.target_shifts);
    t.l_start = cfg.l_start;
    t.l_end = cfg.l_end;
    t.coupling = coupling;
    t.validate();
  } catch (const DomainError& e) {
    throw ValidationError(std::string("target: ") + e.what());
  }
  return t;
}

void check_common(const RunConfig& cfg) {
  require_k(cfg);
  if (cfg.l_start > cfg.l_end)
    throw ValidationError("l_start: must not exceed l_end (" + std::to_string(cfg.l_start) +
                          " > " + std::to_string(cfg.l_end) + ")");
}

std::string phi_text(double v, int precision) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(std::max(8, precision) - 1) << v;
  return os.str();
}

int cmd_shifts(const RunConfig& cfg, std::ostream& out) {
  require_k(cfg);
  Potential p = potential_of(cfg.layers, "layers");
  OdeSettings ode;
  ode.step_count = cfg.ode_steps;
  if (cfg.method == Method::ode) {
    try {
      ode.validate();
    } catch (const Error& e) {
      throw ValidationError(std::string("ode_steps: ") + e.what());
    }
  }

  const double coupling = cfg.effective_coupling();
  PhaseShiftTable table{cfg.k, cfg.l_max, {}};
  std::optional<PhaseShiftTable> matrix;
  std::string matrix_error;
  if (cfg.method == Method::matrix) {
    table = phase_shift_table(p, cfg.k, cfg.l_max, coupling);
  } else {
    for (int l = 0; l <= cfg.l_max; ++l)
      table.delta.push_back(phase_shift_ode(p, cfg.k, l, ode, coupling));
    try {
      matrix = phase_shift_table(p, cfg.k, cfg.l_max, coupling);
    } catch (const Error& e) {
      matrix_error = e.what();
    }
  }

  std::string report;
  const int width = cfg.precision + 7;
  report += "   l  " + std::string(static_cast<std::size_t>(std::max(0, width - 10)), ' ') +
            "delta(k,l)\n";
  for (int l = 0; l <= cfg.l_max; ++l)
    report += row(l, {format_fortran(table.delta[static_cast<std::size_t>(l)], cfg.precision)},
                  width) +
              "\n";
  if (cfg.method == Method::ode) {
    if (matrix) {
      double worst = 0.0;
      for (int l = 0; l <= cfg.l_max; ++l) {
        auto i = static_cast<std::size_t>(l);
        worst = std::max(worst, std::abs(table.delta[i] - matrix->delta[i]));
      }
      report += "# max |ode - matrix| = " + format_fortran(worst, 3) + "\n";
    } else {
      report += "# max |ode - matrix| unavailable: " + matrix_error + "\n";
    }
  }
  if (!cfg.csv.empty()) write_file_atomic(cfg.csv, csv_from(table));
  out << report;
  return 0;
}

int cmd_phi(const RunConfig& cfg, std::ostream& out) {
  check_common(cfg);
  Potential candidate = candidate_of(cfg);
  std::optional<Potential> original;
  if (cfg.target_layers_set) {
    original = potential_of(cfg.target_layers, "target_layers");
  } else if (cfg.target_shifts.empty()) {
    throw ValidationError("target: give target_layer lines, --target-layers or target_shifts");
  }
  ShiftTarget target = target_of(cfg, original);

  out << "phi = " << phi_text(phi(candidate, target), cfg.precision) << "\n";
  return 0;
}

int cmd_search(const RunConfig& cfg, std::ostream& out) {
  check_common(cfg);
  std::optional<Potential> original;
  if (cfg.target_layers_set) {
    original = potential_of(cfg.target_layers, "target_layers");
  } else if (cfg.target_shifts.empty()) {
    throw ValidationError("target: give target_layer lines, --target-layers or target_shifts");
  }
  SearchParams params = cfg.search;
  if (cfg.seed_from_time)
    params.seed = static_cast<std::uint64_t>(
        std::chrono::system_clock::now().time_since_epoch().count());
  try {
    params.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("search: ") + e.what());
  }
  if (cfg.output.empty()) throw ValidationError("output: empty path");
  ShiftTarget target = target_of(cfg, original);

  std::ostringstream header;
  header << "# seed=0x" << std::hex << params.seed << std::dec << " L=" << params.batch_size
         << " gamma=" << format_exact(params.gamma) << " k=" << format_exact(cfg.k)
         << " l_start=" << cfg.l_start << " l_end=" << cfg.l_end
         << " coupling=" << format_exact(target.coupling) << " m_max=" << params.adm.m_max
         << " R=" << format_exact(params.adm.support_radius)
         << " q_low=" << format_exact(params.adm.q_low)
         << " q_high=" << format_exact(params.adm.q_high)
         << " eps_r=" << format_exact(params.local.eps_r);

  SearchOutcome outcome = reduced_random_search(params, target);
  write_file_atomic(cfg.output, format_results(outcome, header.str()));

  out << "seed         0x" << std::hex << params.seed << std::dec << "\n";
  out << "sample       " << outcome.sample_size << " of " << params.batch_size << "\n";
  out << "evaluations  " << outcome.evaluations << "\n";
  out << "minima       " << outcome.minima.size() << "\n";
  out << "failures     " << outcome.failures.size() << "\n";
  out << std::fixed << std::setprecision(2) << "wall time    " << outcome.wall_time << " s\n";
  out.unsetf(std::ios::floatfield);
  out << "results      " << cfg.output << "\n\n";
  out << "rank  " << std::setw(cfg.precision + 7) << "phi" << "  M  layers\n";
  const std::size_t shown = std::min<std::size_t>(10, outcome.minima.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& m = outcome.minima[i];
    std::string layers;
    for (std::size_t j = 0; j < m.config.layers(); ++j) {
      if (j) layers += ",";
      layers += format_fortran(m.config.radii[j], cfg.precision) + ":" +
                format_fortran(m.config.values[j], cfg.precision);
    }
    out << std::setw(4) << i + 1 << "  " << std::setw(cfg.precision + 7)
        << format_fortran(m.phi, cfg.precision) << "  " << m.config.layers() << "  " << layers
        << "\n";
  }
  return 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
  check_common(cfg);
  Potential candidate = candidate_of(cfg);
  if (!cfg.target_layers_set)
    throw ValidationError("target_layers: compare needs the original potential");
  Potential original = potential_of(cfg.target_layers, "target_layers");
  ShiftTarget target = target_of(cfg, original);
  const double r_max = std::max({cfg.search.adm.support_radius, candidate.support_radius(),
                                 original.support_radius()});
  if (!(r_max > 0.0)) throw ValidationError("R: must be positive");

  const std::size_t n = 1000;
  auto qc = sample_profile(candidate, r_max, n);
  auto qo = sample_profile(original, r_max, n);
  std::string profile = "r,q_candidate,q_original\n";
  for (std::size_t i = 0; i < n; ++i) {
    double r = r_max * static_cast<double>(i) / static_cast<double>(n - 1);
    profile += format_exact(r) + "," + format_exact(qc[i]) + "," + format_exact(qo[i]) + "\n";
  }

  const double coupling = target.coupling;
  auto tc = phase_shift_table(candidate, cfg.k, cfg.l_max, coupling);
  auto to = phase_shift_table(original, cfg.k, cfg.l_max, coupling);
  const double value = phi(candidate, target);

  std::string report;
  const int width = cfg.precision + 7;
  report += "#   l  " + std::string(static_cast<std::size_t>(std::max(0, width - 9)), ' ') +
            "candidate  " + std::string(static_cast<std::size_t>(std::max(0, width - 8)), ' ') +
            "original\n";
  for (int l = 0; l <= cfg.l_max; ++l) {
    auto i = static_cast<std::size_t>(l);
    report += "#" + row(l, {format_fortran(tc.delta[i], cfg.precision),
                            format_fortran(to.delta[i], cfg.precision)},
                        width) +
              "\n";
  }
  report += "# phi = " + phi_text(value, cfg.precision) + "\n";

  if (!cfg.csv.empty()) {
    write_file_atomic(cfg.csv, profile);
  } else {
    out << profile;
  }
  out << report;
  return 0;
}

struct FlagSpec {
  const char* names;
  const char* key;
  const char* help;
};

const FlagSpec kFlags[] = {
    {"--k", "k", "wavenumber"},
    {"--lmax,--l-max", "l_max", "highest order in shift tables"},
    {"--l-start", "l_start", "first order in Phi"},
    {"--l-end", "l_end", "last order in Phi"},
    {"--coupling", "coupling", "potential coupling: a number or 'inverse-energy' (1/k^2)"},
    {"--method", "method", "matrix | ode"},
    {"--precision", "precision", "significant digits in printed tables"},
    {"--ode-steps", "ode_steps", "RK4 steps for --method ode"},
    {"--layers", "layers", "potential as r1:v1,r2:v2,..."},
    {"--target-layers", "target_layers", "original potential as r1:v1,..."},
    {"--target-shifts", "target_shifts", "CSV l,delta with the target shifts"},
    {"--from-results", "from_results", "take the candidate from a results file"},
    {"--rank", "rank", "entry of --from-results (1 = best)"},
    {"--seed", "seed", "search seed, or 'time'"},
    {"--jobs", "jobs", "worker threads"},
    {"-L,--batch-size", "L", "batch size"},
    {"--gamma", "gamma", "reduced sample fraction"},
    {"--m-max", "m_max", "maximum number of layers"},
    {"-R,--radius", "R", "support radius"},
    {"--q-low", "q_low", "lower value bound"},
    {"--q-high", "q_high", "upper value bound"},
    {"--eps-r", "eps_r", "layer merge threshold"},
    {"--dedup-tol", "dedup_tol", "sup-norm distance below which minima coincide"},
    {"--pin-outer-radius", "pin_outer_radius", "true | false"},
    {"--output,-o", "output", "search results file"},
    {"--csv", "csv", "CSV output file"},
};

}  // namespace

double RunConfig::effective_coupling() const {
  return inverse_energy ? inverse_energy_coupling(k) : coupling;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value,
                   const std::string& where) {
  const auto v = trim(value);
  if (key == "k") {
    cfg.k = positive(v, where, key);
    cfg.k_set = true;
  } else if (key == "l_max") {
    cfg.l_max = static_cast<int>(to_integer(v, where, key, 0, 1000));
  } else if (key == "l_start") {
    cfg.l_start = static_cast<int>(to_integer(v, where, key, 0, 1000));
  } else if (key == "l_end") {
    cfg.l_end = static_cast<int>(to_integer(v, where, key, 0, 1000));
  } else if (key == "coupling") {
    if (v == "inverse-energy") {
      cfg.inverse_energy = true;
    } else {
      cfg.coupling = positive(v, where, key);
      cfg.inverse_energy = false;
    }
  } else if (key == "method") {
    if (v == "matrix") cfg.method = Method::matrix;
    else if (v == "ode") cfg.method = Method::ode;
    else bad(where, key, "expected matrix or ode, got '" + std::string(v) + "'");
  } else if (key == "precision") {
    cfg.precision = static_cast<int>(to_integer(v, where, key, 1, 17));
  } else if (key == "ode_steps") {
    cfg.ode_steps = static_cast<int>(to_integer(v, where, key, 16, 100000000));
  } else if (key == "layer") {
    append_layer(cfg.layers, v, where, key, ',');
  } else if (key == "layers") {
    cfg.layers = parse_layers(v, where);
  } else if (key == "target_layer") {
    append_layer(cfg.target_layers, v, where, key, ',');
    cfg.target_layers_set = true;
  } else if (key == "target_layers") {
    cfg.target_layers = parse_layers(v, where);
    cfg.target_layers_set = true;
  } else if (key == "target_shifts") {
    cfg.target_shifts = std::string(v);
  } else if (key == "from_results") {
    cfg.from_results = std::string(v);
  } else if (key == "rank") {
    cfg.rank = static_cast<std::size_t>(to_integer(v, where, key, 1, 1LL << 40));
  } else if (key == "seed") {
    if (v == "time") {
      cfg.seed_from_time = true;
    } else {
      cfg.search.seed = to_seed(v, where);
      cfg.seed_from_time = false;
    }
  } else if (key == "jobs") {
    cfg.search.jobs = static_cast<unsigned>(to_integer(v, where, key, 1, 1024));
  } else if (key == "L") {
    cfg.search.batch_size = static_cast<std::size_t>(to_integer(v, where, key, 1, 1LL << 40));
  } else if (key == "gamma") {
    double g = to_double(v, where, key);
    if (!(g > 0.0 && g <= 1.0)) bad(where, key, "must be in (0, 1]");
    cfg.search.gamma = g;
  } else if (key == "m_max") {
    cfg.search.adm.m_max = static_cast<std::size_t>(to_integer(v, where, key, 1, 1000));
  } else if (key == "R") {
    cfg.search.adm.support_radius = positive(v, where, key);
  } else if (key == "q_low") {
    cfg.search.adm.q_low = to_double(v, where, key);
  } else if (key == "q_high") {
    cfg.search.adm.q_high = to_double(v, where, key);
  } else if (key == "eps_r") {
    cfg.search.local.eps_r = positive(v, where, key);
  } else if (key == "line_tol") {
    cfg.search.local.line_tol = positive(v, where, key);
  } else if (key == "f_tol") {
    cfg.search.local.f_tol = positive(v, where, key);
  } else if (key == "max_sweeps") {
    cfg.search.local.max_sweeps = static_cast<int>(to_integer(v, where, key, 1, 1000000));
  } else if (key == "direction_order") {
    if (v == "preserve_reindexed") cfg.search.local.direction_order = DirectionOrder::preserve_reindexed;
    else if (v == "reset_to_basis") cfg.search.local.direction_order = DirectionOrder::reset_to_basis;
    else bad(where, key, "expected preserve_reindexed or reset_to_basis");
  } else if (key == "dedup_tol") {
    cfg.search.dedup_tol = positive(v, where, key);
  } else if (key == "pin_outer_radius") {
    cfg.search.pin_outer_radius = to_bool(v, where, key);
  } else if (key == "output") {
    cfg.output = std::string(v);
  } else if (key == "csv") {
    cfg.csv = std::string(v);
  } else {
    bad(where, key, "unknown key");
  }
}

void parse_config_text(RunConfig& cfg, std::string_view text, const std::string& source) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError(where + ": expected `key = value`, got '" + std::string(line) + "'");
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError(where + ": missing key");
    apply_setting(cfg, key, line.substr(eq + 1), where);
  }
}

void parse_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  parse_config_text(cfg, read_text(path, "config"), path.string());
}

std::string format_fortran(double x, int digits) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  digits = std::clamp(digits, 1, 17);
  if (x == 0.0) return "0." + std::string(static_cast<std::size_t>(digits), '0') + "E+00";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, std::abs(x));
  std::string s(buf);
  auto epos = s.find('e');
  std::string mantissa;
  for (char c : s.substr(0, epos))
    if (c != '.') mantissa += c;
  int exponent = std::stoi(s.substr(epos + 1)) + 1;
  char ebuf[16];
  std::snprintf(ebuf, sizeof ebuf, "E%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
  return std::string(x < 0 ? "-" : "") + "0." + mantissa + ebuf;
}

std::string format_exact(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string format_layers(const Configuration& c) {
  std::string s;
  for (std::size_t i = 0; i < c.layers(); ++i) {
    if (i) s += ",";
    s += format_exact(c.radii[i]) + ":" + format_exact(c.values[i]);
  }
  return s;
}

Configuration parse_layers(std::string_view text, const std::string& where) {
  Configuration c;
  text = trim(text);
  while (!text.empty()) {
    auto comma = text.find(',');
    append_layer(c, text.substr(0, comma), where, "layers", ':');
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
    if (trim(text).empty()) bad(where, "layers", "trailing comma");
  }
  return c;
}

std::string format_results(const SearchOutcome& outcome, const std::string& header) {
  std::string s;
  if (!header.empty()) s += header + "\n";
  for (const auto& m : outcome.minima)
    s += "phi=" + format_exact(m.phi) + " layers=" + format_layers(m.config) + "\n";
  return s;
}

std::vector<ResultEntry> parse_results(std::string_view text, const std::string& source) {
  std::vector<ResultEntry> entries;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (line.substr(0, 4) != "phi=") bad(where, "phi", "expected `phi=<value> layers=...`");
    auto sp = line.find(' ');
    ResultEntry e;
    e.phi = to_double(line.substr(4, sp == std::string_view::npos ? sp : sp - 4), where, "phi");
    auto rest = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
    if (rest.substr(0, 7) != "layers=") bad(where, "layers", "missing");
    e.config = parse_layers(rest.substr(7), where);
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ResultEntry> read_results(const std::filesystem::path& path) {
  return parse_results(read_text(path, "from_results"), path.string());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + tmp.string() + "'");
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot replace '" + path.string() + "'");
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase shifts of layered potentials and search for phase-equivalent ones",
               "phaseshift"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_path, "key = value configuration file");
    for (const auto& f : kFlags) {
      const std::string key = f.key;
      sub->add_option_function<std::string>(
          f.names, [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
          f.help);
    }
  };
  auto* shifts = app.add_subcommand("shifts", "phase shift table for l = 0..l_max");
  auto* phi_cmd = app.add_subcommand("phi", "best-fit functional of a candidate against a target");
  auto* search = app.add_subcommand("search", "reduced random search for phase-equivalent potentials");
  auto* compare = app.add_subcommand("compare", "profiles and shift tables of two potentials");
  for (auto* s : {shifts, phi_cmd, search, compare}) add_common(s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) parse_config_file(cfg, config_path);
    for (const auto& [key, value] : overrides) apply_setting(cfg, key, value, "command line");

    if (shifts->parsed()) return cmd_shifts(cfg, out);
    if (phi_cmd->parsed()) return cmd_phi(cfg, out);
    if (search->parsed()) return cmd_search(cfg, out);
    return cmd_compare(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace phaseshift::cli

#pragma once

// Fixture and report files. Fixtures are JSON (schema_version 1, see
// docs/fixture-schema.md); reports are JSON with CSV side files for plot
// series.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lps/errors.hpp"
#include "lps/fixtures.hpp"
#include "lps/space.hpp"

namespace lps {

inline constexpr int kSchemaVersion = 1;

using nlohmann::json;

// ─── fixtures ───────────────────────────────────────────────────────────────

namespace detail {

template <class T, class F>
json matrix_json(std::size_t n, F&& at) {
  json rows = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(static_cast<T>(at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ShapeError(std::string("fixture is missing field '") + key + "'");
  return j.at(key);
}

inline void check_square(const json& m, std::size_t n, const char* what) {
  if (!m.is_array() || m.size() != n) throw ShapeError(std::string(what) + " must have n rows");
  for (const auto& row : m)
    if (!row.is_array() || row.size() != n) throw ShapeError(std::string(what) + " rows must have length n");
}

inline LineKind line_kind(const std::string& s) {
  if (s == "line") return LineKind::Line;
  if (s == "future-ray") return LineKind::FutureRay;
  if (s == "past-ray") return LineKind::PastRay;
  throw DomainError("unknown line kind '" + s + "'");
}

inline void check_indices(const std::vector<std::size_t>& pts, std::size_t n, const char* what) {
  for (auto p : pts)
    if (p >= n) throw ShapeError(std::string(what) + " references a point index out of range");
}

}  // namespace detail

inline json fixture_to_json(const Fixture& f) {
  const auto& s = f.space;
  const std::size_t n = s.size();
  json space = {{"n", n},
                {"tau", detail::matrix_json<double>(n, [&](auto i, auto j) { return s.tau(i, j); })},
                {"causal", detail::matrix_json<int>(n, [&](auto i, auto j) { return s.causal(i, j) ? 1 : 0; })},
                {"labels", s.labels}};
  if (s.has_metric()) space["metric"] = detail::matrix_json<double>(n, [&](auto i, auto j) { return s.metric(i, j); });
  json chains = json::array();
  for (const auto& c : f.chains)
    chains.push_back({{"points", c.points}, {"params", c.params}, {"deficit", c.deficit}, {"maximal_only", c.maximal_only}});
  json lines = json::array();
  for (const auto& l : f.lines)
    lines.push_back({{"step", l.step}, {"t0", l.t0}, {"points", l.points}, {"kind", to_string(l.kind)}, {"label", l.label}});
  json out = {{"schema_version", kSchemaVersion},
              {"meta", s.meta},
              {"space", std::move(space)},
              {"chains", std::move(chains)},
              {"lines", std::move(lines)},
              {"probes", f.probes}};
  if (f.base) {
    const auto& b = *f.base;
    json mids = json::array();
    for (const auto& [yz, m] : b.midpoints) mids.push_back({yz.first, yz.second, m});
    out["base"] = {{"m", b.m},
                   {"dist", detail::matrix_json<double>(b.m, [&](auto i, auto j) { return b.d(i, j); })},
                   {"midpoints", std::move(mids)},
                   {"labels", b.labels}};
  }
  return out;
}

/// Inverse of fixture_to_json. ShapeError for dimension and index problems,
/// DomainError for bad values or an unknown schema version.
inline Fixture fixture_from_json(const json& j) {
  const int version = detail::field(j, "schema_version").get<int>();
  if (version != kSchemaVersion) throw DomainError("unsupported fixture schema_version " + std::to_string(version));
  const auto& sp = detail::field(j, "space");
  const auto n = detail::field(sp, "n").get<std::size_t>();
  const auto& tau = detail::field(sp, "tau");
  const auto& causal = detail::field(sp, "causal");
  detail::check_square(tau, n, "tau");
  detail::check_square(causal, n, "causal");
  Fixture f;
  SampledSpace s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double t = tau[i][k].get<double>();
      if (!std::isfinite(t) || t < 0.0) throw DomainError("tau entries must be finite and nonnegative");
      s.set(i, k, t, causal[i][k].get<int>() != 0);
    }
  if (sp.contains("metric")) {
    const auto& m = sp.at("metric");
    detail::check_square(m, n, "metric");
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) d[i * n + k] = m[i][k].get<double>();
    s.set_metric(std::move(d));
  }
  if (sp.contains("labels")) s.labels = sp.at("labels").get<std::vector<std::string>>();
  if (!s.labels.empty() && s.labels.size() != n) throw ShapeError("labels must have n entries");
  if (j.contains("meta")) s.meta = j.at("meta");
  f.space = std::move(s);

  for (const auto& c : j.value("chains", json::array())) {
    Chain ch;
    ch.points = detail::field(c, "points").get<std::vector<std::size_t>>();
    ch.params = detail::field(c, "params").get<std::vector<double>>();
    ch.deficit = c.value("deficit", 0.0);
    ch.maximal_only = c.value("maximal_only", false);
    if (ch.params.size() != ch.points.size()) throw ShapeError("chain params and points differ in length");
    detail::check_indices(ch.points, n, "chain");
    f.chains.push_back(std::move(ch));
  }
  for (const auto& l : j.value("lines", json::array())) {
    LineSample ls;
    ls.step = detail::field(l, "step").get<double>();
    ls.t0 = detail::field(l, "t0").get<double>();
    ls.points = detail::field(l, "points").get<std::vector<std::size_t>>();
    ls.kind = detail::line_kind(l.value("kind", "line"));
    ls.label = l.value("label", "");
    if (!(ls.step > 0.0)) throw DomainError("line step must be positive");
    detail::check_indices(ls.points, n, "line");
    f.lines.push_back(std::move(ls));
  }
  f.probes = j.value("probes", std::vector<std::array<std::size_t, 3>>{});
  for (const auto& p : f.probes) detail::check_indices({p.begin(), p.end()}, n, "probe");
  if (j.contains("base")) {
    const auto& b = j.at("base");
    MetricSampleIn base;
    base.m = detail::field(b, "m").get<std::size_t>();
    const auto& dist = detail::field(b, "dist");
    detail::check_square(dist, base.m, "base dist");
    base.dist.resize(base.m * base.m);
    for (std::size_t i = 0; i < base.m; ++i)
      for (std::size_t k = 0; k < base.m; ++k) base.dist[i * base.m + k] = dist[i][k].get<double>();
    for (const auto& t : b.value("midpoints", json::array())) {
      const auto v = t.get<std::array<std::size_t, 3>>();
      if (v[0] >= base.m || v[1] >= base.m || v[2] >= base.m) throw ShapeError("base midpoint index out of range");
      base.midpoints[{v[0], v[1]}] = v[2];
    }
    base.labels = b.value("labels", std::vector<std::string>{});
    validate(base);
    f.base = std::move(base);
  }
  return f;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << text;
}

/// JSON parse errors surface as DomainError.
inline Fixture load_fixture(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(path.string() + ": " + e.what());
  }
  try {
    return fixture_from_json(j);
  } catch (const json::exception& e) {
    throw ShapeError(path.string() + ": " + e.what());
  }
}

inline void save_fixture(const Fixture& f, const std::filesystem::path& path) {
  write_file(path, fixture_to_json(f).dump() + "\n");
}

// ─── reports ────────────────────────────────────────────────────────────────

/// 64-bit FNV-1a, used as the inputs digest of reports.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

enum class Status { Pass, Fail, Skip };

inline const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
  }
  return "?";
}

struct CheckRecord {
  std::string name;
  Status status = Status::Pass;
  json data = json::object();  // margins, witnesses
};

/// Columns (parameter, value, bound); NaN where a column does not apply.
struct Series {
  std::string name;
  std::array<std::string, 3> columns{"parameter", "value", "bound"};
  std::vector<std::array<double, 3>> rows;
};

struct Report {
  std::string command;
  std::string inputs_digest;
  Tolerances tol;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  json params = json::object();
  std::vector<CheckRecord> checks;
  std::vector<Series> series;
  double runtime_seconds = 0.0;  // the only nondeterministic field

  bool pass() const {
    for (const auto& c : checks)
      if (c.status == Status::Fail) return false;
    return true;
  }

  CheckRecord& add(std::string name, bool ok, json data = json::object()) {
    checks.push_back({std::move(name), ok ? Status::Pass : Status::Fail, std::move(data)});
    return checks.back();
  }
};

namespace detail {

// JSON has no NaN or infinity; they become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

/// Report as JSON; `timing` holds the runtime and is excluded from the
/// determinism contract.
inline json report_to_json(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"data", c.data}});
  json series = json::array();
  for (const auto& s : r.series) {
    json rows = json::array();
    for (const auto& row : s.rows)
      rows.push_back({detail::number(row[0]), detail::number(row[1]), detail::number(row[2])});
    series.push_back({{"name", s.name}, {"columns", s.columns}, {"rows", std::move(rows)}});
  }
  return {{"command", r.command},
          {"status", r.pass() ? "PASS" : "FAIL"},
          {"inputs_digest", r.inputs_digest},
          {"tolerances", {{"tau", r.tol.tau}, {"angle", r.tol.angle}, {"geo", r.tol.geo}}},
          {"threads", r.threads},
          {"seed", r.seed},
          {"params", r.params},
          {"checks", std::move(checks)},
          {"series", std::move(series)},
          {"timing", {{"runtime_seconds", r.runtime_seconds}}}};
}

inline std::string format_csv_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string series_csv(const Series& s) {
  std::ostringstream out;
  out << s.columns[0] << ',' << s.columns[1] << ',' << s.columns[2] << '\n';
  for (const auto& row : s.rows)
    out << format_csv_value(row[0]) << ',' << format_csv_value(row[1]) << ',' << format_csv_value(row[2]) << '\n';
  return out.str();
}

/// One CSV per series in `dir`, named <series>.csv. NoSeries when the report
/// carries none.
inline std::vector<std::filesystem::path> emit_plotdata(const Report& r, const std::filesystem::path& dir) {
  if (r.series.empty()) throw NoSeries("report '" + r.command + "' has no plot series");
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> out;
  for (const auto& s : r.series) {
    auto path = dir / (s.name + ".csv");
    write_file(path, series_csv(s));
    out.push_back(std::move(path));
  }
  return out;
}

}  // namespace lps

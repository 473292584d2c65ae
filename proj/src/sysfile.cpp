#include "posdelay/sysfile.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace posdelay {

SystemFileError::SystemFileError(Kind kind, const std::string& origin, std::size_t line,
                                 std::size_t column, const std::string& what)
    : std::runtime_error(origin + (line ? ":" + std::to_string(line) : "") +
                         (column ? ":" + std::to_string(column) : "") + ": " + what),
      kind_(kind),
      line_(line),
      column_(column) {}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;  // of the first value character (inside quotes)
};

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

double to_real(const Entry& e, const std::string& key, const std::string& origin) {
  double v = 0.0;
  const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (e.value.empty() || res.ec != std::errc() || res.ptr != e.value.data() + e.value.size() || !std::isfinite(v))
    throw SystemFileError(SystemFileError::Kind::Invalid, origin, e.line, e.column,
                          "'" + key + "' must be a real number, got '" + e.value + "'");
  return v;
}

int to_int(const Entry& e, const std::string& key, const std::string& origin) {
  int v = 0;
  const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (e.value.empty() || res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
    throw SystemFileError(SystemFileError::Kind::Invalid, origin, e.line, e.column,
                          "'" + key + "' must be an integer, got '" + e.value + "'");
  return v;
}

}  // namespace

SystemFile parse_system(std::string_view text, const std::string& origin) {
  using K = SystemFileError::Kind;
  std::map<std::string, Entry> main, defaults;
  std::map<std::string, Entry>* section = &main;

  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos <= text.size();) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    lines.push_back(text.substr(pos, eol - pos));
    pos = eol + 1;
  }

  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::string_view line = lines[idx];
    const std::size_t line_no = idx + 1;

    std::size_t b = 0;
    while (b < line.size() && is_blank(line[b])) ++b;
    std::size_t e = line.size();
    while (e > b && is_blank(line[e - 1])) --e;
    if (b == e || line[b] == '#') continue;
    const std::string_view body = line.substr(b, e - b);
    if (body.front() == '[') {
      if (body == "[defaults]") {
        section = &defaults;
      } else {
        throw SystemFileError(K::Syntax, origin, line_no, b + 1, "unknown section '" + std::string(body) + "'");
      }
      continue;
    }

    const std::size_t eq = line.find('=', b);
    if (eq == std::string_view::npos || eq >= e)
      throw SystemFileError(K::Syntax, origin, line_no, b + 1, "expected 'key = value'");
    std::size_t ke = eq;
    while (ke > b && is_blank(line[ke - 1])) --ke;
    const std::string key(line.substr(b, ke - b));
    if (key.empty()) throw SystemFileError(K::Syntax, origin, line_no, b + 1, "empty key");

    std::size_t vb = eq + 1;
    while (vb < e && is_blank(line[vb])) ++vb;
    Entry entry;
    entry.line = line_no;
    if (vb < e && line[vb] == '"') {
      const std::size_t close = line.find('"', vb + 1);
      if (close == std::string_view::npos || close >= e)
        throw SystemFileError(K::Syntax, origin, line_no, vb + 1, "unterminated string");
      if (close + 1 != e)
        throw SystemFileError(K::Syntax, origin, line_no, close + 2, "unexpected text after string");
      entry.value = std::string(line.substr(vb + 1, close - vb - 1));
      entry.column = vb + 2;
    } else {
      entry.value = std::string(line.substr(vb, e - vb));
      entry.column = vb + 1;
    }
    if (!section->emplace(key, entry).second)
      throw SystemFileError(K::Syntax, origin, line_no, b + 1, "duplicate key '" + key + "'");
  }

  auto require = [&](const std::string& key) -> const Entry& {
    const auto it = main.find(key);
    if (it == main.end()) throw SystemFileError(K::MissingKey, origin, 0, 0, "missing key '" + key + "'");
    return it->second;
  };

  const int n = to_int(require("dim"), "dim", origin);
  if (n < 1) throw SystemFileError(K::Invalid, origin, require("dim").line, require("dim").column, "dim must be at least 1");
  const double alpha = to_real(require("alpha"), "alpha", origin);

  for (const auto& [key, entry] : main) {
    bool known = key == "dim" || key == "alpha";
    for (int i = 1; i <= n && !known; ++i)
      known = key == "f" + std::to_string(i) || key == "g" + std::to_string(i);
    if (!known) throw SystemFileError(K::Syntax, origin, entry.line, 1, "unknown key '" + key + "'");
  }

  auto parse_component = [&](const std::string& key) {
    const Entry& entry = require(key);
    try {
      return Expr::parse(entry.value, n);
    } catch (const ParseError& pe) {
      throw SystemFileError(K::Expression, origin, entry.line, entry.column + pe.position(),
                            "in '" + key + "': " + pe.what());
    }
  };
  std::vector<Expr> f, g;
  for (int i = 1; i <= n; ++i) f.push_back(parse_component("f" + std::to_string(i)));
  for (int i = 1; i <= n; ++i) g.push_back(parse_component("g" + std::to_string(i)));

  RunDefaults d;
  for (const auto& [key, entry] : defaults) {
    if (key == "region_bound") d.region_bound = to_real(entry, key, origin);
    else if (key == "resolution") d.resolution = to_int(entry, key, origin);
    else if (key == "t_end") d.t_end = to_real(entry, key, origin);
    else if (key == "dt") d.dt = to_real(entry, key, origin);
    else if (key == "conv_tol") d.conv_tol = to_real(entry, key, origin);
    else throw SystemFileError(K::Syntax, origin, entry.line, 1, "unknown default '" + key + "'");
  }

  try {
    return SystemFile{SystemSpec(std::move(f), std::move(g), alpha), d};
  } catch (const EquilibriumError& ee) {
    throw SystemFileError(K::Equilibrium, origin, 0, 0, ee.what());
  } catch (const EvalError& ev) {
    throw SystemFileError(K::Equilibrium, origin, 0, 0, ev.what());
  } catch (const std::invalid_argument& ia) {
    throw SystemFileError(K::Invalid, origin, 0, 0, ia.what());
  }
}

SystemFile load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw SystemFileError(SystemFileError::Kind::Io, path.string(), 0, 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str(), path.string());
}

}  // namespace posdelay

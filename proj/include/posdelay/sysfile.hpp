#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "posdelay/system.hpp"

namespace posdelay {

/// Run settings a system file may carry in its [defaults] section.
struct RunDefaults {
  double region_bound = 5.0;
  std::optional<int> resolution;  // unset: each command's own default
  double t_end = 50.0;
  double dt = 0.01;
  double conv_tol = 1e-3;
};

struct SystemFile {
  SystemSpec system;
  RunDefaults defaults;
};

class SystemFileError : public std::runtime_error {
public:
  enum class Kind { Io, Syntax, MissingKey, Expression, Equilibrium, Invalid };

  SystemFileError(Kind kind, const std::string& origin, std::size_t line, std::size_t column,
                  const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }      // 1-based, 0 if not tied to a line
  std::size_t column() const { return column_; }  // 1-based, 0 if not tied to a column

private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Format:
///   # comment
///   dim = 2
///   alpha = 1
///   f1 = "x1*(1 - exp(x1 + x2))"
///   ...
///   [defaults]
///   region_bound = 5
SystemFile parse_system(std::string_view text, const std::string& origin = "<input>");
SystemFile load_system(const std::filesystem::path& path);

}  // namespace posdelay

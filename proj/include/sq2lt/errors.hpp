#pragma once

#include <stdexcept>
#include <string>

namespace sq2lt {

enum class errc {
  non_positive_parameter,
  weights_not_normalized,
  unsupported_moment,
  invalid_capacity,
  invalid_choice_count,
  empty_lambda_grid,
  invalid_field,
  single_server,
  non_negative_time,
  zero_time,
  unordered_times,
  parameter_out_of_range,
  quadrature_nonconvergence,
  unstable_load,
  degenerate_run,
  file_not_found,
  parse_error,
  internal_check_failed,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_positive_parameter: return "NonPositiveParameter";
    case errc::weights_not_normalized: return "WeightsNotNormalized";
    case errc::unsupported_moment: return "UnsupportedMoment";
    case errc::invalid_capacity: return "InvalidCapacity";
    case errc::invalid_choice_count: return "InvalidChoiceCount";
    case errc::empty_lambda_grid: return "EmptyLambdaGrid";
    case errc::invalid_field: return "InvalidField";
    case errc::single_server: return "SingleServer";
    case errc::non_negative_time: return "NonNegativeTime";
    case errc::zero_time: return "ZeroTime";
    case errc::unordered_times: return "UnorderedTimes";
    case errc::parameter_out_of_range: return "ParameterOutOfRange";
    case errc::quadrature_nonconvergence: return "QuadratureNonConvergence";
    case errc::unstable_load: return "UnstableLoad";
    case errc::degenerate_run: return "DegenerateRun";
    case errc::file_not_found: return "FileNotFound";
    case errc::parse_error: return "ParseError";
    case errc::internal_check_failed: return "InternalCheckFailed";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(errc::parse_error,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace sq2lt

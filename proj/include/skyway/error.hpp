#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skyway {

enum class Errc {
  invalid_argument,
  config_invalid,
  instance_too_large,
  unreachable_destination,
  reservation_conflict,
  infeasible_wind,
  dead_end,
  livelock_guard,
  splice_mismatch,
  empty_candidate_set,
  io_error,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace skyway

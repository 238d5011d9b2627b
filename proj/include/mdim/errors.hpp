#pragma once

#include <stdexcept>
#include <string>

namespace mdim {

/// Invalid configuration: unknown experiment, malformed ladder, bad system spec.
class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A combinatorial or memory budget would be exceeded.
class budget_error : public std::runtime_error {
  public:
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

/// A comparison against a radius cannot be decided within the certified
/// truncation bound of a shift metric.
class precision_error : public std::runtime_error {
  public:
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mdim

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cso {

/// Invalid argument or precondition violation (CLI exit code 2).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A bounded search ran out of candidates (CLI exit code 3).
class SearchExhausted : public std::runtime_error {
 public:
  SearchExhausted(const std::string& what, std::uint64_t near_miss, std::string near_miss_reason)
      : std::runtime_error(what), near_miss_(near_miss), near_miss_reason_(std::move(near_miss_reason)) {}

  std::uint64_t near_miss() const noexcept { return near_miss_; }
  const std::string& near_miss_reason() const noexcept { return near_miss_reason_; }

 private:
  std::uint64_t near_miss_;
  std::string near_miss_reason_;
};

/// An analysis would exceed its configured index range.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::uint64_t last_completed)
      : std::runtime_error(what), last_completed_(last_completed) {}

  std::uint64_t last_completed() const noexcept { return last_completed_; }

 private:
  std::uint64_t last_completed_;
};

/// An oracle answer does not satisfy the index contract it was queried under.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal bookkeeping disagrees with itself (should never fire on valid input).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A certificate inequality does not hold, or a serialized certificate does
/// not match its recomputation (CLI exit code 4).
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cso

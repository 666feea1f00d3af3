#pragma once

#include <stdexcept>
#include <string>

namespace streamdist {

//! Caller violated a documented precondition or an algorithm contract
//! (bad parameters, exhausted call budget, probe of an untracked index).
//! The CLI maps this to exit code 2.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

//! Unreadable or malformed input file. The CLI maps this to exit code 1.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace streamdist

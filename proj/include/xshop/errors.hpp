#pragma once

#include <stdexcept>
#include <string>

namespace xshop {

// Base class for all pipeline errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MalformedLine : Error {
  MalformedLine(const std::string& what, std::size_t line_no_)
      : Error(what), line_no(line_no_) {}
  std::size_t line_no;
};

struct UnreadableFile : Error {
  using Error::Error;
};

struct UnknownShop : Error {
  using Error::Error;
};

struct DuplicateId : Error {
  using Error::Error;
};

struct MalformedCatalogRow : Error {
  using Error::Error;
};

struct OutOfOrderInput : Error {
  using Error::Error;
};

struct ZeroSessions : Error {
  using Error::Error;
};

struct EmptySelection : Error {
  using Error::Error;
};

struct MalformedTableFile : Error {
  using Error::Error;
};

struct EmptyTable : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InfeasiblePartition : Error {
  using Error::Error;
};

struct SearchSpaceTooLarge : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

}  // namespace xshop

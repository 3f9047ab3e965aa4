#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace icr {

// Root of the toolkit's error hierarchy. Every throwing operation documents
// which subclass it raises; anything else escaping is a bug.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Instruction / config / bank file violates its schema. Message names the
// offending field and, where applicable, the item index.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Instruction file with an empty items list.
class EmptySequenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Variant and baseline item lists differ in length.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// No templates exist for a (family, intent) pair.
class BankMissingError : public Error {
 public:
  using Error::Error;
};

class InvalidCountError : public Error {
 public:
  using Error::Error;
};

// A required template slot cannot be filled from the base item.
class SlotError : public Error {
 public:
  using Error::Error;
};

// A generated variant failed its family's intent assertion.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& message, char family, int k,
                   std::size_t item_index, std::string got, std::string want)
      : Error(message),
        family(family),
        k(k),
        item_index(item_index),
        got(std::move(got)),
        want(std::move(want)) {}

  char family;
  int k;
  std::size_t item_index;
  std::string got;
  std::string want;
};

class DuplicateRouteError : public Error {
 public:
  using Error::Error;
};

class MissingBaselineError : public Error {
 public:
  using Error::Error;
};

class EmptySelectionError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class WorldError : public Error {
 public:
  using Error::Error;
};

// External agent process broke the spec-file-in / record-file-out contract.
class AdapterProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace icr

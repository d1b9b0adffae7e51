#pragma once

#include <stdexcept>
#include <string>

namespace crowdsense {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class UnknownSensorError : public Error {
 public:
  using Error::Error;
};

class UnknownAreaError : public Error {
 public:
  using Error::Error;
};

class ZeroLengthVectorError : public Error {
 public:
  using Error::Error;
};

class MalformedMacError : public Error {
 public:
  using Error::Error;
};

class KeyLengthError : public Error {
 public:
  using Error::Error;
};

class RandomnessUnavailableError : public Error {
 public:
  using Error::Error;
};

class ZeroWifiCountError : public Error {
 public:
  using Error::Error;
};

class EmptyHourError : public Error {
 public:
  using Error::Error;
};

class NoRatioAvailableError : public Error {
 public:
  using Error::Error;
};

class NoSightingsError : public Error {
 public:
  using Error::Error;
};

/// Raised when a semantic observation document violates the
/// class/kind/unit compatibility matrix or is structurally malformed.
/// `path()` names the offending field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class UnknownPresetError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Pipeline stage failure; carries the stage name so partial
/// per-cluster results can be attributed.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : Error("stage '" + stage + "': " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace crowdsense

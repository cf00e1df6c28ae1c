#pragma once

#include <stdexcept>
#include <string>

namespace mvsenti {

enum class Errc {
  IoFailure,
  MalformedLine,
  UnknownLabel,
  EmptyCorpus,
  SingleClassInput,
  MissingClass,
  DimensionMismatch,
  MalformedHeader,
  MalformedRecord,
  TruncatedFile,
  DimensionZero,
  LengthMismatch,
  EmptyInput,
  EmptyMatrix,
  ConfigError,
  DigestMismatch,
  BundleCorrupt,
  UnsupportedVersion,
};

const char* errc_name(Errc code);

/// Library-wide exception. what() is "<code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& detail) {
  throw Error(code, detail);
}

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::IoFailure: return "IoFailure";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::SingleClassInput: return "SingleClassInput";
    case Errc::MissingClass: return "MissingClass";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::DimensionZero: return "DimensionZero";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::ConfigError: return "ConfigError";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::BundleCorrupt: return "BundleCorrupt";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
  }
  return "UnknownError";
}

}  // namespace mvsenti

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace embedgauge {

// Base of every error the toolkit raises. `module` names the component that
// failed, `locus` points at the offending input (path:line, id, category...).
class Error : public std::runtime_error {
  public:
    Error(std::string kind, std::string module, std::string message, std::string locus = {})
        : std::runtime_error(std::move(message)), kind_(std::move(kind)), module_(std::move(module)),
          locus_(std::move(locus)) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }
    const std::string& locus() const noexcept { return locus_; }

  private:
    std::string kind_;
    std::string module_;
    std::string locus_;
};

#define EMBEDGAUGE_DEFINE_ERROR(Name, Module)                                                     \
    class Name : public Error {                                                                   \
      public:                                                                                     \
        explicit Name(std::string message, std::string locus = {})                               \
            : Error(#Name, Module, std::move(message), std::move(locus)) {}                       \
    }

// embedspace
EMBEDGAUGE_DEFINE_ERROR(DimensionError, "embedspace");
EMBEDGAUGE_DEFINE_ERROR(DegenerateVectorError, "embedspace");
EMBEDGAUGE_DEFINE_ERROR(MissingEmbeddingError, "embedspace");
EMBEDGAUGE_DEFINE_ERROR(MissingCategoryError, "embedspace");

// statkit
EMBEDGAUGE_DEFINE_ERROR(DomainError, "statkit");
EMBEDGAUGE_DEFINE_ERROR(DegenerateVarianceError, "statkit");

// tradeoff
EMBEDGAUGE_DEFINE_ERROR(MedianUndefinedError, "tradeoff");
EMBEDGAUGE_DEFINE_ERROR(IncompleteGridError, "tradeoff");
EMBEDGAUGE_DEFINE_ERROR(RankError, "tradeoff");
EMBEDGAUGE_DEFINE_ERROR(ProfileError, "tradeoff");

// benchharness
EMBEDGAUGE_DEFINE_ERROR(ProviderDiedError, "benchharness");
EMBEDGAUGE_DEFINE_ERROR(ProtocolError, "benchharness");
EMBEDGAUGE_DEFINE_ERROR(EmptySampleError, "benchharness");

// cli-report
EMBEDGAUGE_DEFINE_ERROR(ParseError, "cli-report");
EMBEDGAUGE_DEFINE_ERROR(DuplicateIdError, "cli-report");
EMBEDGAUGE_DEFINE_ERROR(FormatError, "cli-report");
EMBEDGAUGE_DEFINE_ERROR(DataError, "cli-report");
EMBEDGAUGE_DEFINE_ERROR(IoError, "cli-report");
EMBEDGAUGE_DEFINE_ERROR(ConfigError, "cli-report");

#undef EMBEDGAUGE_DEFINE_ERROR

}  // namespace embedgauge

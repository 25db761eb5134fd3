#pragma once

// Exception taxonomy. Every throwing operation in the library throws one of
// these; the CLI maps them onto exit codes (config misuse -> 2, numerical
// aborts -> 3).

#include <stdexcept>
#include <string>

namespace condlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset problems.
struct DegenerateData : Error { using Error::Error; };     // direction vector has (near-)zero norm
struct SynthesisFailed : Error { using Error::Error; };    // synthetic data never met the norm floor
struct ParseError : Error { using Error::Error; };         // malformed text input (row/column in message)
struct DimensionMismatch : Error { using Error::Error; };  // inconsistent sizes passed programmatically

// Activation problems.
struct UnknownActivation : Error { using Error::Error; };
struct NoMultiplicity : Error { using Error::Error; };     // no nonvanishing derivative up to max order

// Scaling problems.
struct UnknownScheme : Error { using Error::Error; };

// Integration problems.
struct Blowup : Error {
  Blowup(const std::string& msg, double t) : Error(msg), t_blowup(t) {}
  double t_blowup;
};

// Eigensolver problems.
struct NoConvergence : Error { using Error::Error; };

// Closed-form solution / horizon problems.
struct HorizonExceeded : Error { using Error::Error; };    // growth factor exp() would overflow
struct WrongRegime : Error { using Error::Error; };        // estimator asked outside its regime

// Metric problems.
struct ZeroInitialNorm : Error { using Error::Error; };
struct ZeroNorm : Error { using Error::Error; };
struct MissingSummaries : Error { using Error::Error; };

// Fitting problems.
struct DegenerateAbscissa : Error { using Error::Error; };
struct HorizonLimited : Error { using Error::Error; };     // fit refused: runs did not saturate

// CLI / config problems.
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace condlab

#pragma once
// Error taxonomy for the benchmark engine. Every failure mode that callers
// are expected to distinguish gets its own type; everything derives from
// embench::Error so catch-all handlers at the CLI boundary stay simple.

#include <stdexcept>
#include <string>

namespace embench {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- loading / validation -----------------------------------------------
struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct DanglingReference : Error {
    using Error::Error;
};
struct EmptyDataset : Error {
    using Error::Error;
};
struct MissingLanguage : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// -- backend --------------------------------------------------------------
struct BackendUnavailable : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NaNVector : Error {
    using Error::Error;
};
struct CacheCorrupt : Error {
    using Error::Error;
};

// -- similarity / metrics ---------------------------------------------------
struct ZeroVector : Error {
    using Error::Error;
};
struct NoRelevantDocs : Error {
    using Error::Error;
};
struct NoPositives : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct DegenerateInput : Error {
    using Error::Error;
};
struct OneClassOnly : Error {
    using Error::Error;
};

// -- evaluators --------------------------------------------------------------
struct SingleClass : Error {
    using Error::Error;
};
struct ItemWithoutPositive : Error {
    using Error::Error;
};
struct FewerPointsThanClusters : Error {
    using Error::Error;
};
struct EmptySide : Error {
    using Error::Error;
};

// -- mining -------------------------------------------------------------------
struct CorpusTooSmall : Error {
    using Error::Error;
};
struct UnknownPositive : Error {
    using Error::Error;
};
struct NonPositiveTemperature : Error {
    using Error::Error;
};

// -- synthetic generation ----------------------------------------------------
struct EmptyTask : Error {
    using Error::Error;
};
struct GenerationFailed : Error {
    using Error::Error;
};

// -- reporting -----------------------------------------------------------------
struct UnknownFormat : Error {
    using Error::Error;
};

} // namespace embench

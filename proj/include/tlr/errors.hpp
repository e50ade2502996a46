#pragma once

#include <stdexcept>
#include <string>

namespace tlr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnparseableDate : Error {
    using Error::Error;
};
struct InvalidDate : Error {
    using Error::Error;
};

struct DuplicateDocId : Error {
    using Error::Error;
};
struct MalformedRecord : Error {
    using Error::Error;
};

struct TransportError : Error {
    using Error::Error;
};
struct ProviderError : Error {
    int status = 0;
    std::string body_excerpt;
    ProviderError(int status_, std::string excerpt)
        : Error("provider returned status " + std::to_string(status_)),
          status(status_),
          body_excerpt(std::move(excerpt)) {}
};
struct ParseError : Error {
    using Error::Error;
};
struct FetchError : Error {
    using Error::Error;
};
struct EmptyBody : Error {
    using Error::Error;
};

struct BudgetExceeded : Error {
    using Error::Error;
};
struct MarkerOverflow : Error {
    using Error::Error;
};

struct MalformedAction : Error {
    using Error::Error;
};
struct EmptySubTimeline : Error {
    using Error::Error;
};
struct EmptyCognition : Error {
    using Error::Error;
};
struct NoReferences : Error {
    using Error::Error;
};

}  // namespace tlr

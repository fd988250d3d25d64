// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace actor {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoFailure : Error {
    using Error::Error;
};

struct MalformedTest : Error {
    using Error::Error;
};

struct DuplicateId : Error {
    using Error::Error;
};

struct BuildFailure : Error {
    explicit BuildFailure(std::string log_)
        : Error("build failed"), log(std::move(log_)) {}
    std::string log;
};

struct SandboxFailure : Error {
    using Error::Error;
};

struct SpecError : Error {
    using Error::Error;
};

struct CoverageToolFailure : Error {
    using Error::Error;
};

struct MismatchedSources : Error {
    using Error::Error;
};

struct UnboundPlaceholder : Error {
    using Error::Error;
};

struct BackendError : Error {
    using Error::Error;
};

struct BootstrapFailure : Error {
    using Error::Error;
};

struct SafetyPassFailed : Error {
    using Error::Error;
};

struct FixtureBroken : Error {
    using Error::Error;
};

struct InsufficientTrials : Error {
    using Error::Error;
};

}  // namespace actor

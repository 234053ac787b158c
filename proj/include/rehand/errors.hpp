#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rehand {

enum class Errc {
    EncodingError,
    DecodeFailure,
    AuthFailure,
    ParamError,
    // protocol
    AlreadyRegistered,
    UnknownUser,
    IntegrityFailure,
    ReplayDetected,
    StaleWarrant,
    NoWarrant,
    MalformedRequest,
    RevokedUE,
    ExpiredWarrant,
    ServerAuthFailure,
    ClientAuthFailure,
    RejectList,
    // analysis
    Inconsistent,
    EmptyLog,
    ConfigError,
};

std::string_view errc_name(Errc code) noexcept;

/// Every failure the library reports carries one of the codes above; the
/// simulator logs the code as the handover outcome.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    explicit Error(Errc code) : std::runtime_error(std::string(errc_name(code))), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace rehand

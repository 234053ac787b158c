#include "rehand/errors.hpp"

namespace rehand {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::EncodingError: return "EncodingError";
        case Errc::DecodeFailure: return "DecodeFailure";
        case Errc::AuthFailure: return "AuthFailure";
        case Errc::ParamError: return "ParamError";
        case Errc::AlreadyRegistered: return "AlreadyRegistered";
        case Errc::UnknownUser: return "UnknownUser";
        case Errc::IntegrityFailure: return "IntegrityFailure";
        case Errc::ReplayDetected: return "ReplayDetected";
        case Errc::StaleWarrant: return "StaleWarrant";
        case Errc::NoWarrant: return "NoWarrant";
        case Errc::MalformedRequest: return "MalformedRequest";
        case Errc::RevokedUE: return "RevokedUE";
        case Errc::ExpiredWarrant: return "ExpiredWarrant";
        case Errc::ServerAuthFailure: return "ServerAuthFailure";
        case Errc::ClientAuthFailure: return "ClientAuthFailure";
        case Errc::RejectList: return "RejectList";
        case Errc::Inconsistent: return "Inconsistent";
        case Errc::EmptyLog: return "EmptyLog";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace rehand

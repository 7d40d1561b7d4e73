#pragma once

#include <stdexcept>
#include <string>

namespace qnav::bus {

// Every protocol failure is one of these; catch BusError to handle them all.
struct BusError : std::runtime_error {
    explicit BusError(const std::string& what) : std::runtime_error(what) {}
};

struct WrongState : BusError {
    explicit WrongState(const std::string& what) : BusError(what) {}
};
struct MalformedFrame : BusError {
    explicit MalformedFrame(const std::string& what) : BusError(what) {}
};
struct TagMismatch : BusError {
    TagMismatch() : BusError("authentication tag mismatch") {}
};
struct ReplayDetected : BusError {
    ReplayDetected() : BusError("sequence did not advance; frame replayed or reordered") {}
};
struct SignatureInvalid : BusError {
    SignatureInvalid() : BusError("handshake signature did not verify") {}
};
struct UnknownSensor : BusError {
    explicit UnknownSensor(const std::string& what) : BusError(what) {}
};
struct UnsupportedSuite : BusError {
    explicit UnsupportedSuite(const std::string& what) : BusError(what) {}
};
struct SequenceExhausted : BusError {
    SequenceExhausted() : BusError("send sequence space exhausted; rotate keys") {}
};

}  // namespace qnav::bus

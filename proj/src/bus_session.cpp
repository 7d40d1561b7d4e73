#include "qnav/bus_session.hpp"

#include <algorithm>

#include "qnav/hashing.hpp"

namespace qnav::bus {

namespace {

using hashing::Digest32;

const CryptoSuite& resolve_suite(std::uint8_t suite_id) {
    const CryptoSuite* suite = find_suite(suite_id);
    if (suite == nullptr) {
        throw UnsupportedSuite("suite " + std::to_string(suite_id) + " is not compiled in");
    }
    return *suite;
}

// Message the sensor signs in its Hello: magic || version || sensor_id LE ||
// suite_id || handshake nonce. Independent of the header layout on purpose —
// it pins the identity claim, not the framing.
Bytes hello_signed_message(std::uint16_t sensor_id, std::uint8_t suite_id,
                           const std::array<std::uint8_t, 32>& nonce) {
    Bytes msg;
    msg.reserve(6 + nonce.size());
    msg = {kMagic[0], kMagic[1], kWireVersion,
           static_cast<std::uint8_t>(sensor_id & 0xff),
           static_cast<std::uint8_t>(sensor_id >> 8), suite_id};
    msg.insert(msg.end(), nonce.begin(), nonce.end());
    return msg;
}

std::array<std::uint8_t, 32> derive_session_key(
    const std::array<std::uint8_t, 32>& shared_secret,
    const std::array<std::uint8_t, 32>& hello_nonce, const Bytes& hello_bytes,
    const Bytes& kem_ciphertext) {
    Bytes transcript_input(hello_bytes);
    transcript_input.insert(transcript_input.end(), kem_ciphertext.begin(),
                            kem_ciphertext.end());
    const Digest32 transcript = hashing::digest32(transcript_input);

    Bytes key_input(shared_secret.begin(), shared_secret.end());
    key_input.insert(key_input.end(), hello_nonce.begin(), hello_nonce.end());
    key_input.insert(key_input.end(), transcript.begin(), transcript.end());
    return hashing::digest32(key_input);
}

void establish(SessionState& session, const std::array<std::uint8_t, 32>& key) {
    session.session_key = key;
    session.send_seq = role_seq_first(session.role);
    const Role peer = session.role == Role::Sensor ? Role::Processor : Role::Sensor;
    session.recv_seq = role_seq_first(peer) - 1;
    session.state = ChannelState::Established;
}

}  // namespace

std::uint64_t role_seq_first(Role role) {
    return role == Role::Sensor ? kSensorSeqFirst : kProcessorSeqFirst;
}

std::uint64_t role_seq_last(Role role) {
    return role == Role::Sensor ? kSensorSeqLast : kProcessorSeqLast;
}

SessionState make_sensor_session(std::uint16_t sensor_id, std::uint8_t suite_id,
                                 Bytes sig_secret_key, Bytes kem_secret_key,
                                 std::uint64_t rng_seed, bool per_frame_signature) {
    SessionState s;
    s.role = Role::Sensor;
    s.sensor_id = sensor_id;
    s.suite_id = suite_id;
    s.sig_secret_key = std::move(sig_secret_key);
    s.kem_secret_key = std::move(kem_secret_key);
    s.per_frame_signature = per_frame_signature;
    s.rng = rng::make_engine(rng_seed, 10);
    return s;
}

SessionState make_processor_session(std::uint64_t rng_seed, bool per_frame_signature) {
    SessionState s;
    s.role = Role::Processor;
    s.per_frame_signature = per_frame_signature;
    s.rng = rng::make_engine(rng_seed, 11);
    return s;
}

SensorProvision provision_sensor(SensorRegistry& registry, const CryptoSuite& suite,
                                 std::uint16_t sensor_id, rng::Engine& eng) {
    const KeyPair sig_keys = suite.sig->keygen(eng);
    const KeyPair kem_keys = suite.kem->keygen(eng);
    registry.add(sensor_id,
                 SensorRecord{suite.suite_id, sig_keys.public_key, kem_keys.public_key});
    return SensorProvision{sig_keys.secret_key, kem_keys.secret_key};
}

SecureFrame handshake_hello(SessionState& sensor) {
    if (sensor.role != Role::Sensor) throw WrongState("only the sensor side sends Hello");
    if (sensor.state != ChannelState::Idle) {
        throw WrongState("Hello requires an idle session");
    }
    const CryptoSuite& suite = resolve_suite(sensor.suite_id);

    rng::fill_bytes(sensor.rng, sensor.hello_nonce.data(), sensor.hello_nonce.size());
    const Bytes signature = suite.sig->sign(
        sensor.sig_secret_key,
        hello_signed_message(sensor.sensor_id, sensor.suite_id, sensor.hello_nonce));

    SecureFrame frame;
    frame.msg_type = MsgType::Hello;
    frame.suite_id = sensor.suite_id;
    frame.sensor_id = sensor.sensor_id;
    frame.sequence = 0;
    frame.nonce = make_nonce(sensor.sensor_id, 0);
    frame.payload.assign(sensor.hello_nonce.begin(), sensor.hello_nonce.end());
    frame.payload.insert(frame.payload.end(), signature.begin(), signature.end());

    sensor.hello_transcript = serialize_frame(frame);
    sensor.state = ChannelState::HelloSent;
    return frame;
}

SecureFrame handshake_respond(SessionState& processor, const SecureFrame& hello,
                              const SensorRegistry& registry) {
    if (processor.role != Role::Processor) {
        throw WrongState("only the processor side responds");
    }
    if (processor.state != ChannelState::Idle &&
        processor.state != ChannelState::Established) {
        throw WrongState("response requires an idle session or a rotation");
    }
    if (hello.msg_type != MsgType::Hello) throw MalformedFrame("expected a Hello frame");

    const CryptoSuite& suite = resolve_suite(hello.suite_id);
    const SensorRecord* record = registry.find(hello.sensor_id);
    if (record == nullptr) {
        throw UnknownSensor("sensor " + std::to_string(hello.sensor_id) +
                            " is not in the registry");
    }
    if (record->suite_id != hello.suite_id) {
        throw UnsupportedSuite("hello suite does not match the registry entry");
    }
    if (hello.payload.size() != 32 + suite.sig->signature_size()) {
        throw MalformedFrame("hello payload must be nonce plus signature");
    }

    std::array<std::uint8_t, 32> hello_nonce{};
    std::copy_n(hello.payload.begin(), 32, hello_nonce.begin());
    const Bytes signature(hello.payload.begin() + 32, hello.payload.end());
    if (!suite.sig->verify(record->verification_key,
                           hello_signed_message(hello.sensor_id, hello.suite_id, hello_nonce),
                           signature)) {
        processor.state = ChannelState::Failed;
        throw SignatureInvalid();
    }

    const Kem::Encapsulation enc =
        suite.kem->encapsulate(record->kem_public_key, processor.rng);

    SecureFrame response;
    response.msg_type = MsgType::KemResponse;
    response.suite_id = hello.suite_id;
    response.sensor_id = hello.sensor_id;
    response.sequence = 0;
    response.nonce = make_nonce(hello.sensor_id, 0);
    response.payload = enc.ciphertext;

    processor.sensor_id = hello.sensor_id;
    processor.suite_id = hello.suite_id;
    processor.peer_verify_key = record->verification_key;
    establish(processor, derive_session_key(enc.shared_secret, hello_nonce,
                                            serialize_frame(hello), enc.ciphertext));
    return response;
}

void handshake_complete(SessionState& sensor, const SecureFrame& response) {
    if (sensor.role != Role::Sensor) throw WrongState("only the sensor side completes");
    if (sensor.state != ChannelState::HelloSent) {
        throw WrongState("completion requires a sent Hello");
    }
    if (response.msg_type != MsgType::KemResponse) {
        throw MalformedFrame("expected a KemResponse frame");
    }
    if (response.sensor_id != sensor.sensor_id) {
        throw MalformedFrame("response addresses a different sensor");
    }
    if (response.suite_id != sensor.suite_id) {
        throw UnsupportedSuite("response switched suites mid-handshake");
    }
    const CryptoSuite& suite = resolve_suite(sensor.suite_id);

    const auto shared_secret =
        suite.kem->decapsulate(sensor.kem_secret_key, response.payload);
    establish(sensor, derive_session_key(shared_secret, sensor.hello_nonce,
                                         sensor.hello_transcript, response.payload));
    sensor.hello_transcript.clear();
}

SecureFrame seal_frame(SessionState& session, const Bytes& plaintext) {
    if (session.state != ChannelState::Established) {
        throw WrongState("sealing requires an established session");
    }
    const CryptoSuite& suite = resolve_suite(session.suite_id);
    if (session.send_seq < role_seq_first(session.role) ||
        session.send_seq > role_seq_last(session.role)) {
        throw SequenceExhausted();
    }

    Bytes body = plaintext;
    if (session.per_frame_signature && session.role == Role::Sensor) {
        const Bytes signature = suite.sig->sign(session.sig_secret_key, plaintext);
        body.insert(body.end(), signature.begin(), signature.end());
    }

    SecureFrame frame;
    frame.msg_type = MsgType::Data;
    frame.suite_id = session.suite_id;
    frame.sensor_id = session.sensor_id;
    frame.sequence = session.send_seq;
    frame.nonce = make_nonce(session.sensor_id, frame.sequence);
    frame.payload.resize(body.size());  // sized so the aad sees payload_len

    const auto aad_bytes = header_bytes(frame);
    const Bytes sealed =
        suite.aead->seal(session.session_key, frame.nonce,
                         Bytes(aad_bytes.begin(), aad_bytes.end()), body);
    std::copy_n(sealed.begin(), body.size(), frame.payload.begin());
    std::copy_n(sealed.begin() + body.size(), kTagSize, frame.tag.begin());

    session.send_seq += 1;
    return frame;
}

Bytes open_frame(SessionState& session, const SecureFrame& frame) {
    if (session.state != ChannelState::Established) {
        throw WrongState("opening requires an established session");
    }
    if (frame.msg_type != MsgType::Data) throw MalformedFrame("expected a Data frame");
    if (frame.suite_id != session.suite_id) {
        throw UnsupportedSuite("frame suite does not match the session");
    }
    if (frame.sensor_id != session.sensor_id) {
        throw UnknownSensor("frame addresses a different sensor's session");
    }

    const Role peer = session.role == Role::Sensor ? Role::Processor : Role::Sensor;
    if (frame.sequence < role_seq_first(peer) || frame.sequence > role_seq_last(peer)) {
        throw MalformedFrame("sequence outside the peer's counter space");
    }
    if (frame.sequence <= session.recv_seq) throw ReplayDetected();
    if (frame.nonce != make_nonce(frame.sensor_id, frame.sequence)) {
        throw MalformedFrame("nonce does not follow the counter rule");
    }

    const CryptoSuite& suite = resolve_suite(session.suite_id);
    const auto aad_bytes = header_bytes(frame);
    Bytes sealed = frame.payload;
    sealed.insert(sealed.end(), frame.tag.begin(), frame.tag.end());
    auto plaintext = suite.aead->open(session.session_key, frame.nonce,
                                      Bytes(aad_bytes.begin(), aad_bytes.end()), sealed);
    if (!plaintext) throw TagMismatch();

    if (session.per_frame_signature && session.role == Role::Processor) {
        const std::size_t sig_size = suite.sig->signature_size();
        if (plaintext->size() < sig_size) {
            throw MalformedFrame("payload too short for the per-frame signature");
        }
        const Bytes body(plaintext->begin(), plaintext->end() - sig_size);
        const Bytes signature(plaintext->end() - sig_size, plaintext->end());
        if (!suite.sig->verify(session.peer_verify_key, body, signature)) {
            throw SignatureInvalid();
        }
        session.recv_seq = frame.sequence;
        return body;
    }

    session.recv_seq = frame.sequence;
    return *plaintext;
}

void rotate_keys(SessionState& sensor, SessionState& processor,
                 const SensorRegistry& registry) {
    if (sensor.state != ChannelState::Established ||
        processor.state != ChannelState::Established) {
        throw WrongState("rotation requires two established sessions");
    }
    sensor.state = ChannelState::Idle;
    const SecureFrame hello = handshake_hello(sensor);
    const SecureFrame response = handshake_respond(processor, hello, registry);
    handshake_complete(sensor, response);
}

SecureFrame close_frame(const SessionState& session) {
    SecureFrame frame;
    frame.msg_type = MsgType::Close;
    frame.suite_id = session.suite_id;
    frame.sensor_id = session.sensor_id;
    frame.sequence = 0;
    frame.nonce = make_nonce(session.sensor_id, 0);
    return frame;
}

}  // namespace qnav::bus

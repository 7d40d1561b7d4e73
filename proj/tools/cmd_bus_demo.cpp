#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <iostream>

#include "commands.hpp"
#include "qnav/bus_registry.hpp"
#include "qnav/bus_session.hpp"
#include "qnav/bus_suite.hpp"
#include "qnav/environment.hpp"
#include "qnav/rng.hpp"
#include "run_support.hpp"

namespace qnav::cli {

namespace {

constexpr std::uint16_t kDemoSensorId = 257;
constexpr int kDemoFrames = 24;
constexpr int kTamperProbeIndex = 10;  // data frame the processor tampers first
constexpr int kRekeyAfter = 16;        // sensor rotates keys after this many frames

// Sensor process: establish, stream sensor readings from a short drive, rekey
// once mid-stream, close. Runs in the forked child.
int run_sensor(int fd, const cfg::ExperimentConfig& config,
               const bus::SensorProvision& keys) {
    bus::SessionState session = bus::make_sensor_session(
        kDemoSensorId, config.suite_id, keys.sig_secret_key, keys.kem_secret_key,
        config.rng_seed + 1, config.per_frame_signature);

    send_frame(fd, handshake_hello(session));
    handshake_complete(session, recv_frame(fd));

    env::Environment world(config.environment, config.rng_seed);
    env::StepResult current = world.reset(config.rng_seed);
    rng::Engine action_rng = rng::make_engine(config.rng_seed, 50);

    for (int i = 0; i < kDemoFrames; ++i) {
        if (i == kRekeyAfter) {
            // In-band rotation: a fresh Hello on the live channel.
            session.state = bus::ChannelState::Idle;
            send_frame(fd, handshake_hello(session));
            handshake_complete(session, recv_frame(fd));
        }
        send_frame(fd, seal_frame(session, encode_sensor_payload(current.frames)));
        if (current.done) {
            current = world.reset(config.rng_seed + static_cast<std::uint64_t>(i) + 1);
        } else {
            current = world.step(
                static_cast<env::Action>(rng::uniform_below(action_rng, env::kActionCount)));
        }
    }
    send_frame(fd, close_frame(session));
    return 0;
}

struct ProcessorTally {
    int data_frames = 0;
    int rekeys = 0;
    std::size_t payload_bytes = 0;
    bool tamper_rejected = false;
    bool replay_rejected = false;
};

// Processor side: respond to Hellos (initial and rekey), open the stream, and
// deliberately probe one frame with a flipped bit and one replay.
ProcessorTally run_processor(int fd, const cfg::ExperimentConfig& config,
                             const bus::SensorRegistry& registry) {
    bus::SessionState session =
        bus::make_processor_session(config.rng_seed + 2, config.per_frame_signature);
    ProcessorTally tally;
    bool done = false;
    while (!done) {
        const bus::SecureFrame frame = recv_frame(fd);
        switch (frame.msg_type) {
            case bus::MsgType::Hello: {
                if (session.state == bus::ChannelState::Established) tally.rekeys += 1;
                send_frame(fd, handshake_respond(session, frame, registry));
                break;
            }
            case bus::MsgType::Data: {
                if (tally.data_frames == kTamperProbeIndex) {
                    bus::SecureFrame tampered = frame;
                    if (tampered.payload.empty()) {
                        tampered.tag[0] ^= 1;
                    } else {
                        tampered.payload[0] ^= 1;
                    }
                    try {
                        open_frame(session, tampered);
                    } catch (const bus::TagMismatch&) {
                        tally.tamper_rejected = true;
                    }
                }
                const bus::Bytes payload = open_frame(session, frame);
                tally.payload_bytes += payload.size();
                const auto frames = decode_sensor_payload(payload);
                log_debug("bus-demo: opened frame " + std::to_string(tally.data_frames) +
                          " carrying " + std::to_string(frames.size()) + " modalities");
                tally.data_frames += 1;
                if (tally.data_frames == kTamperProbeIndex + 1) {
                    try {
                        open_frame(session, frame);  // replay of the frame just accepted
                    } catch (const bus::ReplayDetected&) {
                        tally.replay_rejected = true;
                    }
                }
                break;
            }
            case bus::MsgType::Close:
                done = true;
                break;
            case bus::MsgType::KemResponse:
                throw bus::WrongState("processor received a KemResponse");
        }
    }
    return tally;
}

}  // namespace

int cmd_bus_demo(const cfg::ExperimentConfig& config) {
    std::filesystem::create_directories(config.output_dir);
    write_run_manifest(config, "bus-demo", config.output_dir);
    const bus::CryptoSuite* suite = bus::find_suite(config.suite_id);

    bus::SensorRegistry registry;
    rng::Engine provision_rng = rng::make_engine(config.rng_seed, 42);
    const bus::SensorProvision keys =
        provision_sensor(registry, *suite, kDemoSensorId, provision_rng);
    if (!config.registry_path.empty()) {
        registry.save_file(config.registry_path);
        log_info("bus-demo: wrote registry to " + config.registry_path);
    }

    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) {
        throw std::runtime_error(std::string("socketpair failed: ") + std::strerror(errno));
    }

    const pid_t child = ::fork();
    if (child < 0) throw std::runtime_error(std::string("fork failed: ") + std::strerror(errno));
    if (child == 0) {
        ::close(fds[0]);
        int code = 1;
        try {
            code = run_sensor(fds[1], config, keys);
        } catch (const std::exception& e) {
            std::cerr << "[qnav] bus-demo sensor: " << e.what() << '\n';
        }
        ::close(fds[1]);
        ::_exit(code);
    }

    ::close(fds[1]);
    ProcessorTally tally;
    std::string failure;
    try {
        // When a registry file was requested, the processor proves the format
        // by reloading its trust store from disk.
        const bus::SensorRegistry effective =
            config.registry_path.empty() ? registry
                                         : bus::SensorRegistry::load_file(config.registry_path);
        tally = run_processor(fds[0], config, effective);
    } catch (const std::exception& e) {
        failure = e.what();
    }
    ::close(fds[0]);

    int status = 0;
    ::waitpid(child, &status, 0);
    const bool child_ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;

    if (!failure.empty()) throw std::runtime_error("bus-demo processor: " + failure);
    if (!child_ok) throw std::runtime_error("bus-demo sensor process failed");
    if (tally.data_frames != kDemoFrames || !tally.tamper_rejected || !tally.replay_rejected ||
        tally.rekeys != 1) {
        throw std::runtime_error("bus-demo stream incomplete: frames " +
                                 std::to_string(tally.data_frames) + ", rekeys " +
                                 std::to_string(tally.rekeys));
    }

    std::cout << "bus-demo: suite " << suite->name << ", frames " << tally.data_frames
              << ", payload bytes " << tally.payload_bytes << ", rekeys " << tally.rekeys
              << ", tamper rejected yes, replay rejected yes\n";
    return 0;
}

}  // namespace qnav::cli

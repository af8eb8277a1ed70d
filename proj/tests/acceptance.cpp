// Acceptance suite: runs each shipping criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "skybridge/bridge.hpp"
#include "skybridge/bus.hpp"
#include "skybridge/demo.hpp"
#include "skybridge/drone.hpp"
#include "skybridge/envelope.hpp"
#include "skybridge/frame.hpp"
#include "skybridge/harness.hpp"
#include "skybridge/jpeg.hpp"
#include "skybridge/log.hpp"
#include "skybridge/sim.hpp"
#include "skybridge/timeline.hpp"
#include "test_util.hpp"

using namespace skybridge;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %-28s %s\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// --- 1. grayscale trick ---------------------------------------------------
void criterion_grayscale() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  const std::pair<int, int> sizes[] = {{4, 4}, {16, 16}, {640, 360}};
  bool ok = true;
  for (int i = 0; i < 1000 && ok; ++i) {
    const auto [w, h] = sizes[i % 3];
    const Yuv420Frame frame = testutil::random_yuv_frame(rng, w, h);
    const Nv21Frame nv21 = yuv420_to_nv21_gray(frame);
    ok = ok && nv21.y == frame.y;
    for (uint8_t b : nv21.vu) {
      if (b != 128) {
        ok = false;
        break;
      }
    }
    // chroma independence
    Yuv420Frame recolored = frame;
    for (auto& b : recolored.u) b = static_cast<uint8_t>(rng());
    for (auto& b : recolored.v) b = static_cast<uint8_t>(rng());
    const Nv21Frame nv21_b = yuv420_to_nv21_gray(recolored);
    ok = ok && nv21_b.y == nv21.y && nv21_b.vu == nv21.vu;
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 10.0;
  char detail[128];
  std::snprintf(detail, sizeof detail, "1000 frames incl. chroma pairs in %.2f s",
                elapsed);
  report(1, "grayscale trick", ok, detail);
}

// --- 2. JPEG fidelity -----------------------------------------------------
void criterion_jpeg() {
  bool ok = true;
  double worst_max = 0;
  double worst_mean = 0;

  std::vector<GrayFrame> frames;
  frames.push_back(testutil::uniform_frame(64, 64, 128));
  frames.push_back(testutil::uniform_frame(64, 64, 200));
  frames.push_back(testutil::uniform_frame(64, 64, 16));
  frames.push_back(testutil::uniform_frame(64, 64, 235));
  frames.push_back(testutil::gradient_frame(64, 64));

  for (const auto& frame : frames) {
    const auto bytes = encode_jpeg_gray_bytes(frame, 90);
    const auto decoded = decode_jpeg_gray(bytes);
    if (!std::holds_alternative<GrayFrame>(decoded)) {
      ok = false;
      break;
    }
    const GrayFrame& out = std::get<GrayFrame>(decoded);
    int max_abs = 0;
    double sum = 0;
    for (size_t i = 0; i < frame.pixels.size(); ++i) {
      const int d = std::abs(int(frame.pixels[i]) - int(out.pixels[i]));
      max_abs = std::max(max_abs, d);
      sum += d;
    }
    const double mean = sum / frame.pixels.size();
    worst_max = std::max(worst_max, double(max_abs));
    worst_mean = std::max(worst_mean, mean);
    ok = ok && max_abs <= 6 && mean <= 2.0;
  }

  std::mt19937_64 rng(1002);
  GrayFrame noise;
  noise.width = 640;
  noise.height = 360;
  noise.pixels.resize(640 * 360);
  for (auto& p : noise.pixels) p = static_cast<uint8_t>(rng());
  const size_t jpeg_size = encode_jpeg_gray_bytes(noise, 90).size();
  ok = ok && jpeg_size < 345'600;

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "q90 max err %.0f (<=6), mean %.2f (<=2); 640x360 jpeg %zu B < 345600",
                worst_max, worst_mean, jpeg_size);
  report(2, "JPEG fidelity bound", ok, detail);
}

// --- 3. skip-frame rate ---------------------------------------------------
double published_rate_simtime(uint32_t skip_frame) {
  SimTimeline timeline;
  SimConfig sim_config;
  sim_config.camera_fps = 30;
  sim_config.link = {0.0, 0.0, false};
  CameraSim sim(sim_config, 0);
  LinkScheduler link(sim_config.link, 5);

  BridgeConfig bridge_config;
  bridge_config.skip_frame = skip_frame;
  size_t published = 0;
  BridgeCore bridge(
      bridge_config, [&](const ImagePayload&) { ++published; },
      [](const VirtualStickCommand&) {}, [](const GimbalCommand&) {});

  std::function<void(uint32_t)> schedule_frame = [&](uint32_t index) {
    timeline.at(sim.frame_due_us(index), [&, index] {
      Yuv420Frame frame = sim.frame_tick(timeline.now_us());
      timeline.at(link.delivery_for(timeline.now_us()),
                  [&, frame = std::move(frame)] { bridge.on_frame(frame); });
      schedule_frame(index + 1);
    });
  };
  schedule_frame(0);
  constexpr double kWindowS = 10.0;
  timeline.run_until(static_cast<uint64_t>(kWindowS * 1e6) - 1);  // [0, 10 s)
  return static_cast<double>(published) / kWindowS;
}

void criterion_skip_rate() {
  const double rate_skip2 = published_rate_simtime(2);
  const double rate_skip1 = published_rate_simtime(1);
  const bool ok = std::abs(rate_skip2 - 15.0) <= 0.75 && std::abs(rate_skip1 - 30.0) <= 1.0;
  char detail[128];
  std::snprintf(detail, sizeof detail,
                "skip2 -> %.2f fps (15 +/- 0.75), skip1 -> %.2f fps (30 +/- 1)",
                rate_skip2, rate_skip1);
  report(3, "skip-frame rate", ok, detail);
}

// --- 4. control-rate contract ----------------------------------------------
void criterion_control_rate() {
  bool ok = true;
  std::string note;

  // (a) 10 Hz for 60 simulated seconds stays NORMAL.
  {
    DroneCore drone(0);
    for (uint64_t t = 0; t <= 60'000'000 && ok; t += 100'000) {
      drone.submit_virtual_stick({0, 0.2f, 0, 0}, t);
      ok = drone.state().mode == FlightMode::kNormal;
    }
    if (!ok) note = "10 Hz stream left NORMAL";
  }

  // (b) a 500 ms gap trips the failsafe within 200 ms of the last command.
  if (ok) {
    DroneCore drone(0);
    drone.submit_virtual_stick({}, 100'000);
    drone.advance_to(100'000 + 200'000);  // exactly the deadline
    const bool tripped_at_deadline = drone.state().mode == FlightMode::kFailsafeHover;
    drone.advance_to(600'000);  // finish the 500 ms gap
    ok = tripped_at_deadline && drone.state().mode == FlightMode::kFailsafeHover &&
         drone.state().velocity == Vec3{};
    if (!ok) note = "500 ms gap did not trip within 200 ms";
  }

  // (c) 100 Hz burst applies at most 25 commands per second.
  uint64_t applied = 0;
  if (ok) {
    DroneCore drone(0);
    drone.submit_virtual_stick({}, 0);
    const uint64_t before = drone.applied_commands();
    for (int i = 0; i < 100; ++i) {
      drone.submit_virtual_stick({0, 0.1f, 0, 0},
                                 100'000 + static_cast<uint64_t>(i) * 10'000);
    }
    drone.advance_to(100'000 + 999'999);
    applied = drone.applied_commands() - before;
    ok = applied <= 25;
    if (!ok) note = "burst applied too many commands";
  }

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "10 Hz NORMAL 60 s; gap trip at +200 ms; burst applied %llu/s (<=25)%s%s",
                static_cast<unsigned long long>(applied), note.empty() ? "" : " - ",
                note.c_str());
  report(4, "control-rate contract", ok, detail);
}

// --- 5. latency reproduction ------------------------------------------------
void criterion_latency() {
  const auto start = std::chrono::steady_clock::now();
  DemoConfig config;
  config.sim_time = true;
  config.n_toggles = 30;
  config.period_us = 2'000'000;
  config.camera_fps = 30;
  config.skip_frame = 2;
  config.jpeg_quality = 90;
  config.link = {320.0, 0.0, false};
  config.out_csv = "acceptance_latency_320.csv";

  const DemoResult with_link = run_demo_simtime(config);
  bool ok = with_link.exit_code == 0 && with_link.report.has_value();
  double avg_320 = 0, std_320 = 0, avg_0 = 0;
  if (ok) {
    avg_320 = with_link.report->stats.delay_avg_ms;
    std_320 = with_link.report->stats.delay_std_ms;
    // link + one published frame period (134 ms at 15 fps) + margin
    ok = avg_320 >= 320.0 && avg_320 <= 320.0 + 134.0 + 10.0 && std_320 <= 70.0;
  }

  config.link = {0.0, 0.0, false};
  config.out_csv = "acceptance_latency_0.csv";
  const DemoResult no_link = run_demo_simtime(config);
  if (ok) {
    ok = no_link.exit_code == 0 && no_link.report.has_value();
    if (ok) {
      avg_0 = no_link.report->stats.delay_avg_ms;
      ok = avg_0 <= 100.0;
    }
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 90.0;
  std::remove("acceptance_latency_320.csv");
  std::remove("acceptance_latency_0.csv");

  char detail[200];
  std::snprintf(detail, sizeof detail,
                "320ms link: avg %.1f in [320,464], std %.1f <= 70; 0ms link: avg %.1f "
                "<= 100; both runs %.1f s wall",
                avg_320, std_320, avg_0, elapsed);
  report(5, "latency reproduction", ok, detail);
}

// --- 6. statistics oracle ---------------------------------------------------
void criterion_stats_oracle() {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> value(-5000.0, 5000.0);
  bool ok = true;
  for (int trial = 0; trial < 10'000 && ok; ++trial) {
    std::vector<double> samples(1 + rng() % 128);
    for (auto& s : samples) s = value(rng);

    const MeanStd ours = mean_std(samples);
    long double sum = 0;
    for (double s : samples) sum += s;
    const long double mean = sum / samples.size();
    long double sq = 0;
    for (double s : samples) sq += (s - mean) * (s - mean);
    const long double std_ref =
        samples.size() > 1 ? std::sqrt(sq / (samples.size() - 1)) : 0.0L;

    const double mean_err = std::abs(ours.avg - double(mean)) /
                            std::max(1.0, std::abs(double(mean)));
    const double std_err = std::abs(ours.std - double(std_ref)) /
                           std::max(1.0, std::abs(double(std_ref)));
    ok = mean_err <= 1e-9 && std_err <= 1e-9;
  }

  const StreamStats worked = compute_stats(std::vector<double>{300.0, 340.0}, {});
  ok = ok && std::abs(worked.delay_avg_ms - 320.0) < 1e-12 &&
       std::abs(worked.delay_std_ms - 28.284271247461902) < 1e-9;

  report(6, "statistics oracle", ok,
         "10k random sample sets vs long-double reference; [300,340] -> (320, 28.28...)");
}

// --- 7. wire robustness -----------------------------------------------------
void criterion_wire() {
  std::mt19937_64 rng(1007);
  bool ok = true;
  for (int i = 0; i < 10'000 && ok; ++i) {
    const Envelope env = testutil::random_envelope(rng, 1024);
    const auto decoded = decode_envelope(encode_envelope(env));
    ok = std::holds_alternative<Envelope>(decoded) && std::get<Envelope>(decoded) == env;
  }

  size_t decoded_ok = 0;
  size_t typed_errors = 0;
  for (int i = 0; i < 100'000; ++i) {
    std::vector<uint8_t> buf(rng() % (64 * 1024));
    for (auto& b : buf) b = static_cast<uint8_t>(rng());
    const auto result = decode_envelope(buf);
    if (std::holds_alternative<Envelope>(result)) {
      ++decoded_ok;
    } else {
      ++typed_errors;
    }
  }
  ok = ok && decoded_ok + typed_errors == 100'000;

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "10k round-trips exact; 100k fuzz buffers -> %zu values + %zu typed "
                "errors, 0 crashes",
                decoded_ok, typed_errors);
  report(7, "wire robustness", ok, detail);
}

// --- 8. kinematics oracle ---------------------------------------------------
void criterion_kinematics() {
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> pos(-500, 500);
  std::uniform_real_distribution<double> yaw(0, 360);
  std::uniform_real_distribution<double> dt_dist(0.001, 0.5);
  std::uniform_real_distribution<float> stick(-1.0f, 1.0f);

  bool ok = true;
  double worst = 0;
  for (int i = 0; i < 1000 && ok; ++i) {
    DroneState state;
    state.position = {pos(rng), pos(rng), pos(rng)};
    state.yaw_deg = yaw(rng);
    VirtualStickCommand cmd{stick(rng), stick(rng), stick(rng), stick(rng)};
    const double dt = dt_dist(rng);

    const DroneState ours = apply_command(state, cmd, dt);

    // Independent route: complex rotation.
    double ref_yaw = state.yaw_deg + cmd.yaw_rate * 100.0 * dt;
    ref_yaw = std::fmod(ref_yaw, 360.0);
    if (ref_yaw < 0) ref_yaw += 360.0;
    if (ref_yaw >= 360.0) ref_yaw = 0.0;
    const std::complex<double> rotated =
        std::complex<double>(cmd.pitch * 10.0, cmd.roll * 10.0) *
        std::polar(1.0, ref_yaw * std::acos(-1.0) / 180.0);
    const double ref_x = state.position.x + rotated.real() * dt;
    const double ref_y = state.position.y + rotated.imag() * dt;
    const double ref_z = state.position.z + cmd.vertical * 4.0 * dt;

    const double err = std::max({std::abs(ours.position.x - ref_x),
                                 std::abs(ours.position.y - ref_y),
                                 std::abs(ours.position.z - ref_z)});
    worst = std::max(worst, err);
    ok = err <= 1e-9;
  }

  // zero command is a fixed point
  DroneState state;
  state.position = {1, 2, 3};
  state.yaw_deg = 42;
  const DroneState hover = apply_command(state, {}, 0.3);
  ok = ok && hover.position == state.position && hover.yaw_deg == state.yaw_deg;

  // displacement norm independent of yaw when yaw_rate is zero
  for (int i = 0; i < 100 && ok; ++i) {
    VirtualStickCommand cmd{stick(rng), stick(rng), 0, 0};
    DroneState a;
    DroneState b;
    b.yaw_deg = yaw(rng);
    const DroneState ma = apply_command(a, cmd, 0.2);
    const DroneState mb = apply_command(b, cmd, 0.2);
    const double na = std::hypot(ma.position.x, ma.position.y);
    const double nb = std::hypot(mb.position.x, mb.position.y);
    ok = std::abs(na - nb) <= 1e-9;
  }

  char detail[128];
  std::snprintf(detail, sizeof detail,
                "1000 triples vs complex-rotation reference, worst err %.2e m", worst);
  report(8, "kinematics oracle", ok, detail);
}

// --- 9. determinism -----------------------------------------------------------
void criterion_determinism(const std::string& cli) {
  auto run_once = [&](const std::string& out) {
    const std::string command = "SKYBRIDGE_LOG=error " + cli +
                                " demo --sim-time --seed 42 --out " + out +
                                " > /dev/null";
    return std::system(command.c_str());
  };
  const int rc_a = run_once("acceptance_det_a.csv");
  const int rc_b = run_once("acceptance_det_b.csv");

  auto slurp = [](const char* path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = slurp("acceptance_det_a.csv");
  const std::string b = slurp("acceptance_det_b.csv");
  const bool ok = rc_a == 0 && rc_b == 0 && !a.empty() && a == b;
  std::remove("acceptance_det_a.csv");
  std::remove("acceptance_det_b.csv");

  char detail[128];
  std::snprintf(detail, sizeof detail,
                "two 'demo --sim-time --seed 42' runs, %zu-byte CSVs byte-identical",
                a.size());
  report(9, "determinism", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level(LogLevel::kError);
  std::string cli = "./skybridge";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }

  criterion_grayscale();
  criterion_jpeg();
  criterion_skip_rate();
  criterion_control_rate();
  criterion_latency();
  criterion_stats_oracle();
  criterion_wire();
  criterion_kinematics();
  criterion_determinism(cli);

  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}

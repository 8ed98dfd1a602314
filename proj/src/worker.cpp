#include "dgs/worker.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dgs/directions.hpp"
#include "dgs/gradient.hpp"
#include "dgs/objectives.hpp"
#include "dgs/scheduler.hpp"

namespace dgs::worker {

int run_worker(std::istream& in, std::ostream& out) {
  std::string line;
  if (!std::getline(in, line)) return 2;
  std::istringstream hs(line);
  std::string magic, spec;
  int version = 0;
  hs >> magic >> version >> spec;
  if (magic != "DGSW" || version != 1 || spec.empty()) return 2;

  ObjectiveHandle f;
  try {
    f = objectives::objective_from_spec(spec);
  } catch (const std::exception&) {
    return 2;
  }
  const int d = f.dimension;
  directions::DirectionMatrix frame = directions::init_frame(d);
  std::vector<double> theta;
  std::vector<double> point(d);

  out << "READY\n" << std::flush;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cmd;
    ls >> cmd;
    if (cmd == "END") return 0;

    if (cmd == "THETA") {
      int n = -1;
      ls >> n;
      if (n != d) return 3;
      theta.resize(d);
      std::string hex;
      for (int i = 0; i < d; ++i) {
        if (!(ls >> hex)) return 3;
        theta[i] = scheduler::hex_to_double(hex);
      }
      continue;
    }

    if (cmd == "FRAME") {
      std::string mode, alpha_hex;
      std::uint64_t seed = 0;
      if (!(ls >> mode >> alpha_hex >> seed)) return 3;
      double alpha = scheduler::hex_to_double(alpha_hex);
      auto pm = (mode == "C") ? directions::PerturbMode::Compose
                              : directions::PerturbMode::Replace;
      frame = directions::perturb_frame(frame, alpha, seed, pm);
      continue;
    }

    if (cmd == "TASK") {
      long long id = -1;
      int dir = -1, node = -1;
      std::string scale_hex;
      std::uint64_t seed = 0, cksum = 0;
      if (!(ls >> id >> dir >> node >> scale_hex >> seed >> cksum)) return 3;
      if (theta.empty()) {
        out << "ERROR " << id << " no-theta\n" << std::flush;
        continue;
      }
      if (dir < 0 || dir >= d) {
        out << "ERROR " << id << " bad-direction\n" << std::flush;
        continue;
      }
      double scale = scheduler::hex_to_double(scale_hex);
      gradient::eval_point(theta.data(), d, frame.row(dir), scale,
                           point.data());
      if (scheduler::point_checksum(point) != cksum) {
        out << "ERROR " << id << " checksum-mismatch\n" << std::flush;
        continue;
      }
      try {
        double value = f(point.data(), d, seed);
        out << "RESULT " << id << " " << scheduler::double_to_hex(value)
            << "\n"
            << std::flush;
      } catch (const std::exception&) {
        out << "ERROR " << id << " eval-failed\n" << std::flush;
      }
      continue;
    }

    return 3;  // unknown command
  }
  return 0;  // EOF counts as shutdown
}

}  // namespace dgs::worker

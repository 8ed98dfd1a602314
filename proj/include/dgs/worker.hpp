#pragma once

#include <iosfwd>

namespace dgs::worker {

// Child-process side of the evaluation protocol: reads newline-delimited
// commands from `in`, writes responses to `out`. Lines:
//   handshake  DGSW 1 <objective-spec>          -> READY
//   broadcast  THETA <d> <bits-hex>*d           (no response)
//   frame      FRAME <R|C> <alpha-bits-hex> <seed>   (no response)
//   task       TASK <id> <dir> <node> <scale-bits-hex> <seed> <checksum>
//                -> RESULT <id> <value-bits-hex>  |  ERROR <id> <reason>
//   shutdown   END                               (worker exits)
// The worker rebuilds each evaluation point as theta + scale * frame_row and
// refuses (ERROR, checksum-mismatch) if its FNV-1a checksum differs from the
// master's. Returns the process exit code: 0 on END/EOF, 2 on a bad
// handshake, 3 on a protocol violation.
int run_worker(std::istream& in, std::ostream& out);

}  // namespace dgs::worker

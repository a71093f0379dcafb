#pragma once

namespace memheat {

/// Execution mode for the data-parallel kernels. Every parallel kernel has a
/// serial twin with identical arithmetic (parallelism is over independent
/// output elements only), so results are bit-identical across modes.
enum class Exec { serial, openmp };

/// Process-wide default used by the dispatching wrappers.
Exec default_exec();
void set_default_exec(Exec e);

}  // namespace memheat

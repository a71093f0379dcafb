#include "memheat/exec.hpp"

namespace memheat {

namespace {
Exec g_exec = Exec::openmp;
}

Exec default_exec() { return g_exec; }
void set_default_exec(Exec e) { g_exec = e; }

}  // namespace memheat

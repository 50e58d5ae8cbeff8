#pragma once

namespace mcf {

/// Loop driver for node- and sample-parallel kernels. Serial is the
/// reference path; Parallel must reproduce it bit for bit.
enum class Exec { Serial, Parallel };

/// Caps OpenMP worker count (<= 0 restores the runtime default).
void set_thread_count(int n);
int thread_count();

}  // namespace mcf

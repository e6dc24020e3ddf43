#pragma once

namespace checkout {

// Batch kernels run either serially (reference path, kept for testing) or
// with OpenMP over their independent work items. Both paths produce
// identical output.
enum class ExecMode { Serial, Parallel };

}  // namespace checkout

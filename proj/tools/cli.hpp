#pragma once

// Full command-line surface, callable in-process (tests drive it with argv
// vectors and captured streams). Returns the process exit code: 0 success,
// 1 runtime failure, 2 usage/missing-file errors.
int cli_main(int argc, const char* const* argv);

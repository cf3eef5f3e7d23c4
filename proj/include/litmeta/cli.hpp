#pragma once

namespace litmeta {

/// Entry point shared by the binary and the tests.
/// Exit codes: 0 success, 2 validation error, 3 stage failure.
int cli_main(int argc, const char* const* argv);

}  // namespace litmeta

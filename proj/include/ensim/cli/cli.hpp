#pragma once

namespace ensim::cli {

/// Batch front end. Subcommands: eme, ghz, cz, grow, sweep-loss,
/// verify-claims. Returns 0 on success, 1 when claim verification fails,
/// 2 on configuration errors.
int run(int argc, char** argv);

}  // namespace ensim::cli

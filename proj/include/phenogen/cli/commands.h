#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "phenogen/cli/config.h"
#include "phenogen/reward/oracle.h"

namespace phenogen::cli {

inline constexpr const char* kToolVersion = "phenogen 0.1.0";

/// Pharmacophore of the mock oracle when oracle.spec is empty: rewards
/// short, ring-free carbon chains inside a low molecular-weight window.
extern const char* const kToyOracleSpec;

/// Seed of one pipeline stage ("init", "pretrain", "joint", "finetune")
/// derived from the run seed.
std::uint64_t stage_seed(std::uint64_t seed, std::string_view label);

/// Mock or external oracle as configured; external work files go under
/// oracle.workdir or <out_dir>/oracle.
std::unique_ptr<reward::DockingOracle> make_oracle(const RunConfig& cfg);

/// Entry point of the `phenogen` tool without argv[0]. Returns the process
/// exit status: 0 ok, 2 usage or input, 3 oracle, 4 numeric divergence.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phenogen::cli

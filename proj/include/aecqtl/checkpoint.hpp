#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "aecqtl/model.hpp"
#include "aecqtl/optimizer.hpp"

namespace aecqtl {

/// Trained (or freshly initialized) model plus the run that produced it.
///
/// Text form, one `key,value...` record per line:
///
///     aecqtl-checkpoint,1
///     model,tlqnn
///     qubits,9
///     layers,4
///     classes,2
///     feature_dim,512
///     seed,7
///     epochs,20
///     batch,4
///     lr0,0.01
///     decay_every,10
///     decay_factor,0.1
///     theta,<count>,<v>...
///     W,<rows>,<cols>,<v>...
///     b,<count>,<v>...
///
/// Values use shortest round-trip decimals, so save -> load -> save is
/// byte-identical.
struct Checkpoint {
    ModelConfig config;
    ModelParams params;
    std::uint64_t seed = 0;
    TrainConfig train;
};

std::string format_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::istream& in);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace aecqtl

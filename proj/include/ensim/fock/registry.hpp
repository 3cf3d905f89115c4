#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ensim/common.hpp"

namespace ensim::fock {

enum class ModeKind : std::uint8_t { AtomicH, AtomicV, OpticalH, OpticalV, Loss };

std::string_view to_string(ModeKind kind);

/// Index of a bosonic mode inside a ModeRegistry.
struct ModeId {
    std::uint32_t value = 0;

    friend bool operator==(ModeId a, ModeId b) { return a.value == b.value; }
    friend bool operator!=(ModeId a, ModeId b) { return a.value != b.value; }
    friend bool operator<(ModeId a, ModeId b) { return a.value < b.value; }
};

struct ModeInfo {
    ModeKind kind;
    std::string owner;  // qubit / ensemble label, or loss tag
};

/// Immutable table of all modes a simulation run may touch. States hold a
/// shared pointer to their registry; mixing states from different registries
/// is an error.
class ModeRegistry {
  public:
    explicit ModeRegistry(std::vector<ModeInfo> modes) : modes_(std::move(modes)) {}

    std::size_t size() const { return modes_.size(); }

    bool contains(ModeId m) const { return m.value < modes_.size(); }

    const ModeInfo& info(ModeId m) const {
        if (!contains(m)) throw OutOfRangeError("ModeRegistry: unregistered mode");
        return modes_[m.value];
    }

    /// Human-readable mode name, e.g. "H:q1" or "loss:3".
    std::string name(ModeId m) const;

    std::optional<ModeId> find(ModeKind kind, std::string_view owner) const;

    std::vector<ModeId> modes_of_kind(ModeKind kind) const;

  private:
    std::vector<ModeInfo> modes_;
};

using RegistryPtr = std::shared_ptr<const ModeRegistry>;

}  // namespace ensim::fock

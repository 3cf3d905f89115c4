#include "ensim/fock/registry.hpp"

namespace ensim::fock {

std::string_view to_string(ModeKind kind) {
    switch (kind) {
        case ModeKind::AtomicH: return "H";
        case ModeKind::AtomicV: return "V";
        case ModeKind::OpticalH: return "h";
        case ModeKind::OpticalV: return "v";
        case ModeKind::Loss: return "loss";
    }
    return "?";
}

std::string ModeRegistry::name(ModeId m) const {
    const ModeInfo& mi = info(m);
    return std::string(to_string(mi.kind)) + ":" + mi.owner;
}

std::optional<ModeId> ModeRegistry::find(ModeKind kind, std::string_view owner) const {
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].kind == kind && modes_[i].owner == owner)
            return ModeId{static_cast<std::uint32_t>(i)};
    }
    return std::nullopt;
}

std::vector<ModeId> ModeRegistry::modes_of_kind(ModeKind kind) const {
    std::vector<ModeId> out;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (modes_[i].kind == kind) out.push_back(ModeId{static_cast<std::uint32_t>(i)});
    }
    return out;
}

}  // namespace ensim::fock

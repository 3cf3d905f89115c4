#include "ensim/protocols/layout.hpp"

#include <stdexcept>

namespace ensim::protocols {

const LogicalQubit& Layout::qubit(std::string_view label) const {
    for (const LogicalQubit& q : qubits)
        if (q.label == label) return q;
    throw OutOfRangeError("Layout: unknown qubit label '" + std::string(label) + "'");
}

Layout make_layout(const std::vector<std::string>& labels, std::size_t loss_budget,
                   Encoding encoding) {
    using fock::ModeInfo;
    using fock::ModeKind;

    std::vector<ModeInfo> modes;
    std::vector<LogicalQubit> qubits;
    qubits.reserve(labels.size());

    auto push = [&modes](ModeKind kind, const std::string& owner) {
        modes.push_back(ModeInfo{kind, owner});
        return fock::ModeId{static_cast<std::uint32_t>(modes.size() - 1)};
    };

    for (const std::string& label : labels) {
        LogicalQubit q;
        q.label = label;
        q.encoding = encoding;
        q.atomic_h = push(ModeKind::AtomicH, label);
        q.atomic_v = push(ModeKind::AtomicV, label);
        q.optical_h = push(ModeKind::OpticalH, label);
        q.optical_v = push(ModeKind::OpticalV, label);
        qubits.push_back(std::move(q));
    }

    std::vector<fock::ModeId> loss_modes;
    loss_modes.reserve(loss_budget);
    for (std::size_t i = 0; i < loss_budget; ++i)
        loss_modes.push_back(push(ModeKind::Loss, std::to_string(i)));

    Layout layout;
    layout.registry = std::make_shared<const fock::ModeRegistry>(std::move(modes));
    layout.qubits = std::move(qubits);
    layout.loss_pool = optics::LossModePool(std::move(loss_modes));
    return layout;
}

}  // namespace ensim::protocols

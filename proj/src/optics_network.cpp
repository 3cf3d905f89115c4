#include "ensim/optics/network.hpp"

#include <cmath>
#include <set>

#include "nlohmann/json.hpp"

namespace ensim::optics {

CMatrix beamsplitter_matrix(double t) {
    if (t < 0.0 || t > 1.0) throw OutOfRangeError("beamsplitter: transmissivity outside [0,1]");
    const double a = std::sqrt(t);
    const double b = std::sqrt(1.0 - t);
    return CMatrix::mat2(a, b, b, -a);
}

CMatrix rotator_matrix(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return CMatrix::mat2(c, -s, s, c);
}

CMatrix hadamard_matrix() {
    const double s = 1.0 / std::sqrt(2.0);
    return CMatrix::mat2(s, s, s, -s);
}

CMatrix swap_matrix() { return CMatrix::mat2(0, 1, 1, 0); }

CMatrix pbs_matrix() {
    // Mode order (h_a, v_a, h_b, v_b): h passes, v_a <-> v_b.
    CMatrix m(4, 4);
    m(0, 0) = 1.0;
    m(3, 1) = 1.0;
    m(2, 2) = 1.0;
    m(1, 3) = 1.0;
    return m;
}

CMatrix element_matrix(const Element& e) {
    switch (e.kind) {
        case ElementKind::Beamsplitter: return beamsplitter_matrix(e.param);
        case ElementKind::PolRotator: return rotator_matrix(e.param);
        case ElementKind::Hadamard: return hadamard_matrix();
        case ElementKind::PBS: return pbs_matrix();
        case ElementKind::Swap: return swap_matrix();
    }
    throw std::logic_error("element_matrix: unknown element");
}

namespace {

void require_distinct(const std::vector<ModeId>& modes, const char* what) {
    std::set<ModeId> seen(modes.begin(), modes.end());
    if (seen.size() != modes.size()) throw DuplicateModeError(std::string(what) + ": repeated mode");
}

}  // namespace

Element make_beamsplitter(double t, ModeId a, ModeId b) {
    Element e{ElementKind::Beamsplitter, t, {a, b}};
    require_distinct(e.modes, "beamsplitter");
    beamsplitter_matrix(t);  // validates range
    return e;
}

Element make_rotator(double theta, ModeId h, ModeId v) {
    Element e{ElementKind::PolRotator, theta, {h, v}};
    require_distinct(e.modes, "rotator");
    return e;
}

Element make_hadamard(ModeId h, ModeId v) {
    Element e{ElementKind::Hadamard, 0.0, {h, v}};
    require_distinct(e.modes, "hadamard");
    return e;
}

Element make_pbs(ModeId h_a, ModeId v_a, ModeId h_b, ModeId v_b) {
    Element e{ElementKind::PBS, 0.0, {h_a, v_a, h_b, v_b}};
    require_distinct(e.modes, "pbs");
    return e;
}

Element make_swap(ModeId a, ModeId b) {
    Element e{ElementKind::Swap, 0.0, {a, b}};
    require_distinct(e.modes, "swap");
    return e;
}

fock::PureState apply_element(const Element& e, const fock::PureState& state) {
    return fock::apply_mode_unitary(state, std::span<const ModeId>(e.modes), element_matrix(e));
}

fock::PureState apply(const Network& net, const fock::PureState& state) {
    fock::PureState s = state;
    for (const Element& e : net.elements) s = apply_element(e, s);
    return s;
}

fock::MixedState apply(const Network& net, const fock::MixedState& state) {
    return state.map_branches([&](const fock::PureState& b) { return apply(net, b); });
}

Network insert_loss(const Network& net, const LossModel& loss, LossModePool& pool) {
    Network out;
    out.sources = net.sources;
    out.detectors = net.detectors;
    for (ModeId src : net.sources) {
        Element e = make_beamsplitter(loss.eta_e, src, pool.acquire());
        e.loss = LossTag::Source;
        out.elements.push_back(std::move(e));
    }
    out.elements.insert(out.elements.end(), net.elements.begin(), net.elements.end());
    for (ModeId det : net.detectors) {
        Element e = make_beamsplitter(loss.eta_d, det, pool.acquire());
        e.loss = LossTag::Detector;
        out.elements.push_back(std::move(e));
    }
    return out;
}

Network commute_loss_to_sources(const Network& net, LossModePool& pool) {
    double eta_e = 1.0, eta_d = 1.0;
    bool have_e = false, have_d = false;
    Network base;
    base.sources = net.sources;
    base.detectors = net.detectors;
    for (const Element& e : net.elements) {
        if (e.loss == LossTag::None) {
            base.elements.push_back(e);
            continue;
        }
        if (e.kind != ElementKind::Beamsplitter)
            throw PreconditionError("commute_loss_to_sources: loss element is not a beamsplitter");
        double& eta = e.loss == LossTag::Source ? eta_e : eta_d;
        bool& have = e.loss == LossTag::Source ? have_e : have_d;
        if (have && std::abs(eta - e.param) > 1e-12)
            throw UnequalEfficienciesError(
                "commute_loss_to_sources: loss beamsplitters have unequal efficiencies");
        eta = e.param;
        have = true;
    }

    Network out;
    out.sources = base.sources;
    out.detectors = base.detectors;
    const double eta = eta_e * eta_d;
    if (eta < 1.0) {
        for (ModeId src : base.sources) {
            Element e = make_beamsplitter(eta, src, pool.acquire());
            e.loss = LossTag::Source;
            out.elements.push_back(std::move(e));
        }
    }
    out.elements.insert(out.elements.end(), base.elements.begin(), base.elements.end());
    return out;
}

std::vector<ModeId> loss_modes_of(const Network& net) {
    std::vector<ModeId> out;
    for (const Element& e : net.elements) {
        if (e.loss != LossTag::None) out.push_back(e.modes.back());
    }
    return out;
}

namespace {

const char* kind_name(ElementKind k) {
    switch (k) {
        case ElementKind::Beamsplitter: return "beamsplitter";
        case ElementKind::PolRotator: return "rotator";
        case ElementKind::Hadamard: return "hadamard";
        case ElementKind::PBS: return "pbs";
        case ElementKind::Swap: return "swap";
    }
    return "?";
}

}  // namespace

std::string to_json(const Network& net, const fock::ModeRegistry& registry) {
    nlohmann::json j;
    j["elements"] = nlohmann::json::array();
    for (const Element& e : net.elements) {
        nlohmann::json je;
        je["kind"] = kind_name(e.kind);
        if (e.kind == ElementKind::Beamsplitter) je["transmissivity"] = e.param;
        if (e.kind == ElementKind::PolRotator) je["theta"] = e.param;
        if (e.loss == LossTag::Source) je["loss"] = "source";
        if (e.loss == LossTag::Detector) je["loss"] = "detector";
        for (ModeId m : e.modes) je["modes"].push_back(registry.name(m));
        j["elements"].push_back(std::move(je));
    }
    for (ModeId m : net.sources) j["sources"].push_back(registry.name(m));
    for (ModeId m : net.detectors) j["detectors"].push_back(registry.name(m));
    return j.dump(2);
}

}  // namespace ensim::optics

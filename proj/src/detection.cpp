#include "ensim/detect/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ensim::detect {

int ClickPattern::count_for(ModeId m) const {
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (modes[i] == m) return counts[i];
    throw OutOfRangeError("ClickPattern: mode not covered by this pattern");
}

int ClickPattern::total() const {
    int t = 0;
    for (int c : counts) t += c;
    return t;
}

std::string to_string(const ClickPattern& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.counts.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.counts[i]);
    }
    s += ")";
    return s;
}

namespace {

double poisson_pmf(double lambda, int k) {
    double p = std::exp(-lambda);
    for (int i = 1; i <= k; ++i) p *= lambda / i;
    return p;
}

/// Convolves an analytic pattern distribution with independent Poisson dark
/// clicks on every detector mode, truncated at the cutoff.
std::vector<DetectionBranch> add_dark_counts(std::vector<DetectionBranch> branches,
                                             double rate, int cutoff) {
    if (rate <= 0.0) return branches;
    std::map<std::vector<int>, DetectionBranch> merged;
    for (DetectionBranch& br : branches) {
        std::vector<std::pair<std::vector<int>, double>> spread{{br.pattern.counts, 1.0}};
        for (std::size_t m = 0; m < br.pattern.modes.size(); ++m) {
            std::vector<std::pair<std::vector<int>, double>> next;
            for (auto& [counts, w] : spread) {
                for (int extra = 0; counts[m] + extra <= cutoff; ++extra) {
                    auto c = counts;
                    c[m] += extra;
                    next.emplace_back(std::move(c), w * poisson_pmf(rate, extra));
                }
            }
            spread = std::move(next);
        }
        for (auto& [counts, w] : spread) {
            auto it = merged.find(counts);
            if (it == merged.end()) {
                DetectionBranch nb;
                nb.pattern = ClickPattern{br.pattern.modes, counts};
                nb.probability = 0.0;
                merged.emplace(counts, std::move(nb));
                it = merged.find(counts);
            }
            it->second.probability += br.probability * w;
            for (const auto& ps : br.state.branches()) {
                fock::PureState scaled = ps;
                scaled.set_weight(ps.weight() * w);
                it->second.state.push_branch(std::move(scaled));
            }
        }
    }
    std::vector<DetectionBranch> out;
    for (auto& [counts, br] : merged) out.push_back(std::move(br));
    return out;
}

}  // namespace

std::vector<DetectionBranch> measure(const fock::MixedState& state,
                                     std::span<const ModeId> detector_modes,
                                     const DetectorOptions& opts) {
    std::vector<ModeId> det(detector_modes.begin(), detector_modes.end());

    std::map<std::vector<int>, DetectionBranch> groups;
    for (const fock::PureState& b : state.branches()) {
        std::map<std::vector<int>, fock::PureState> parts;
        for (const auto& [occ, amp] : b.amplitudes()) {
            std::vector<int> key(det.size());
            for (std::size_t i = 0; i < det.size(); ++i) key[i] = occ[det[i].value];
            auto it = parts.find(key);
            if (it == parts.end())
                it = parts.emplace(std::move(key), fock::PureState(b.registry(), b.cutoff()))
                         .first;
            fock::Occupation cleared = occ;
            for (ModeId m : det) cleared[m.value] = 0;  // photons consumed
            it->second.accumulate(cleared, amp);
        }

        for (auto& [key, part] : parts) {
            const double mass = part.norm_sq();
            if (mass <= 0.0) continue;
            const double prob = b.weight() * mass;
            part.scale(1.0 / std::sqrt(mass));
            part.set_weight(prob);

            auto it = groups.find(key);
            if (it == groups.end()) {
                DetectionBranch nb;
                nb.pattern = ClickPattern{det, key};
                groups.emplace(key, std::move(nb));
                it = groups.find(key);
            }
            it->second.probability += prob;
            it->second.state.push_branch(std::move(part));
        }
    }

    std::vector<DetectionBranch> out;
    for (auto& [key, br] : groups) out.push_back(std::move(br));
    if (opts.dark_rate > 0.0 && !out.empty())
        out = add_dark_counts(std::move(out), opts.dark_rate, state.cutoff());
    return out;
}

std::vector<DetectionBranch> measure(const fock::PureState& state,
                                     std::span<const ModeId> detector_modes,
                                     const DetectorOptions& opts) {
    return measure(fock::MixedState(state), detector_modes, opts);
}

HeraldOutcome herald(std::span<const DetectionBranch> branches, const HeraldRule& rule,
                     ExecMode mode, std::mt19937_64* rng, const ClickPattern* prefer) {
    HeraldOutcome out;
    for (const DetectionBranch& br : branches) {
        if (rule.accept(br.pattern)) {
            out.probability += br.probability;
            out.accepted.push_back(br);
        }
    }

    if (mode == ExecMode::Sampled) {
        if (rng == nullptr) throw PreconditionError("herald: sampled mode needs an RNG");
        double total = 0.0;
        for (const DetectionBranch& br : branches) total += br.probability;
        std::uniform_real_distribution<double> dist(0.0, total);
        double x = dist(*rng);
        const DetectionBranch* chosen = nullptr;
        for (const DetectionBranch& br : branches) {
            if (x < br.probability) {
                chosen = &br;
                break;
            }
            x -= br.probability;
        }
        if (chosen == nullptr && !branches.empty()) chosen = &branches.back();
        if (chosen != nullptr) {
            out.selected = *chosen;
            out.success = rule.accept(chosen->pattern);
            if (out.success) out.corrections = rule.corrections(chosen->pattern);
        }
        return out;
    }

    out.success = !out.accepted.empty() && out.probability > 0.0;
    if (out.success) {
        const DetectionBranch* pick = &out.accepted.front();
        if (prefer != nullptr) {
            for (const DetectionBranch& br : out.accepted) {
                if (br.pattern == *prefer) {
                    pick = &br;
                    break;
                }
            }
        }
        out.selected = *pick;
        out.corrections = rule.corrections(pick->pattern);
    }
    return out;
}

void write_click_csv(std::ostream& os, std::span<const DetectionBranch> branches) {
    os << "pattern,probability\n";
    for (const DetectionBranch& br : branches) {
        os << '"' << to_string(br.pattern) << '"' << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", br.probability);
        os << buf << '\n';
    }
}

}  // namespace ensim::detect

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "ensim/detect/detection.hpp"
#include "ensim/optics/network.hpp"

using namespace ensim;
using namespace ensim::detect;
using fock::ModeId;
using fock::Occupation;
using fock::PureState;

namespace {
ModeId m(std::uint32_t i) { return ModeId{i}; }
}  // namespace

TEST_CASE("measuring vacuum gives the all-zero pattern with probability one") {
    auto reg = testing::plain_registry(2);
    auto branches = measure(PureState::vacuum(reg, 2), std::vector<ModeId>{m(0), m(1)});
    REQUIRE(branches.size() == 1);
    CHECK(branches[0].pattern.counts == std::vector<int>{0, 0});
    CHECK(branches[0].probability == doctest::Approx(1.0));
}

TEST_CASE("a split photon clicks each detector half the time") {
    auto reg = testing::plain_registry(2);
    PureState s = fock::apply_mode_unitary(fock::create(PureState::vacuum(reg, 2), m(0)),
                                           {m(0), m(1)}, optics::beamsplitter_matrix(0.5));
    auto branches = measure(s, std::vector<ModeId>{m(0), m(1)});
    REQUIRE(branches.size() == 2);
    for (const auto& br : branches) CHECK(br.probability == doctest::Approx(0.5));
}

TEST_CASE("probabilities sum to the branch weight and detector modes are consumed") {
    std::mt19937_64 rng(31);
    auto reg = testing::plain_registry(4);
    testing::DenseOracle oracle(4, 2, 2);
    for (int rep = 0; rep < 25; ++rep) {
        PureState s = testing::random_state(oracle, reg, 2, rng);
        s.set_weight(0.7);
        auto branches = measure(s, std::vector<ModeId>{m(1), m(2)});
        double total = 0.0;
        for (const auto& br : branches) {
            total += br.probability;
            for (const auto& b : br.state.branches())
                for (const auto& [occ, amp] : b.amplitudes()) {
                    CHECK(occ[1] == 0);
                    CHECK(occ[2] == 0);
                }
        }
        CHECK(total == doctest::Approx(0.7).epsilon(1e-10));
    }
}

TEST_CASE("detection is diagonal: a phase on a detector mode changes nothing") {
    std::mt19937_64 rng(37);
    auto reg = testing::plain_registry(3);
    testing::DenseOracle oracle(3, 2, 2);
    CMatrix phase(1, 1);
    phase(0, 0) = std::polar(1.0, 0.83);
    for (int rep = 0; rep < 20; ++rep) {
        PureState s = testing::random_state(oracle, reg, 2, rng);
        PureState rotated = fock::apply_mode_unitary(s, {m(1)}, phase);
        auto a = measure(s, std::vector<ModeId>{m(1), m(2)});
        auto b = measure(rotated, std::vector<ModeId>{m(1), m(2)});
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].pattern.counts == b[i].pattern.counts);
            CHECK(a[i].probability == doctest::Approx(b[i].probability).epsilon(1e-12));
        }
    }
}

TEST_CASE("lossy distributions still sum to the branch weight") {
    auto reg = testing::plain_registry(4);  // two signal modes + two loss modes
    PureState s = fock::create(fock::create(PureState::vacuum(reg, 3), m(0)), m(1));
    s = fock::apply_mode_unitary(s, {m(0), m(2)}, optics::beamsplitter_matrix(0.6));
    s = fock::apply_mode_unitary(s, {m(1), m(3)}, optics::beamsplitter_matrix(0.6));
    auto branches = measure(s, std::vector<ModeId>{m(0), m(1)});
    double total = 0.0;
    for (const auto& br : branches) total += br.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("herald") {
    auto reg = testing::plain_registry(2);
    PureState s = fock::apply_mode_unitary(fock::create(PureState::vacuum(reg, 2), m(0)),
                                           {m(0), m(1)}, optics::beamsplitter_matrix(0.5));
    auto branches = measure(s, std::vector<ModeId>{m(0), m(1)});

    SUBCASE("accepting one pattern keeps its probability") {
        HeraldRule rule;
        rule.accept = [](const ClickPattern& p) { return p.counts == std::vector<int>{1, 0}; };
        auto out = herald(branches, rule, ExecMode::Analytic);
        CHECK(out.success);
        CHECK(out.probability == doctest::Approx(0.5));
        CHECK(out.accepted.size() == 1);
    }
    SUBCASE("a rule rejecting everything never succeeds") {
        HeraldRule rule;
        rule.accept = [](const ClickPattern&) { return false; };
        auto out = herald(branches, rule, ExecMode::Analytic);
        CHECK(!out.success);
        CHECK(out.probability == 0.0);
    }
    SUBCASE("sampled mode follows the distribution") {
        HeraldRule rule;
        rule.accept = [](const ClickPattern& p) { return p.counts == std::vector<int>{1, 0}; };
        std::mt19937_64 rng(101);
        int hits = 0;
        const int reps = 20000;
        for (int i = 0; i < reps; ++i) {
            auto out = herald(branches, rule, ExecMode::Sampled, &rng);
            if (out.success) ++hits;
        }
        CHECK(std::abs(hits / double(reps) - 0.5) < 0.02);
    }
    SUBCASE("sampled mode without an RNG throws") {
        HeraldRule rule;
        rule.accept = [](const ClickPattern&) { return true; };
        CHECK_THROWS_AS(herald(branches, rule, ExecMode::Sampled, nullptr), PreconditionError);
    }
}

TEST_CASE("dark counts") {
    auto reg = testing::plain_registry(2);
    PureState vac = PureState::vacuum(reg, 2);

    SUBCASE("rate zero is a no-op") {
        auto branches = measure(vac, std::vector<ModeId>{m(0), m(1)}, DetectorOptions{0.0});
        CHECK(branches.size() == 1);
    }
    SUBCASE("vacuum develops spurious clicks at positive rate") {
        auto branches = measure(vac, std::vector<ModeId>{m(0), m(1)}, DetectorOptions{0.05});
        double p_nonzero = 0.0;
        for (const auto& br : branches)
            if (br.pattern.total() > 0) p_nonzero += br.probability;
        // 1 - exp(-2 * 0.05), truncated tail aside.
        CHECK(p_nonzero == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-3));
    }
}

TEST_CASE("click CSV export") {
    auto reg = testing::plain_registry(2);
    auto branches = measure(PureState::vacuum(reg, 2), std::vector<ModeId>{m(0), m(1)});
    std::ostringstream os;
    write_click_csv(os, branches);
    CHECK(os.str() == "pattern,probability\n\"(0,0)\",1\n");
}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "optocool/params.hpp"

using namespace optocool;

namespace {

// Bose-Einstein occupancy evaluated in extended precision.
long double bose_einstein(long double omega_si, long double t) {
    const long double hbar = 1.054571817e-34L, kb = 1.380649e-23L;
    return 1.0L / (std::exp(hbar * omega_si / (kb * t)) - 1.0L);
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvariantBreach;
}

}  // namespace

TEST(Validate, DefaultSetIsValid) {
    const auto r = validate(default_params());
    EXPECT_TRUE(r.ok()) << r.summary();
    EXPECT_DOUBLE_EQ(default_params().kappa1, 0.1);
    EXPECT_DOUBLE_EQ(default_params().kappa2, 3.0);
    EXPECT_EQ(default_params().N, 200);
    EXPECT_DOUBLE_EQ(default_params().gamma, 0.1);
}

TEST(Validate, NegativeDecayRateIsReported) {
    auto p = default_params();
    p.kappa2 = -1.0;
    const auto r = validate(p);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.summary().find("negative decay rate"), std::string::npos);
}

TEST(Validate, EmptyAtomicChannelIsNotedNotRejected) {
    auto p = default_params();
    p.N = 0;
    p.g_a = 0.1;
    const auto r = validate(p);
    EXPECT_TRUE(r.ok());
    EXPECT_NE(std::find(r.notes.begin(), r.notes.end(), "atomic channel inactive"), r.notes.end());
}

TEST(Validate, EveryNonNegativeFieldIsChecked) {
    for (auto field : {&SystemParams::kappa1, &SystemParams::kappa2, &SystemParams::gamma, &SystemParams::gamma_m,
                       &SystemParams::epsilon, &SystemParams::g_a, &SystemParams::J, &SystemParams::g,
                       &SystemParams::temperature}) {
        auto p = default_params();
        p.*field = -0.5;
        EXPECT_FALSE(validate(p).ok());
    }
    auto p = default_params();
    p.N = -1;
    EXPECT_FALSE(validate(p).ok());
    p = default_params();
    p.omega_m_hz = 0.0;
    EXPECT_FALSE(validate(p).ok());
    p = default_params();
    p.delta1 = NAN;
    EXPECT_FALSE(validate(p).ok());
}

TEST(Validate, DoesNotMutateInput) {
    auto p = default_params();
    p.kappa2 = -1.0;
    const auto copy = p;
    (void)validate(p);
    EXPECT_EQ(p, copy);
}

TEST(Collective, SquaredIsValueSquared) {
    auto p = default_params();
    p.N = 200;
    p.g_a = 0.1;
    const auto c = p.collective();
    EXPECT_NEAR(c.squared, 2.0, 1e-15);
    EXPECT_NEAR(c.value * c.value, c.squared, 1e-15);
    EXPECT_GE(c.value, 0.0);
}

TEST(ThermalOccupancy, ZeroTemperature) { EXPECT_EQ(thermal_occupancy(1e8, 0.0), 0.0); }

TEST(ThermalOccupancy, LnTwoGivesOne) {
    const double t = 1.0;
    const double omega = std::log(2.0) * constants::k_B * t / constants::hbar;
    EXPECT_NEAR(thermal_occupancy(omega, t), 1.0, 1e-14);
}

TEST(ThermalOccupancy, TwentyMegahertzAtThreeHundredMillikelvin) {
    const double omega = 2.0 * M_PI * 20e6;
    const double n = thermal_occupancy(omega, 0.3);
    EXPECT_NEAR(n, static_cast<double>(bose_einstein(omega, 0.3L)), 1e-10 * n);
    EXPECT_NEAR(n, 312.0, 0.5);
    auto p = default_params();
    p.omega_m_hz = 20e6;
    p.temperature = 0.3;
    EXPECT_DOUBLE_EQ(thermal_occupancy(p), n);
}

TEST(ThermalOccupancy, MonotoneInTemperatureAndFrequency) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logt(-3.0, 1.0), logw(6.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double t = std::pow(10.0, logt(rng)), w = std::pow(10.0, logw(rng));
        EXPECT_LT(thermal_occupancy(w, t), thermal_occupancy(w, t * 1.01));
        EXPECT_GT(thermal_occupancy(w, t), thermal_occupancy(w * 1.01, t));
    }
}

TEST(LoadConfig, EmptyDocumentGivesDefaults) { EXPECT_EQ(load_config(""), default_params()); }

TEST(LoadConfig, SingleOverride) {
    const auto p = load_config("kappa1 = 3.0\n");
    EXPECT_EQ(p.kappa1, 3.0);
    auto expect = default_params();
    expect.kappa1 = 3.0;
    EXPECT_EQ(p, expect);
}

TEST(LoadConfig, EffectiveDetuningPinned) {
    const auto p = load_config("delta2_effective = -1.0");
    EXPECT_EQ(p.delta2_mode, Delta2Mode::Effective);
    EXPECT_EQ(p.delta2, -1.0);
}

TEST(LoadConfig, BareDetuning) {
    const auto p = load_config("delta2 = 0.5");
    EXPECT_EQ(p.delta2_mode, Delta2Mode::Bare);
    EXPECT_EQ(p.delta2, 0.5);
}

TEST(LoadConfig, CommentsAndBlankLines) {
    const auto p = load_config("# header\n\n  J = 1   # inline\r\n\tg_a=0.1\n");
    EXPECT_EQ(p.J, 1.0);
    EXPECT_EQ(p.g_a, 0.1);
}

TEST(LoadConfig, ErrorsCarryLineNumbers) {
    try {
        load_config("J = 1\n\nbogus = 2\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_EQ(kind_of([] { load_config("J = 1\nJ = 2\n"); }), ErrorKind::Parse);
    EXPECT_EQ(kind_of([] { load_config("J = abc\n"); }), ErrorKind::Parse);
    EXPECT_EQ(kind_of([] { load_config("J 1\n"); }), ErrorKind::Parse);
    EXPECT_EQ(kind_of([] { load_config("N = 2.5\n"); }), ErrorKind::Parse);
    EXPECT_EQ(kind_of([] { load_config("kappa2 = -1\n"); }), ErrorKind::Validation);
}

TEST(LoadConfig, QualityFactorAndDampingAreExclusive) {
    const auto p = load_config("q_m = 80000");
    EXPECT_DOUBLE_EQ(p.gamma_m * 80000.0, 1.0);
    EXPECT_NO_THROW(load_config("q_m = 4\ngamma_m = 0.25"));
    EXPECT_EQ(kind_of([] { load_config("q_m = 4\ngamma_m = 0.3"); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { load_config("q_m = 0"); }), ErrorKind::Validation);
}

TEST(LoadConfig, BareAndEffectiveDetuningAreExclusive) {
    EXPECT_EQ(kind_of([] { load_config("delta2 = 1\ndelta2_effective = 1"); }), ErrorKind::Validation);
}

TEST(LoadConfig, OverridesReplaceKeyAndPartner) {
    const auto p = load_config("delta2 = 1\nkappa1 = 2\n", {parse_override("delta2_effective=-0.5")});
    EXPECT_EQ(p.delta2_mode, Delta2Mode::Effective);
    EXPECT_EQ(p.delta2, -0.5);
    EXPECT_EQ(p.kappa1, 2.0);
    const auto q = load_config("gamma_m = 0.5", {parse_override("q_m = 10")});
    EXPECT_DOUBLE_EQ(q.gamma_m, 0.1);
    EXPECT_EQ(kind_of([] { parse_override("nope=1"); }), ErrorKind::Parse);
}

TEST(LoadConfig, RenderRoundTripIsExact) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0), s(-5.0, 5.0);
    for (int k = 0; k < 100; ++k) {
        SystemParams p;
        p.omega_m_hz = 1e6 * (1.0 + u(rng));
        p.kappa1 = u(rng) / 3.0;
        p.kappa2 = u(rng) / 7.0;
        p.gamma = u(rng) / 11.0;
        p.gamma_m = u(rng) * 1e-5;
        p.delta1 = s(rng) / 3.0;
        p.delta2_mode = k % 2 ? Delta2Mode::Bare : Delta2Mode::Effective;
        p.delta2 = s(rng) / 7.0;
        p.omega_atom = s(rng) / 9.0;
        p.J = u(rng) / 13.0;
        p.g_a = u(rng) / 17.0;
        p.N = static_cast<std::int64_t>(u(rng) * 100);
        p.g = u(rng) * 1e-5;
        p.epsilon = u(rng) * 1e3;
        p.temperature = u(rng) / 19.0;
        EXPECT_EQ(load_config(render_config(p)), p);
    }
}

TEST(SampleConfigs, AllLoad) {
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(OPTOCOOL_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        std::ifstream in(entry.path());
        std::stringstream text;
        text << in.rdbuf();
        EXPECT_NO_THROW(load_config(text.str())) << entry.path();
        ++seen;
    }
    EXPECT_GE(seen, 5u);
}

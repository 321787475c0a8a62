#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "optocool/sweep.hpp"

using namespace optocool;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvariantBreach;
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

void expect_rel(const std::optional<double>& a, double b) {
    ASSERT_TRUE(a.has_value());
    EXPECT_LE(std::abs(*a - b), 1e-12 * std::max(std::abs(b), 1e-300));
}

}  // namespace

TEST(ParallelFor, VisitsEveryIndexOnce) {
    for (unsigned threads : {1u, 2u, 7u, 0u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
        EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
}

TEST(ParallelFor, PropagatesWorkerExceptions) {
    EXPECT_THROW(parallel_for(100, 4, [](std::size_t i) {
                     if (i == 57) throw std::runtime_error("boom");
                 }),
                 std::runtime_error);
}

TEST(SweepCoupling, RowsMatchStandalonePipeline) {
    const auto spec = figures::fig5_spec(figures::fig5b_params());
    const auto table = sweep_coupling(spec, 3);
    ASSERT_EQ(table.rows.size(), 301u);
    for (std::size_t i = 0; i < table.rows.size(); i += 7) {
        const auto& row = table.rows[i];
        auto p = figures::fig5b_params();
        p.J = row.value;
        const auto ss = solve_steady_state(p).chosen();
        const double sp = force_spectrum(1.0, p, ss.delta2_eff), sm = force_spectrum(-1.0, p, ss.delta2_eff);
        const auto c = cooling_summary(sp, sm, effective_coupling(ss, p), p.gamma_m, thermal_occupancy(p));
        expect_rel(row.G, c.G);
        expect_rel(row.s_plus, sp);
        expect_rel(row.s_minus, sm);
        expect_rel(row.gamma_c, c.gamma_c);
        if (c.n_c) expect_rel(row.n_c, *c.n_c);
        if (c.n_f) expect_rel(row.n_f, *c.n_f);
    }
}

TEST(SweepCoupling, CouplingVariesWithJ) {
    const auto table = sweep_coupling(figures::fig5_spec(figures::fig5a_params()), 2);
    EXPECT_NE(*table.rows.front().G, *table.rows.back().G);
}

TEST(SweepCoupling, SinglePointEqualsStandaloneCooling) {
    auto base = figures::fig5a_params();
    base.g_a = 0.0;
    SweepSpec spec;
    spec.axis = "J";
    spec.values = {0.0};
    spec.base = base;
    const auto table = sweep_coupling(spec, 1);
    ASSERT_EQ(table.rows.size(), 1u);
    auto p = base;
    p.J = 0.0;
    const auto c = cooling_point(p);
    EXPECT_EQ(table.rows[0].G, c.G);
    EXPECT_EQ(table.rows[0].s_plus, c.s_plus);
    EXPECT_EQ(table.rows[0].s_minus, c.s_minus);
    EXPECT_EQ(table.rows[0].n_c, c.n_c);
    EXPECT_EQ(table.rows[0].n_f, c.n_f);
}

TEST(SweepCoupling, HeatingRowsAreFlagged) {
    auto base = figures::fig5a_params();
    SweepSpec spec;
    spec.values = {0.0, 2.0};
    spec.base = base;  // bare cavity at delta2_eff = -omega_m heats
    const auto table = sweep_coupling(spec, 1);
    EXPECT_EQ(table.rows[0].status, "heating");
    EXPECT_FALSE(table.rows[0].n_c.has_value());
    EXPECT_FALSE(table.rows[0].n_f.has_value());
    EXPECT_TRUE(table.rows[0].G.has_value());
    EXPECT_EQ(table.rows[1].status, "ok");
    const auto csv = render_csv(table);
    EXPECT_NE(csv.find(",,,heating\n"), std::string::npos);
}

TEST(SweepCoupling, RowErrorsDoNotAbort) {
    auto base = default_params();
    base.J = 1.0;
    base.delta1 = 0.0;
    SweepSpec spec;
    spec.axis = "kappa1";
    spec.values = {0.0, 0.1, 0.2};
    spec.base = base;
    const auto table = run_sweep(spec, 2);
    EXPECT_EQ(table.rows[0].status, "Degenerate");
    EXPECT_FALSE(table.rows[0].G.has_value());
    EXPECT_NE(table.rows[1].status, "Degenerate");
    EXPECT_TRUE(table.rows[2].G.has_value());
    EXPECT_NE(render_csv(table).find("0,,,,,,,Degenerate\n"), std::string::npos);
}

TEST(SweepSpec, Validation) {
    SweepSpec spec;
    EXPECT_EQ(kind_of([&] { run_sweep(spec); }), ErrorKind::EmptySweep);
    spec.values = {0.0, 1.0, 1.0};
    EXPECT_EQ(kind_of([&] { run_sweep(spec); }), ErrorKind::Validation);
    spec.values = {2.0, 1.0, 0.0};
    EXPECT_NO_THROW(run_sweep(spec, 1));
    spec.axis = "nonsense";
    EXPECT_EQ(kind_of([&] { run_sweep(spec); }), ErrorKind::Validation);
    spec.axis = "kappa1";
    EXPECT_EQ(kind_of([&] { sweep_coupling(spec); }), ErrorKind::Validation);
}

TEST(SweepCoupling, OutputIndependentOfThreadCount) {
    for (const auto& base : {figures::fig5a_params(), figures::fig5b_params()}) {
        const auto spec = figures::fig5_spec(base);
        const auto one = render_csv(run_sweep(spec, 1));
        EXPECT_EQ(one, render_csv(run_sweep(spec, 4)));
        EXPECT_EQ(one, render_csv(run_sweep(spec, 0)));
    }
}

TEST(SweepCoupling, CsvShape) {
    const auto csv = render_csv(sweep_coupling(figures::fig5_spec(figures::fig5a_params()), 1));
    EXPECT_EQ(csv.rfind("J,G,s_plus,s_minus,gamma_c,n_c,n_f,status\n", 0), 0u);
    EXPECT_EQ(count(csv, "\n"), 302u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);
}

TEST(SweepSpectrum, PresetColumns) {
    const auto grid = default_grid();
    const auto t2 = sweep_spectrum(figures::fig2_base(), figures::fig2_configs(), grid, 2);
    ASSERT_EQ(t2.columns.size(), 4u);
    const auto t3 = sweep_spectrum(figures::fig3_base(), figures::fig3_configs(), grid, 2);
    ASSERT_EQ(t3.columns.size(), 3u);
    const auto configs = figures::fig3_configs();
    for (std::size_t k = 0; k < 3; ++k) {
        auto p = figures::fig3_base();
        for (const auto& [key, v] : configs[k].overrides) set_parameter(p, key, v);
        for (std::size_t i = 0; i < grid.size(); i += 100) EXPECT_EQ(*t3.columns[k][i], force_spectrum(grid[i], p, -0.1));
    }
    // kappa1 robustness at the sidebands
    for (double w : {-1.0, 1.0}) {
        const auto i = static_cast<std::size_t>(std::lround((w + 4.0) / 0.002));
        std::vector<double> v;
        for (const auto& col : t3.columns) v.push_back(*col[i]);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        EXPECT_LT((*hi - *lo) / *lo, 0.10);
    }
    const auto csv = render_csv(t2);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "omega_over_omega_m,s_ff_J0_ga0,s_ff_J1_ga0,s_ff_J0_ga0.1,s_ff_J1_ga0.1");
    EXPECT_EQ(csv, render_csv(sweep_spectrum(figures::fig2_base(), figures::fig2_configs(), grid, 1)));
}

TEST(SweepSpectrum, EmptyConfigurationList) {
    EXPECT_EQ(kind_of([] { sweep_spectrum(default_params(), {}, default_grid()); }), ErrorKind::EmptySweep);
}

TEST(SweepSpectrum, PoleCellsStayEmpty) {
    auto base = default_params();
    base.kappa1 = 0.0;
    const auto t = sweep_spectrum(base, {{"pole", {{"J", 1.0}}}}, {-1.5, -1.0, -0.5}, 1);
    EXPECT_TRUE(t.columns[0][0].has_value());
    EXPECT_FALSE(t.columns[0][1].has_value());
    EXPECT_EQ(t.status[0], "PoleAtGrid");
}

TEST(PlotScript, SeriesCounts) {
    const auto s2 = emit_plot_script("fig2"), s3 = emit_plot_script("fig3"), s5 = emit_plot_script("fig5");
    EXPECT_EQ(count(s2, "'fig2.csv' using"), 4u);
    EXPECT_EQ(count(s3, "'fig3.csv' using"), 3u);
    EXPECT_EQ(count(s5, "'fig5a.csv' using"), 2u);
    EXPECT_EQ(count(s5, "'fig5b.csv' using"), 2u);
    EXPECT_EQ(count(s5, "\nplot "), 2u);
    EXPECT_EQ(s5, emit_plot_script("fig5"));
    EXPECT_EQ(kind_of([] { emit_plot_script("fig4"); }), ErrorKind::UnknownFigure);
}

// acceptance.cpp - One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "snc/bounds.hpp"
#include "snc/commands.hpp"
#include "snc/scenario.hpp"

using namespace snc;

namespace {

// Exhaustive-grid delay bounds in slots, pinned once and never recomputed by the optimizer.
constexpr double kPinnedDelayH1 = 37.655897661097747;     // H=1, N=781, M=1953, eps=1e-9
constexpr double kPinnedDelayH10 = 7.5763428838588936e-4; // H=10, N=M=781, eps=1e-9

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

MmooParams voice()
{
    return MmooParams::from_seconds(64e3, 0.4, 0.6, 1e-3);
}

Scenario preset(const char* name)
{
    return load_scenario(std::string(SNC_TEST_PRESET_DIR) + "/" + name + ".json");
}

HomogeneousNetwork voice_network(int hops, std::uint64_t n, std::uint64_t m, double capacity = 1e5)
{
    HomogeneousNetwork net;
    net.through = TrafficModel::mmoo(voice());
    net.cross = net.through;
    net.through_count = n;
    net.cross_count = m;
    net.capacity = capacity;
    net.hops = hops;
    return net;
}

Outcome mean_rate()
{
    const double kbps = mmoo_effective_bandwidth(voice(), 1e-9) / 1e-3 / 1e3;
    return {rel(kbps, 25.6) <= 1e-3, fmt("alpha(1e-9) = %.6f kbit/s", kbps)};
}

Outcome linear_scaling()
{
    Overrides o;
    o.hops = std::vector<int>{1, 2, 5, 10, 21};
    const CommandOutput out = cmd_sweep_hops(preset("voice-fig3"), o);
    if (out.rows.size() != 5) {
        return {false, "expected five rows"};
    }
    const double d1 = out.rows[0].bound_value.value();
    double worst = 0.0;
    bool same_theta = true;
    for (const ResultRow& r : out.rows) {
        worst = std::max(worst, rel(r.bound_value.value(), r.hops * d1));
        same_theta = same_theta && r.theta_star == out.rows[0].theta_star;
    }
    return {worst <= 1e-9 && same_theta,
            fmt("d(1) = %.9g s, max relative deviation from H*d(1) = %.2g, theta* shared = %g", d1, worst,
                same_theta ? 1.0 : 0.0)};
}

Outcome regression_pins()
{
    const auto check = [](HomogeneousNetwork net, double pinned) {
        const BoundResult r = closed_form_delay(net, 1e-9, default_theta_search(net.path()));
        return rel(r.value, pinned);
    };
    const double e1 = check(voice_network(1, 781, 1953), kPinnedDelayH1);
    const double e10 = check(voice_network(10, 781, 781), kPinnedDelayH10);
    return {e1 <= 5e-3 && e10 <= 5e-3,
            fmt("relative deviation %.2g (H=1, 37.66 ms pinned), %.2g (H=10, N=M=781 pinned)", e1, e10)};
}

Outcome oracle_equivalence()
{
    double worst = 0.0;
    int cases = 0;
    const double mean = mmoo_mean_rate(voice());
    for (int i = 0; i < 20; ++i) {
        const double utilization = 0.3 + (0.95 - 0.3) * i / 19.0;
        const auto flows = static_cast<std::uint64_t>(std::floor(utilization * 1e5 / mean));
        const std::uint64_t n = flows / 2;
        const int hops = 1 + i % 5;
        const HomogeneousNetwork net = voice_network(hops, n, flows - n);
        const ThetaSearchConfig search = default_theta_search(net.path());
        const bool delay = i % 2 == 0;
        const std::function<double(double)> objective = [&](double theta) {
            return delay ? closed_form_delay_at_theta(net, 1e-9, theta) : closed_form_backlog_at_theta(net, 1e-9, theta);
        };
        const double found = (delay ? closed_form_delay(net, 1e-9, search) : closed_form_backlog(net, 1e-9, search)).value;
        const double grid = oracle::grid_minimum(objective, search.theta_min, search.theta_max).second;
        worst = std::max(worst, (found - grid) / grid);
        ++cases;
    }
    return {worst <= 5e-3, fmt("%g cases, worst excess over exhaustive grid = %.2g", cases, worst)};
}

Outcome series_consistency()
{
    double worst_finite = 0.0;
    double worst_exact = 0.0;
    for (int hops : {1, 2, 4}) {
        for (double theta : {0.01, 0.1, 1.0}) {
            const NetworkPath path(TrafficModel::constant_rate(1.0),
                                   std::vector<ServiceModel>(static_cast<std::size_t>(hops),
                                                             ServiceModel::constant_server(2.0)));
            const double bf = backlog_violation_at_theta(path, 3.0, Horizon::finite(10000), theta).value;
            const double bi = backlog_violation_at_theta(path, 3.0, Horizon::infinite(), theta).value;
            const double df = delay_violation_at_theta(path, 2, Horizon::finite(10000), theta).value;
            const double di = delay_violation_at_theta(path, 2, Horizon::infinite(), theta).value;
            worst_finite = std::max({worst_finite, rel(bf, bi), rel(df, di)});

            // homogeneous form: one series raised to H/H, times the threshold factor
            const double g = std::exp(-theta / 2.0);
            const double s = 1.0 / (1.0 - g);
            const double backlog_form = s * std::exp(-theta * 3.0 / (2.0 * hops));
            const double delay_form = std::pow(s, (hops - 1.0) / hops) *
                                      std::pow(std::exp(-theta * 2.0) * s, 1.0 / hops);
            worst_exact = std::max({worst_exact, rel(bi, backlog_form), rel(di, delay_form)});
        }
    }
    return {worst_finite <= 1e-6 && worst_exact <= 1e-14,
            fmt("t=10^4 vs closed form: %.2g; identical hops vs homogeneous form: %.2g", worst_finite, worst_exact)};
}

Outcome anchors()
{
    const NetworkPath path(TrafficModel::constant_rate(1.0), {ServiceModel::constant_server(2.0)});
    const double b = backlog_violation_at_theta(path, 10.0, Horizon::infinite(), 1.0).value;
    const double d = delay_violation_at_theta(path, 3, Horizon::infinite(), 1.0).value;
    return {rel(b, 0.017125) <= 1e-4 && rel(d, 0.12653) <= 1e-4, fmt("backlog tail %.8f, delay tail %.8f", b, d)};
}

Outcome desk_validation()
{
    Overrides o;
    o.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const CommandOutput out = cmd_validate(preset("desk-validation"), o);
    bool all = out.exit_code == exit_code::success && out.rows.size() == 4;
    std::string detail;
    for (const ResultRow& r : out.rows) {
        const bool ok = r.confidence_limit.has_value() && *r.confidence_limit <= r.epsilon;
        all = all && ok;
        detail += fmt("H=%g ", r.hops) + r.kind + fmt(" freq %.3g upper95 %.3g; ", r.empirical_frequency.value_or(-1.0),
                                                      r.confidence_limit.value_or(-1.0));
    }
    return {all, detail};
}

Outcome property_suites()
{
    const std::string cmd = std::string("\"") + SNC_PROPERTY_TESTS + "\" > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return {status == 0, status == 0 ? "property suite binary succeeded" : "property suite binary failed"};
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        Outcome (*run)();
        double budget_s;
    };
    const std::vector<Criterion> criteria{
        {1, "MMOO mean-rate reproduction", mean_rate, 1.0},
        {2, "linear scaling of the closed-form delay in H", linear_scaling, 10.0},
        {3, "regression-pinned delay bounds", regression_pins, 10.0},
        {4, "optimizer matches exhaustive theta grid", oracle_equivalence, 30.0},
        {5, "finite-horizon and homogeneous series consistency", series_consistency, 10.0},
        {6, "hand-computed tail anchors", anchors, 1.0},
        {7, "desk-scale statistical validation", desk_validation, 300.0},
        {8, "randomized property suites", property_suites, 120.0},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && elapsed <= c.budget_s;
        failed += pass ? 0 : 1;
        std::printf("%s %d %s (%.2fs of %.0fs): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, elapsed, c.budget_s,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}

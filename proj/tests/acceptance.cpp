// Acceptance suite: runs every pinned statistical and exactness criterion
// at full trial counts and prints one PASS/FAIL line per criterion.
// Exit code 0 iff everything passes.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tsel/checks.hpp"

int main(int argc, char** argv) {
    using namespace tsel::checks;
    BatteryOptions opt;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--fast") opt.fast = true;
        if (std::string(argv[i]) == "--seed" && i + 1 < argc)
            opt.seed = std::stoull(argv[++i]);
    }

    const std::vector<std::function<CheckResult()>> criteria = {
        [&] { return check_gamma_identity(); },
        [&] { return check_order_statistics(opt); },
        [&] { return check_interval_closed_forms(opt); },
        [&] { return check_interval_ratio_bound(opt); },
        [&] { return check_tree_oracle_equivalence(opt); },
        [&] { return check_tree_ratio_bound(opt); },
        [&] { return check_level_occupancy(opt); },
        [&] { return check_sky_oracle_equivalence(opt); },
        [&] { return check_threshold_region_measure(opt); },
        [&] { return check_sky_ratio_2d(opt); },
        [&] { return check_cube_event_rate(opt); },
        [&] { return check_determinism(opt); },
    };

    std::printf("acceptance suite (%s)\n", opt.fast ? "fast" : "full");
    int failures = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto step0 = std::chrono::steady_clock::now();
        CheckResult r = criteria[i]();
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - step0)
                            .count();
        if (!r.pass) ++failures;
        std::printf("[%2zu/%zu] %s  %-26s  (%6lld ms)  %s\n", i + 1, criteria.size(),
                    r.pass ? "PASS" : "FAIL", r.name.c_str(), static_cast<long long>(ms),
                    r.detail.c_str());
        std::fflush(stdout);
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    std::printf("%d/%zu criteria passed in %llds\n",
                static_cast<int>(criteria.size()) - failures, criteria.size(),
                static_cast<long long>(elapsed));
    return failures == 0 ? 0 : 1;
}

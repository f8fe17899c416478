// Acceptance suite runner: one pass/fail line per checked quantity,
// nonzero exit when any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "wgmig/acceptance.hpp"
#include "wgmig/io.hpp"

int main(int argc, char** argv) {
    wgmig::acceptance::Options options;
    for (int i = 1; i < argc; ++i) options.criteria.push_back(std::atoi(argv[i]));

    const std::vector<wgmig::Report> reports = wgmig::acceptance::run(options);
    bool all_pass = true;
    for (const auto& report : reports) {
        for (const auto& line : report.lines) {
            std::printf("%s  %s: %s = %s (target %s, tolerance %s)\n",
                        line.pass ? "PASS" : "FAIL", report.name.c_str(),
                        line.quantity.c_str(), wgmig::format_double(line.estimate).c_str(),
                        wgmig::format_double(line.target).c_str(),
                        wgmig::format_double(line.tolerance).c_str());
            all_pass = all_pass && line.pass;
        }
        std::printf("%s  %s done in %.1f s\n", report.pass() ? "PASS" : "FAIL",
                    report.name.c_str(), report.seconds);
    }
    return all_pass ? 0 : 1;
}

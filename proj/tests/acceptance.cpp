// Runs acceptance criteria 1-9 and prints one line per criterion.
// Usage: granuloma_acceptance [output_dir] [reference_cells]

#include "granuloma/verify.hpp"

#include <cstdlib>
#include <exception>
#include <iostream>

int main(int argc, char** argv)
{
    granuloma::VerifyOptions opts;
    opts.output_dir = argc > 1 ? argv[1] : "acceptance_out";
    if (argc > 2) opts.reference_cells = std::atoi(argv[2]);
    opts.log = &std::cerr;
    try {
        const auto summary = granuloma::run_verify(opts);
        for (const auto& r : summary.criteria) std::cout << granuloma::format_criterion(r) << '\n';
        std::cout << (summary.all_pass() ? "all criteria passed" : "some criteria FAILED") << std::endl;
        return summary.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance: " << e.what() << '\n';
        return 2;
    }
}

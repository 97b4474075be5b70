// Prints the expected-waiting-tasks law E = m * (1 - (1-p)^k) next to a
// Monte Carlo estimate of the same quantity, then shows the exact
// fully-connected variant against brute-force enumeration.

#include <cstdio>

#include "coopsim/coopsim.hpp"

int main() {
    std::printf("%6s %4s %6s %12s %12s %10s\n", "m", "k", "p", "exact",
                "sampled", "std err");
    for (std::size_t m : {100, 1000})
        for (std::size_t k : {1, 2, 5})
            for (double p : {0.01, 0.1, 0.3}) {
                double exact = coopsim::expected_waiting_time(m, k, p);
                coopsim::MonteCarloEstimate mc =
                    coopsim::monte_carlo_waiting(m, k, p, 20000, 99);
                std::printf("%6zu %4zu %6.2f %12.3f %12.3f %10.4f\n", m, k, p,
                            exact, mc.mean, mc.std_error);
            }

    std::printf("\nfully connected (every task waits on all others):\n");
    std::printf("%4s %6s %14s %14s %14s\n", "m", "p", "closed form",
                "enumerated", "first-order");
    for (std::size_t m : {4, 8, 12})
        for (double p : {0.1, 0.3}) {
            coopsim::FullyConnectedWaiting w =
                coopsim::fully_connected_waiting(m, p);
            std::printf("%4zu %6.2f %14.6f %14.6f %14.6f\n", m, p, w.exact,
                        coopsim::enumerate_fully_connected(m, p), w.proxy);
        }
    return 0;
}

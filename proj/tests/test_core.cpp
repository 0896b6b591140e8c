#include <bit>
#include <cmath>
#include <random>

#include "doctest.h"

#include "cfm/dynamics.hpp"
#include "cfm/error.hpp"
#include "cfm/simulation.hpp"
#include "test_support.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cfm;
using cfm::testing::column_sums;
using cfm::testing::naive_apply;
using cfm::testing::random_matrix;
using cfm::testing::random_wealth;

namespace {

// Columns (0.5,0.3,0.2), (0.2,0.7,0.1), (0.4,0.0,0.6).
CirculationMatrix worked_matrix() {
    return CirculationMatrix::from_triplets(3, {{0, 0, 0.5}, {1, 0, 0.3}, {2, 0, 0.2},
                                                {0, 1, 0.2}, {1, 1, 0.7}, {2, 1, 0.1},
                                                {0, 2, 0.4}, {2, 2, 0.6}});
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    return true;
}

}  // namespace

TEST_SUITE("validate") {
    TEST_CASE("single agent that saves everything is valid") {
        const auto m = CirculationMatrix::from_triplets(1, {{0, 0, 1.0}});
        CHECK(validate(m).valid());
        CHECK(m.is_valid());
    }

    TEST_CASE("column summing to 0.9 is reported on that column") {
        const auto m = CirculationMatrix::from_triplets(2, {{0, 0, 0.6}, {1, 0, 0.4}, {0, 1, 0.3}, {1, 1, 0.6}});
        const auto r = validate(m);
        CHECK_FALSE(r.valid());
        CHECK_FALSE(m.is_valid());
        REQUIRE(r.violations().size() == 1);
        CHECK(r.first_violation()->column == 1);
        CHECK(r.columns[1].sum_deviation == doctest::Approx(-0.1).epsilon(1e-12));
        CHECK(std::abs(r.columns[0].sum_deviation) <= 1e-15);
        CHECK(r.summary().find("column 2") != std::string::npos);
    }

    TEST_CASE("worked three-agent matrix is valid") {
        const auto m = worked_matrix();
        // direct summation oracle
        const double sums[3] = {0.5 + 0.3 + 0.2, 0.2 + 0.7 + 0.1, 0.4 + 0.0 + 0.6};
        const auto r = validate(m);
        CHECK(r.valid());
        for (int j = 0; j < 3; ++j) CHECK(r.columns[j].sum_deviation == doctest::Approx(sums[j] - 1.0).epsilon(1e-12));
    }

    TEST_CASE("range and implied-diagonal violations") {
        SUBCASE("negative entry") {
            const auto m = CirculationMatrix::from_triplets(2, {{0, 0, 1.2}, {1, 0, -0.2}, {1, 1, 1.0}});
            const auto r = validate(m);
            CHECK_FALSE(r.valid());
            CHECK(r.columns[0].negative_entries == 1);
            CHECK(r.columns[0].entries_above_one == 1);
        }
        SUBCASE("off-diagonal spending above 1 with a zero diagonal") {
            const auto m = CirculationMatrix::from_triplets(3, {{1, 0, 0.7}, {2, 0, 0.5}, {1, 1, 1.0}, {2, 2, 1.0}});
            const auto r = validate(m);
            CHECK_FALSE(r.valid());
            CHECK(r.first_violation()->column == 0);
            CHECK(r.columns[0].implied_diagonal == doctest::Approx(-0.2));
        }
        SUBCASE("negative diagonal balancing the column is still rejected") {
            const auto m =
                CirculationMatrix::from_triplets(3, {{0, 0, -0.2}, {1, 0, 0.7}, {2, 0, 0.5}, {1, 1, 1.0}, {2, 2, 1.0}});
            const auto r = validate(m);
            CHECK(std::abs(r.columns[0].sum_deviation) < 1e-15);
            CHECK_FALSE(r.valid());
            CHECK(r.columns[0].implied_diagonal < 0.0);
        }
        SUBCASE("deviation within tolerance passes, just beyond fails") {
            const auto ok = CirculationMatrix::from_triplets(2, {{0, 0, 0.5 + 5e-10}, {1, 0, 0.5}, {1, 1, 1.0}});
            CHECK(ok.is_valid());
            const auto bad = CirculationMatrix::from_triplets(2, {{0, 0, 0.5 + 2e-9}, {1, 0, 0.5}, {1, 1, 1.0}});
            CHECK_FALSE(bad.is_valid());
        }
    }

    TEST_CASE("structural errors at construction") {
        CHECK_THROWS_AS(CirculationMatrix::from_triplets(0, {}), std::invalid_argument);
        CHECK_THROWS_AS(CirculationMatrix::from_triplets(2, {{2, 0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(CirculationMatrix::from_triplets(2, {{0, 0, 0.5}, {0, 0, 0.5}}), std::invalid_argument);
        CHECK_THROWS_AS(CirculationMatrix::from_triplets(1, {{0, 0, NAN}}), std::invalid_argument);
    }

    TEST_CASE("diagonal is always stored") {
        const auto m = CirculationMatrix::from_triplets(2, {{1, 0, 1.0}, {0, 1, 1.0}});
        CHECK(m.nnz() == 4);
        CHECK(m.diagonal(0) == 0.0);
        CHECK(m.diagonal(1) == 0.0);
        CHECK(m.is_valid());
        CHECK(m.at(1, 0) == 1.0);
    }
}

TEST_SUITE("apply_step") {
    TEST_CASE("identity leaves wealth untouched") {
        const auto id = CirculationMatrix::identity(3);
        CHECK(id.is_identity());
        const WealthVector x({100, 200, 300});
        CHECK(apply_step(id, x) == x);
    }

    TEST_CASE("worked example matches a dense oracle") {
        const auto m = worked_matrix();
        const std::vector<double> x{100, 200, 300};
        const auto expect = naive_apply(m, x);  // (210, 170, 220)
        CHECK(expect[0] == doctest::Approx(210.0));
        CHECK(expect[1] == doctest::Approx(170.0));
        CHECK(expect[2] == doctest::Approx(220.0));

        const auto y = apply_step(m, WealthVector(x));
        for (int i = 0; i < 3; ++i) CHECK(std::abs(y[i] - expect[i]) <= 1e-12);
        CHECK(y[0] == 210.0);
        CHECK(y[1] == 170.0);
        CHECK(y[2] == 220.0);
        CHECK(y.total() == 600.0);
    }

    TEST_CASE("single agent keeps its wealth") {
        const auto m = CirculationMatrix::from_triplets(1, {{0, 0, 1.0}});
        CHECK(apply_step(m, WealthVector({42.0}))[0] == 42.0);
    }

    TEST_CASE("errors") {
        const auto m = worked_matrix();
        CHECK_THROWS_AS(apply_step(m, WealthVector({1.0, 2.0})), DimensionError);
        const auto bad = CirculationMatrix::from_triplets(2, {{0, 0, 0.5}, {1, 1, 1.0}});
        CHECK_THROWS_AS(apply_step(bad, WealthVector({1.0, 2.0})), ValidationError);
        CHECK_THROWS_AS(apply_step(bad, IntegerWealth({1, 2})), ValidationError);
        CHECK_THROWS_AS(WealthVector({1.0, -1.0}), std::invalid_argument);
        CHECK_THROWS_AS(WealthVector(std::vector<double>{}), std::invalid_argument);
    }

    TEST_CASE("integer mode reproduces the worked example exactly") {
        const auto y = apply_step(worked_matrix(), IntegerWealth({100, 200, 300}));
        CHECK(y == IntegerWealth({210, 170, 220}));
        CHECK(y.total() == 600);
    }

    TEST_CASE("integer mode apportions by largest remainder") {
        // buyer 1 holds 10 units and spends 1/3 on each of two sellers:
        // targets 3.33.. each, round(6.67) = 7 paid, the extra unit goes to
        // the lower seller index on the tie, 3 units saved.
        const double third = 1.0 / 3.0;
        const auto m = CirculationMatrix::from_triplets(
            3, {{0, 0, 1.0 - 2 * third}, {1, 0, third}, {2, 0, third}, {1, 1, 1.0}, {2, 2, 1.0}});
        const auto y = apply_step(m, IntegerWealth({10, 0, 0}));
        CHECK(y == IntegerWealth({3, 4, 3}));
    }
}

TEST_SUITE("expenses and savings") {
    TEST_CASE("identity spends nothing") {
        const auto id = CirculationMatrix::identity(4);
        const WealthVector x({1, 2, 3, 4});
        for (AgentIndex j = 0; j < 4; ++j) {
            CHECK(total_expenses(id, x, j) == 0.0);
            CHECK(savings_fraction(id, j) == 1.0);
        }
    }

    TEST_CASE("first column of the worked matrix") {
        const auto m = worked_matrix();
        const WealthVector x({100, 200, 300});
        // off-diagonal 0.3 + 0.2 = 0.5, times 100
        CHECK(total_expenses(m, x, 0) == doctest::Approx(50.0).epsilon(1e-15));
        CHECK(savings_fraction(m, 0) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(total_expenses(m, WealthVector({0, 200, 300}), 0) == 0.0);
    }

    TEST_CASE("full spender saves nothing") {
        const auto m = CirculationMatrix::from_triplets(2, {{1, 0, 1.0}, {1, 1, 1.0}});
        CHECK(savings_fraction(m, 0) == 0.0);
        CHECK(total_expenses(m, WealthVector({7, 0}), 0) == 7.0);
    }

    TEST_CASE("agent out of range") {
        const auto m = worked_matrix();
        CHECK_THROWS_AS(savings_fraction(m, 3), std::out_of_range);
        CHECK_THROWS_AS(total_expenses(m, WealthVector({1, 1, 1}), 7), std::out_of_range);
    }

    TEST_CASE("savings plus spending share is one, and wealth splits into both") {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t n = 1 + rng() % 40;
            const auto m = random_matrix(n, rng, 0.3);
            const WealthVector x(random_wealth(n, rng));
            for (AgentIndex j = 0; j < n; ++j) {
                const double s = savings_fraction(m, j);
                CHECK(s >= 0.0);
                CHECK(std::abs(s - m.diagonal(j)) <= kColumnTolerance);
                if (x[j] > 0.0) CHECK(std::abs(s + total_expenses(m, x, j) / x[j] - 1.0) <= kColumnTolerance);
                CHECK(std::abs((x[j] - total_expenses(m, x, j)) - s * x[j]) <= 1e-12 * std::max(1.0, x[j]));
            }
        }
    }
}

TEST_SUITE("properties") {
    TEST_CASE("conservation and non-negativity over random matrices") {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t n = 1 + rng() % 256;
            const auto m = random_matrix(n, rng, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
            const WealthVector x(random_wealth(n, rng));
            const auto y = apply_step(m, x);
            for (std::size_t i = 0; i < n; ++i) CHECK(y[i] >= 0.0);
            const double rel = std::abs(y.total() - x.total()) / x.total();
            CHECK(rel <= static_cast<double>(n) * 1e-12);

            std::vector<std::int64_t> units(n);
            for (auto& u : units) u = static_cast<std::int64_t>(rng() % 1'000'000);
            const IntegerWealth xi(units);
            const auto yi = apply_step(m, xi);
            CHECK(yi.total() == xi.total());
        }
    }

    TEST_CASE("identity steps are bitwise neutral") {
        std::mt19937_64 rng(5);
        const WealthVector x(random_wealth(50, rng));
        const auto trace = run_simulation(Schedule::identity(50, 1000), x, SnapshotPolicy::final_only());
        CHECK(bitwise_equal(trace.final_state.values(), x.values()));
    }

    TEST_CASE("step result does not depend on the worker count") {
        std::mt19937_64 rng(99);
        const auto m = random_matrix(300, rng, 0.2);
        const WealthVector x(random_wealth(300, rng));
#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
        const auto one = apply_step(m, x);
        omp_set_num_threads(4);
        const auto four = apply_step(m, x);
        omp_set_num_threads(saved);
        CHECK(bitwise_equal(one.values(), four.values()));
#else
        CHECK(bitwise_equal(apply_step(m, x).values(), apply_step(m, x).values()));
#endif
    }
}

TEST_SUITE("run_simulation") {
    TEST_CASE("zero steps records only the start") {
        const auto m = std::make_shared<const CirculationMatrix>(worked_matrix());
        const WealthVector x({100, 200, 300});
        const auto trace = run_simulation(Schedule::stationary(m, 0), x, SnapshotPolicy::every_step());
        REQUIRE(trace.snapshots.size() == 1);
        CHECK(trace.snapshots[0].tau == 0);
        CHECK(trace.drift.empty());
        CHECK(trace.final_state == x);
    }

    TEST_CASE("one stationary step equals apply_step") {
        const auto m = std::make_shared<const CirculationMatrix>(worked_matrix());
        const WealthVector x({100, 200, 300});
        const auto trace = run_simulation(Schedule::stationary(m, 1), x, SnapshotPolicy::every_step());
        CHECK(trace.final_state == apply_step(*m, x));
        CHECK(trace.final_state == WealthVector({210, 170, 220}));
        CHECK(trace.snapshots.size() == 2);
        CHECK(trace.monetary_base == 600.0);
    }

    TEST_CASE("errors") {
        const auto m = std::make_shared<const CirculationMatrix>(worked_matrix());
        CHECK_THROWS_AS(run_simulation(Schedule::stationary(m, 2), WealthVector({1, 2}), SnapshotPolicy::final_only()),
                        DimensionError);
        CHECK_THROWS_AS(run_simulation(Schedule::stationary(m, 2), WealthVector({1, 2, 3}), SnapshotPolicy::final_only(), 3),
                        ScheduleExhausted);
    }

    TEST_CASE("snapshot times increase and drift is non-negative") {
        std::mt19937_64 rng(3);
        const auto m = std::make_shared<const CirculationMatrix>(random_matrix(20, rng));
        SnapshotPolicy p;  // log-spaced
        const auto trace = run_simulation(Schedule::stationary(m, 500), WealthVector(random_wealth(20, rng)), p);
        for (std::size_t k = 1; k < trace.snapshots.size(); ++k)
            CHECK(trace.snapshots[k].tau > trace.snapshots[k - 1].tau);
        CHECK(trace.snapshots.back().tau == 500);
        CHECK(trace.snapshots.back().full());
        for (double d : trace.drift) CHECK(d >= 0.0);
        CHECK(trace.drift.size() == 500);
    }

    TEST_CASE("summary policy keeps the final vector in full") {
        std::mt19937_64 rng(4);
        const auto m = std::make_shared<const CirculationMatrix>(random_matrix(10, rng));
        SnapshotPolicy p{SnapshotPolicy::Spacing::Every, SnapshotPolicy::Content::Summary, 10, 10};
        const auto trace = run_simulation(Schedule::stationary(m, 35), WealthVector(random_wealth(10, rng)), p);
        std::vector<std::size_t> taus;
        for (const auto& s : trace.snapshots) taus.push_back(s.tau);
        CHECK(taus == std::vector<std::size_t>{0, 10, 20, 30, 35});
        CHECK_FALSE(trace.snapshots[1].full());
        CHECK(trace.snapshots[1].summary.has_value());
        CHECK(trace.snapshots.back().full());
    }

    TEST_CASE("integer runs conserve exactly") {
        std::mt19937_64 rng(8);
        const auto m = std::make_shared<const CirculationMatrix>(random_matrix(64, rng));
        std::vector<std::int64_t> units(64);
        for (auto& u : units) u = static_cast<std::int64_t>(rng() % 100000);
        const auto trace = run_simulation(Schedule::stationary(m, 2000), IntegerWealth(units), SnapshotPolicy::final_only());
        for (double d : trace.drift) CHECK(d == 0.0);
        CHECK(trace.final_integer->total() == IntegerWealth(units).total());
    }
}

TEST_SUITE("matrix_product") {
    TEST_CASE("empty product is the identity") {
        const auto p = matrix_product(std::span<const CirculationMatrix>{}, 4);
        CHECK(p == CirculationMatrix::identity(4));
    }

    TEST_CASE("identity factors leave F exactly") {
        const auto f = worked_matrix();
        const auto id = CirculationMatrix::identity(3);
        const std::vector<CirculationMatrix> fi{f, id};
        const std::vector<CirculationMatrix> if_{id, f};
        CHECK(matrix_product(fi, 3) == f);
        CHECK(matrix_product(if_, 3) == f);
    }

    TEST_CASE("product of two random 4x4 matrices stays column-stochastic") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 50; ++trial) {
            const std::vector<CirculationMatrix> fs{random_matrix(4, rng, 0.7), random_matrix(4, rng, 0.7)};
            const auto p = matrix_product(fs, 4);
            for (double s : column_sums(p)) CHECK(std::abs(s - 1.0) <= 1e-12);
            CHECK(validate(p).valid());
        }
    }

    TEST_CASE("later factors multiply on the left") {
        std::mt19937_64 rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + rng() % 10;
            auto f0 = std::make_shared<const CirculationMatrix>(random_matrix(n, rng));
            auto f1 = std::make_shared<const CirculationMatrix>(random_matrix(n, rng));
            const WealthVector x(random_wealth(n, rng));
            const Schedule s(ScheduleKind::Trace, {f0, f1});
            const auto trace = run_simulation(s, x, SnapshotPolicy::final_only());
            const std::vector<CirculationMatrix> chrono{*f0, *f1};
            const auto via_product = apply_step(matrix_product(chrono, n), x);
            // naive oracle: F1 (F0 x)
            const auto naive = naive_apply(*f1, naive_apply(*f0, std::vector<double>(x.values().begin(), x.values().end())));
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(trace.final_state[i] - via_product[i]) <= 1e-10);
                CHECK(std::abs(trace.final_state[i] - naive[i]) <= 1e-10);
            }
        }
    }

    TEST_CASE("guardrails") {
        const auto big = CirculationMatrix::identity(kProductMaxN + 1);
        const std::vector<CirculationMatrix> one{big};
        CHECK_THROWS_AS(matrix_product(one, kProductMaxN + 1), GuardrailError);
        const std::vector<CirculationMatrix> mixed{CirculationMatrix::identity(2), CirculationMatrix::identity(3)};
        CHECK_THROWS_AS(matrix_product(mixed, 2), DimensionError);
    }
}

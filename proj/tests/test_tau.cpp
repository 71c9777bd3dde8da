/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <random>
#include <sstream>

#include "error.hpp"
#include "tau.hpp"

using namespace retrace;

namespace {

TauTable small_table() {
  TauTable t;
  t.set(1, StepCount::finite(5));
  t.set(2, StepCount::infinite());
  return t;
}

// walks right over the 1s and accepts on the first blank: tau(n) = n + 1
MachineProgram right_scanner() {
  MachineProgram p("scan", "acc");
  p.add_transition({"scan", '1'}, {"scan", '1', MachineProgram::Move::right});
  p.add_transition({"scan", '_'}, {"acc", '_', MachineProgram::Move::right});
  return p;
}

}  // namespace

TEST_CASE("budgeted queries against a table") {
  TauTable t = small_table();
  BudgetedResult r = t.query_budgeted(1, 10);
  CHECK(r.halted);
  CHECK(r.value == 5);

  r = t.query_budgeted(2, 1000000);
  CHECK_FALSE(r.halted);
  CHECK(r.value == 1000000);

  r = t.query_budgeted(1, 3);  // budget below tau
  CHECK_FALSE(r.halted);
  CHECK(r.value == 3);
}

TEST_CASE("coefficient enclosures follow the budget rule") {
  TauTable t;
  t.set(1, StepCount::finite(3));
  t.set(2, StepCount::infinite());
  t.set(3, StepCount::finite(50));

  Enclosure c1 = t.coefficient_enclosure(1, Precision(20));
  CHECK(c1.is_point());
  CHECK(c1.lo() == Dyadic::pow2(-4));  // 2^-(1+3)

  Enclosure c2 = t.coefficient_enclosure(2, Precision(20));
  CHECK(c2.lo() == Dyadic(0));
  CHECK(c2.hi() == Dyadic::pow2(-22));

  // budget 10 < 50: conservative branch, and the true 2^-53 lies inside
  Enclosure c3 = t.coefficient_enclosure(3, Precision(10));
  CHECK(c3.lo() == Dyadic(0));
  CHECK(c3.hi() == Dyadic::pow2(-13));
  CHECK(c3.contains(Dyadic::pow2(-53)));
}

TEST_CASE("soundness and budget monotonicity, randomized") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    TauTable t;
    std::uint64_t n = 1 + rng() % 6;
    bool finite = rng() % 2 == 0;
    std::uint64_t steps = 1 + rng() % 90;
    if (finite) t.set(n, StepCount::finite(steps));
    else t.set(n, StepCount::infinite());

    Dyadic truth = finite
                       ? Dyadic::pow2(-static_cast<std::int64_t>(n + steps))
                       : Dyadic(0);
    Dyadic prev_width = Dyadic(10);
    for (int r = 2; r < 100; r += 7) {
      Enclosure c = t.coefficient_enclosure(n, Precision(r));
      CHECK(c.contains(truth));
      CHECK(c.width() <= prev_width);
      prev_width = c.width();
    }
  }
}

TEST_CASE("machine interpreter counts steps") {
  MachineProgram p = right_scanner();
  BudgetedResult r = p.run(4, 100);
  CHECK(r.halted);
  CHECK(r.value == 5);
  r = p.run(4, 3);
  CHECK_FALSE(r.halted);
}

TEST_CASE("interpreter and table agree in coefficient enclosures") {
  auto prog = std::make_shared<const MachineProgram>(right_scanner());
  TauTable with_prog;
  with_prog.attach_program(3, prog);  // tau(3) = 4
  TauTable with_entry;
  with_entry.set(3, StepCount::finite(4));
  for (int r : {2, 8, 20, 40}) {
    Enclosure a = with_prog.coefficient_enclosure(3, Precision(r));
    Enclosure b = with_entry.coefficient_enclosure(3, Precision(r));
    CHECK(a.lo() == b.lo());
    CHECK(a.hi() == b.hi());
  }
}

TEST_CASE("table text format") {
  std::istringstream in(
      "# tau table\n"
      "1 5\n"
      "2 inf\n"
      "default inf\n");
  TauTable t = TauTable::parse(in);
  CHECK(t.lookup(1) == StepCount::finite(5));
  CHECK_FALSE(t.lookup(2).is_finite());
  CHECK_FALSE(t.lookup(99).is_finite());

  std::istringstream bad("1 zero\n");
  CHECK_THROWS_AS(TauTable::parse(bad), Error);
}

TEST_CASE("machine program text format") {
  std::istringstream in(
      "start scan\n"
      "accept acc\n"
      "# walk right\n"
      "scan 1 -> scan 1 R\n"
      "scan _ -> acc _ R\n");
  MachineProgram p = MachineProgram::parse(in);
  BudgetedResult r = p.run(2, 10);
  CHECK(r.halted);
  CHECK(r.value == 3);

  std::istringstream dup(
      "start s\naccept a\ns 1 -> s 1 R\ns 1 -> a 1 R\n");
  CHECK_THROWS_AS(MachineProgram::parse(dup), Error);
}

TEST_CASE("step counts are positive; index zero rejected") {
  CHECK_THROWS_AS(StepCount::finite(0), Error);
  TauTable t;
  CHECK_THROWS_AS(t.set(0, StepCount::finite(1)), Error);
  CHECK_THROWS_AS(t.query_budgeted(0, 5), Error);
}

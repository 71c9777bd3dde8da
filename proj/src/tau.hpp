/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "enclosure.hpp"

namespace retrace {

// Number of steps a machine runs, or "never halts".
class StepCount {
 public:
  StepCount() = default;  // infinite
  static StepCount infinite() { return StepCount(); }
  static StepCount finite(std::uint64_t steps);

  bool is_finite() const { return finite_.has_value(); }
  std::uint64_t steps() const;  // requires is_finite()

  friend bool operator==(const StepCount&, const StepCount&) = default;

 private:
  std::optional<std::uint64_t> finite_;
};

// Result of running machine n with a step budget.
struct BudgetedResult {
  bool halted = false;
  std::uint64_t value = 0;  // steps when halted, the budget otherwise
};

// Deterministic single-tape Turing machine over {0, 1, blank}.  Input n is
// written as n consecutive 1s with the head on the leftmost; a run counts
// transitions until the accept state is entered.
class MachineProgram {
 public:
  enum class Move { left, right };
  struct Key {
    std::string state;
    char symbol;  // '0', '1' or '_' (blank)
    auto operator<=>(const Key&) const = default;
  };
  struct Action {
    std::string state;
    char write;
    Move move;
  };

  MachineProgram(std::string start, std::string accept)
      : start_(std::move(start)), accept_(std::move(accept)) {}

  // Duplicate (state, symbol) keys are rejected: the machine is deterministic.
  void add_transition(const Key& key, const Action& action);

  BudgetedResult run(std::uint64_t input, std::uint64_t budget) const;

  // One transition per line: `state symbol -> state symbol move` with
  // move in {L, R}, symbol in {0, 1, _}.  First line: `start <state>`,
  // second: `accept <state>`.  '#' starts a comment.
  static MachineProgram parse(std::istream& in);
  static MachineProgram load(const std::string& path);

 private:
  std::string start_, accept_;
  std::map<Key, Action> transitions_;
};

// Desk-scale stand-in for the machine enumeration: an explicit list of
// programs (program i serves n = i+1) backed by a step-count table with a
// default for everything not listed.
class TauTable {
 public:
  TauTable() : default_beyond_(StepCount::infinite()) {}

  void set(std::uint64_t n, StepCount steps);
  void set_default(StepCount steps) { default_beyond_ = steps; }
  void attach_program(std::uint64_t n, std::shared_ptr<const MachineProgram> p);

  // `<n> <steps|inf>` per line, `default <steps|inf>`, '#' comments.
  static TauTable parse(std::istream& in);
  static TauTable load(const std::string& path);

  // HALTED(steps) with steps <= budget, or RUNNING_BEYOND(budget).
  // Deterministic and repeatable.
  BudgetedResult query_budgeted(std::uint64_t n, std::uint64_t budget) const;

  // Unbudgeted table answer; used only by tests and desk-scale surrogates
  // that are allowed to "know" the table (never by coefficient_enclosure).
  StepCount lookup(std::uint64_t n) const;

  // Encloses 2^-(n + tau(n)) with width <= 2^-r, without ever deciding
  // whether machine n halts: simulate with budget r.bits; if still running,
  // [0, 2^-(n + r)] is sound because tau(n) > r, and exact for tau = infinity
  // since 2^-inf = 0.
  Enclosure coefficient_enclosure(std::uint64_t n, Precision r) const;

 private:
  std::map<std::uint64_t, StepCount> entries_;
  std::map<std::uint64_t, std::shared_ptr<const MachineProgram>> programs_;
  StepCount default_beyond_;
};

}  // namespace retrace

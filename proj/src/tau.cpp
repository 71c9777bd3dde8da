/* SPDX-License-Identifier: Apache-2.0 */
#include "tau.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace retrace {

StepCount StepCount::finite(std::uint64_t steps) {
  if (steps == 0)
    fail(ErrorCode::invalid_argument, "finite step counts are >= 1");
  StepCount s;
  s.finite_ = steps;
  return s;
}

std::uint64_t StepCount::steps() const {
  if (!finite_)
    fail(ErrorCode::invalid_argument, "steps() on an infinite StepCount");
  return *finite_;
}

void MachineProgram::add_transition(const Key& key, const Action& action) {
  if (key.symbol != '0' && key.symbol != '1' && key.symbol != '_')
    fail(ErrorCode::invalid_argument, "tape symbol must be 0, 1 or _");
  if (action.write != '0' && action.write != '1' && action.write != '_')
    fail(ErrorCode::invalid_argument, "written symbol must be 0, 1 or _");
  if (!transitions_.emplace(key, action).second)
    fail(ErrorCode::invalid_argument,
         "duplicate transition for (" + key.state + ", " + key.symbol + ")");
}

BudgetedResult MachineProgram::run(std::uint64_t input,
                                   std::uint64_t budget) const {
  std::deque<char> tape(input, '1');
  if (tape.empty()) tape.push_back('_');
  std::size_t head = 0;
  std::string state = start_;
  for (std::uint64_t step = 0; step < budget; ++step) {
    if (state == accept_) return {true, step};
    auto it = transitions_.find(Key{state, tape[head]});
    if (it == transitions_.end()) return {false, budget};  // stuck: never accepts
    tape[head] = it->second.write;
    state = it->second.state;
    if (it->second.move == Move::left) {
      if (head == 0) tape.push_front('_');
      else --head;
    } else {
      ++head;
      if (head == tape.size()) tape.push_back('_');
    }
  }
  if (state == accept_) return {true, budget};
  return {false, budget};
}

namespace {

bool next_payload_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream probe(line);
    std::string tok;
    if (probe >> tok) return true;
  }
  return false;
}

StepCount parse_steps(const std::string& tok) {
  if (tok == "inf") return StepCount::infinite();
  std::uint64_t v = 0;
  try {
    std::size_t pos = 0;
    v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, "bad step count '" + tok + "'");
  }
  return StepCount::finite(v);
}

}  // namespace

MachineProgram MachineProgram::parse(std::istream& in) {
  std::string line, kw, start, accept;
  if (!next_payload_line(in, line))
    fail(ErrorCode::invalid_argument, "machine program: missing start line");
  {
    std::istringstream ls(line);
    if (!(ls >> kw >> start) || kw != "start")
      fail(ErrorCode::invalid_argument, "machine program: expected 'start <state>'");
  }
  if (!next_payload_line(in, line))
    fail(ErrorCode::invalid_argument, "machine program: missing accept line");
  {
    std::istringstream ls(line);
    if (!(ls >> kw >> accept) || kw != "accept")
      fail(ErrorCode::invalid_argument, "machine program: expected 'accept <state>'");
  }
  MachineProgram prog(start, accept);
  while (next_payload_line(in, line)) {
    std::istringstream ls(line);
    std::string s0, sym0, arrow, s1, sym1, mv;
    if (!(ls >> s0 >> sym0 >> arrow >> s1 >> sym1 >> mv) || arrow != "->" ||
        sym0.size() != 1 || sym1.size() != 1 || (mv != "L" && mv != "R"))
      fail(ErrorCode::invalid_argument, "bad transition line: " + line);
    prog.add_transition(Key{s0, sym0[0]},
                        Action{s1, sym1[0], mv == "L" ? Move::left : Move::right});
  }
  return prog;
}

MachineProgram MachineProgram::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open machine program: " + path);
  return parse(in);
}

void TauTable::set(std::uint64_t n, StepCount steps) {
  if (n == 0) fail(ErrorCode::invalid_argument, "table indices are >= 1");
  entries_[n] = steps;
}

void TauTable::attach_program(std::uint64_t n,
                              std::shared_ptr<const MachineProgram> p) {
  if (n == 0) fail(ErrorCode::invalid_argument, "table indices are >= 1");
  programs_[n] = std::move(p);
}

TauTable TauTable::parse(std::istream& in) {
  TauTable table;
  std::string line;
  while (next_payload_line(in, line)) {
    std::istringstream ls(line);
    std::string first, second;
    if (!(ls >> first >> second))
      fail(ErrorCode::invalid_argument, "bad table line: " + line);
    if (first == "default") {
      table.set_default(parse_steps(second));
      continue;
    }
    std::uint64_t n = 0;
    try {
      n = std::stoull(first);
    } catch (const std::exception&) {
      fail(ErrorCode::invalid_argument, "bad table index '" + first + "'");
    }
    table.set(n, parse_steps(second));
  }
  return table;
}

TauTable TauTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open tau table: " + path);
  return parse(in);
}

BudgetedResult TauTable::query_budgeted(std::uint64_t n,
                                        std::uint64_t budget) const {
  if (n == 0) fail(ErrorCode::invalid_argument, "machine index must be >= 1");
  if (auto it = programs_.find(n); it != programs_.end())
    return it->second->run(n, budget);
  StepCount entry = lookup(n);
  if (entry.is_finite() && entry.steps() <= budget)
    return {true, entry.steps()};
  return {false, budget};
}

StepCount TauTable::lookup(std::uint64_t n) const {
  auto it = entries_.find(n);
  return it != entries_.end() ? it->second : default_beyond_;
}

Enclosure TauTable::coefficient_enclosure(std::uint64_t n, Precision r) const {
  std::uint64_t budget = r.bits < 0 ? 0 : static_cast<std::uint64_t>(r.bits);
  BudgetedResult res = query_budgeted(n, budget);
  if (res.halted) {
    std::int64_t shift = -static_cast<std::int64_t>(n + res.value);
    return Enclosure(Dyadic::pow2(shift));
  }
  return Enclosure(Dyadic(),
                   Dyadic::pow2(-static_cast<std::int64_t>(n + budget)));
}

}  // namespace retrace

#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rex/bigint.hpp"

namespace rex {

/// Deterministic finite automaton over the binary alphabet {0, 1}.
/// delta[s][c] is the target state or kNoTransition when undefined.
struct Dfa {
    static constexpr int kNoTransition = -1;

    int state_count = 0;
    int start = 0;
    std::vector<bool> accepting;                 // size state_count
    std::vector<std::array<int, 2>> delta;       // size state_count

    bool is_complete() const;
    /// Throws std::invalid_argument when indices are out of range.
    void validate() const;
};

Dfa make_dfa(int states, int start, std::vector<int> accepting_states,
             std::vector<std::array<int, 2>> delta);

/// Runs the automaton on a binary string ("0101..."); the empty string
/// reports membership of the start state. Throws std::runtime_error with a
/// "missing transition" message when an undefined transition is hit, and
/// std::invalid_argument on characters outside {0, 1}.
bool run(const Dfa& dfa, std::string_view input);

/// Totalizes delta. When any transition is missing, one non-accepting dead
/// state with self-loops is appended; otherwise the input is returned as is.
Dfa complete(const Dfa& dfa);

/// Hopcroft minimization. Requires a complete automaton. The result is
/// complete, has every state reachable, no pair of equivalent states, and
/// canonical state numbering: breadth-first from the start state, following
/// symbol 0 before symbol 1. Equal languages therefore yield identical
/// structures.
Dfa minimize(const Dfa& dfa);

/// Structural isomorphism respecting start, accepting set and transitions.
/// Both inputs must be minimal and complete (throws std::invalid_argument
/// otherwise); on such automata this coincides with language equality.
bool is_isomorphic(const Dfa& a, const Dfa& b);

/// Exact number of accepted strings of length exactly n, via dynamic
/// programming over state-occupancy counts. Requires a complete automaton.
BigUint count_accepted(const Dfa& dfa, unsigned n);

/// The seven Tomita grammars' ground-truth automata, hand-encoded as
/// complete minimal DFAs. Index must be in 1..7.
Dfa tomita_dfa(int index);

/// GraphViz rendering: dotted edges for symbol 0, solid for symbol 1,
/// double circles for accepting states, shaded circles for the rest.
/// Output is byte-identical for equal automata.
std::string to_dot(const Dfa& dfa);

std::string to_json(const Dfa& dfa);
Dfa dfa_from_json(const std::string& text);

}  // namespace rex

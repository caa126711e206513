#include "rex/dfa.hpp"

#include <stdexcept>

namespace rex {

// Hand-encoded from the grammar descriptions, as complete minimal automata.
// G3 and G7 carry an explicit trap state; G5 and G6 need none.
Dfa tomita_dfa(int index) {
    switch (index) {
        case 1:  // 1*
            return make_dfa(2, 0, {0}, {{1, 0}, {1, 1}});
        case 2:  // (10)*
            return make_dfa(3, 0, {0}, {{2, 1}, {0, 2}, {2, 2}});
        case 3:
            // an odd run of 1s must not be followed by an odd run of 0s.
            // 0: neutral, 1: odd trailing 1-run, 2: pending odd 0-run,
            // 3: pending even 0-run, 4: trap
            return make_dfa(5, 0, {0, 1, 3}, {{0, 1}, {2, 0}, {3, 4}, {2, 1}, {4, 4}});
        case 4:  // no "000" substring; states count trailing zeros
            return make_dfa(4, 0, {0, 1, 2}, {{1, 0}, {2, 0}, {3, 0}, {3, 3}});
        case 5:  // even number of 0s and even number of 1s; states (parity0, parity1)
            return make_dfa(4, 0, {0}, {{1, 2}, {0, 3}, {3, 0}, {2, 1}});
        case 6:  // (#0 - #1) mod 3 == 0; state = current difference mod 3
            return make_dfa(3, 0, {0}, {{1, 2}, {2, 0}, {0, 1}});
        case 7:  // 0*1*0*1*
            return make_dfa(5, 0, {0, 1, 2, 3}, {{0, 1}, {2, 1}, {2, 3}, {4, 3}, {4, 4}});
        default:
            throw std::invalid_argument("tomita_dfa: index must be in 1..7");
    }
}

}  // namespace rex

#include "rex/dfa.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rex {

bool Dfa::is_complete() const {
    for (const auto& row : delta) {
        if (row[0] == kNoTransition || row[1] == kNoTransition) return false;
    }
    return true;
}

void Dfa::validate() const {
    if (state_count <= 0) throw std::invalid_argument("Dfa: state_count must be positive");
    if (start < 0 || start >= state_count) throw std::invalid_argument("Dfa: start out of range");
    if (static_cast<int>(accepting.size()) != state_count || static_cast<int>(delta.size()) != state_count)
        throw std::invalid_argument("Dfa: field sizes disagree with state_count");
    for (const auto& row : delta) {
        for (int c = 0; c < 2; ++c) {
            if (row[c] != kNoTransition && (row[c] < 0 || row[c] >= state_count))
                throw std::invalid_argument("Dfa: transition target out of range");
        }
    }
}

Dfa make_dfa(int states, int start, std::vector<int> accepting_states,
             std::vector<std::array<int, 2>> delta) {
    Dfa d;
    d.state_count = states;
    d.start = start;
    d.accepting.assign(states, false);
    for (int s : accepting_states) {
        if (s < 0 || s >= states) throw std::invalid_argument("Dfa: accepting index out of range");
        d.accepting[s] = true;
    }
    d.delta = std::move(delta);
    d.validate();
    return d;
}

bool run(const Dfa& dfa, std::string_view input) {
    int state = dfa.start;
    for (char ch : input) {
        if (ch != '0' && ch != '1') throw std::invalid_argument("run: symbol outside {0,1}");
        int next = dfa.delta[state][ch - '0'];
        if (next == Dfa::kNoTransition) {
            throw std::runtime_error("run: missing transition from state " + std::to_string(state)
                                     + " on symbol " + std::string(1, ch));
        }
        state = next;
    }
    return dfa.accepting[state];
}

Dfa complete(const Dfa& dfa) {
    dfa.validate();
    if (dfa.is_complete()) return dfa;
    Dfa out = dfa;
    int dead = out.state_count;
    out.state_count += 1;
    out.accepting.push_back(false);
    for (auto& row : out.delta) {
        for (int c = 0; c < 2; ++c) {
            if (row[c] == Dfa::kNoTransition) row[c] = dead;
        }
    }
    out.delta.push_back({dead, dead});
    return out;
}

namespace {

std::vector<int> reachable_order(const Dfa& dfa) {
    std::vector<int> order;
    std::vector<bool> seen(dfa.state_count, false);
    std::deque<int> queue{dfa.start};
    seen[dfa.start] = true;
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        order.push_back(s);
        for (int c = 0; c < 2; ++c) {
            int t = dfa.delta[s][c];
            if (t != Dfa::kNoTransition && !seen[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    return order;
}

/// Hopcroft partition refinement over a complete DFA restricted to the given
/// states. Returns the block id per state (kept states only; -1 elsewhere).
std::vector<int> hopcroft_blocks(const Dfa& dfa, const std::vector<int>& states, int& block_count) {
    std::vector<int> block(dfa.state_count, -1);
    std::vector<std::vector<int>> members(2);
    for (int s : states) {
        int b = dfa.accepting[s] ? 1 : 0;
        block[s] = b;
        members[b].push_back(s);
    }
    if (members[0].empty() || members[1].empty()) {
        int keep = members[0].empty() ? 1 : 0;
        for (int s : states) block[s] = 0;
        members = {members[keep]};
    }

    // predecessor lists per symbol
    std::vector<std::vector<std::vector<int>>> preds(
        2, std::vector<std::vector<int>>(dfa.state_count));
    for (int s : states) {
        for (int c = 0; c < 2; ++c) preds[c][dfa.delta[s][c]].push_back(s);
    }

    std::set<std::pair<int, int>> worklist;  // (block, symbol)
    for (int c = 0; c < 2; ++c) {
        for (std::size_t b = 0; b < members.size(); ++b) worklist.insert({static_cast<int>(b), c});
    }

    while (!worklist.empty()) {
        auto [a, c] = *worklist.begin();
        worklist.erase(worklist.begin());

        // X = states with delta(state, c) in block a
        std::vector<int> x;
        for (int t : members[a]) {
            for (int p : preds[c][t]) x.push_back(p);
        }
        if (x.empty()) continue;

        // group X by current block
        std::vector<int> blocks_touched;
        std::vector<std::vector<int>> intersection(members.size());
        for (int s : x) {
            int b = block[s];
            if (intersection[b].empty()) blocks_touched.push_back(b);
            intersection[b].push_back(s);
        }
        for (int b : blocks_touched) {
            if (intersection[b].size() == members[b].size()) continue;  // nothing split off
            // split block b into (inside X) and (outside X)
            std::vector<bool> in_x(dfa.state_count, false);
            for (int s : intersection[b]) in_x[s] = true;
            std::vector<int> stay, moved;
            for (int s : members[b]) (in_x[s] ? moved : stay).push_back(s);
            int newb = static_cast<int>(members.size());
            members[b] = std::move(stay);
            members.push_back(std::move(moved));
            intersection.emplace_back();
            for (int s : members[newb]) block[s] = newb;
            for (int sym = 0; sym < 2; ++sym) {
                if (worklist.count({b, sym})) {
                    worklist.insert({newb, sym});
                } else {
                    int smaller = members[b].size() <= members[newb].size() ? b : newb;
                    worklist.insert({smaller, sym});
                }
            }
        }
    }
    block_count = static_cast<int>(members.size());
    return block;
}

Dfa canonical_renumber(const Dfa& dfa) {
    std::vector<int> order = reachable_order(dfa);
    std::vector<int> id(dfa.state_count, -1);
    for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = static_cast<int>(i);
    Dfa out;
    out.state_count = static_cast<int>(order.size());
    out.start = id[dfa.start];
    out.accepting.assign(out.state_count, false);
    out.delta.assign(out.state_count, {Dfa::kNoTransition, Dfa::kNoTransition});
    for (int s : order) {
        out.accepting[id[s]] = dfa.accepting[s];
        for (int c = 0; c < 2; ++c) {
            int t = dfa.delta[s][c];
            out.delta[id[s]][c] = (t == Dfa::kNoTransition) ? Dfa::kNoTransition : id[t];
        }
    }
    return out;
}

bool is_minimal(const Dfa& dfa) {
    if (!dfa.is_complete()) return false;
    std::vector<int> reach = reachable_order(dfa);
    if (static_cast<int>(reach.size()) != dfa.state_count) return false;
    int blocks = 0;
    hopcroft_blocks(dfa, reach, blocks);
    return blocks == dfa.state_count;
}

}  // namespace

Dfa minimize(const Dfa& dfa) {
    dfa.validate();
    if (!dfa.is_complete()) throw std::invalid_argument("minimize: automaton must be complete");

    std::vector<int> reach = reachable_order(dfa);
    int block_count = 0;
    std::vector<int> block = hopcroft_blocks(dfa, reach, block_count);

    Dfa quotient;
    quotient.state_count = block_count;
    quotient.start = block[dfa.start];
    quotient.accepting.assign(block_count, false);
    quotient.delta.assign(block_count, {Dfa::kNoTransition, Dfa::kNoTransition});
    for (int s : reach) {
        int b = block[s];
        quotient.accepting[b] = dfa.accepting[s];
        for (int c = 0; c < 2; ++c) quotient.delta[b][c] = block[dfa.delta[s][c]];
    }
    return canonical_renumber(quotient);
}

bool is_isomorphic(const Dfa& a, const Dfa& b) {
    a.validate();
    b.validate();
    if (!is_minimal(a) || !is_minimal(b))
        throw std::invalid_argument("is_isomorphic: inputs must be minimized and complete");
    if (a.state_count != b.state_count) return false;

    std::vector<int> map(a.state_count, -1);
    std::vector<bool> hit(b.state_count, false);
    std::deque<int> queue{a.start};
    map[a.start] = b.start;
    hit[b.start] = true;
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        int t = map[s];
        if (a.accepting[s] != b.accepting[t]) return false;
        for (int c = 0; c < 2; ++c) {
            int sn = a.delta[s][c];
            int tn = b.delta[t][c];
            if (map[sn] == -1) {
                if (hit[tn]) return false;  // not injective
                map[sn] = tn;
                hit[tn] = true;
                queue.push_back(sn);
            } else if (map[sn] != tn) {
                return false;
            }
        }
    }
    return true;
}

BigUint count_accepted(const Dfa& dfa, unsigned n) {
    dfa.validate();
    if (!dfa.is_complete()) throw std::invalid_argument("count_accepted: automaton must be complete");
    std::vector<BigUint> occ(dfa.state_count);
    occ[dfa.start] = BigUint(1);
    std::vector<BigUint> next(dfa.state_count);
    for (unsigned step = 0; step < n; ++step) {
        for (auto& v : next) v = BigUint();
        for (int s = 0; s < dfa.state_count; ++s) {
            if (occ[s].is_zero()) continue;
            next[dfa.delta[s][0]] += occ[s];
            next[dfa.delta[s][1]] += occ[s];
        }
        occ.swap(next);
    }
    BigUint total;
    for (int s = 0; s < dfa.state_count; ++s) {
        if (dfa.accepting[s]) total += occ[s];
    }
    return total;
}

std::string to_dot(const Dfa& dfa) {
    std::ostringstream os;
    os << "digraph dfa {\n";
    os << "  rankdir=LR;\n";
    os << "  __start [shape=point];\n";
    os << "  __start -> s" << dfa.start << " [color=red];\n";
    for (int s = 0; s < dfa.state_count; ++s) {
        if (dfa.accepting[s]) {
            os << "  s" << s << " [shape=doublecircle];\n";
        } else {
            os << "  s" << s << " [shape=circle, style=filled, fillcolor=gray80];\n";
        }
    }
    for (int s = 0; s < dfa.state_count; ++s) {
        for (int c = 0; c < 2; ++c) {
            int t = dfa.delta[s][c];
            if (t == Dfa::kNoTransition) continue;
            os << "  s" << s << " -> s" << t << " [label=\"" << c << "\", style="
               << (c == 0 ? "dotted" : "solid") << "];\n";
        }
    }
    os << "}\n";
    return os.str();
}

std::string to_json(const Dfa& dfa) {
    nlohmann::json j;
    j["states"] = dfa.state_count;
    j["start"] = dfa.start;
    std::vector<int> acc;
    for (int s = 0; s < dfa.state_count; ++s) {
        if (dfa.accepting[s]) acc.push_back(s);
    }
    j["accepting"] = acc;
    std::vector<std::array<int, 2>> delta = dfa.delta;
    j["delta"] = delta;
    return j.dump();
}

Dfa dfa_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Dfa d;
    d.state_count = j.at("states").get<int>();
    d.start = j.at("start").get<int>();
    d.accepting.assign(d.state_count, false);
    for (int s : j.at("accepting").get<std::vector<int>>()) {
        if (s < 0 || s >= d.state_count) throw std::invalid_argument("dfa_from_json: bad accepting index");
        d.accepting[s] = true;
    }
    for (const auto& row : j.at("delta")) {
        d.delta.push_back({row.at(0).get<int>(), row.at(1).get<int>()});
    }
    d.validate();
    return d;
}

}  // namespace rex

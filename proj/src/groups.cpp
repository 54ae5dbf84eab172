#include "coad/groups.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "coad/errors.hpp"

namespace coad {

GroupStructure::GroupStructure(std::vector<std::vector<int>> groups, int p)
    : groups_(std::move(groups)), p_(p) {
    if (p_ < 1) throw InvalidArgument("GroupStructure: p must be positive");
    if (groups_.empty()) throw InvalidGroups("GroupStructure: no groups given");

    membership_.assign(p_, {});
    for (int k = 0; k < num_groups(); ++k) {
        auto& g = groups_[k];
        if (g.empty())
            throw InvalidGroups("group " + std::to_string(k + 1) + " is empty");
        std::set<int> seen;
        for (int j : g) {
            if (j < 0 || j >= p_)
                throw IndexOutOfRange("group " + std::to_string(k + 1) +
                                      " references column " + std::to_string(j + 1) +
                                      " outside 1.." + std::to_string(p_));
            if (!seen.insert(j).second)
                throw InvalidGroups("group " + std::to_string(k + 1) +
                                    " lists column " + std::to_string(j + 1) + " twice");
        }
        std::sort(g.begin(), g.end());
        for (int j : g) membership_[j].push_back(k);
    }

    overlap_flag_ = false;
    for (int j = 0; j < p_; ++j) {
        if (membership_[j].empty())
            throw InvalidGroups("column " + std::to_string(j + 1) + " belongs to no group");
        if (membership_[j].size() > 1) overlap_flag_ = true;
    }
}

GroupStructure GroupStructure::singletons(int p) {
    std::vector<std::vector<int>> g(p);
    for (int j = 0; j < p; ++j) g[j] = {j};
    return GroupStructure(std::move(g), p);
}

std::vector<int> groups_intersecting(const GroupStructure& groups, const std::vector<int>& s) {
    std::set<int> hit;
    for (int j : s) {
        if (j < 0 || j >= groups.p())
            throw IndexOutOfRange("index " + std::to_string(j + 1) + " outside 1.." +
                                  std::to_string(groups.p()));
        for (int k : groups.groups_of(j)) hit.insert(k);
    }
    return {hit.begin(), hit.end()};
}

std::vector<int> s_tilde(const GroupStructure& groups, const std::vector<int>& s) {
    std::set<int> u;
    for (int k : groups_intersecting(groups, s))
        u.insert(groups.group(k).begin(), groups.group(k).end());
    return {u.begin(), u.end()};
}

int greedy_cover_size(const GroupStructure& groups, const std::vector<int>& s) {
    std::set<int> uncovered(s.begin(), s.end());
    const auto candidates = groups_intersecting(groups, s);
    int count = 0;
    while (!uncovered.empty()) {
        int best = -1;
        std::size_t best_gain = 0;
        for (int k : candidates) {
            std::size_t gain = 0;
            for (int j : groups.group(k))
                if (uncovered.count(j)) ++gain;
            if (gain > best_gain) {
                best_gain = gain;
                best = k;
            }
        }
        if (best < 0) break;  // unreachable: groups cover {0..p-1}
        for (int j : groups.group(best)) uncovered.erase(j);
        ++count;
    }
    return count;
}

SparsityPattern::SparsityPattern(const GroupStructure& groups, std::vector<int> support)
    : s(std::move(support)) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    g_cap_s = groups_intersecting(groups, s);
    stilde = s_tilde(groups, s);
}

}  // namespace coad

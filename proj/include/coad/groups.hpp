#pragma once

#include <vector>

namespace coad {

/// Ordered collection of q index sets over {0..p-1} (0-based internally;
/// files use 1-based indices, converted at the parse boundary). Groups may
/// overlap; together they must cover every column.
class GroupStructure {
  public:
    /// Validates cover, non-emptiness and in-group uniqueness.
    /// Duplicate indices inside one group are an error, not deduplicated.
    GroupStructure(std::vector<std::vector<int>> groups, int p);

    /// One singleton group per covariate (the Adaptive-Lasso structure).
    static GroupStructure singletons(int p);

    int p() const { return p_; }
    int num_groups() const { return static_cast<int>(groups_.size()); }
    bool overlapping() const { return overlap_flag_; }

    const std::vector<int>& group(int k) const { return groups_[k]; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }

    /// Groups containing covariate j.
    const std::vector<int>& groups_of(int j) const { return membership_[j]; }

  private:
    std::vector<std::vector<int>> groups_;
    std::vector<std::vector<int>> membership_;
    int p_;
    bool overlap_flag_;
};

/// Union of all groups intersecting s ("S together with its in-group
/// neighbours"). Result is sorted; always a superset of s.
std::vector<int> s_tilde(const GroupStructure& groups, const std::vector<int>& s);

/// Indices (into the group list) of groups with nonempty intersection with s.
std::vector<int> groups_intersecting(const GroupStructure& groups, const std::vector<int>& s);

/// Size of a greedy set cover of s by groups. Valid (not necessarily minimal)
/// cover; any cover works where one is called for.
int greedy_cover_size(const GroupStructure& groups, const std::vector<int>& s);

/// Support set S plus the derived sets used by the weight diagnostics.
struct SparsityPattern {
    std::vector<int> s;        // sorted support, 0-based
    std::vector<int> g_cap_s;  // group indices intersecting s
    std::vector<int> stilde;   // union of those groups, sorted

    SparsityPattern(const GroupStructure& groups, std::vector<int> support);
};

}  // namespace coad

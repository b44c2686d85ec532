#pragma once

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace phasecert
{

/// Disjoint sets with path halving and union by size.
class UnionFind
{
  public:
    explicit UnionFind(int n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x)
    {
        while (parent_[x] != x)
        {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (size_[a] < size_[b])
            std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        return true;
    }

    bool connected(int a, int b) { return find(a) == find(b); }
    int component_size(int x) { return size_[find(x)]; }
    int size() const { return static_cast<int>(parent_.size()); }

  private:
    std::vector<int> parent_;
    std::vector<int> size_;
};

/// Union by rank without compression so that merges can be undone in LIFO order.
class RollbackUnionFind
{
  public:
    explicit RollbackUnionFind(int n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) const
    {
        while (parent_[x] != x)
            x = parent_[x];
        return x;
    }

    /// Returns false (and records nothing) when a and b are already joined.
    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (rank_[a] < rank_[b])
            std::swap(a, b);
        history_.push_back({b, rank_[a] == rank_[b]});
        parent_[b] = a;
        if (history_.back().bumped)
            ++rank_[a];
        return true;
    }

    void rollback()
    {
        const Merge m = history_.back();
        history_.pop_back();
        const int root = parent_[m.child];
        parent_[m.child] = m.child;
        if (m.bumped)
            --rank_[root];
    }

    std::size_t depth() const { return history_.size(); }

  private:
    struct Merge
    {
        int child;
        bool bumped;
    };
    std::vector<int> parent_;
    std::vector<int> rank_;
    std::vector<Merge> history_;
};

} // namespace phasecert

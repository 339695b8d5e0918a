#pragma once

// Undirected unit-weight communication graphs and the dwell-time switching
// signal over a finite graph family.

#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "poscon/numerics.hpp"

namespace poscon {

struct Edge {
    std::size_t a = 0;  // 0-based, a < b after normalisation
    std::size_t b = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class Graph {
public:
    Graph() = default;

    /// Edges are 0-based node pairs. Self-loops, duplicates and out-of-range
    /// nodes throw InvalidGraph. Edges are stored sorted with a < b.
    Graph(std::size_t nodes, std::vector<Edge> edges);

    /// Builds a graph from 1-based node pairs, as written in scenario files.
    static Graph from_one_based(std::size_t nodes,
                                const std::vector<std::pair<std::size_t, std::size_t>>& edges);

    [[nodiscard]] std::size_t size() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] Mat adjacency() const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t nodes_ = 0;
    std::vector<Edge> edges_;
};

/// L = D - A.
Mat laplacian(const Graph& g);

/// Second-smallest Laplacian eigenvalue (algebraic connectivity).
double lambda2(const Graph& g);

/// Breadth-first reachability from node 0.
bool is_connected(const Graph& g);

/// min_p lambda2(L_p) over a graph family.
double min_lambda2(std::span<const Graph> family);

struct Interval {
    double start = 0.0;
    double end = 0.0;
    std::size_t graph = 0;  // 0-based index into the family
};

/// Piecewise-constant, right-continuous switching signal. The final interval
/// extends to +infinity.
class SwitchingSchedule {
public:
    SwitchingSchedule() = default;

    /// `switch_times` must start at 0 and be strictly increasing with gaps of
    /// at least `dwell`; `active[k]` is the 0-based graph active on
    /// [switch_times[k], switch_times[k+1]).
    SwitchingSchedule(std::vector<Graph> family, std::vector<double> switch_times,
                      std::vector<std::size_t> active, double dwell);

    /// Cycles through `order` (0-based indices), switching every `period`
    /// seconds, unrolled up to `horizon`.
    static SwitchingSchedule periodic(std::vector<Graph> family, std::vector<std::size_t> order,
                                      double period, double horizon);

    /// Single graph for all time.
    static SwitchingSchedule fixed(Graph g);

    [[nodiscard]] std::size_t sigma_at(double t) const;

    /// The switching intervals clipped to [0, horizon].
    [[nodiscard]] std::vector<Interval> intervals(double horizon) const;

    [[nodiscard]] const std::vector<Graph>& family() const noexcept { return family_; }
    [[nodiscard]] const std::vector<double>& switch_times() const noexcept { return times_; }
    [[nodiscard]] const std::vector<std::size_t>& active() const noexcept { return active_; }
    [[nodiscard]] double dwell() const noexcept { return dwell_; }

private:
    std::vector<Graph> family_;
    std::vector<double> times_;
    std::vector<std::size_t> active_;
    double dwell_ = std::numeric_limits<double>::infinity();
};

}  // namespace poscon

#include "poscon/topology.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "poscon/error.hpp"

namespace poscon {

Graph::Graph(std::size_t nodes, std::vector<Edge> edges) : nodes_(nodes), edges_(std::move(edges))
{
    for (auto& e : edges_) {
        if (e.a == e.b) {
            throw Error(ErrorCode::InvalidGraph, "self-loop at node " + std::to_string(e.a + 1));
        }
        if (e.a >= nodes_ || e.b >= nodes_) {
            throw Error(ErrorCode::InvalidGraph, "edge endpoint out of range");
        }
        if (e.a > e.b) {
            std::swap(e.a, e.b);
        }
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end()) {
        throw Error(ErrorCode::InvalidGraph, "duplicate edge");
    }
}

Graph Graph::from_one_based(std::size_t nodes,
                            const std::vector<std::pair<std::size_t, std::size_t>>& edges)
{
    std::vector<Edge> converted;
    converted.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        if (a == 0 || b == 0) {
            throw Error(ErrorCode::InvalidGraph, "node indices are 1-based");
        }
        converted.push_back({a - 1, b - 1});
    }
    return Graph(nodes, std::move(converted));
}

Mat Graph::adjacency() const
{
    Mat adj = Mat::Zero(static_cast<Eigen::Index>(nodes_), static_cast<Eigen::Index>(nodes_));
    for (const auto& e : edges_) {
        adj(static_cast<Eigen::Index>(e.a), static_cast<Eigen::Index>(e.b)) = 1.0;
        adj(static_cast<Eigen::Index>(e.b), static_cast<Eigen::Index>(e.a)) = 1.0;
    }
    return adj;
}

Mat laplacian(const Graph& g)
{
    const Mat adj = g.adjacency();
    Mat lap = -adj;
    lap.diagonal() = adj.rowwise().sum();
    return lap;
}

double lambda2(const Graph& g)
{
    if (g.size() < 2) {
        throw Error(ErrorCode::InvalidGraph, "lambda2 needs at least two nodes");
    }
    return sym_eigen(laplacian(g)).values(1);
}

bool is_connected(const Graph& g)
{
    if (g.size() == 0) {
        throw Error(ErrorCode::InvalidGraph, "empty graph");
    }
    std::vector<std::vector<std::size_t>> neighbours(g.size());
    for (const auto& e : g.edges()) {
        neighbours[e.a].push_back(e.b);
        neighbours[e.b].push_back(e.a);
    }
    std::vector<bool> seen(g.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const auto node = frontier.front();
        frontier.pop();
        for (auto next : neighbours[node]) {
            if (!seen[next]) {
                seen[next] = true;
                ++reached;
                frontier.push(next);
            }
        }
    }
    return reached == g.size();
}

double min_lambda2(std::span<const Graph> family)
{
    if (family.empty()) {
        throw Error(ErrorCode::InvalidGraph, "empty graph family");
    }
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& g : family) {
        lowest = std::min(lowest, lambda2(g));
    }
    return lowest;
}

SwitchingSchedule::SwitchingSchedule(std::vector<Graph> family, std::vector<double> switch_times,
                                     std::vector<std::size_t> active, double dwell)
    : family_(std::move(family)), times_(std::move(switch_times)), active_(std::move(active)),
      dwell_(dwell)
{
    if (family_.empty()) {
        throw Error(ErrorCode::InvalidSchedule, "empty graph family");
    }
    for (const auto& g : family_) {
        if (g.size() != family_.front().size()) {
            throw Error(ErrorCode::InvalidSchedule, "graphs in a family must share the node set");
        }
    }
    if (!(dwell_ > 0.0)) {
        throw Error(ErrorCode::InvalidSchedule, "dwell time must be positive");
    }
    if (times_.empty() || times_.size() != active_.size()) {
        throw Error(ErrorCode::InvalidSchedule, "switch times and active indices must pair up");
    }
    if (times_.front() != 0.0) {
        throw Error(ErrorCode::InvalidSchedule, "first switch time must be 0");
    }
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (!std::isfinite(times_[k])) {
            throw Error(ErrorCode::InvalidSchedule, "switch times must be finite");
        }
        if (active_[k] >= family_.size()) {
            throw Error(ErrorCode::InvalidSchedule,
                        "active index " + std::to_string(active_[k] + 1) + " out of range");
        }
        if (k > 0 && times_[k] - times_[k - 1] < dwell_ * (1.0 - 1e-12)) {
            throw Error(ErrorCode::InvalidSchedule,
                        "switch gap at t=" + std::to_string(times_[k]) + " is below the dwell time");
        }
    }
}

SwitchingSchedule SwitchingSchedule::periodic(std::vector<Graph> family,
                                              std::vector<std::size_t> order, double period,
                                              double horizon)
{
    if (order.empty()) {
        throw Error(ErrorCode::InvalidSchedule, "periodic schedule needs a non-empty order");
    }
    if (!(period > 0.0) || !std::isfinite(horizon)) {
        throw Error(ErrorCode::InvalidSchedule, "period must be positive and horizon finite");
    }
    std::vector<double> times;
    std::vector<std::size_t> active;
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * period;
        if (k > 0 && t >= horizon) {
            break;
        }
        times.push_back(t);
        active.push_back(order[k % order.size()]);
    }
    return {std::move(family), std::move(times), std::move(active), period};
}

SwitchingSchedule SwitchingSchedule::fixed(Graph g)
{
    return {std::vector<Graph>{std::move(g)}, {0.0}, {0}, std::numeric_limits<double>::max()};
}

std::size_t SwitchingSchedule::sigma_at(double t) const
{
    if (t < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "sigma_at: negative time");
    }
    // Right-continuous: the last switch time <= t wins.
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return active_[static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1];
}

std::vector<Interval> SwitchingSchedule::intervals(double horizon) const
{
    std::vector<Interval> out;
    for (std::size_t k = 0; k < times_.size() && times_[k] < horizon; ++k) {
        const double end = k + 1 < times_.size() ? std::min(times_[k + 1], horizon) : horizon;
        out.push_back({times_[k], end, active_[k]});
    }
    return out;
}

}  // namespace poscon

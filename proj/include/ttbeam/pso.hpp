#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ttbeam/common.hpp"
#include "ttbeam/config.hpp"
#include "ttbeam/rng.hpp"
#include "ttbeam/transceiver.hpp"

namespace ttbeam {

enum class OptimizeSense { Maximize, Minimize };

struct PsoOptions {
    int n_particles = 200;
    int dimension = 64;
    int n_iterations = 100;
    double inertia = 0.9;
    double c1 = 1.49445;
    double c2 = 1.49445;
    double velocity_init = pi / 4.0;  // |v| bound at initialization
    // Per-entry |v| clamp applied after every update; 0 disables it. At the
    // default inertia/acceleration pair the unclamped velocity second moment
    // diverges and the swarm degenerates into boundary hopping, which is
    // fatal in 64 dimensions, so the scheme drivers clamp at velocity_init.
    double velocity_max = 0.0;
};

inline PsoOptions pso_options_from(const SystemConfig& cfg) {
    PsoOptions o;
    o.n_particles = cfg.swarm_size;
    o.dimension = cfg.n_elements();
    o.n_iterations = cfg.n_iters;
    o.inertia = cfg.inertia;
    o.c1 = cfg.cognitive;
    o.c2 = cfg.social;
    o.velocity_max = o.velocity_init;
    return o;
}

struct Particle {
    ReflectionConfig position;
    VectorXd velocity;
    ReflectionConfig best_position;
    double best_fitness = 0.0;
    // Last evaluated value J^{(i-1)}: the surrogate history fed back into the
    // mbs fitness and the reference of the successive personal-best rule.
    double prev_surrogate = 0.0;
};

// Fitness callback: (position, particle index, iteration, J^{(i-1)}) -> J^{(i)}.
// Iteration 0 is the initialization sweep; steps use i = 1, 2, ...
using FitnessFn = std::function<double(const VectorXd&, int, int, double)>;

struct Swarm {
    std::vector<Particle> particles;
    ReflectionConfig global_best;
    double global_best_fitness = 0.0;
    int iteration = 0;
    PsoOptions params;
    OptimizeSense sense = OptimizeSense::Maximize;
    GaussianRng rng;
    bool initialized = false;  // bests populated by the iteration-0 sweep
};

namespace detail {

inline bool better(OptimizeSense sense, double a, double b) {
    return sense == OptimizeSense::Maximize ? a > b : a < b;
}

inline double eval_fitness(const FitnessFn& fitness, Swarm& s, int p, int iter) {
    Particle& pt = s.particles[static_cast<size_t>(p)];
    try {
        return fitness(pt.position.phases, p, iter, pt.prev_surrogate);
    } catch (const std::exception& e) {
        throw std::runtime_error("pso: fitness failed for particle " + std::to_string(p) + ": " +
                                 e.what());
    }
}

}  // namespace detail

inline Swarm init_swarm(const PsoOptions& opts, OptimizeSense sense, GaussianRng rng) {
    if (opts.n_particles < 1) throw std::invalid_argument("init_swarm: need at least 1 particle");
    if (opts.dimension < 1) throw std::invalid_argument("init_swarm: dimension must be >= 1");
    Swarm s;
    s.params = opts;
    s.sense = sense;
    s.rng = std::move(rng);
    s.particles.resize(static_cast<size_t>(opts.n_particles));
    for (Particle& pt : s.particles) {
        pt.position.phases.resize(opts.dimension);
        pt.velocity.resize(opts.dimension);
        for (int d = 0; d < opts.dimension; ++d)
            pt.position.phases(d) = pi - 2.0 * pi * s.rng.uniform();
        for (int d = 0; d < opts.dimension; ++d)
            pt.velocity(d) = opts.velocity_init * (2.0 * s.rng.uniform() - 1.0);
        pt.best_position = pt.position;
    }
    s.global_best = s.particles.front().position;
    return s;
}

inline Swarm init_swarm(const SystemConfig& cfg, OptimizeSense sense, GaussianRng rng) {
    return init_swarm(pso_options_from(cfg), sense, std::move(rng));
}

// Iteration-0 sweep: evaluate every particle at its initial position, seed the
// personal bests and the surrogate history, pick the global best.
inline void init_bests(Swarm& s, const FitnessFn& fitness) {
    for (int p = 0; p < static_cast<int>(s.particles.size()); ++p) {
        Particle& pt = s.particles[static_cast<size_t>(p)];
        double j = detail::eval_fitness(fitness, s, p, 0);
        pt.best_position = pt.position;
        pt.best_fitness = j;
        pt.prev_surrogate = j;
        if (p == 0 || detail::better(s.sense, j, s.global_best_fitness)) {
            s.global_best = pt.position;
            s.global_best_fitness = j;
        }
    }
    s.initialized = true;
}

namespace detail {

// Core update with the stochastic coefficients supplied, so tests can pin
// eps1/eps2 and check the arithmetic.
inline void step_with_eps(Swarm& s, const FitnessFn& fitness, const std::vector<double>& eps1,
                          const std::vector<double>& eps2) {
    if (!s.initialized) throw std::logic_error("pso: step before initial evaluation");
    const int iter = s.iteration + 1;
    const double lo = std::nextafter(-pi, 0.0);  // smallest value inside (-pi, pi]
    for (int p = 0; p < static_cast<int>(s.particles.size()); ++p) {
        Particle& pt = s.particles[static_cast<size_t>(p)];
        pt.velocity = s.params.inertia * pt.velocity +
                      s.params.c1 * eps1[static_cast<size_t>(p)] *
                          (pt.best_position.phases - pt.position.phases) +
                      s.params.c2 * eps2[static_cast<size_t>(p)] *
                          (s.global_best.phases - pt.position.phases);
        if (s.params.velocity_max > 0.0) {
            const double vm = s.params.velocity_max;
            for (Eigen::Index d = 0; d < pt.velocity.size(); ++d) {
                double& u = pt.velocity(d);
                if (u > vm)
                    u = vm;
                else if (u < -vm)
                    u = -vm;
            }
        }
        pt.position.phases += pt.velocity;
        for (Eigen::Index d = 0; d < pt.position.phases.size(); ++d) {
            double& x = pt.position.phases(d);
            if (x > pi)
                x = pi;
            else if (x <= -pi)
                x = lo;
        }
        double j = eval_fitness(fitness, s, p, iter);
        // Successive comparison J^{(i)} vs J^{(i-1)}, not best-so-far.
        if (better(s.sense, j, pt.prev_surrogate)) {
            pt.best_position = pt.position;
            pt.best_fitness = j;
        }
        pt.prev_surrogate = j;
        // Sticky global best: the extremum of every evaluation seen so far,
        // which keeps the trace monotone in the swarm's sense.
        if (better(s.sense, j, s.global_best_fitness)) {
            s.global_best = pt.position;
            s.global_best_fitness = j;
        }
    }
    s.iteration = iter;
}

}  // namespace detail

inline void step(Swarm& s, const FitnessFn& fitness) {
    if (!s.initialized) throw std::logic_error("pso: step before initial evaluation");
    // Draw all stochastic coefficients up front (serial phase), one scalar
    // pair per particle per iteration.
    const size_t np = s.particles.size();
    std::vector<double> eps1(np), eps2(np);
    for (size_t p = 0; p < np; ++p) {
        eps1[p] = s.rng.uniform();
        eps2[p] = s.rng.uniform();
    }
    detail::step_with_eps(s, fitness, eps1, eps2);
}

struct PsoResult {
    ReflectionConfig best;
    double best_fitness = 0.0;
    std::vector<double> trace;          // global-best fitness after each step
    std::vector<VectorXd> best_per_iter;  // global-best position after each step
};

inline PsoResult run(Swarm& s, const FitnessFn& fitness, int n_iters) {
    if (n_iters < 1) throw std::invalid_argument("pso run: n_iters must be >= 1");
    if (!s.initialized) init_bests(s, fitness);
    PsoResult r;
    r.trace.reserve(static_cast<size_t>(n_iters));
    r.best_per_iter.reserve(static_cast<size_t>(n_iters));
    for (int i = 0; i < n_iters; ++i) {
        step(s, fitness);
        r.trace.push_back(s.global_best_fitness);
        r.best_per_iter.push_back(s.global_best.phases);
    }
    r.best = s.global_best;
    r.best_fitness = s.global_best_fitness;
    return r;
}

}  // namespace ttbeam

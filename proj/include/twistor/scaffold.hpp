#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "twistor/errors.hpp"
#include "twistor/gluing.hpp"

namespace twistor {

// Lagrange basis polynomial over `nodes` attached to node l.
inline cplx lagrange_basis(const std::vector<cplx>& nodes, std::size_t l, cplx lambda) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j)
            if (nodes[i] == nodes[j]) throw DuplicateNodes("repeated interpolation node");
    cplx num(1.0), den(1.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (j == l) continue;
        num *= lambda - nodes[j];
        den *= nodes[l] - nodes[j];
    }
    return num / den;
}

// Interpolation nodes sandwiching the unit circle: inner strictly inside,
// outer strictly outside, all with a clearance margin so the scaffold
// factors stay well-conditioned on the samples.
struct NodeSet {
    std::vector<cplx> inner;  // 0 < |lambda_l| < 1
    std::vector<cplx> outer;  // |mu_l| > 1

    void validate(double clearance = config::node_clearance) const {
        auto check_distinct = [](const std::vector<cplx>& v) {
            for (std::size_t i = 0; i < v.size(); ++i)
                for (std::size_t j = i + 1; j < v.size(); ++j)
                    if (v[i] == v[j]) throw DuplicateNodes("repeated node");
        };
        check_distinct(inner);
        check_distinct(outer);
        for (const cplx& l : inner) {
            const double a = std::abs(l);
            if (a == 0.0 || a >= 1.0 - clearance)
                throw NodePlacement("inner node |lambda| = " + std::to_string(a));
        }
        for (const cplx& m : outer) {
            if (std::abs(m) <= 1.0 + clearance)
                throw NodePlacement("outer node |mu| = " + std::to_string(std::abs(m)));
        }
    }
};

struct ScaffoldFactors {
    cplx fplus;                 // value 1 at lambda = 0, 0 at each inner node
    std::vector<cplx> fplus_l;  // basis at inner node l over {0} u inner
    cplx fminus;                // prod (lambda - mu) / lambda^m
    std::vector<cplx> fminus_l; // F_{M,l}(lambda) mu_l^{m-1} / lambda^{m-1}
};

inline ScaffoldFactors scaffold_factors(const NodeSet& nodes, cplx lambda) {
    if (lambda == cplx(0.0) && !nodes.outer.empty())
        throw LambdaZero("F_minus undefined at lambda = 0");
    ScaffoldFactors f;
    std::vector<cplx> lambda0;
    lambda0.reserve(nodes.inner.size() + 1);
    lambda0.push_back(cplx(0.0));
    for (const cplx& l : nodes.inner) lambda0.push_back(l);
    f.fplus = lagrange_basis(lambda0, 0, lambda);
    f.fplus_l.resize(nodes.inner.size());
    for (std::size_t l = 0; l < nodes.inner.size(); ++l)
        f.fplus_l[l] = lagrange_basis(lambda0, l + 1, lambda);

    const std::size_t m = nodes.outer.size();
    f.fminus = cplx(1.0);
    for (const cplx& mu : nodes.outer) f.fminus *= (lambda - mu);
    if (m > 0) f.fminus /= std::pow(lambda, double(m));
    f.fminus_l.resize(m);
    for (std::size_t l = 0; l < m; ++l)
        f.fminus_l[l] = lagrange_basis(nodes.outer, l, lambda) *
                        std::pow(nodes.outer[l] / lambda, double(m) - 1.0);
    return f;
}

// The scaffolded gluing function: injects boundary values into a base
// gluing function so that solutions of the index-1 scaffolded Riemann
// problem interpolate sigma_plus(lambda_l) = a_l, sigma_minus(mu_l) = b_l.
class ScaffoldedGluing {
public:
    ScaffoldedGluing(GluingFunction base, NodeSet nodes, std::vector<cplx> inner_values,
                     std::vector<cplx> outer_values, int check_half_order = config::default_half_order)
        : base_(std::move(base)),
          nodes_(std::move(nodes)),
          a_(std::move(inner_values)),
          b_(std::move(outer_values)) {
        nodes_.validate();
        // inner-value budget: the constant part of t~ alone must leave room
        // inside the base t-disk on every circle sample
        for (int j = 0; j < 2 * check_half_order; ++j) {
            const cplx lam = CircleFunction::sample_point(check_half_order, j);
            const ScaffoldFactors f = scaffold_factors(nodes_, lam);
            cplx t0(0.0);
            for (std::size_t l = 0; l < a_.size(); ++l) t0 += a_[l] * f.fplus_l[l];
            if (std::abs(t0) >= config::inner_value_margin * base_.delta)
                throw TArgumentOutOfDisk("inner values push t~ to " +
                                         std::to_string(std::abs(t0)) + " vs delta " +
                                         std::to_string(base_.delta));
        }
    }

    const GluingFunction& base() const { return base_; }
    const NodeSet& nodes() const { return nodes_; }
    const std::vector<cplx>& inner_values() const { return a_; }
    const std::vector<cplx>& outer_values() const { return b_; }

    cplx t_tilde(const ScaffoldFactors& f, cplx t) const {
        cplx tt = t * f.fplus;
        for (std::size_t l = 0; l < a_.size(); ++l) tt += a_[l] * f.fplus_l[l];
        return tt;
    }

    cplx eval(cplx lambda, cplx t) const {
        const ScaffoldFactors f = scaffold_factors(nodes_, lambda);
        if (std::abs(f.fminus) < 1e-12)
            throw FMinusNearZero("outer node touches the evaluation point");
        const cplx tt = t_tilde(f, t);
        if (std::abs(tt) >= base_.delta)
            throw TArgumentOutOfDisk("t~ outside base t-disk");
        cplx acc = base_.eval(lambda, tt);
        for (std::size_t l = 0; l < b_.size(); ++l) acc -= b_[l] * f.fminus_l[l];
        return acc / f.fminus;
    }

    cplx dt(cplx lambda, cplx t) const {
        const ScaffoldFactors f = scaffold_factors(nodes_, lambda);
        if (std::abs(f.fminus) < 1e-12)
            throw FMinusNearZero("outer node touches the evaluation point");
        const cplx tt = t_tilde(f, t);
        if (std::abs(tt) >= base_.delta)
            throw TArgumentOutOfDisk("t~ outside base t-disk");
        return base_.dt(lambda, tt) * f.fplus / f.fminus;
    }

    GluingFunction as_gluing() const {
        GluingFunction g;
        g.eval = [self = *this](cplx lam, cplx t) { return self.eval(lam, t); };
        g.dt = [self = *this](cplx lam, cplx t) { return self.dt(lam, t); };
        g.epsilon = base_.epsilon;
        // the scaffolded problem is solved for the auxiliary unknown, whose
        // own magnitude is not capped by the base disk; t~ is checked per call
        g.delta = std::numeric_limits<double>::infinity();
        g.zero_preserving = base_.zero_preserving && a_.empty() && b_.empty();
        g.kind = base_.kind;
        return g;
    }

private:
    GluingFunction base_;
    NodeSet nodes_;
    std::vector<cplx> a_;
    std::vector<cplx> b_;
};

// g_{x,y,z}: the wave-equation scaffold with inner nodes {lambda1, lambda2}
// carrying (x, y) and outer node {lambda3} carrying z.
inline ScaffoldedGluing wave_scaffold(const GluingFunction& g, cplx lambda1, cplx lambda2,
                                      cplx lambda3, cplx x, cplx y, cplx z,
                                      int check_half_order = config::default_half_order) {
    NodeSet nodes{{lambda1, lambda2}, {lambda3}};
    nodes.validate();
    return ScaffoldedGluing(g, nodes, {x, y}, {z}, check_half_order);
}

}  // namespace twistor

//! Gröbner bases, elimination, real-root isolation and positive-orthant solving.

mod fglm;
mod modular;
mod solve;
mod sturm;

use std::collections::HashSet;

use log::debug;

use crate::error::{Error, Result};
use crate::polyalg::{ExponentVector, MonomialOrder, OrderKind, OrderedPoly, Polynomial};
use crate::scalar::Coefficient;

pub use fglm::{fglm, fglm_subring};
pub use solve::{solve_positive, PositiveSolution, PositiveSolver, SolveReport};
pub use sturm::{sturm_isolate, IsolatingInterval, RootDomain, UniPoly};

/// Resource limits for Buchberger's algorithm. Exceeding any of them aborts
/// with [`Error::SizeGuard`]; nothing is silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroebnerLimits {
    pub max_degree: i64,
    pub max_basis: usize,
    pub max_pairs: usize,
}

impl Default for GroebnerLimits {
    fn default() -> Self {
        Self {
            max_degree: 64,
            max_basis: 20_000,
            max_pairs: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuchbergerStats {
    pub pairs_reduced: usize,
    pub coprime_skips: usize,
    pub chain_skips: usize,
    pub zero_reductions: usize,
    pub peak_basis: usize,
    pub max_degree: i64,
}

/// A reduced Gröbner basis: monic generators, no term of one divisible by the
/// leading term of another, sorted by decreasing leading monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis<C> {
    generators: Vec<Polynomial<C>>,
    order: MonomialOrder,
    nvars: usize,
    stats: BuchbergerStats,
}

impl<C: Coefficient> GroebnerBasis<C> {
    pub fn generators(&self) -> &[Polynomial<C>] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn stats(&self) -> &BuchbergerStats {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_constant()
    }

    fn ordered(&self) -> Vec<OrderedPoly<C>> {
        self.generators
            .iter()
            .map(|g| OrderedPoly::from_poly(g, &self.order))
            .collect()
    }

    /// Remainder of `f` on division by the basis (unique for a Gröbner basis).
    pub fn normal_form(&self, f: &Polynomial<C>) -> Result<Polynomial<C>> {
        if f.nvars() != self.nvars || f.has_negative_exponents() {
            return Err(Error::InvalidArgument(
                "normal form needs a nonnegative polynomial in the basis ring".into(),
            ));
        }
        let gs = self.ordered();
        let refs: Vec<_> = gs.iter().collect();
        Ok(OrderedPoly::from_poly(f, &self.order)
            .reduce(&refs, &self.order)
            .to_poly(self.nvars))
    }

    pub fn contains(&self, f: &Polynomial<C>) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Buchberger's criterion: every S-polynomial of two generators reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let gs = self.ordered();
        let refs: Vec<_> = gs.iter().collect();
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                let s = ordered_s_poly(&gs[i], &gs[j], &self.order);
                if !s.reduce(&refs, &self.order).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_reduced(&self) -> bool {
        let gs = self.ordered();
        gs.iter().enumerate().all(|(i, g)| {
            g.lc().is_one()
                && gs.iter().enumerate().all(|(j, h)| {
                    i == j || g.terms.iter().all(|(e, _)| !h.lm().divides(e))
                })
        })
    }
}

fn ordered_s_poly<C: Coefficient>(
    f: &OrderedPoly<C>,
    g: &OrderedPoly<C>,
    order: &MonomialOrder,
) -> OrderedPoly<C> {
    let lcm = f.lm().lcm(g.lm());
    let sf = lcm.sub(f.lm());
    let sg = lcm.sub(g.lm());
    // (lcm/LT f) f  -  (lcm/LT g) g
    let zero = OrderedPoly { terms: Vec::new() };
    let a = zero.sub_scaled(0, &(-(C::one() / f.lc().clone())), &sf, f, order);
    a.sub_scaled(0, &(C::one() / g.lc().clone()), &sg, g, order)
}

fn check_input<C: Coefficient>(f: &Polynomial<C>, nvars: usize) -> Result<()> {
    if f.nvars() != nvars {
        return Err(Error::InvalidArgument(format!(
            "polynomial has {} indeterminates, order ranks {nvars}",
            f.nvars()
        )));
    }
    if f.has_negative_exponents() {
        return Err(Error::InvalidArgument(
            "Gröbner computations need nonnegative exponents; clear the Laurent polynomial first"
                .into(),
        ));
    }
    Ok(())
}

/// `S(f, g) = (L / LT(f)) f - (L / LT(g)) g` with `L` the lcm of the leading monomials.
pub fn s_polynomial<C: Coefficient>(
    f: &Polynomial<C>,
    g: &Polynomial<C>,
    order: &MonomialOrder,
) -> Result<Polynomial<C>> {
    check_input(f, order.nvars())?;
    check_input(g, order.nvars())?;
    if f.is_zero() || g.is_zero() {
        return Err(Error::InvalidArgument(
            "S-polynomial of the zero polynomial".into(),
        ));
    }
    let of = OrderedPoly::from_poly(f, order);
    let og = OrderedPoly::from_poly(g, order);
    Ok(ordered_s_poly(&of, &og, order).to_poly(order.nvars()))
}

/// Reduced Gröbner basis with default resource limits.
pub fn buchberger<C: Coefficient>(
    generators: &[Polynomial<C>],
    order: &MonomialOrder,
) -> Result<GroebnerBasis<C>> {
    buchberger_with_limits(generators, order, &GroebnerLimits::default())
}

struct Pair {
    i: usize,
    j: usize,
    lcm: ExponentVector,
    degree: i64,
}

/// Buchberger's algorithm with the normal selection strategy (smallest lcm
/// first) and both of Buchberger's criteria, followed by inter-reduction.
pub fn buchberger_with_limits<C: Coefficient>(
    generators: &[Polynomial<C>],
    order: &MonomialOrder,
    limits: &GroebnerLimits,
) -> Result<GroebnerBasis<C>> {
    let n = order.nvars();
    if generators.is_empty() {
        return Err(Error::InvalidArgument(
            "Buchberger's algorithm needs at least one generator".into(),
        ));
    }
    let mut stats = BuchbergerStats::default();
    let mut basis: Vec<OrderedPoly<C>> = Vec::new();
    for f in generators {
        check_input(f, n)?;
        if f.is_zero() {
            continue;
        }
        let deg = f.total_degree();
        if deg > limits.max_degree {
            return Err(Error::SizeGuard {
                what: "input total degree",
                observed: deg as usize,
                limit: limits.max_degree as usize,
            });
        }
        stats.max_degree = stats.max_degree.max(deg);
        let mut p = OrderedPoly::from_poly(f, order);
        p.make_monic();
        if !basis.contains(&p) {
            basis.push(p);
        }
    }
    if basis.is_empty() {
        return Ok(GroebnerBasis {
            generators: Vec::new(),
            order: order.clone(),
            nvars: n,
            stats,
        });
    }
    if let Some(unit) = basis.iter().find(|p| p.lm().is_constant()) {
        let one = unit.to_poly(n).monic(order);
        return Ok(GroebnerBasis {
            generators: vec![one],
            order: order.clone(),
            nvars: n,
            stats,
        });
    }

    let mut queue: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    let push_pairs = |basis: &[OrderedPoly<C>],
                          k: usize,
                          queue: &mut Vec<Pair>,
                          pending: &mut HashSet<(usize, usize)>| {
        for i in 0..k {
            let lcm = basis[i].lm().lcm(basis[k].lm());
            let degree = lcm.total_degree();
            queue.push(Pair { i, j: k, lcm, degree });
            pending.insert((i, k));
        }
    };
    for k in 1..basis.len() {
        push_pairs(&basis, k, &mut queue, &mut pending);
    }

    let mut unit_found = false;
    while !queue.is_empty() {
        if queue.len() > limits.max_pairs {
            return Err(Error::SizeGuard {
                what: "pair queue length",
                observed: queue.len(),
                limit: limits.max_pairs,
            });
        }
        let best = (0..queue.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&queue[a], &queue[b]);
                pa.degree
                    .cmp(&pb.degree)
                    .then_with(|| order.compare(&pa.lcm, &pb.lcm))
                    .then_with(|| (pa.i, pa.j).cmp(&(pb.i, pb.j)))
            })
            .expect("queue is nonempty");
        let pair = queue.swap_remove(best);
        pending.remove(&(pair.i, pair.j));
        let (fi, fj) = (&basis[pair.i], &basis[pair.j]);

        if fi.lm().is_coprime(fj.lm()) {
            stats.coprime_skips += 1;
            continue;
        }
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && basis[k].lm().divides(&pair.lcm)
                && !pending.contains(&(pair.i.min(k), pair.i.max(k)))
                && !pending.contains(&(pair.j.min(k), pair.j.max(k)))
        });
        if chain {
            stats.chain_skips += 1;
            continue;
        }

        stats.pairs_reduced += 1;
        let s = ordered_s_poly(fi, fj, order);
        let refs: Vec<_> = basis.iter().collect();
        let mut r = s.reduce(&refs, order);
        if r.is_zero() {
            stats.zero_reductions += 1;
            continue;
        }
        r.make_monic();
        let deg = r.total_degree();
        stats.max_degree = stats.max_degree.max(deg);
        if deg > limits.max_degree {
            return Err(Error::SizeGuard {
                what: "intermediate total degree",
                observed: deg as usize,
                limit: limits.max_degree as usize,
            });
        }
        let is_unit = r.lm().is_constant();
        basis.push(r);
        stats.peak_basis = stats.peak_basis.max(basis.len());
        if basis.len() > limits.max_basis {
            return Err(Error::SizeGuard {
                what: "basis size",
                observed: basis.len(),
                limit: limits.max_basis,
            });
        }
        if is_unit {
            unit_found = true;
            break;
        }
        let k = basis.len() - 1;
        push_pairs(&basis, k, &mut queue, &mut pending);
        if stats.pairs_reduced % 200 == 0 {
            debug!(
                "buchberger: {} pairs reduced, basis {}, queue {}, max degree {}",
                stats.pairs_reduced,
                basis.len(),
                queue.len(),
                stats.max_degree
            );
        }
    }
    stats.peak_basis = stats.peak_basis.max(basis.len());

    let generators = if unit_found {
        vec![Polynomial::one(n)]
    } else {
        interreduce(basis, order)
            .into_iter()
            .map(|p| p.to_poly(n))
            .collect()
    };
    debug!(
        "buchberger done: {} generators, {} pairs reduced ({} coprime / {} chain skipped)",
        generators.len(),
        stats.pairs_reduced,
        stats.coprime_skips,
        stats.chain_skips
    );
    Ok(GroebnerBasis {
        generators,
        order: order.clone(),
        nvars: n,
        stats,
    })
}

fn interreduce<C: Coefficient>(
    basis: Vec<OrderedPoly<C>>,
    order: &MonomialOrder,
) -> Vec<OrderedPoly<C>> {
    // minimal basis: drop anything whose leading monomial is a multiple of another's
    let mut keep: Vec<OrderedPoly<C>> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i && h.lm().divides(g.lm()) && (h.lm() != g.lm() || j < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others: Vec<_> = keep
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| h)
            .collect();
        let mut r = keep[i].reduce(&others, order);
        r.make_monic();
        reduced.push(r);
    }
    reduced.sort_by(|a, b| order.compare(b.lm(), a.lm()));
    reduced
}

/// Generators of the elimination ideal `I ∩ k[x_{n-keep+1}, …, x_n]`: the basis
/// elements involving only the last `keep_last` variables. The basis must be
/// lexicographic with the eliminated variables ranked above the kept ones.
pub fn eliminate<C: Coefficient>(
    basis: &GroebnerBasis<C>,
    keep_last: usize,
) -> Result<Vec<Polynomial<C>>> {
    let n = basis.nvars();
    if keep_last > n {
        return Err(Error::InvalidArgument(format!(
            "cannot keep {keep_last} of {n} variables"
        )));
    }
    if basis.order().kind() != OrderKind::Lex {
        return Err(Error::InvalidArgument(
            "elimination needs a lexicographic basis".into(),
        ));
    }
    let split = n - keep_last;
    if basis.order().ranking()[..split].iter().any(|&v| v >= split) {
        return Err(Error::InvalidArgument(
            "eliminated variables must be ranked above the kept ones".into(),
        ));
    }
    let kept: Vec<usize> = (split..n).collect();
    Ok(basis
        .generators()
        .iter()
        .filter(|g| g.involves_only(&kept))
        .cloned()
        .collect())
}

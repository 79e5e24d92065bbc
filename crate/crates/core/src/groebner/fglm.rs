//! Change of monomial order for zero-dimensional ideals (FGLM).
//!
//! The quotient ring is finite dimensional, so a basis for any order can be
//! read off from linear dependencies among normal forms. This avoids running
//! Buchberger directly in lex, where rational coefficients tend to explode.

use std::any::Any;
use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::modular::{inv_mod, mul_mod, rational_mod, solve_prefix_systems, sub_mod, PrefixSystem, Primes};
use super::{BuchbergerStats, GroebnerBasis};
use crate::error::{Error, Result};
use crate::numkernel::Rational;
use crate::polyalg::{ExponentVector, MonomialOrder, OrderedPoly, Polynomial};
use crate::scalar::Coefficient;

/// One row of the incremental echelon form, scaled to a unit pivot: a combination
/// of normal forms together with the target-order monomials that produced it.
struct Row<C> {
    pivot: ExponentVector,
    nf: Polynomial<C>,
    combo: Polynomial<C>,
}

/// Reduced Gröbner basis of the same ideal for `target`. The input must be a
/// reduced basis of a zero-dimensional ideal; coefficients should be exact.
pub fn fglm<C: Coefficient>(
    basis: &GroebnerBasis<C>,
    target: &MonomialOrder,
) -> Result<GroebnerBasis<C>> {
    let all: Vec<usize> = (0..basis.nvars()).collect();
    dispatch(basis, target, &all)
}

/// Reduced basis for `target` of the ideal intersected with the subring in
/// `keep`. Only monomials in those variables are walked, so no elimination
/// order is needed: the subring's quotient embeds in the full quotient.
pub fn fglm_subring<C: Coefficient>(
    basis: &GroebnerBasis<C>,
    target: &MonomialOrder,
    keep: &[usize],
) -> Result<GroebnerBasis<C>> {
    if keep.iter().any(|&k| k >= basis.nvars()) {
        return Err(Error::InvalidArgument("subring variable out of range".into()));
    }
    dispatch(basis, target, keep)
}

/// Rational bases take the modular linear-algebra route; everything else the
/// plain exact walk.
fn dispatch<C: Coefficient>(
    basis: &GroebnerBasis<C>,
    target: &MonomialOrder,
    vars: &[usize],
) -> Result<GroebnerBasis<C>> {
    let Some(q) = (basis as &dyn Any).downcast_ref::<GroebnerBasis<Rational>>() else {
        return walk(basis, target, vars);
    };
    let out: Box<dyn Any> = match walk_rational(q, target, vars)? {
        Some(gb) => Box::new(gb),
        None => Box::new(walk(q, target, vars)?),
    };
    Ok(*out.downcast::<GroebnerBasis<C>>().expect("coefficient type is Rational"))
}

/// Zero-dimensionality check shared by both walks.
fn check_zero_dimensional<C: Coefficient>(basis: &GroebnerBasis<C>, target: &MonomialOrder) -> Result<()> {
    let n = basis.nvars();
    if target.nvars() != n {
        return Err(Error::InvalidArgument(format!(
            "target order has {} variables, basis has {n}",
            target.nvars()
        )));
    }
    let lms: Vec<&ExponentVector> = basis
        .generators()
        .iter()
        .filter_map(|g| g.leading_term(basis.order()).map(|(e, _)| e))
        .collect();
    for k in 0..n {
        if !lms.iter().any(|e| e.single_variable() == Some(k)) {
            return Err(Error::Dimension(
                "order change needs a zero-dimensional ideal".into(),
            ));
        }
    }
    Ok(())
}

/// The walk with exact normal forms but linear algebra modulo primes: a single
/// prime decides independence (a nonzero residue proves it over Q), and each
/// dependency is solved by CRT and rational reconstruction, then verified
/// exactly. `None` means some prime was unlucky; the caller falls back to the
/// plain walk.
fn walk_rational(
    basis: &GroebnerBasis<Rational>,
    target: &MonomialOrder,
    vars: &[usize],
) -> Result<Option<GroebnerBasis<Rational>>> {
    let n = basis.nvars();
    if basis.is_unit_ideal() {
        return walk(basis, target, vars).map(Some);
    }
    check_zero_dimensional(basis, target)?;
    let p = Primes::new().next().expect("a prime below 2^62");
    let source = basis.order();
    let gs = basis.ordered();
    let refs: Vec<_> = gs.iter().collect();
    let reduce = |f: &Polynomial<Rational>| OrderedPoly::from_poly(f, source).reduce(&refs, source).to_poly(n);

    let mut columns: HashMap<ExponentVector, usize> = HashMap::new();
    // dense residues of a normal form, registering new source monomials
    let residues = |nf: &Polynomial<Rational>, columns: &mut HashMap<ExponentVector, usize>| {
        let mut v: Vec<(usize, u64)> = Vec::new();
        for (e, c) in nf.terms() {
            let next = columns.len();
            let j = *columns.entry(e.clone()).or_insert(next);
            v.push((j, rational_mod(c, p)?));
        }
        Some(v)
    };
    // rows of the decision echelon, pivot first and scaled to 1
    let mut rows: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut staircase: Vec<(ExponentVector, Polynomial<Rational>)> = Vec::new();
    let mut index: BTreeMap<ExponentVector, usize> = BTreeMap::new();
    let mut relations: Vec<(ExponentVector, Polynomial<Rational>, usize)> = Vec::new();
    let mut new_lms: Vec<ExponentVector> = Vec::new();
    let mut candidates: Vec<(ExponentVector, Option<(usize, usize)>)> = vec![(ExponentVector::zeros(n), None)];

    while !candidates.is_empty() {
        let (idx, _) = candidates
            .iter()
            .enumerate()
            .min_by(|a, b| target.compare(&a.1 .0, &b.1 .0))
            .expect("nonempty");
        let (m, parent) = candidates.swap_remove(idx);
        candidates.retain(|(e, _)| *e != m);
        if new_lms.iter().any(|l| l.divides(&m)) || index.contains_key(&m) {
            continue;
        }
        let nf = match parent {
            None => reduce(&Polynomial::one(n)),
            Some((b, k)) => reduce(&(&staircase[b].1 * &Polynomial::var(n, k))),
        };
        let Some(sparse) = residues(&nf, &mut columns) else {
            return Ok(None);
        };
        let mut v = vec![0u64; columns.len()];
        for (j, x) in sparse {
            v[j] = x;
        }
        for (pivot, row) in &rows {
            let c = v[*pivot];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = sub_mod(*x, mul_mod(c, y, p), p);
                }
            }
        }
        match v.iter().position(|&x| x != 0) {
            None => {
                relations.push((m.clone(), nf, staircase.len()));
                new_lms.push(m);
            }
            Some(pivot) => {
                let inv = inv_mod(v[pivot], p);
                for x in &mut v {
                    *x = mul_mod(*x, inv, p);
                }
                rows.push((pivot, v));
                let at = staircase.len();
                for &k in vars {
                    let next = m.add(&ExponentVector::unit(n, k));
                    if !new_lms.iter().any(|l| l.divides(&next)) {
                        candidates.push((next, Some((at, k))));
                    }
                }
                index.insert(m.clone(), at);
                staircase.push((m, nf));
            }
        }
        // rows shorter than the current column count are implicitly zero-padded
        let width = columns.len();
        for (_, row) in &mut rows {
            row.resize(width, 0);
        }
    }

    let width = columns.len();
    let dense = |nf: &Polynomial<Rational>| {
        let mut v = vec![Rational::zero(); width];
        for (e, c) in nf.terms() {
            v[columns[e]] = c.clone();
        }
        v
    };
    let cols: Vec<Vec<Rational>> = staircase.iter().map(|(_, nf)| dense(nf)).collect();
    let systems: Vec<PrefixSystem> = relations
        .iter()
        .map(|(_, nf, k)| PrefixSystem { k: *k, rhs: dense(nf) })
        .collect();
    let Some(solutions) = solve_prefix_systems(&cols, &systems) else {
        return Ok(None);
    };
    let mut generators: Vec<Polynomial<Rational>> = relations
        .iter()
        .zip(&solutions)
        .map(|((m, _, _), c)| {
            let tail = Polynomial::from_terms(
                n,
                staircase
                    .iter()
                    .zip(c)
                    .filter(|(_, cj)| !cj.is_zero())
                    .map(|((b, _), cj)| (b.clone(), cj.clone())),
            )
            .expect("staircase monomials sized to n");
            &Polynomial::monomial(m.clone(), Rational::from_integer(1.into())) - &tail
        })
        .collect();
    generators.sort_by(|a, b| {
        let la = a.leading_term(target).expect("nonzero").0;
        let lb = b.leading_term(target).expect("nonzero").0;
        target.compare(lb, la)
    });
    Ok(Some(GroebnerBasis {
        generators,
        order: target.clone(),
        nvars: n,
        stats: BuchbergerStats {
            peak_basis: basis.stats.peak_basis.max(staircase.len()),
            ..basis.stats
        },
    }))
}

fn walk<C: Coefficient>(
    basis: &GroebnerBasis<C>,
    target: &MonomialOrder,
    vars: &[usize],
) -> Result<GroebnerBasis<C>> {
    let n = basis.nvars();
    if basis.is_unit_ideal() {
        return Ok(GroebnerBasis {
            generators: basis.generators.clone(),
            order: target.clone(),
            nvars: n,
            stats: basis.stats,
        });
    }
    check_zero_dimensional(basis, target)?;

    let source = basis.order();
    let gs = basis.ordered();
    let refs: Vec<_> = gs.iter().collect();
    let reduce = |f: &Polynomial<C>| OrderedPoly::from_poly(f, source).reduce(&refs, source).to_poly(n);

    let one = C::one();
    let mut staircase: BTreeMap<ExponentVector, Polynomial<C>> = BTreeMap::new();
    let mut rows: Vec<Row<C>> = Vec::new();
    let mut new_lms: Vec<ExponentVector> = Vec::new();
    let mut generators: Vec<Polynomial<C>> = Vec::new();
    // candidates with the normal form they reduce from: (monomial, parent, variable)
    let mut candidates: Vec<(ExponentVector, Option<(ExponentVector, usize)>)> =
        vec![(ExponentVector::zeros(n), None)];

    while !candidates.is_empty() {
        let (idx, _) = candidates
            .iter()
            .enumerate()
            .min_by(|a, b| target.compare(&a.1 .0, &b.1 .0))
            .expect("nonempty");
        let (m, parent) = candidates.swap_remove(idx);
        candidates.retain(|(e, _)| *e != m);
        if new_lms.iter().any(|l| l.divides(&m)) || staircase.contains_key(&m) {
            continue;
        }
        let nf = match &parent {
            None => reduce(&Polynomial::one(n)),
            Some((b, k)) => reduce(&(&staircase[b] * &Polynomial::var(n, *k))),
        };
        let mut v = nf.clone();
        let mut combo = Polynomial::monomial(m.clone(), one.clone());
        for row in &rows {
            let c = v.coefficient(&row.pivot);
            if c.is_zero() {
                continue;
            }
            v = &v - &row.nf.scale(&c);
            combo = &combo - &row.combo.scale(&c);
        }
        if v.is_zero() {
            // combo = m + lower staircase terms lies in the ideal
            new_lms.push(m);
            generators.push(combo);
            continue;
        }
        let (pivot, lead) = v
            .terms()
            .next()
            .map(|(e, c)| (e.clone(), c.clone()))
            .expect("nonzero vector");
        let inv = one.clone() / lead;
        rows.push(Row {
            pivot,
            nf: v.scale(&inv),
            combo: combo.scale(&inv),
        });
        for &k in vars {
            let next = m.add(&ExponentVector::unit(n, k));
            if !new_lms.iter().any(|l| l.divides(&next)) {
                candidates.push((next, Some((m.clone(), k))));
            }
        }
        staircase.insert(m, nf);
    }

    generators.sort_by(|a, b| {
        let la = a.leading_term(target).expect("nonzero").0;
        let lb = b.leading_term(target).expect("nonzero").0;
        target.compare(lb, la)
    });
    Ok(GroebnerBasis {
        generators,
        order: target.clone(),
        nvars: n,
        stats: BuchbergerStats {
            peak_basis: basis.stats.peak_basis.max(staircase.len()),
            ..basis.stats
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::buchberger;
    use crate::numkernel::Rational;
    use crate::polyalg::parse_polynomial;

    fn sys(eqs: &[&str], names: &[&str]) -> Vec<Polynomial<Rational>> {
        eqs.iter().map(|s| parse_polynomial(s, names).unwrap()).collect()
    }

    #[test]
    fn matches_direct_lex() {
        let names = ["x", "y", "z"];
        let s = sys(
            &["x + y + z - 6", "x*y + y*z + x*z - 11", "x*y*z - 6", "x^2 - y*z + z - 1"],
            &names,
        );
        let lex = MonomialOrder::lex(3);
        let grev = buchberger(&s, &MonomialOrder::grevlex(3)).unwrap();
        let converted = fglm(&grev, &lex).unwrap();
        let direct = buchberger(&s, &lex).unwrap();
        assert_eq!(converted.generators(), direct.generators());
        assert!(converted.is_reduced());
        assert!(converted.satisfies_buchberger_criterion());
        // the modular route and the plain exact walk agree
        let plain = walk(&grev, &lex, &[0, 1, 2]).unwrap();
        assert_eq!(plain.generators(), converted.generators());
    }

    #[test]
    fn round_trip_back_to_grevlex() {
        let s = sys(&["x*y - 2", "x + y - 3"], &["x", "y"]);
        let grev = buchberger(&s, &MonomialOrder::grevlex(2)).unwrap();
        let lex = fglm(&grev, &MonomialOrder::lex(2)).unwrap();
        let back = fglm(&lex, &MonomialOrder::grevlex(2)).unwrap();
        assert_eq!(back.generators(), grev.generators());
    }

    #[test]
    fn rejects_positive_dimension() {
        let s = sys(&["x*y - 1"], &["x", "y"]);
        let grev = buchberger(&s, &MonomialOrder::grevlex(2)).unwrap();
        assert!(matches!(
            fglm(&grev, &MonomialOrder::lex(2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn subring_walk_eliminates() {
        // x = 1/y on the curve x y = 1 with y^2 = 2
        let s = sys(&["x*y - 1", "y^2 - 2"], &["x", "y"]);
        let grev = buchberger(&s, &MonomialOrder::grevlex(2)).unwrap();
        let only_y = fglm_subring(&grev, &MonomialOrder::lex(2), &[1]).unwrap();
        assert_eq!(only_y.generators(), sys(&["y^2 - 2"], &["x", "y"]).as_slice());
        let only_x = fglm_subring(&grev, &MonomialOrder::lex(2), &[0]).unwrap();
        assert_eq!(only_x.generators(), sys(&["x^2 - 1/2"], &["x", "y"]).as_slice());
    }

    #[test]
    fn unit_ideal_stays_unit() {
        let s = sys(&["x - 1", "x - 2"], &["x"]);
        let grev = buchberger(&s, &MonomialOrder::grevlex(1)).unwrap();
        assert!(fglm(&grev, &MonomialOrder::lex(1)).unwrap().is_unit_ideal());
    }
}

use std::cmp::Ordering;

use super::ExponentVector;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderKind {
    Lex,
    GrevLex,
}

/// A monomial order together with a ranking of the variables.
///
/// `ranking[0]` is the largest variable. With the identity ranking, lex order
/// has `x1 > x2 > ... > xn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    ranking: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, ranking: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; ranking.len()];
        for &v in &ranking {
            if v >= ranking.len() || seen[v] {
                return Err(Error::InvalidArgument(format!(
                    "variable ranking {ranking:?} is not a permutation"
                )));
            }
            seen[v] = true;
        }
        Ok(Self { kind, ranking })
    }

    pub fn lex(nvars: usize) -> Self {
        Self {
            kind: OrderKind::Lex,
            ranking: (0..nvars).collect(),
        }
    }

    pub fn grevlex(nvars: usize) -> Self {
        Self {
            kind: OrderKind::GrevLex,
            ranking: (0..nvars).collect(),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn nvars(&self) -> usize {
        self.ranking.len()
    }

    pub fn compare(&self, a: &ExponentVector, b: &ExponentVector) -> Ordering {
        let (a, b) = (a.as_slice(), b.as_slice());
        match self.kind {
            OrderKind::Lex => {
                for &v in &self.ranking {
                    match a[v].cmp(&b[v]) {
                        Ordering::Equal => continue,
                        other => return other,
                    }
                }
                Ordering::Equal
            }
            OrderKind::GrevLex => {
                let da: i64 = a.iter().map(|&e| e as i64).sum();
                let db: i64 = b.iter().map(|&e| e as i64).sum();
                if da != db {
                    return da.cmp(&db);
                }
                for &v in self.ranking.iter().rev() {
                    match a[v].cmp(&b[v]) {
                        Ordering::Equal => continue,
                        other => return other.reverse(),
                    }
                }
                Ordering::Equal
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ev(v: &[i32]) -> ExponentVector {
        ExponentVector::new(v.to_vec())
    }

    #[test]
    fn lex_and_grevlex_basics() {
        let lex = MonomialOrder::lex(3);
        assert_eq!(lex.compare(&ev(&[1, 0, 0]), &ev(&[0, 5, 5])), Ordering::Greater);
        let grevlex = MonomialOrder::grevlex(3);
        assert_eq!(grevlex.compare(&ev(&[1, 0, 0]), &ev(&[0, 5, 5])), Ordering::Less);
        // x*z < y^2 in grevlex with x > y > z
        assert_eq!(grevlex.compare(&ev(&[1, 0, 1]), &ev(&[0, 2, 0])), Ordering::Less);
        let permuted = MonomialOrder::new(OrderKind::Lex, vec![2, 0, 1]).unwrap();
        assert_eq!(permuted.compare(&ev(&[5, 0, 0]), &ev(&[0, 0, 1])), Ordering::Less);
    }

    #[test]
    fn bad_ranking_rejected() {
        assert!(MonomialOrder::new(OrderKind::Lex, vec![0, 0]).is_err());
        assert!(MonomialOrder::new(OrderKind::Lex, vec![0, 2]).is_err());
    }

    #[test]
    fn orders_are_multiplicative_total_and_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for order in [
            MonomialOrder::lex(3),
            MonomialOrder::grevlex(3),
            MonomialOrder::new(OrderKind::GrevLex, vec![1, 2, 0]).unwrap(),
        ] {
            for _ in 0..1000 {
                let mut draw = || ev(&[rng.gen_range(0..6), rng.gen_range(0..6), rng.gen_range(0..6)]);
                let (u, v, w) = (draw(), draw(), draw());
                let uv = order.compare(&u, &v);
                assert_eq!(uv, order.compare(&v, &u).reverse());
                if uv == Ordering::Equal {
                    assert_eq!(u, v);
                }
                if uv == Ordering::Less {
                    assert_eq!(order.compare(&u.add(&w), &v.add(&w)), Ordering::Less);
                }
                assert_ne!(order.compare(&ExponentVector::zeros(3), &u), Ordering::Greater);
            }
        }
    }
}

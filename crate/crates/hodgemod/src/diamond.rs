//! The Hodge diamond value type and the purely combinatorial operations on
//! it: validation, Künneth products, blow-ups, primitive numbers, and the
//! inner-index order that drives the blow-up scheduler.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Sub;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact grid of Hodge numbers `h^{p,q}` of an `n`-dimensional variety,
/// indexed by `0 <= p, q <= n`. Entries are arbitrary-precision: repeated
/// blow-ups and Künneth products overflow machine words at modest sizes.
#[derive(Clone, PartialEq, Eq)]
pub struct HodgeDiamond {
    n: usize,
    h: Vec<Vec<BigInt>>,
}

impl HodgeDiamond {
    pub fn zero(n: usize) -> Self {
        HodgeDiamond {
            n,
            h: vec![vec![BigInt::zero(); n + 1]; n + 1],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        HodgeDiamond {
            n,
            h: (0..=n).map(|p| (0..=n).map(|q| f(p, q)).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> &BigInt {
        &self.h[p][q]
    }

    pub fn set(&mut self, p: usize, q: usize, value: BigInt) {
        self.h[p][q] = value;
    }

    /// Least nonnegative residue of `h^{p,q}` modulo `m`.
    pub fn residue(&self, p: usize, q: usize, m: u64) -> u64 {
        let r = self.h[p][q].mod_floor(&BigInt::from(m));
        u64::try_from(r).expect("residue fits u64")
    }

    /// Checks the constraints a genuine Hodge diamond satisfies: the two
    /// symmetries `h^{p,q} = h^{q,p} = h^{n-p,n-q}`, the Lefschetz
    /// inequalities `h^{p,q} <= h^{p+1,q+1}` for `p+q < n`, nonnegativity,
    /// and (with `connected`) `h^{0,0} = 1`. Violations come back as data;
    /// an empty list means valid.
    pub fn validate(&self, connected: bool) -> Vec<Violation> {
        let n = self.n;
        let mut out = Vec::new();
        let mut asymmetric = BTreeMap::new();
        for p in 0..=n {
            for q in 0..=n {
                if self.h[p][q] != self.h[q][p] || self.h[p][q] != self.h[n - p][n - q] {
                    let key = (p.min(q), p.max(q));
                    asymmetric.entry(key.min((n - key.1, n - key.0))).or_insert(());
                }
            }
        }
        out.extend(asymmetric.into_keys().map(|(p, q)| Violation::Symmetry { p, q }));
        for p in 0..=n {
            for q in 0..=n {
                if p + q < n && self.h[p][q] > self.h[p + 1][q + 1] {
                    out.push(Violation::Lefschetz { p, q });
                }
                if self.h[p][q].is_negative() {
                    out.push(Violation::Negative { p, q });
                }
            }
        }
        if connected && self.h[0][0] != BigInt::from(1) {
            out.push(Violation::NotConnected);
        }
        out
    }

    /// Hodge numbers of a product: the two-variable convolution of the
    /// factors' grids.
    pub fn kunneth(&self, other: &HodgeDiamond) -> HodgeDiamond {
        let n = self.n + other.n;
        HodgeDiamond::from_fn(n, |p, q| {
            let mut acc = BigInt::zero();
            for a in p.saturating_sub(other.n)..=p.min(self.n) {
                for b in q.saturating_sub(other.n)..=q.min(self.n) {
                    acc += &self.h[a][b] * &other.h[p - a][q - b];
                }
            }
            acc
        })
    }

    /// Hodge numbers after blowing up a center with diamond `center` of
    /// codimension `codim`: each entry gains the shifted center entries
    /// `h^{p-i,q-i}(Z)` for `1 <= i <= codim-1`, with out-of-range entries
    /// read as zero. `codim = 1` is the identity.
    pub fn blow_up(&self, center: &HodgeDiamond, codim: usize) -> Result<HodgeDiamond> {
        let n = self.n;
        if codim == 0 || codim > n {
            return Err(Error::OutOfRange(format!(
                "blow-up codimension {codim} not in 1..={n}"
            )));
        }
        if center.n != n - codim {
            return Err(Error::DimensionMismatch {
                expected: n - codim,
                found: center.n,
            });
        }
        let mut out = self.clone();
        for p in 0..=n {
            for q in 0..=n {
                for i in 1..codim {
                    if p >= i && q >= i && p - i <= center.n && q - i <= center.n {
                        out.h[p][q] += &center.h[p - i][q - i];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Primitive numbers `l^{p,q} = h^{p,q} - h^{p-1,q-1}` for `p+q <= n`.
    pub fn primitive(&self) -> PrimitiveVector {
        let mut l = BTreeMap::new();
        for p in 0..=self.n {
            for q in 0..=(self.n - p) {
                let mut v = self.h[p][q].clone();
                if p >= 1 && q >= 1 {
                    v -= &self.h[p - 1][q - 1];
                }
                l.insert((p, q), v);
            }
        }
        PrimitiveVector { n: self.n, l }
    }

    /// Entrywise least nonnegative residues.
    pub fn reduce_mod(&self, m: u64) -> HodgeDiamond {
        let m = BigInt::from(m);
        HodgeDiamond::from_fn(self.n, |p, q| self.h[p][q].mod_floor(&m))
    }
}

impl Sub for &HodgeDiamond {
    type Output = HodgeDiamond;

    fn sub(self, rhs: &HodgeDiamond) -> HodgeDiamond {
        assert_eq!(self.n, rhs.n, "entrywise difference needs equal dimensions");
        HodgeDiamond::from_fn(self.n, |p, q| &self.h[p][q] - &rhs.h[p][q])
    }
}

impl fmt::Debug for HodgeDiamond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HodgeDiamond(n={}", self.n)?;
        for row in &self.h {
            write!(f, ", [")?;
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Symmetry { p: usize, q: usize },
    Lefschetz { p: usize, q: usize },
    Negative { p: usize, q: usize },
    NotConnected,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Symmetry { p, q } => write!(f, "sym {p} {q}"),
            Violation::Lefschetz { p, q } => write!(f, "lefschetz {p} {q}"),
            Violation::Negative { p, q } => write!(f, "negative {p} {q}"),
            Violation::NotConnected => write!(f, "h00"),
        }
    }
}

/// The primitive numbers of a diamond, defined for all `p+q <= n`. Entries
/// may be negative for grids that violate the Lefschetz inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveVector {
    n: usize,
    l: BTreeMap<(usize, usize), BigInt>,
}

impl PrimitiveVector {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: usize, q: usize) -> &BigInt {
        &self.l[&(p, q)]
    }
}

/// `(r,s)` strictly precedes `(p,q)`: smaller weight first, then smaller
/// second coordinate.
pub fn precedes(a: (usize, usize), b: (usize, usize)) -> bool {
    let (r, s) = a;
    let (p, q) = b;
    r + s < p + q || (r + s == p + q && s < q)
}

/// All inner quarter indices `1 <= p <= q <= n-1` with `p+q <= n`, sorted
/// ascending by [`precedes`]. Empty for `n <= 1`.
pub fn inner_indices(n: usize) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = (1..n)
        .flat_map(|p| (p..n).map(move |q| (p, q)))
        .filter(|&(p, q)| p + q <= n)
        .collect();
    v.sort_by_key(|&(p, q)| (p + q, q));
    v
}

//! Twisted Euler-characteristic calculus: closed forms for projective
//! spaces, curves and elliptic curves, Künneth multiplicativity for
//! products, and the restriction/conormal recursion that computes
//! `χ(Ω^a ⊗ M)` on a very ample hypersurface from its ambient space. A
//! middle Hodge row is recovered from the alternating sums these values
//! represent.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::diamond::HodgeDiamond;
use crate::error::{Error, Result};

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k.min(n - k) {
        r *= BigInt::from(n - i);
        r /= BigInt::from(i + 1);
    }
    r
}

/// The numerical polynomial `t -> C(t + n, n)`, valid for negative `t`.
/// Computed as a product of `n` consecutive integers over `n!`, which
/// divides exactly.
pub fn binomial_poly(t: i64, n: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 1..=n as i64 {
        num *= BigInt::from(t + k);
        den *= BigInt::from(k);
    }
    num / den
}

/// `χ(P^n, Ω^a(t))` via the Euler-sequence recursion
/// `χ(Ω^a(t)) = C(n+1, a)·C(t-a+n, n) - χ(Ω^{a-1}(t))`.
pub fn chi_proj(n: usize, a: usize, t: i64) -> Result<BigInt> {
    if a > n {
        return Err(Error::OutOfRange(format!(
            "form degree {a} exceeds dimension {n}"
        )));
    }
    let mut chi = binomial_poly(t, n);
    for b in 1..=a {
        chi = binomial(n as u64 + 1, b as u64) * binomial_poly(t - b as i64, n) - chi;
    }
    Ok(chi)
}

/// `χ(Ω^a ⊗ L^{-k})` on a curve of genus `g` carrying a line bundle `L` of
/// degree `d`, by Riemann–Roch; the canonical twist has degree `2g - 2`.
pub fn chi_curve(genus: u64, degree: u64, a: usize, twist: u64) -> Result<BigInt> {
    let td = BigInt::from(twist) * BigInt::from(degree);
    match a {
        0 => Ok(BigInt::one() - BigInt::from(genus) - td),
        1 => Ok(BigInt::from(genus) - BigInt::one() - td),
        _ => Err(Error::OutOfRange(format!(
            "form degree {a} exceeds curve dimension 1"
        ))),
    }
}

/// `χ(Ω^a ⊗ L^{-t})` on an elliptic curve with `deg L = d`; the canonical
/// bundle is trivial, so both form degrees give `-t·d`.
pub fn chi_elliptic(degree: u64, a: usize, twist: u64) -> Result<BigInt> {
    if a > 1 {
        return Err(Error::OutOfRange(format!(
            "form degree {a} exceeds curve dimension 1"
        )));
    }
    Ok(-(BigInt::from(twist) * BigInt::from(degree)))
}

/// One factor of a product variety: answers `χ(Ω^a ⊗ L^{-twist})` for its
/// own fixed line bundle `L` and any `0 <= a <= dim`.
pub trait FactorChi {
    fn dim(&self) -> usize;
    fn chi(&self, a: usize, twist: u64) -> BigInt;
}

pub struct CurveFactor {
    pub genus: u64,
    pub degree: u64,
}

impl FactorChi for CurveFactor {
    fn dim(&self) -> usize {
        1
    }

    fn chi(&self, a: usize, twist: u64) -> BigInt {
        chi_curve(self.genus, self.degree, a, twist).unwrap()
    }
}

pub struct EllipticFactor {
    pub degree: u64,
}

impl FactorChi for EllipticFactor {
    fn dim(&self) -> usize {
        1
    }

    fn chi(&self, a: usize, twist: u64) -> BigInt {
        chi_elliptic(self.degree, a, twist).unwrap()
    }
}

/// Künneth: `χ(Ω^p ⊗ ⊠_i L_i^{-t_i})` on a product is the sum over
/// compositions `a_1 + … + a_k = p` of the per-factor products.
pub fn chi_product(factors: &[&dyn FactorChi], twists: &[u64], p: usize) -> BigInt {
    assert_eq!(factors.len(), twists.len());
    if factors.is_empty() {
        return if p == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let mut acc = BigInt::zero();
    for a in 0..=p.min(factors[0].dim()) {
        acc += factors[0].chi(a, twists[0]) * chi_product(&factors[1..], &twists[1..], p - a);
    }
    acc
}

/// Exponent vector over a level's twist lattice; entry `i` is the exponent
/// of the `i`-th generator in an anti-ample twist `⊗ gen_i^{-e_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistIndex(pub Vec<u64>);

impl TwistIndex {
    pub fn zero(rank: usize) -> Self {
        TwistIndex(vec![0; rank])
    }

    /// Exponentwise sum, i.e. the tensor product of the two twists.
    pub fn tensor(&self, other: &TwistIndex) -> TwistIndex {
        assert_eq!(self.0.len(), other.0.len());
        TwistIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// An ambient space whose twisted Euler characteristics are known in closed
/// form over a fixed lattice of line bundles.
pub trait AmbientChi {
    fn dim(&self) -> usize;
    fn chi(&self, a: usize, twist: &TwistIndex) -> BigInt;
}

/// `P^dim` with the rank-one lattice generated by `O(1)`.
pub struct ProjectiveAmbient {
    pub dim: usize,
}

impl AmbientChi for ProjectiveAmbient {
    fn dim(&self) -> usize {
        self.dim
    }

    fn chi(&self, a: usize, twist: &TwistIndex) -> BigInt {
        chi_proj(self.dim, a, -(twist.0[0] as i64)).unwrap()
    }
}

/// Memoized `χ(Ω^a ⊗ M)` on the hypersurface cut out by a fixed divisor
/// class inside a fixed ambient. Values are reproducible; the memo only
/// saves recomputation.
#[derive(Default)]
pub struct ChiTable {
    memo: HashMap<(usize, TwistIndex), BigInt>,
}

impl ChiTable {
    pub fn new() -> Self {
        ChiTable::default()
    }

    /// `χ(Y, Ω^a ⊗ M)` for `Y` the zero locus of `divisor`, via the
    /// restriction sequence for the ambient bundle and the conormal
    /// sequence for `Ω^a`:
    ///
    ///   T(a, M) = [χ(Ω^a ⊗ M) - χ(Ω^a ⊗ M ⊗ D^{-1})] - T(a-1, M ⊗ D^{-1})
    ///
    /// with ambient characteristics on the right and `T(-1, ·) = 0`.
    pub fn chi_hypersurface(
        &mut self,
        ambient: &dyn AmbientChi,
        divisor: &TwistIndex,
        a: usize,
        twist: &TwistIndex,
    ) -> Result<BigInt> {
        if a >= ambient.dim() {
            return Err(Error::OutOfRange(format!(
                "form degree {a} exceeds hypersurface dimension {}",
                ambient.dim() - 1
            )));
        }
        Ok(self.chi_rec(ambient, divisor, a as isize, twist))
    }

    fn chi_rec(
        &mut self,
        ambient: &dyn AmbientChi,
        divisor: &TwistIndex,
        a: isize,
        twist: &TwistIndex,
    ) -> BigInt {
        if a < 0 {
            return BigInt::zero();
        }
        let key = (a as usize, twist.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let shifted = twist.tensor(divisor);
        let restricted = ambient.chi(a as usize, twist) - ambient.chi(a as usize, &shifted);
        let v = restricted - self.chi_rec(ambient, divisor, a - 1, &shifted);
        self.memo.insert(key, v.clone());
        v
    }
}

/// Solve `χ_p = Σ_q (-1)^q h^{p,q}` for the middle antidiagonal of an
/// `n`-dimensional diamond whose off-middle entries are already known.
/// Errors if the solved row is asymmetric or negative, which signals a bug
/// upstream rather than bad input.
pub fn middle_row_from_chi(
    n: usize,
    known: &HodgeDiamond,
    chis: &[BigInt],
) -> Result<Vec<BigInt>> {
    assert_eq!(known.dim(), n);
    assert_eq!(chis.len(), n + 1);
    let mut row = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let mut rest = BigInt::zero();
        for q in 0..=n {
            if q == n - p {
                continue;
            }
            if q % 2 == 0 {
                rest += known.get(p, q);
            } else {
                rest -= known.get(p, q);
            }
        }
        let mut v = &chis[p] - rest;
        if (n - p) % 2 == 1 {
            v = -v;
        }
        row.push(v);
    }
    for p in 0..=n {
        if row[p] != row[n - p] {
            return Err(Error::InconsistentChi(format!(
                "middle row asymmetric at position {p}: {} vs {}",
                row[p],
                row[n - p]
            )));
        }
        if row[p].is_negative() {
            return Err(Error::InconsistentChi(format!(
                "negative middle entry {} at position {p}",
                row[p]
            )));
        }
    }
    Ok(row)
}

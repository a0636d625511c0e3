//! Exact Hodge diamonds of the atomic geometric objects the pipeline blows
//! up and stacks: points, projective spaces, curves, smooth hypersurfaces
//! in projective space, and projective-bundle centers over them.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chi::{binomial, middle_row_from_chi, ChiTable, ProjectiveAmbient, TwistIndex};
use crate::diamond::HodgeDiamond;
use crate::error::Result;

/// `P^s`: ones on the diagonal, zeros elsewhere.
pub fn proj_space_diamond(s: usize) -> HodgeDiamond {
    HodgeDiamond::from_fn(s, |p, q| if p == q { BigInt::one() } else { BigInt::zero() })
}

/// A smooth curve of the given genus.
pub fn curve_diamond(genus: u64) -> HodgeDiamond {
    HodgeDiamond::from_fn(1, |p, q| {
        if p == q {
            BigInt::one()
        } else {
            BigInt::from(genus)
        }
    })
}

/// A smooth degree-`degree` hypersurface of dimension `dim` in `P^{dim+1}`.
/// For `dim = 0` this is `degree` distinct points in `P^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypersurfaceSpec {
    pub dim: usize,
    pub degree: u64,
}

/// The Hodge diamond of `Y_d ⊂ P^{N+1}`: off-middle rows follow the ambient
/// projective space, the middle row is solved from the hypersurface Euler
/// characteristics `χ(Ω^p)`.
pub fn hypersurface_diamond(spec: &HypersurfaceSpec) -> Result<HodgeDiamond> {
    let (n, d) = (spec.dim, spec.degree);
    assert!(d >= 1, "hypersurface degree must be positive");
    if n == 0 {
        return Ok(HodgeDiamond::from_fn(0, |_, _| BigInt::from(d)));
    }
    let mut dia = HodgeDiamond::from_fn(n, |p, q| {
        if p + q != n && p == q {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    });
    let ambient = ProjectiveAmbient { dim: n + 1 };
    let divisor = TwistIndex(vec![d]);
    let mut table = ChiTable::new();
    let chis = (0..=n)
        .map(|p| table.chi_hypersurface(&ambient, &divisor, p, &TwistIndex::zero(1)))
        .collect::<Result<Vec<_>>>()?;
    let row = middle_row_from_chi(n, &dia, &chis)?;
    for (p, v) in row.into_iter().enumerate() {
        dia.set(p, n - p, v);
    }
    // the geometric-genus entry counts degree d - n - 2 monomials
    assert_eq!(
        *dia.get(n, 0),
        binomial(d - 1, n as u64 + 1),
        "h^(n,0) of a degree-{d} hypersurface of dimension {n}"
    );
    Ok(dia)
}

/// A projective bundle with fiber `P^{r-1}` over `Y_d ⊂ P^{s-r+1}`; its
/// Hodge numbers agree with the trivial bundle `Y_d × P^{r-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BundleCenterSpec {
    pub r: usize,
    pub s: usize,
    pub degree: u64,
}

pub fn bundle_center_diamond(spec: &BundleCenterSpec) -> Result<HodgeDiamond> {
    let BundleCenterSpec { r, s, degree } = *spec;
    assert!(1 <= r && r <= s, "bundle center needs 1 <= r <= s");
    let base = hypersurface_diamond(&HypersurfaceSpec {
        dim: s - r,
        degree,
    })?;
    Ok(base.kunneth(&proj_space_diamond(r - 1)))
}

/// The formal center `Z × P^{r-1}` whose single blow-up reproduces, modulo
/// `m`, the combined effect of one degree-`s-r+2` bundle blow-up and `m-1`
/// degree-one ones: `Z` is the entrywise difference of the two base
/// hypersurface diamonds, supported on the middle row with outer entries 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalCenter {
    pub diamond: HodgeDiamond,
}

pub fn formal_center(r: usize, s: usize) -> Result<FormalCenter> {
    assert!(1 <= r && r <= s, "formal center needs 1 <= r <= s");
    let bumped = hypersurface_diamond(&HypersurfaceSpec {
        dim: s - r,
        degree: (s - r) as u64 + 2,
    })?;
    let hyperplane = hypersurface_diamond(&HypersurfaceSpec {
        dim: s - r,
        degree: 1,
    })?;
    let z = &bumped - &hyperplane;
    Ok(FormalCenter {
        diamond: z.kunneth(&proj_space_diamond(r - 1)),
    })
}

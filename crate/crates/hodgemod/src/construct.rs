//! The two-phase construction pipeline. An outer phase stacks hypersurface
//! levels inside products with elliptic-curve squares, hitting prescribed
//! border residues while keeping an exact Euler-characteristic handle on
//! each level. An inner phase then adjusts every interior entry by a
//! scheduled sequence of blow-ups, one primitive number at a time, in
//! descending index order so later steps cannot disturb earlier ones.

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::blocks::{
    bundle_center_diamond, curve_diamond, proj_space_diamond, BundleCenterSpec,
};
use crate::chi::{
    chi_curve, chi_product, middle_row_from_chi, AmbientChi, ChiTable, EllipticFactor,
    FactorChi, TwistIndex,
};
use crate::diamond::{inner_indices, HodgeDiamond};
use crate::error::{Error, Result};

/// All quarter indices `0 <= p <= q <= n`, `p + q <= n`, ascending.
pub fn quarter_indices(n: usize) -> Vec<(usize, usize)> {
    (0..=n)
        .flat_map(|p| (p..=n).map(move |q| (p, q)))
        .filter(|&(p, q)| p + q <= n)
        .collect()
}

/// The construction goal: a residue in `[0, m)` for every quarter index,
/// with `(0,0)` pinned to 1. The rest of the grid follows by the Hodge
/// symmetries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTarget {
    n: usize,
    m: u64,
    res: BTreeMap<(usize, usize), u64>,
}

impl ResidueTarget {
    /// Builds a target from sparse canonical entries `(p, q, r)` with
    /// `p <= q`; omitted pairs default to 0 and `(0,0)` to 1.
    pub fn new(n: usize, m: u64, entries: &[(usize, usize, u64)]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if m < 2 {
            return Err(Error::InvalidInput("modulus must be at least 2".into()));
        }
        let mut res: BTreeMap<(usize, usize), u64> =
            quarter_indices(n).into_iter().map(|pq| (pq, 0)).collect();
        res.insert((0, 0), 1);
        let mut seen = BTreeMap::new();
        for &(p, q, r) in entries {
            if p > q || q > n || p + q > n {
                return Err(Error::InvalidInput(format!(
                    "({p}, {q}) is not a quarter index for dimension {n}"
                )));
            }
            if r >= m {
                return Err(Error::InvalidInput(format!(
                    "residue {r} at ({p}, {q}) not below modulus {m}"
                )));
            }
            if seen.insert((p, q), ()).is_some() {
                return Err(Error::InvalidInput(format!("duplicate entry ({p}, {q})")));
            }
            if (p, q) == (0, 0) && r != 1 {
                return Err(Error::InvalidInput(
                    "the (0, 0) residue is fixed to 1".into(),
                ));
            }
            res.insert((p, q), r);
        }
        Ok(ResidueTarget { n, m, res })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Target residue at any grid position, folded into the quarter by the
    /// Hodge symmetries.
    pub fn residue(&self, p: usize, q: usize) -> u64 {
        let (p, q) = if p + q > self.n {
            (self.n - p, self.n - q)
        } else {
            (p, q)
        };
        self.res[&(p.min(q), p.max(q))]
    }

    /// Border residues `h^{1,0} .. h^{n,0}`.
    pub fn outer(&self) -> Vec<u64> {
        (1..=self.n).map(|p| self.residue(0, p)).collect()
    }

    /// Canonical quarter entries in ascending index order.
    pub fn quarter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.res.iter().map(|(&pq, &r)| (pq, r))
    }
}

/// `k^p` sequence over given border values: `k^{-1} = 0`, `k^0 = 1`,
/// `k^p = h^p - 2k^{p-1} - k^{p-2}`. Returns `k^1 .. k^len`.
pub fn k_recursion(h: &[i64]) -> Vec<i64> {
    let mut prev2 = 0i64; // k^{-1}
    let mut prev = 1i64; // k^0
    let mut out = Vec::with_capacity(h.len());
    for &hp in h {
        let k = hp - 2 * prev - prev2;
        out.push(k);
        prev2 = prev;
        prev = k;
    }
    out
}

/// Resolved parameters for one product level of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPlan {
    pub level: usize,
    /// Border residues this level must hit, `h^{1,0} .. h^{level,0}`.
    pub targets: Vec<u64>,
    /// Raw `k^1 .. k^{level-1}` recursion values feeding the level below.
    pub k_values: Vec<i64>,
    /// Degree of the very ample bundle on each elliptic factor; the least
    /// value `>= 3` congruent to 1.
    pub elliptic_degree: u64,
    /// Exponent of the third-factor twist; the hypersurface's structure
    /// sheaf lands on this value modulo `m`.
    pub euler_term: u64,
}

/// A fully resolved outer-phase plan: curve parameters for level one and
/// product parameters for every level above, all free choices minimized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterPlan {
    pub n: usize,
    pub m: u64,
    pub genus: u64,
    pub curve_degree: u64,
    /// Level-one border residue (equals the genus).
    pub curve_target: u64,
    /// Plans for levels `2ꓸ.n`, ascending.
    pub levels: Vec<LevelPlan>,
}

/// Resolves all tower parameters for the given border residues: the genus
/// and a very ample degree `> 2g` for the base curve, and per level the
/// elliptic degree and twist exponent, each taken as small as possible.
pub fn plan_outer(n: usize, m: u64, outer: &[u64]) -> OuterPlan {
    assert!(n >= 1 && m >= 2);
    assert_eq!(outer.len(), n);
    assert!(outer.iter().all(|&r| r < m));

    let mut elliptic_degree = 3;
    while elliptic_degree % m != 1 {
        elliptic_degree += 1;
    }

    let mut levels = Vec::new();
    let mut targets: Vec<u64> = outer.to_vec();
    for level in (2..=n).rev() {
        let signed_sum: i64 = 1 + targets
            .iter()
            .enumerate()
            .map(|(i, &t)| if i % 2 == 0 { -(t as i64) } else { t as i64 })
            .sum::<i64>();
        let residue = signed_sum.rem_euclid(m as i64) as u64;
        let euler_term = if residue == 0 { m } else { residue };
        let k_values = k_recursion(
            &targets[..level - 1]
                .iter()
                .map(|&t| t as i64)
                .collect::<Vec<_>>(),
        );
        let next: Vec<u64> = k_values
            .iter()
            .map(|&k| k.rem_euclid(m as i64) as u64)
            .collect();
        levels.push(LevelPlan {
            level,
            targets,
            k_values,
            elliptic_degree,
            euler_term,
        });
        targets = next;
    }
    levels.reverse();

    let genus = targets[0];
    let mut curve_degree = 2 * genus + 1;
    while (curve_degree + genus) % m != 0 {
        curve_degree += 1;
    }
    OuterPlan {
        n,
        m,
        genus,
        curve_degree,
        curve_target: genus,
        levels,
    }
}

enum LevelKind {
    Curve { genus: u64, degree: u64 },
    Product { elliptic_degree: u64, euler_term: u64 },
}

struct TowerLevel {
    dim: usize,
    kind: LevelKind,
    diamond: HodgeDiamond,
    table: RefCell<ChiTable>,
}

/// The stack of tower levels. Each level owns the exact Hodge diamond of
/// its variety and a memo table for its twisted Euler characteristics; one
/// tower is a single evaluation context and is not meant to be shared
/// across threads.
pub struct Tower {
    m: u64,
    levels: Vec<TowerLevel>,
}

/// Forwards a level's characteristics as a product factor. Both lattice
/// generators of the level above restrict to this level's bundle, so an
/// `(i, j)` query from above arrives collapsed to the single exponent
/// `i + j`.
struct PrevFactor<'a> {
    tower: &'a Tower,
    idx: usize,
}

impl FactorChi for PrevFactor<'_> {
    fn dim(&self) -> usize {
        self.tower.levels[self.idx].dim
    }

    fn chi(&self, a: usize, twist: u64) -> BigInt {
        self.tower.level_chi(self.idx, a, twist)
    }
}

/// The ambient `X_{n-1} × E × E` of one tower level, over the rank-two
/// twist lattice generated by the defining divisor class and the
/// polarization.
struct ProductAmbient<'a> {
    tower: &'a Tower,
    prev: usize,
    elliptic_degree: u64,
    euler_term: u64,
}

impl AmbientChi for ProductAmbient<'_> {
    fn dim(&self) -> usize {
        self.tower.levels[self.prev].dim + 2
    }

    fn chi(&self, a: usize, twist: &TwistIndex) -> BigInt {
        let (i, j) = (twist.0[0], twist.0[1]);
        let m = self.tower.m;
        let prev = PrevFactor {
            tower: self.tower,
            idx: self.prev,
        };
        let elliptic = EllipticFactor {
            degree: self.elliptic_degree,
        };
        chi_product(
            &[&prev, &elliptic, &elliptic],
            &[i + j, (m - 1) * i + j, self.euler_term * i + j],
            a,
        )
    }
}

impl Tower {
    /// Builds the tower from raw parameters: one curve level plus one
    /// product level per `(elliptic_degree, euler_term)` pair. Fails with
    /// `InconsistentChi` if any solved middle row is impossible.
    pub fn assemble(
        m: u64,
        genus: u64,
        curve_degree: u64,
        products: &[(u64, u64)],
    ) -> Result<Tower> {
        let mut tower = Tower {
            m,
            levels: vec![TowerLevel {
                dim: 1,
                kind: LevelKind::Curve {
                    genus,
                    degree: curve_degree,
                },
                diamond: curve_diamond(genus),
                table: RefCell::new(ChiTable::new()),
            }],
        };
        for &(elliptic_degree, euler_term) in products {
            tower.push_level(elliptic_degree, euler_term)?;
        }
        Ok(tower)
    }

    fn push_level(&mut self, elliptic_degree: u64, euler_term: u64) -> Result<()> {
        let idx = self.levels.len();
        let n = idx + 1;
        let elliptic = curve_diamond(1);
        let product = self.levels[idx - 1]
            .diamond
            .kunneth(&elliptic)
            .kunneth(&elliptic);
        // below the middle the hypersurface inherits the ambient product;
        // above it duality applies; the middle row comes from χ
        let mut dia = HodgeDiamond::from_fn(n, |p, q| {
            if p + q < n {
                product.get(p, q).clone()
            } else if p + q > n {
                product.get(n - p, n - q).clone()
            } else {
                BigInt::from(0)
            }
        });
        self.levels.push(TowerLevel {
            dim: n,
            kind: LevelKind::Product {
                elliptic_degree,
                euler_term,
            },
            diamond: HodgeDiamond::zero(n),
            table: RefCell::new(ChiTable::new()),
        });
        let chis: Vec<BigInt> = (0..=n).map(|p| self.level_chi_full(idx, p, 0, 0)).collect();
        let row = middle_row_from_chi(n, &dia, &chis)?;
        for (p, v) in row.into_iter().enumerate() {
            dia.set(p, n - p, v);
        }
        self.levels[idx].diamond = dia;
        Ok(())
    }

    /// `χ(X_level, Ω^a ⊗ L^{-twist})` for the level's own polarization.
    fn level_chi(&self, idx: usize, a: usize, twist: u64) -> BigInt {
        match self.levels[idx].kind {
            LevelKind::Curve { genus, degree } => chi_curve(genus, degree, a, twist).unwrap(),
            LevelKind::Product { .. } => self.level_chi_full(idx, a, 0, twist),
        }
    }

    /// `χ(X_level, Ω^a ⊗ P^{-i} ⊗ Q^{-j})` over the level's own rank-two
    /// lattice; product levels only.
    fn level_chi_full(&self, idx: usize, a: usize, i: u64, j: u64) -> BigInt {
        let LevelKind::Product {
            elliptic_degree,
            euler_term,
        } = self.levels[idx].kind
        else {
            unreachable!("level one has no ambient lattice")
        };
        let ambient = ProductAmbient {
            tower: self,
            prev: idx - 1,
            elliptic_degree,
            euler_term,
        };
        let divisor = TwistIndex(vec![1, 0]);
        let mut table = self.levels[idx].table.borrow_mut();
        table
            .chi_hypersurface(&ambient, &divisor, a, &TwistIndex(vec![i, j]))
            .expect("form degree bounded by level dimension")
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// The exact diamond of level `level` (1-based, equal to its dimension).
    pub fn diamond(&self, level: usize) -> &HodgeDiamond {
        &self.levels[level - 1].diamond
    }

    pub fn top(&self) -> &HodgeDiamond {
        &self.levels[self.levels.len() - 1].diamond
    }

    /// `χ(Ω^a ⊗ L^{-twist})` at a level, `L` its polarization (1-based).
    pub fn chi(&self, level: usize, a: usize, twist: u64) -> BigInt {
        self.level_chi(level - 1, a, twist)
    }

    /// The recipe prefix that rebuilds this tower.
    pub fn steps(&self) -> Vec<Step> {
        self.levels
            .iter()
            .map(|l| match l.kind {
                LevelKind::Curve { genus, degree } => Step::Curve { genus, degree },
                LevelKind::Product {
                    elliptic_degree,
                    euler_term,
                } => Step::TowerLevel {
                    elliptic_degree,
                    euler_term,
                },
            })
            .collect()
    }
}

/// Builds the tower for a plan and checks the planned congruences hold:
/// border residues per level, `χ(O) ≡ euler_term` and `χ(L^{-1}) ≡ 1`.
pub fn build_tower(plan: &OuterPlan) -> Result<Tower> {
    let products: Vec<(u64, u64)> = plan
        .levels
        .iter()
        .map(|l| (l.elliptic_degree, l.euler_term))
        .collect();
    let tower = Tower::assemble(plan.m, plan.genus, plan.curve_degree, &products)?;
    let m = plan.m;
    for level in 1..=plan.n {
        let targets = if level == 1 {
            std::slice::from_ref(&plan.curve_target)
        } else {
            &plan.levels[level - 2].targets
        };
        let dia = tower.diamond(level);
        for (p, &want) in targets.iter().enumerate() {
            let got = dia.residue(p + 1, 0, m);
            if got != want {
                return Err(Error::InconsistentChi(format!(
                    "level {level} border entry h^({},0) is {got}, planned {want} (mod {m})",
                    p + 1
                )));
            }
        }
        let chi_dual = tower.chi(level, 0, 1);
        if residue_of(&chi_dual, m) != 1 % m {
            return Err(Error::InconsistentChi(format!(
                "level {level} has χ(L^-1) = {chi_dual}, expected 1 (mod {m})"
            )));
        }
        if level >= 2 {
            let euler_term = plan.levels[level - 2].euler_term;
            let chi_o = tower.chi(level, 0, 0);
            if residue_of(&chi_o, m) != euler_term % m {
                return Err(Error::InconsistentChi(format!(
                    "level {level} has χ(O) = {chi_o}, expected {euler_term} (mod {m})"
                )));
            }
        }
        if !dia.validate(true).is_empty() {
            return Err(Error::InconsistentChi(format!(
                "level {level} diamond fails validation"
            )));
        }
    }
    Ok(tower)
}

fn residue_of(v: &BigInt, m: u64) -> u64 {
    use num_integer::Integer;
    u64::try_from(v.mod_floor(&BigInt::from(m))).unwrap()
}

/// One step of a construction recipe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Curve { genus: u64, degree: u64 },
    TowerLevel { elliptic_degree: u64, euler_term: u64 },
    BlowupPoint,
    BlowupProj { base_dim: usize },
    BlowupBundle { r: usize, s: usize, degree: u64 },
}

/// A serializable construction: one curve, then tower levels, then
/// blow-ups. Evaluation is deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recipe {
    pub n: usize,
    pub m: u64,
    pub steps: Vec<Step>,
}

/// Blows up the state so that `l^{r,s}` gains exactly one modulo `m` while
/// every later index in the order is unchanged modulo `m`: `m` point +
/// `P^{s-r+1}` pairs plant the centers, then one degree-`s-r+2` bundle
/// blow-up and `m-1` degree-one ones.
pub fn apply_incr(
    dia: &HodgeDiamond,
    m: u64,
    r: usize,
    s: usize,
) -> Result<(HodgeDiamond, Vec<Step>)> {
    let n = dia.dim();
    if !(1 <= r && r <= s && s <= n.saturating_sub(1) && r + s <= n) {
        return Err(Error::IndexOutOfI { p: r, q: s, n });
    }
    let mut out = dia.clone();
    let mut steps = Vec::new();
    let base_dim = s - r + 1;
    let point = proj_space_diamond(0);
    let plane = proj_space_diamond(base_dim);
    for _ in 0..m {
        out = out.blow_up(&point, n)?;
        steps.push(Step::BlowupPoint);
        out = out.blow_up(&plane, n - base_dim)?;
        steps.push(Step::BlowupProj { base_dim });
    }
    let codim = n - s + 1;
    for count in 0..m {
        let degree = if count == 0 { (s - r) as u64 + 2 } else { 1 };
        let center = bundle_center_diamond(&BundleCenterSpec { r, s, degree })?;
        out = out.blow_up(&center, codim)?;
        steps.push(Step::BlowupBundle { r, s, degree });
    }
    Ok((out, steps))
}

/// The per-index blow-up counts chosen by the scheduler, in the descending
/// processing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncrSchedule {
    pub entries: Vec<((usize, usize), u64)>,
}

/// Walks the inner indices in descending order and applies as many
/// increments at each as the target demands. Counts are recomputed from
/// the exact current diamond, so lower-order side effects of earlier steps
/// are absorbed automatically.
pub fn schedule_inner(
    dia: &mut HodgeDiamond,
    target: &ResidueTarget,
) -> Result<(IncrSchedule, Vec<Step>)> {
    let n = dia.dim();
    assert_eq!(n, target.dim());
    let m = target.modulus();
    let mut entries = Vec::new();
    let mut steps = Vec::new();
    for &(p, q) in inner_indices(n).iter().rev() {
        let want = (target.residue(p, q) + m - target.residue(p - 1, q - 1)) % m;
        let have = (dia.residue(p, q, m) + m - dia.residue(p - 1, q - 1, m)) % m;
        let count = (want + m - have) % m;
        for _ in 0..count {
            let (next, s) = apply_incr(dia, m, p, q)?;
            *dia = next;
            steps.extend(s);
        }
        entries.push(((p, q), count));
    }
    Ok((IncrSchedule { entries }, steps))
}

/// Positions where the diamond misses the target modulo `m`; empty means
/// every congruence holds.
pub fn congruence_mismatches(dia: &HodgeDiamond, target: &ResidueTarget) -> Vec<(usize, usize)> {
    let n = dia.dim();
    let m = target.modulus();
    let mut out = Vec::new();
    for p in 0..=n {
        for q in 0..=n {
            if dia.residue(p, q, m) != target.residue(p, q) {
                out.push((p, q));
            }
        }
    }
    out
}

/// End to end: plan and build the tower for the border residues, then
/// schedule blow-ups for the interior. The returned exact diamond matches
/// the target modulo `m` at every position; this is re-checked before
/// returning.
pub fn construct(target: &ResidueTarget) -> Result<(Recipe, HodgeDiamond)> {
    let plan = plan_outer(target.dim(), target.modulus(), &target.outer());
    let tower = build_tower(&plan)?;
    let mut dia = tower.top().clone();
    let mut steps = tower.steps();
    let (_, inner_steps) = schedule_inner(&mut dia, target)?;
    steps.extend(inner_steps);
    let recipe = Recipe {
        n: target.dim(),
        m: target.modulus(),
        steps,
    };
    let bad = congruence_mismatches(&dia, target);
    if let Some(&(p, q)) = bad.first() {
        return Err(Error::InconsistentChi(format!(
            "constructed diamond misses target at ({p}, {q})"
        )));
    }
    if !dia.validate(true).is_empty() {
        return Err(Error::InconsistentChi(
            "constructed diamond fails validation".into(),
        ));
    }
    Ok((recipe, dia))
}

/// Independent re-evaluation of a recipe: rebuild the tower from the
/// recorded parameters and replay the blow-ups. Structural violations are
/// reported as `MalformedRecipe`.
pub fn eval_recipe(recipe: &Recipe) -> Result<HodgeDiamond> {
    if recipe.n < 1 {
        return Err(Error::MalformedRecipe("dimension must be at least 1".into()));
    }
    if recipe.m < 2 {
        return Err(Error::MalformedRecipe("modulus must be at least 2".into()));
    }
    let n = recipe.n;
    let mut steps = recipe.steps.iter().peekable();
    let Some(&&Step::Curve { genus, degree }) = steps.peek() else {
        return Err(Error::MalformedRecipe(
            "the first step must be the base curve".into(),
        ));
    };
    steps.next();
    let mut products = Vec::new();
    while let Some(&&Step::TowerLevel {
        elliptic_degree,
        euler_term,
    }) = steps.peek()
    {
        products.push((elliptic_degree, euler_term));
        steps.next();
    }
    if 1 + products.len() != n {
        return Err(Error::MalformedRecipe(format!(
            "tower has {} levels but the header says dimension {n}",
            1 + products.len()
        )));
    }
    let tower = Tower::assemble(recipe.m, genus, degree, &products)?;
    let mut dia = tower.top().clone();
    for step in steps {
        match *step {
            Step::Curve { .. } | Step::TowerLevel { .. } => {
                return Err(Error::MalformedRecipe(
                    "curve and tower steps must precede all blow-ups".into(),
                ));
            }
            Step::BlowupPoint => {
                dia = dia.blow_up(&proj_space_diamond(0), n)?;
            }
            Step::BlowupProj { base_dim } => {
                if base_dim + 1 > n {
                    return Err(Error::MalformedRecipe(format!(
                        "projective center of dimension {base_dim} does not fit in dimension {n}"
                    )));
                }
                dia = dia.blow_up(&proj_space_diamond(base_dim), n - base_dim)?;
            }
            Step::BlowupBundle { r, s, degree } => {
                if !(1 <= r && r <= s && s <= n) {
                    return Err(Error::MalformedRecipe(format!(
                        "bundle center (r={r}, s={s}) invalid in dimension {n}"
                    )));
                }
                if degree == 0 {
                    return Err(Error::MalformedRecipe(
                        "bundle center degree must be positive".into(),
                    ));
                }
                let center = bundle_center_diamond(&BundleCenterSpec { r, s, degree })?;
                dia = dia.blow_up(&center, n - s + 1)?;
            }
        }
    }
    Ok(dia)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diamond::precedes;

    fn target(n: usize, m: u64, entries: &[(usize, usize, u64)]) -> ResidueTarget {
        ResidueTarget::new(n, m, entries).unwrap()
    }

    #[test]
    fn quarter_counts() {
        assert_eq!(quarter_indices(1), vec![(0, 0), (0, 1)]);
        assert_eq!(quarter_indices(2).len(), 4);
        assert_eq!(quarter_indices(3).len(), 6);
    }

    #[test]
    fn target_validation() {
        assert!(ResidueTarget::new(2, 1, &[]).is_err());
        assert!(ResidueTarget::new(0, 2, &[]).is_err());
        assert!(ResidueTarget::new(2, 3, &[(1, 0, 1)]).is_err());
        assert!(ResidueTarget::new(2, 3, &[(1, 1, 3)]).is_err());
        assert!(ResidueTarget::new(2, 3, &[(0, 0, 2)]).is_err());
        assert!(ResidueTarget::new(2, 3, &[(0, 1, 1), (0, 1, 2)]).is_err());
        assert!(ResidueTarget::new(2, 3, &[(2, 2, 1)]).is_err());

        let t = target(2, 3, &[(0, 1, 2)]);
        assert_eq!(t.residue(1, 0), 2);
        assert_eq!(t.residue(1, 2), 2);
        assert_eq!(t.residue(0, 0), 1);
        assert_eq!(t.residue(2, 2), 1);
        assert_eq!(t.outer(), vec![2, 0]);
    }

    #[test]
    fn k_recursion_example() {
        assert_eq!(k_recursion(&[1, 0]), vec![-1, 1]);
    }

    #[test]
    fn plan_minimizes_curve_choices() {
        let plan = plan_outer(1, 5, &[2]);
        assert_eq!(plan.genus, 2);
        assert_eq!(plan.curve_degree, 8);
        assert!(plan.levels.is_empty());
    }

    #[test]
    fn plan_euler_term() {
        let plan = plan_outer(2, 3, &[0, 1]);
        assert_eq!(plan.levels.len(), 1);
        assert_eq!(plan.levels[0].euler_term, 2);
        assert_eq!(plan.levels[0].elliptic_degree, 4);
    }

    #[test]
    fn plan_k_values() {
        let plan = plan_outer(3, 5, &[1, 0, 3]);
        assert_eq!(plan.levels[1].k_values, vec![-1, 1]);
        assert_eq!(plan.levels[0].targets, vec![4, 1]);
    }

    #[test]
    fn tower_level_one_is_the_curve() {
        let plan = plan_outer(1, 5, &[2]);
        let tower = build_tower(&plan).unwrap();
        assert_eq!(tower.top(), &curve_diamond(2));
    }

    #[test]
    fn tower_border_gains_two_per_level() {
        for m in [2, 3, 5] {
            for t in 0..m {
                let plan = plan_outer(2, m, &[t % m, (t + 1) % m]);
                let tower = build_tower(&plan).unwrap();
                let below = tower.diamond(1).get(1, 0).clone();
                let above = tower.diamond(2).get(1, 0).clone();
                assert_eq!(above, below + BigInt::from(2));
            }
        }
    }

    #[test]
    fn tower_euler_congruences_hold() {
        // build_tower re-checks χ(O) ≡ euler_term and χ(L^{-1}) ≡ 1 itself;
        // failure would surface as InconsistentChi here
        for m in [2, 3, 5, 7] {
            let outer: Vec<u64> = (0..4).map(|p| (p as u64 * 3 + 1) % m).collect();
            let plan = plan_outer(4, m, &outer);
            build_tower(&plan).unwrap();
        }
    }

    #[test]
    fn incr_adjusts_surface_interior() {
        let plan = plan_outer(2, 3, &[0, 0]);
        let tower = build_tower(&plan).unwrap();
        let before = tower.top();
        let (after, steps) = apply_incr(before, 3, 1, 1).unwrap();
        let m = BigInt::from(3);
        use num_integer::Integer;
        let dl = (after.get(1, 1) - before.get(1, 1)).mod_floor(&m);
        assert_eq!(dl, BigInt::from(1));
        // m point/proj pairs, then m bundle blow-ups
        assert_eq!(steps.len(), 2 * 3 + 3);
        assert_eq!(steps[0], Step::BlowupPoint);
        assert_eq!(steps[1], Step::BlowupProj { base_dim: 1 });
        assert_eq!(steps[6], Step::BlowupBundle { r: 1, s: 1, degree: 2 });
    }

    #[test]
    fn incr_preserves_later_indices() {
        for (n, m, r, s) in [(3usize, 4u64, 1usize, 2usize), (4, 3, 1, 2)] {
            let outer: Vec<u64> = (0..n).map(|p| p as u64 % m).collect();
            let tower = build_tower(&plan_outer(n, m, &outer)).unwrap();
            let before = tower.top();
            let (after, _) = apply_incr(before, m, r, s).unwrap();
            let lb = before.primitive();
            let la = after.primitive();
            let bm = BigInt::from(m);
            use num_integer::Integer;
            assert_eq!(
                (la.get(r, s) - lb.get(r, s)).mod_floor(&bm),
                BigInt::from(1)
            );
            for &(p, q) in inner_indices(n).iter() {
                if precedes((r, s), (p, q)) {
                    assert_eq!(
                        (la.get(p, q) - lb.get(p, q)).mod_floor(&bm),
                        BigInt::from(0),
                        "n={n} m={m} ({r},{s}) disturbed ({p},{q})"
                    );
                }
            }
        }
    }

    #[test]
    fn incr_rejects_outside_indices() {
        let dia = proj_space_diamond(2);
        assert!(matches!(
            apply_incr(&dia, 2, 2, 2),
            Err(Error::IndexOutOfI { .. })
        ));
        assert!(matches!(
            apply_incr(&dia, 2, 0, 1),
            Err(Error::IndexOutOfI { .. })
        ));
    }

    #[test]
    fn schedule_on_met_target_is_all_zero() {
        let t = target(2, 2, &[(0, 1, 0), (0, 2, 1), (1, 1, 0)]);
        let (recipe, dia) = construct(&t).unwrap();
        let mut again = dia.clone();
        let (schedule, steps) = schedule_inner(&mut again, &t).unwrap();
        assert!(steps.is_empty());
        assert!(schedule.entries.iter().all(|&(_, c)| c == 0));
        assert_eq!(again, dia);
        assert!(!recipe.steps.is_empty());
    }

    #[test]
    fn schedule_processes_descending() {
        let mut dia = proj_space_diamond(3);
        let t = target(3, 2, &[]);
        let (schedule, _) = schedule_inner(&mut dia, &t).unwrap();
        let order: Vec<(usize, usize)> = schedule.entries.iter().map(|e| e.0).collect();
        assert_eq!(order, vec![(1, 2), (1, 1)]);
    }

    #[test]
    fn schedule_single_increment() {
        let mut dia = proj_space_diamond(2);
        let t = target(2, 2, &[(1, 1, 0)]);
        // current l^{1,1} = 0, target l = (0 - 1) mod 2 = 1
        let (schedule, steps) = schedule_inner(&mut dia, &t).unwrap();
        assert_eq!(schedule.entries, vec![((1, 1), 1)]);
        assert!(!steps.is_empty());
        assert_eq!(dia.residue(1, 1, 2), 0);
    }

    #[test]
    fn construct_curve_case() {
        let t = target(1, 5, &[(0, 1, 2)]);
        let (recipe, dia) = construct(&t).unwrap();
        assert_eq!(dia, curve_diamond(2));
        assert_eq!(
            recipe.steps,
            vec![Step::Curve { genus: 2, degree: 8 }]
        );
    }

    #[test]
    fn construct_even_surface() {
        let t = target(2, 2, &[]);
        let (_, dia) = construct(&t).unwrap();
        assert_eq!(dia.residue(1, 0, 2), 0);
        assert_eq!(dia.residue(2, 0, 2), 0);
        assert_eq!(dia.residue(1, 1, 2), 0);
        assert_eq!(dia.residue(0, 0, 2), 1);
    }

    #[test]
    fn construct_exhaustive_small() {
        for (n, m) in [(1usize, 3u64), (2, 2), (2, 3)] {
            let free: Vec<(usize, usize)> = quarter_indices(n)
                .into_iter()
                .filter(|&pq| pq != (0, 0))
                .collect();
            let total = (m as usize).pow(free.len() as u32);
            for code in 0..total {
                let mut c = code;
                let entries: Vec<(usize, usize, u64)> = free
                    .iter()
                    .map(|&(p, q)| {
                        let r = (c % m as usize) as u64;
                        c /= m as usize;
                        (p, q, r)
                    })
                    .collect();
                let t = target(n, m, &entries);
                let (_, dia) = construct(&t).unwrap();
                assert!(congruence_mismatches(&dia, &t).is_empty());
                assert!(dia.validate(true).is_empty());
            }
        }
    }

    #[test]
    fn eval_matches_construct() {
        let t = target(3, 3, &[(0, 1, 2), (0, 3, 1), (1, 2, 2)]);
        let (recipe, dia) = construct(&t).unwrap();
        assert_eq!(eval_recipe(&recipe).unwrap(), dia);
    }

    #[test]
    fn eval_single_curve() {
        let recipe = Recipe {
            n: 1,
            m: 5,
            steps: vec![Step::Curve { genus: 2, degree: 8 }],
        };
        assert_eq!(eval_recipe(&recipe).unwrap(), curve_diamond(2));
    }

    #[test]
    fn eval_point_blowup_on_curve_is_noop() {
        let recipe = Recipe {
            n: 1,
            m: 5,
            steps: vec![Step::Curve { genus: 2, degree: 8 }, Step::BlowupPoint],
        };
        assert_eq!(eval_recipe(&recipe).unwrap(), curve_diamond(2));
    }

    #[test]
    fn eval_rejects_malformed() {
        let err = eval_recipe(&Recipe {
            n: 1,
            m: 5,
            steps: vec![Step::BlowupPoint],
        })
        .unwrap_err();
        assert!(matches!(err, Error::MalformedRecipe(_)));

        let err = eval_recipe(&Recipe {
            n: 2,
            m: 5,
            steps: vec![Step::Curve { genus: 0, degree: 5 }],
        })
        .unwrap_err();
        assert!(matches!(err, Error::MalformedRecipe(_)));

        let err = eval_recipe(&Recipe {
            n: 1,
            m: 5,
            steps: vec![
                Step::Curve { genus: 0, degree: 5 },
                Step::BlowupPoint,
                Step::Curve { genus: 1, degree: 5 },
            ],
        })
        .unwrap_err();
        assert!(matches!(err, Error::MalformedRecipe(_)));
    }
}

//! First cohomology of a finite group acting on a finite group.
//!
//! A [`GammaGroup`] is a coefficient group `A` together with an action of a
//! symmetry group `Γ` by automorphisms. A 1-cocycle is a map `a: Γ → A`
//! with `a(st) = a(s)·(s·a(t))`; two cocycles are cohomologous when
//! `a'(s) = b⁻¹·a(s)·(s·b)` for some witness `b ∈ A`. This module
//! enumerates the full cocycle set, partitions it into classes, computes
//! induced and inflation maps, factors a cocycle through a finite-index
//! quotient of `Γ`, and splits cocycles by averaging when `|Γ|` and `|A|`
//! are coprime.
//!
//! Everything is exhaustive: cocycles are found by extending values on a
//! generating sequence of `Γ` and then re-checking the identity on all of
//! `Γ × Γ`, and coboundary witnesses are found by trying every element
//! of `A`.

use crate::group::{FiniteGroup, GroupHom, Subgroup};
use crate::{Budget, Error, Result};
use num_bigint::BigUint;
use std::fmt;
use std::sync::Arc;

/// A finite group `A` with an action of a finite group `Γ` by
/// automorphisms.
pub struct GammaGroup {
    gamma: Arc<FiniteGroup>,
    coeff: Arc<FiniteGroup>,
    /// Row-major: `action[s * |A| + a]` is `s · a`.
    action: Vec<u16>,
}

impl fmt::Debug for GammaGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GammaGroup({} acting on {})",
            self.gamma.label(),
            self.coeff.label()
        )
    }
}

impl GammaGroup {
    /// Validates that every symmetry acts as an automorphism of the
    /// coefficient group and that the action law holds.
    pub fn new(
        gamma: &Arc<FiniteGroup>,
        coeff: &Arc<FiniteGroup>,
        action: Vec<usize>,
    ) -> Result<Self> {
        let (ng, na) = (gamma.order(), coeff.order());
        if action.len() != ng * na {
            return Err(Error::InvalidGroup(format!(
                "action table has {} entries, expected {}",
                action.len(),
                ng * na
            )));
        }
        if action.iter().any(|&v| v >= na) {
            return Err(Error::InvalidGroup("action value out of range".into()));
        }
        let m = GammaGroup {
            gamma: Arc::clone(gamma),
            coeff: Arc::clone(coeff),
            action: action.into_iter().map(|v| v as u16).collect(),
        };
        m.verify()?;
        Ok(m)
    }

    /// The trivial action of `Γ` on `A`.
    pub fn trivial_action(gamma: &Arc<FiniteGroup>, coeff: &Arc<FiniteGroup>) -> Self {
        let na = coeff.order();
        let mut action = Vec::with_capacity(gamma.order() * na);
        for _ in gamma.elements() {
            action.extend(0..na as u16);
        }
        GammaGroup {
            gamma: Arc::clone(gamma),
            coeff: Arc::clone(coeff),
            action,
        }
    }

    /// Builds the action from a homomorphism `Γ → Aut(A)` given as the
    /// automorphism maps to use per symmetry element.
    pub fn from_automorphisms(
        gamma: &Arc<FiniteGroup>,
        coeff: &Arc<FiniteGroup>,
        maps: &[&[u16]],
    ) -> Result<Self> {
        if maps.len() != gamma.order() {
            return Err(Error::InvalidGroup("one map per symmetry element required".into()));
        }
        let na = coeff.order();
        let mut action = Vec::with_capacity(gamma.order() * na);
        for m in maps {
            if m.len() != na {
                return Err(Error::InvalidGroup("automorphism map has wrong length".into()));
            }
            action.extend(m.iter().map(|&v| v as usize));
        }
        Self::new(gamma, coeff, action)
    }

    fn verify(&self) -> Result<()> {
        let (ng, na) = (self.gamma.order(), self.coeff.order());
        let e = self.gamma.identity();
        for a in 0..na {
            if self.act(e, a) != a {
                return Err(Error::InvalidGroup(format!(
                    "symmetry identity moves coefficient {a}"
                )));
            }
        }
        // Each s acts multiplicatively and bijectively.
        for s in 0..ng {
            let mut seen = vec![false; na];
            for a in 0..na {
                let sa = self.act(s, a);
                if std::mem::replace(&mut seen[sa], true) {
                    return Err(Error::InvalidGroup(format!(
                        "symmetry {s} does not act bijectively"
                    )));
                }
            }
            for a in 0..na {
                let sa = self.act(s, a);
                for b in 0..na {
                    if self.act(s, self.coeff.mul(a, b)) != self.coeff.mul(sa, self.act(s, b)) {
                        return Err(Error::InvalidGroup(format!(
                            "symmetry {s} is not an automorphism at ({a},{b})"
                        )));
                    }
                }
            }
        }
        // Action law act(st, a) = act(s, act(t, a)).
        for s in 0..ng {
            for t in 0..ng {
                let st = self.gamma.mul(s, t);
                for a in 0..na {
                    if self.act(st, a) != self.act(s, self.act(t, a)) {
                        return Err(Error::InvalidGroup(format!(
                            "action law fails at ({s},{t},{a})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> &Arc<FiniteGroup> {
        &self.gamma
    }

    pub fn coeff(&self) -> &Arc<FiniteGroup> {
        &self.coeff
    }

    #[inline]
    pub fn act(&self, s: usize, a: usize) -> usize {
        self.action[s * self.coeff.order() + a] as usize
    }

    pub fn is_trivial_action(&self) -> bool {
        (0..self.gamma.order())
            .all(|s| (0..self.coeff.order()).all(|a| self.act(s, a) == a))
    }

    /// Elements of `A` fixed by every symmetry.
    pub fn fixed_subgroup(&self) -> Subgroup {
        let members: Vec<usize> = self
            .coeff
            .elements()
            .filter(|&a| (0..self.gamma.order()).all(|s| self.act(s, a) == a))
            .collect();
        Subgroup::new(&self.coeff, &members).expect("fixed points form a subgroup")
    }

    /// Structural equality of the symmetry groups of two instances
    /// (labels ignored). Operations joining two instances require this.
    pub fn same_gamma(&self, other: &GammaGroup) -> bool {
        same_table(&self.gamma, &other.gamma)
    }
}

pub(crate) fn same_table(a: &FiniteGroup, b: &FiniteGroup) -> bool {
    a.order() == b.order()
        && a.identity() == b.identity()
        && a.elements()
            .all(|x| a.elements().all(|y| a.mul(x, y) == b.mul(x, y)))
}

/// A map `Γ → A` satisfying the cocycle identity.
#[derive(Clone)]
pub struct Cocycle {
    parent: Arc<GammaGroup>,
    values: Vec<u16>,
}

impl fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cocycle({:?})", self.values)
    }
}

impl PartialEq for Cocycle {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}
impl Eq for Cocycle {}

impl Cocycle {
    /// Accepts a value table after checking the cocycle identity on every
    /// pair of symmetry elements.
    pub fn new(parent: &Arc<GammaGroup>, values: Vec<usize>) -> Result<Self> {
        let ng = parent.gamma().order();
        if values.len() != ng {
            return Err(Error::InvalidGroup(format!(
                "cocycle has {} values for a symmetry group of order {ng}",
                values.len()
            )));
        }
        if values.iter().any(|&v| v >= parent.coeff().order()) {
            return Err(Error::InvalidGroup("cocycle value out of range".into()));
        }
        let c = Cocycle {
            parent: Arc::clone(parent),
            values: values.into_iter().map(|v| v as u16).collect(),
        };
        if let Some((s, t)) = c.identity_failure() {
            return Err(Error::Hypothesis(format!(
                "cocycle identity fails at ({s},{t})"
            )));
        }
        Ok(c)
    }

    /// The constant-identity cocycle.
    pub fn trivial(parent: &Arc<GammaGroup>) -> Self {
        Cocycle {
            parent: Arc::clone(parent),
            values: vec![parent.coeff().identity() as u16; parent.gamma().order()],
        }
    }

    fn identity_failure(&self) -> Option<(usize, usize)> {
        let m = &self.parent;
        let gamma = m.gamma();
        let a = m.coeff();
        for s in gamma.elements() {
            for t in gamma.elements() {
                let st = gamma.mul(s, t);
                let rhs = a.mul(self.value(s), m.act(s, self.value(t)));
                if self.value(st) != rhs {
                    return Some((s, t));
                }
            }
        }
        None
    }

    pub fn parent(&self) -> &Arc<GammaGroup> {
        &self.parent
    }

    #[inline]
    pub fn value(&self, s: usize) -> usize {
        self.values[s] as usize
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        let e = self.parent.coeff().identity() as u16;
        self.values.iter().all(|&v| v == e)
    }

    /// The coboundary of `b`: the cocycle `s ↦ b⁻¹·(s·b)`.
    pub fn coboundary(parent: &Arc<GammaGroup>, b: usize) -> Self {
        let a = parent.coeff();
        let values = parent
            .gamma()
            .elements()
            .map(|s| a.mul(a.inv(b), parent.act(s, b)) as u16)
            .collect();
        Cocycle { parent: Arc::clone(parent), values }
    }
}

/// All cocycles of `m`, in lexicographic order of their value tables.
///
/// Values are enumerated on a generating sequence of `Γ` and extended
/// through the multiplication table, which cuts the search from
/// `|A|^|Γ|` to `|A|^(#generators)`; each surviving candidate is
/// re-verified on all of `Γ × Γ`.
pub fn enumerate_z1(m: &Arc<GammaGroup>, budget: &Budget) -> Result<Vec<Cocycle>> {
    let gamma = m.gamma();
    let a = m.coeff();
    let (ng, na) = (gamma.order(), a.order());
    let gens = gamma.generating_sequence();
    let k = gens.len();

    let candidates = (na as u128).pow(k as u32);
    budget.admit(candidates.saturating_mul((ng * (k + 1)) as u128 + (ng * ng) as u128))?;

    if k == 0 {
        return Ok(vec![Cocycle::trivial(m)]);
    }

    let mut found: Vec<Vec<u16>> = Vec::new();
    let mut choice = vec![0usize; k];
    'outer: loop {
        if let Some(values) = extend_cocycle(m, &gens, &choice) {
            found.push(values);
        }
        for i in (0..k).rev() {
            choice[i] += 1;
            if choice[i] < na {
                continue 'outer;
            }
            choice[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    found.sort();
    let out: Vec<Cocycle> = found
        .into_iter()
        .map(|values| Cocycle { parent: Arc::clone(m), values })
        .collect();
    // Extension plus the full re-check makes acceptance unconditional.
    for c in &out {
        debug_assert!(c.identity_failure().is_none());
    }
    Ok(out)
}

/// Extends generator values to a full cocycle table, or reports that no
/// extension exists. The extension rule is the cocycle identity itself:
/// `a(x·g) = a(x)·(x·a(g))`. The result is verified on all pairs.
fn extend_cocycle(m: &GammaGroup, gens: &[usize], images: &[usize]) -> Option<Vec<u16>> {
    let gamma = m.gamma();
    let a = m.coeff();
    let ng = gamma.order();
    let unset = u16::MAX;
    let mut values = vec![unset; ng];
    values[gamma.identity()] = a.identity() as u16;
    let mut frontier = vec![gamma.identity()];
    while let Some(x) = frontier.pop() {
        for (i, &g) in gens.iter().enumerate() {
            let xg = gamma.mul(x, g);
            let v = a.mul(values[x] as usize, m.act(x, images[i])) as u16;
            if values[xg] == unset {
                values[xg] = v;
                frontier.push(xg);
            } else if values[xg] != v {
                return None;
            }
        }
    }
    debug_assert!(values.iter().all(|&v| v != unset));
    // Full verification; extension along generators is not sufficient.
    for s in 0..ng {
        for t in 0..ng {
            let st = gamma.mul(s, t);
            if values[st] as usize != a.mul(values[s] as usize, m.act(s, values[t] as usize)) {
                return None;
            }
        }
    }
    Some(values)
}

/// Searches `A` exhaustively for a witness `b` with
/// `a'(s) = b⁻¹·a(s)·(s·b)` for all `s`. The least witness is returned.
pub fn cohomologous(a: &Cocycle, a2: &Cocycle) -> Result<Option<usize>> {
    if !Arc::ptr_eq(a.parent(), a2.parent()) {
        return Err(Error::Hypothesis("cocycles have different parents".into()));
    }
    let m = a.parent();
    let grp = m.coeff();
    let gamma = m.gamma();
    'witness: for b in grp.elements() {
        let binv = grp.inv(b);
        for s in gamma.elements() {
            let rhs = grp.mul(grp.mul(binv, a.value(s)), m.act(s, b));
            if a2.value(s) != rhs {
                continue 'witness;
            }
        }
        return Ok(Some(b));
    }
    Ok(None)
}

/// The cocycle set partitioned into cohomology classes.
pub struct H1Classes {
    parent: Arc<GammaGroup>,
    cocycles: Vec<Cocycle>,
    /// Class index of each cocycle.
    class_of: Vec<usize>,
    /// Index (into `cocycles`) of the lexicographically least member of
    /// each class; classes are ordered by that representative.
    reps: Vec<usize>,
}

impl fmt::Debug for H1Classes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H1Classes({} cocycles, {} classes)",
            self.cocycles.len(),
            self.reps.len()
        )
    }
}

impl H1Classes {
    pub fn parent(&self) -> &Arc<GammaGroup> {
        &self.parent
    }

    pub fn cocycle_count(&self) -> usize {
        self.cocycles.len()
    }

    pub fn class_count(&self) -> usize {
        self.reps.len()
    }

    pub fn cocycles(&self) -> &[Cocycle] {
        &self.cocycles
    }

    pub fn representatives(&self) -> impl Iterator<Item = &Cocycle> {
        self.reps.iter().map(|&i| &self.cocycles[i])
    }

    pub fn representative(&self, class: usize) -> &Cocycle {
        &self.cocycles[self.reps[class]]
    }

    /// Members of a class, as indices into [`cocycles`].
    ///
    /// [`cocycles`]: H1Classes::cocycles
    pub fn class_members(&self, class: usize) -> Vec<usize> {
        (0..self.cocycles.len())
            .filter(|&i| self.class_of[i] == class)
            .collect()
    }

    /// The class of the constant-identity cocycle.
    pub fn trivial_class(&self) -> usize {
        let t = Cocycle::trivial(&self.parent);
        self.class_of_cocycle(&t)
            .expect("the trivial cocycle is always present")
    }

    /// Locates the class of an arbitrary cocycle of the same parent by
    /// witness search against the representatives.
    pub fn class_of_cocycle(&self, c: &Cocycle) -> Result<usize> {
        for (k, _) in self.reps.iter().enumerate() {
            if cohomologous(self.representative(k), c)?.is_some() {
                return Ok(k);
            }
        }
        Err(Error::Check(
            "cocycle not cohomologous to any class representative".into(),
        ))
    }
}

/// Enumerates the cocycles and partitions them into cohomology classes.
pub fn h1(m: &Arc<GammaGroup>, budget: &Budget) -> Result<H1Classes> {
    let cocycles = enumerate_z1(m, budget)?;
    budget.admit(
        (cocycles.len() as u128)
            * (cocycles.len() as u128)
            * (m.coeff().order() as u128),
    )?;
    let mut class_of = vec![usize::MAX; cocycles.len()];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..cocycles.len() {
        let mut assigned = None;
        for (k, &r) in reps.iter().enumerate() {
            if cohomologous(&cocycles[r], &cocycles[i])?.is_some() {
                assigned = Some(k);
                break;
            }
        }
        class_of[i] = match assigned {
            Some(k) => k,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        };
    }
    Ok(H1Classes { parent: Arc::clone(m), cocycles, class_of, reps })
}

/// A homomorphism of coefficient groups over one and the same symmetry
/// group, commuting with both actions.
pub struct EquivariantHom {
    source: Arc<GammaGroup>,
    target: Arc<GammaGroup>,
    hom: GroupHom,
}

impl EquivariantHom {
    pub fn new(
        source: &Arc<GammaGroup>,
        target: &Arc<GammaGroup>,
        hom: GroupHom,
    ) -> Result<Self> {
        if !source.same_gamma(target) {
            return Err(Error::Hypothesis(
                "source and target have different symmetry groups".into(),
            ));
        }
        if !same_table(hom.source(), source.coeff()) || !same_table(hom.target(), target.coeff()) {
            return Err(Error::Hypothesis(
                "homomorphism does not join the two coefficient groups".into(),
            ));
        }
        for s in source.gamma().elements() {
            for a in source.coeff().elements() {
                if hom.apply(source.act(s, a)) != target.act(s, hom.apply(a)) {
                    return Err(Error::Hypothesis(format!(
                        "homomorphism is not equivariant at ({s},{a})"
                    )));
                }
            }
        }
        Ok(EquivariantHom {
            source: Arc::clone(source),
            target: Arc::clone(target),
            hom,
        })
    }

    pub fn source(&self) -> &Arc<GammaGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GammaGroup> {
        &self.target
    }

    pub fn hom(&self) -> &GroupHom {
        &self.hom
    }

    /// Pushes a cocycle forward through the homomorphism.
    pub fn push(&self, c: &Cocycle) -> Cocycle {
        let values = c.values().iter().map(|&v| self.hom.apply(v as usize) as u16).collect();
        Cocycle { parent: Arc::clone(&self.target), values }
    }
}

/// The map induced on cohomology classes by an equivariant homomorphism,
/// together with its kernel.
pub struct InducedH1 {
    pub source_h1: H1Classes,
    pub target_h1: H1Classes,
    /// `map[i]` is the target class of source class `i`.
    pub map: Vec<usize>,
    /// Source classes landing on the trivial target class.
    pub kernel: Vec<usize>,
}

pub fn induced_h1_map(f: &EquivariantHom, budget: &Budget) -> Result<InducedH1> {
    let source_h1 = h1(f.source(), budget)?;
    let target_h1 = h1(f.target(), budget)?;
    let mut map = Vec::with_capacity(source_h1.class_count());
    for k in 0..source_h1.class_count() {
        let image = f.push(source_h1.representative(k));
        map.push(target_h1.class_of_cocycle(&image)?);
    }
    // Well-definedness: every member of a class must land in the class of
    // its representative's image.
    for (i, c) in source_h1.cocycles().iter().enumerate() {
        let got = target_h1.class_of_cocycle(&f.push(c))?;
        if got != map[source_h1.class_of[i]] {
            return Err(Error::Check(format!(
                "induced map not well-defined on cocycle {i}"
            )));
        }
    }
    let trivial = target_h1.trivial_class();
    let kernel = (0..map.len()).filter(|&i| map[i] == trivial).collect();
    Ok(InducedH1 { source_h1, target_h1, map, kernel })
}

/// A symmetry-group quotient `Γ/N` acting on the same coefficients,
/// defined when `N` acts trivially.
pub struct QuotientGammaGroup {
    base: Arc<GammaGroup>,
    quot: Arc<GammaGroup>,
    proj: GroupHom,
}

impl QuotientGammaGroup {
    pub fn new(base: &Arc<GammaGroup>, n: &Subgroup) -> Result<Self> {
        for s in n.members() {
            for a in base.coeff().elements() {
                if base.act(s, a) != a {
                    return Err(Error::Hypothesis(format!(
                        "subgroup member {s} does not act trivially (moves {a})"
                    )));
                }
            }
        }
        let (q, proj) = crate::group::quotient(base.gamma(), n)?;
        // The quotient action through any coset representative; triviality
        // of N on A makes the choice irrelevant.
        let na = base.coeff().order();
        let mut action = vec![0usize; q.order() * na];
        let mut rep_of = vec![usize::MAX; q.order()];
        for s in base.gamma().elements() {
            let c = proj.apply(s);
            if rep_of[c] == usize::MAX {
                rep_of[c] = s;
            }
        }
        for c in 0..q.order() {
            for a in 0..na {
                action[c * na + a] = base.act(rep_of[c], a);
            }
        }
        let quot = Arc::new(GammaGroup::new(&q, base.coeff(), action)?);
        Ok(QuotientGammaGroup {
            base: Arc::clone(base),
            quot,
            proj,
        })
    }

    pub fn base(&self) -> &Arc<GammaGroup> {
        &self.base
    }

    pub fn quotient(&self) -> &Arc<GammaGroup> {
        &self.quot
    }

    pub fn projection(&self) -> &GroupHom {
        &self.proj
    }

    /// Pulls a cocycle over `Γ/N` back to `Γ` by composing with the
    /// projection.
    pub fn inflate(&self, c: &Cocycle) -> Result<Cocycle> {
        if !Arc::ptr_eq(c.parent(), &self.quot) {
            return Err(Error::Hypothesis(
                "cocycle does not live on the quotient symmetry group".into(),
            ));
        }
        let values = self
            .base
            .gamma()
            .elements()
            .map(|s| c.value(self.proj.apply(s)))
            .collect();
        Cocycle::new(&self.base, values)
    }

    /// Checks that inflation is injective on cohomology classes by
    /// inflating all representatives and testing them pairwise.
    pub fn inflation_injective_on_classes(&self, budget: &Budget) -> Result<bool> {
        let lower = h1(&self.quot, budget)?;
        let lifted: Vec<Cocycle> = lower
            .representatives()
            .map(|c| self.inflate(c))
            .collect::<Result<_>>()?;
        for i in 0..lifted.len() {
            for j in (i + 1)..lifted.len() {
                if cohomologous(&lifted[i], &lifted[j])?.is_some() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The result of factoring a cocycle through a finite-index quotient of
/// its symmetry group.
pub struct FactoredCocycle {
    /// Kernel of the action of `Γ` on `A`.
    pub g0: Subgroup,
    /// Kernel of the cocycle restricted to `g0` (there it is a
    /// homomorphism).
    pub g1: Subgroup,
    /// The normal core of `g1` in `Γ`; the cocycle is constant on its
    /// left cosets.
    pub g2: Subgroup,
    /// The quotient structure `Γ/G₂` acting on `A`.
    pub quotient: QuotientGammaGroup,
    /// The factored cocycle on `Γ/G₂`; inflating it returns the input.
    pub factored: Cocycle,
    /// `[Γ : G₂]`.
    pub index: BigUint,
    /// The guaranteed bound `(n!)^(n!)` with `n = |A|`.
    pub bound: BigUint,
}

/// Factors a cocycle through `Γ/G₂` where `G₂` is the normal core of the
/// kernel of the cocycle restricted to the action kernel. Each containment
/// and constancy claim along the way is verified, not assumed.
pub fn factor_cocycle(c: &Cocycle) -> Result<FactoredCocycle> {
    let m = c.parent();
    let gamma = m.gamma();
    let a = m.coeff();

    // G₀: elements acting trivially on A.
    let g0_members: Vec<usize> = gamma
        .elements()
        .filter(|&s| a.elements().all(|x| m.act(s, x) == x))
        .collect();
    let g0 = Subgroup::new(gamma, &g0_members)?;

    // On G₀ the cocycle identity collapses to multiplicativity; verify.
    for s in g0.members() {
        for t in g0.members() {
            if c.value(gamma.mul(s, t)) != a.mul(c.value(s), c.value(t)) {
                return Err(Error::Check(format!(
                    "restriction to the action kernel is not a homomorphism at ({s},{t})"
                )));
            }
        }
    }

    // G₁: kernel of that homomorphism.
    let g1_members: Vec<usize> = g0
        .members()
        .filter(|&s| c.value(s) == a.identity())
        .collect();
    let g1 = Subgroup::new(gamma, &g1_members)?;

    // G₂: normal core of G₁ in Γ.
    let g2 = crate::group::core_of_subgroup(&g1);

    // The cocycle must be constant on left G₂-cosets.
    for s in gamma.elements() {
        for g in g2.members() {
            if c.value(gamma.mul(s, g)) != c.value(s) {
                return Err(Error::Check(format!(
                    "cocycle not constant on the coset of {s} (moved by {g})"
                )));
            }
        }
    }

    let quotient = QuotientGammaGroup::new(m, &g2)?;
    // Transport the values along coset representatives.
    let q = quotient.quotient().gamma().clone();
    let mut values = vec![usize::MAX; q.order()];
    for s in gamma.elements() {
        let cls = quotient.projection().apply(s);
        if values[cls] == usize::MAX {
            values[cls] = c.value(s);
        } else if values[cls] != c.value(s) {
            return Err(Error::Check("coset constancy violated".into()));
        }
    }
    let factored = Cocycle::new(quotient.quotient(), values)?;

    // Inflating back must reproduce the input exactly.
    let back = quotient.inflate(&factored)?;
    if back.values() != c.values() {
        return Err(Error::Check("inflation does not reproduce the input".into()));
    }

    let index = BigUint::from(g2.index_in_parent());
    let bound = factorial_power_bound(a.order());
    if index > bound {
        return Err(Error::Check(format!(
            "factoring index {index} exceeds the structural bound {bound}"
        )));
    }

    Ok(FactoredCocycle { g0, g1, g2, quotient, factored, index, bound })
}

/// `(n!)^(n!)` as an exact integer.
pub fn factorial_power_bound(n: usize) -> BigUint {
    let fact = (1..=n as u64).map(BigUint::from).fold(BigUint::from(1u32), |x, y| x * y);
    let exp = fact.clone();
    // Exponent fits in u64 for every group this crate can hold? No: 6000!
    // does not. Exponentiate by squaring over the BigUint exponent.
    big_pow(&fact, &exp)
}

fn big_pow(base: &BigUint, exp: &BigUint) -> BigUint {
    let mut result = BigUint::from(1u32);
    let mut base = base.clone();
    let mut exp = exp.clone();
    let zero = BigUint::from(0u32);
    let one = BigUint::from(1u32);
    while exp > zero {
        if &exp & &one == one {
            result *= &base;
        }
        exp >>= 1;
        if exp > zero {
            base = &base * &base;
        }
    }
    result
}

/// For abelian coefficients of order coprime to `|Γ|`, constructs the
/// witness exhibiting any cocycle as a coboundary: `b = −u·Σ_t a(t)` with
/// `u` the inverse of `|Γ|` modulo the exponent of `A`. The witness is
/// verified before being returned.
pub fn coprime_splitting(c: &Cocycle) -> Result<usize> {
    let m = c.parent();
    let a = m.coeff();
    let gamma = m.gamma();
    if !a.is_abelian() {
        return Err(Error::Hypothesis("coefficients must be abelian".into()));
    }
    let (ng, _na) = (gamma.order(), a.order());
    if gcd_usize(ng, a.order()) != 1 {
        return Err(Error::Hypothesis(format!(
            "|Γ| = {ng} and |A| = {} are not coprime",
            a.order()
        )));
    }
    let e = a.exponent();
    let u = mod_inverse(ng % e, e).ok_or_else(|| {
        Error::Hypothesis("group order not invertible modulo the exponent".into())
    })?;
    // c_sum = Σ_t a(t); summing the cocycle identity over t gives
    // |Γ|·a(s) = c_sum − s·c_sum, so b = −u·c_sum is a witness.
    let mut c_sum = a.identity();
    for t in gamma.elements() {
        c_sum = a.mul(c_sum, c.value(t));
    }
    let b = a.inv(a.pow(c_sum, u as u64));
    // Verify: a(s) = b⁻¹·(s·b), that is, the cocycle is the coboundary
    // of b.
    let cob = Cocycle::coboundary(m, b);
    if cob.values() != c.values() {
        return Err(Error::Check(
            "constructed averaging witness fails the coboundary identity".into(),
        ));
    }
    Ok(b)
}

fn gcd_usize(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd_usize(b, a % b)
    }
}

/// Inverse of `a` modulo `m`, when it exists.
pub(crate) fn mod_inverse(a: usize, m: usize) -> Option<usize> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as usize)
}

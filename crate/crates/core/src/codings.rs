//! Explicit coding and embedding maps for finite imaginaries: twisted
//! partial-function codes, cyclic-power transport, ordered-value function
//! codes, rank sets in a prime field, subgroup-as-stabilizer codes, and
//! the rectangular (Feferman–Vaught style) decomposition of a binary
//! relation.
//!
//! Every encoder here is paired with a decoder, and `decode ∘ encode =
//! identity` is checked exhaustively at small sizes by the test suites.
//! Value sets are index sets `0..n`; where a linear order is needed it is
//! the index order, and the ordered divisible group is modeled by exact
//! `Rational64` values. Canonical serialization of a partial function is
//! its graph sorted by domain value, which is also how the symmetric-
//! group quotient on tuples of pairs is realized: sorting forgets the
//! enumeration order and nothing else.

use std::sync::Arc;

use num::rational::Rational64;

use crate::gl::is_prime;
use crate::group::{gcd, FiniteGroup};
use crate::{Error, Result};

/// A partial function between finite index sets, stored canonically as
/// its graph sorted by domain value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistCode {
    domain: usize,
    codomain: usize,
    graph: Vec<(u32, u32)>,
}

impl TwistCode {
    /// Validates ranges and functionality; the graph is sorted and
    /// deduplicated, so equal functions compare equal.
    pub fn new(domain: usize, codomain: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut graph: Vec<(u32, u32)> = pairs
            .iter()
            .map(|&(x, y)| (x as u32, y as u32))
            .collect();
        graph.sort_unstable();
        graph.dedup();
        for w in graph.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Hypothesis(format!(
                    "two values at domain point {}",
                    w[0].0
                )));
            }
        }
        for &(x, y) in &graph {
            if x as usize >= domain || y as usize >= codomain {
                return Err(Error::Hypothesis(format!(
                    "graph pair ({x}, {y}) outside {domain} × {codomain}"
                )));
            }
        }
        Ok(TwistCode { domain, codomain, graph })
    }

    /// The nowhere-defined function.
    pub fn empty(domain: usize, codomain: usize) -> Self {
        TwistCode { domain, codomain, graph: Vec::new() }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    /// The sorted graph.
    pub fn graph(&self) -> &[(u32, u32)] {
        &self.graph
    }

    pub fn value(&self, x: usize) -> Option<usize> {
        self.graph
            .binary_search_by_key(&(x as u32), |&(d, _)| d)
            .ok()
            .map(|i| self.graph[i].1 as usize)
    }

    pub fn is_total(&self) -> bool {
        self.graph.len() == self.domain
    }

    /// Sorted list of domain points where the function is defined.
    pub fn support(&self) -> Vec<usize> {
        self.graph.iter().map(|&(x, _)| x as usize).collect()
    }
}

/// Splits a partial function into `S₁ × S₂` (pairs encoded as
/// `v₁·|S₂| + v₂`) into its two componentwise projections with the same
/// domain. Jointly injective: [`decode_pair_twist`] reassembles the
/// input exactly.
pub fn embed_pair_twist(h: &TwistCode, s1: usize, s2: usize) -> Result<(TwistCode, TwistCode)> {
    if h.codomain() != s1 * s2 {
        return Err(Error::Hypothesis(format!(
            "codomain {} is not the product {s1} × {s2}",
            h.codomain()
        )));
    }
    let mut g1 = Vec::with_capacity(h.graph.len());
    let mut g2 = Vec::with_capacity(h.graph.len());
    for &(x, v) in &h.graph {
        g1.push((x as usize, v as usize / s2));
        g2.push((x as usize, v as usize % s2));
    }
    Ok((
        TwistCode::new(h.domain(), s1, &g1)?,
        TwistCode::new(h.domain(), s2, &g2)?,
    ))
}

/// Reassembles the output of [`embed_pair_twist`]. The two codes must
/// share the domain and the set of defined points.
pub fn decode_pair_twist(c1: &TwistCode, c2: &TwistCode) -> Result<TwistCode> {
    if c1.domain() != c2.domain() {
        return Err(Error::Hypothesis("component codes have different domains".into()));
    }
    if c1.support() != c2.support() {
        return Err(Error::Hypothesis(
            "component codes are defined at different points".into(),
        ));
    }
    let s2 = c2.codomain();
    let pairs: Vec<(usize, usize)> = c1
        .graph
        .iter()
        .zip(&c2.graph)
        .map(|(&(x, v1), &(_, v2))| (x as usize, v1 as usize * s2 + v2 as usize))
        .collect();
    TwistCode::new(c1.domain(), c1.codomain() * s2, &pairs)
}

/// The covering map `B × [1..d]^k → B^k`, `(b, (a₁..a_k)) ↦ (b^{a₁}, …,
/// b^{a_k})`, for a cyclic group `B` of order `d`. Surjective for every
/// `d` and `k`; [`CyclicCover::verify_surjective`] proves it by
/// enumeration and [`CyclicCover::preimage`] searches deterministically.
#[derive(Debug, Clone)]
pub struct CyclicCover {
    group: Arc<FiniteGroup>,
    generator: usize,
    k: usize,
}

impl CyclicCover {
    /// Rejects non-cyclic groups; the designated generator is the least
    /// element of full order. Guards `d^(k+1)` against blowup.
    pub fn new(group: &Arc<FiniteGroup>, k: usize) -> Result<Self> {
        let d = group.order();
        if k == 0 {
            return Err(Error::Hypothesis("power count must be positive".into()));
        }
        let generator = group
            .elements()
            .find(|&g| group.element_order(g) == d)
            .ok_or_else(|| Error::Hypothesis(format!(
                "group {} is not cyclic",
                group.label()
            )))?;
        let mut size: u128 = 1;
        for _ in 0..=k {
            size *= d as u128;
        }
        if size > 1_000_000 {
            return Err(Error::Guard(format!(
                "cover domain would have {size} points"
            )));
        }
        Ok(CyclicCover { group: Arc::clone(group), generator, k })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.order()
    }

    pub fn tuple_len(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> usize {
        self.generator
    }

    /// Applies the cover to `(b, exponents)`; exponents range over
    /// `1..=d`.
    pub fn apply(&self, b: usize, exps: &[usize]) -> Result<Vec<usize>> {
        let d = self.degree();
        if exps.len() != self.k {
            return Err(Error::Hypothesis("wrong exponent tuple length".into()));
        }
        if b >= d {
            return Err(Error::Hypothesis("base element out of range".into()));
        }
        if exps.iter().any(|&a| a == 0 || a > d) {
            return Err(Error::Hypothesis("exponents must lie in 1..=d".into()));
        }
        Ok(exps.iter().map(|&a| self.group.pow(b, a as u64)).collect())
    }

    /// Index of a tuple in `B^k`, row-major.
    pub fn tuple_index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.degree() + x)
    }

    /// Index of a cover-domain point `(b, exponents)`.
    pub fn domain_index(&self, b: usize, exps: &[usize]) -> usize {
        exps.iter().fold(b, |acc, &a| acc * self.degree() + (a - 1))
    }

    /// Number of cover-domain points, `d^(k+1)`.
    pub fn domain_size(&self) -> usize {
        let d = self.degree();
        d.pow(self.k as u32 + 1)
    }

    /// Decodes a cover-domain index back into `(b, exponents)`.
    pub fn domain_point(&self, mut idx: usize) -> (usize, Vec<usize>) {
        let d = self.degree();
        let mut exps = vec![0usize; self.k];
        for i in (0..self.k).rev() {
            exps[i] = idx % d + 1;
            idx /= d;
        }
        (idx, exps)
    }

    /// Checks by full enumeration that every tuple in `B^k` is hit.
    pub fn verify_surjective(&self) -> Result<()> {
        let d = self.degree();
        let targets = d.pow(self.k as u32);
        let mut hit = vec![false; targets];
        for idx in 0..self.domain_size() {
            let (b, exps) = self.domain_point(idx);
            let t = self.apply(b, &exps)?;
            hit[self.tuple_index(&t)] = true;
        }
        match hit.iter().position(|&h| !h) {
            None => Ok(()),
            Some(miss) => Err(Error::Check(format!(
                "cover misses target tuple index {miss}"
            ))),
        }
    }

    /// The least cover-domain point (base first, then exponents
    /// lexicographically) mapping onto the target tuple.
    pub fn preimage(&self, target: &[usize]) -> Result<(usize, Vec<usize>)> {
        if target.len() != self.k {
            return Err(Error::Hypothesis("wrong target tuple length".into()));
        }
        if target.iter().any(|&t| t >= self.degree()) {
            return Err(Error::Hypothesis("target entry out of range".into()));
        }
        for idx in 0..self.domain_size() {
            let (b, exps) = self.domain_point(idx);
            if self.apply(b, &exps)? == target {
                return Ok((b, exps));
            }
        }
        Err(Error::Check("cover failed to be surjective".into()))
    }
}

/// Transports a code over `B^k` to a code over the cover domain
/// `B × [1..d]^k` by composition with the cover. Distinct codes get
/// distinct images, and [`decode_twist_by_power`] inverts the embedding.
pub fn embed_twist_by_power(cover: &CyclicCover, x: &TwistCode) -> Result<TwistCode> {
    let d = cover.degree();
    let targets = d.pow(cover.tuple_len() as u32);
    if x.domain() != targets {
        return Err(Error::Hypothesis(format!(
            "code domain {} does not match B^k = {targets}",
            x.domain()
        )));
    }
    let mut pairs = Vec::new();
    for idx in 0..cover.domain_size() {
        let (b, exps) = cover.domain_point(idx);
        let t = cover.apply(b, &exps)?;
        if let Some(v) = x.value(cover.tuple_index(&t)) {
            pairs.push((idx, v));
        }
    }
    TwistCode::new(cover.domain_size(), x.codomain(), &pairs)
}

/// Inverts [`embed_twist_by_power`]. Rejects codes that are not in the
/// image: a genuine image is constant on every fiber of the cover and
/// defined on full fibers only.
pub fn decode_twist_by_power(cover: &CyclicCover, y: &TwistCode) -> Result<TwistCode> {
    if y.domain() != cover.domain_size() {
        return Err(Error::Hypothesis("code domain does not match the cover".into()));
    }
    let d = cover.degree();
    let targets = d.pow(cover.tuple_len() as u32);
    let mut values: Vec<Option<usize>> = vec![None; targets];
    let mut fiber_size = vec![0usize; targets];
    let mut defined = vec![0usize; targets];
    for idx in 0..cover.domain_size() {
        let (b, exps) = cover.domain_point(idx);
        let t = cover.tuple_index(&cover.apply(b, &exps)?);
        fiber_size[t] += 1;
        if let Some(v) = y.value(idx) {
            defined[t] += 1;
            match values[t] {
                None => values[t] = Some(v),
                Some(prev) if prev != v => {
                    return Err(Error::Hypothesis(format!(
                        "code is not constant on the fiber of tuple {t}"
                    )));
                }
                _ => {}
            }
        }
    }
    for t in 0..targets {
        if defined[t] != 0 && defined[t] != fiber_size[t] {
            return Err(Error::Hypothesis(format!(
                "code is defined on part of the fiber of tuple {t}"
            )));
        }
    }
    let pairs: Vec<(usize, usize)> = values
        .iter()
        .enumerate()
        .filter_map(|(t, v)| v.map(|v| (t, v)))
        .collect();
    TwistCode::new(targets, y.codomain(), &pairs)
}

/// Code of a total function into an ordered value set: the sorted image
/// plus the rank of each point's value within it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaCode {
    pub image: Vec<Rational64>,
    pub ranks: Vec<usize>,
}

/// Codes a total function from `0..n` into the ordered rationals as its
/// sorted image together with the ranking table, which is exactly the
/// pullback of the value order.
pub fn code_gamma_function(h: &[Rational64]) -> Result<GammaCode> {
    if h.len() > 4096 {
        return Err(Error::Guard(format!("domain of size {} too large", h.len())));
    }
    let mut image = h.to_vec();
    image.sort_unstable();
    image.dedup();
    let ranks = h
        .iter()
        .map(|v| image.binary_search(v).expect("value is in the image"))
        .collect();
    Ok(GammaCode { image, ranks })
}

/// Rebuilds the function from its code.
pub fn decode_gamma_function(code: &GammaCode) -> Result<Vec<Rational64>> {
    code.ranks
        .iter()
        .map(|&r| {
            code.image
                .get(r)
                .copied()
                .ok_or_else(|| Error::Hypothesis(format!("rank {r} outside the image")))
        })
        .collect()
}

/// A ranking table re-expressed as subsets of a prime field: point `i`
/// maps to the initial segment `{0, …, rank(i)}` of `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFieldCode {
    pub p: usize,
    pub sets: Vec<Vec<usize>>,
}

/// Least prime `≥ n` (with `2` for `n ≤ 2`), the default prime-field
/// model for rank sets.
pub fn least_prime_at_least(n: usize) -> usize {
    let mut p = n.max(2);
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Codes a ranking table into subsets of the prime field `F_p`. When no
/// prime is supplied, the least prime `≥ n` is used; a supplied prime
/// must be at least the domain size and large enough for every rank.
pub fn rank_as_prime_field_map(ranks: &[usize], p: Option<usize>) -> Result<RankFieldCode> {
    let n = ranks.len();
    let p = match p {
        Some(p) => {
            if !is_prime(p) {
                return Err(Error::Hypothesis(format!("{p} is not prime")));
            }
            if p < n {
                return Err(Error::Hypothesis(format!(
                    "prime field of size {p} is too small for a domain of size {n}"
                )));
            }
            p
        }
        None => least_prime_at_least(n),
    };
    if let Some(&max) = ranks.iter().max() {
        if max >= p {
            return Err(Error::Hypothesis(format!(
                "rank {max} does not fit below the prime {p}"
            )));
        }
    }
    let sets = ranks.iter().map(|&r| (0..=r).collect()).collect();
    Ok(RankFieldCode { p, sets })
}

/// Recovers the ranking table from its rank-set code.
pub fn decode_rank_field(code: &RankFieldCode) -> Result<Vec<usize>> {
    code.sets
        .iter()
        .map(|s| {
            let r = s.len().checked_sub(1).ok_or_else(|| {
                Error::Hypothesis("empty rank set".into())
            })?;
            if s.iter().copied().ne(0..=r) {
                return Err(Error::Hypothesis(
                    "rank set is not an initial segment".into(),
                ));
            }
            Ok(r)
        })
        .collect()
}

/// The unit group of `Z/n` as a standalone table group together with the
/// unit each element stands for.
pub fn unit_group(n: usize) -> Result<(Arc<FiniteGroup>, Vec<usize>)> {
    if n == 0 || n > 10_000 {
        return Err(Error::Guard(format!("modulus {n} outside 1..=10000")));
    }
    let units: Vec<usize> = (0..n).filter(|&x| gcd(x, n) == 1).collect();
    let m = units.len();
    let pos = |v: usize| units.binary_search(&v).expect("product of units is a unit");
    let mut mul = vec![0u16; m * m];
    for i in 0..m {
        for j in 0..m {
            mul[i * m + j] = pos(units[i] * units[j] % n) as u16;
        }
    }
    let grp = FiniteGroup::from_flat(format!("U({n})"), m, mul)?;
    Ok((Arc::new(grp), units))
}

/// Result of [`subgroup_stabilizer_code`]: the coding subset and the
/// enumerated stabilizer that certifies it.
#[derive(Debug, Clone)]
pub struct StabilizerCode {
    pub modulus: usize,
    /// The subgroup, sorted, as residues.
    pub subgroup: Vec<usize>,
    /// The coding subset `Y ⊆ Z/n`; equal to the subgroup.
    pub y: Vec<usize>,
    /// `{g unit : gY = Y}`, computed by enumeration.
    pub stabilizer: Vec<usize>,
}

/// All units `g` with `gY = Y` as subsets of `Z/n`.
pub fn stabilizer_of_subset(n: usize, y: &[usize]) -> Result<Vec<usize>> {
    if y.iter().any(|&v| v >= n) {
        return Err(Error::Hypothesis("subset entry outside Z/n".into()));
    }
    let mut sorted = y.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let units: Vec<usize> = (0..n).filter(|&x| gcd(x, n) == 1).collect();
    Ok(units
        .into_iter()
        .filter(|&g| {
            let mut image: Vec<usize> = sorted.iter().map(|&v| g * v % n).collect();
            image.sort_unstable();
            image == sorted
        })
        .collect())
}

/// Codes a subgroup `H` of the unit group of `Z/n` as the subset
/// `Y = H` of `Z/n`, and certifies `H = {g : gY = Y}` by enumerating all
/// units. Rejects member lists that are not subgroups.
pub fn subgroup_stabilizer_code(n: usize, members: &[usize]) -> Result<StabilizerCode> {
    if n == 0 || n > 10_000 {
        return Err(Error::Guard(format!("modulus {n} outside 1..=10000")));
    }
    let mut h: Vec<usize> = members.to_vec();
    h.sort_unstable();
    h.dedup();
    if h.iter().any(|&v| v >= n || gcd(v, n) != 1) {
        return Err(Error::NotSubgroup(
            "member list contains a non-unit".into(),
        ));
    }
    if !h.contains(&(1 % n)) {
        return Err(Error::NotSubgroup("member list misses the identity".into()));
    }
    for &a in &h {
        for &b in &h {
            if h.binary_search(&(a * b % n)).is_err() {
                return Err(Error::NotSubgroup(format!(
                    "member list not closed: {a}·{b} escapes"
                )));
            }
        }
    }
    // Closure under multiplication in a finite set gives inverses too.
    let stabilizer = stabilizer_of_subset(n, &h)?;
    if stabilizer != h {
        return Err(Error::Check(format!(
            "stabilizer of Y differs from the subgroup for modulus {n}"
        )));
    }
    Ok(StabilizerCode {
        modulus: n,
        subgroup: h.clone(),
        y: h,
        stabilizer,
    })
}

/// A binary relation between two finite index sets, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    m1: usize,
    m2: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn new(m1: usize, m2: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut bits = vec![false; m1 * m2];
        for &(x, y) in pairs {
            if x >= m1 || y >= m2 {
                return Err(Error::Hypothesis(format!(
                    "pair ({x}, {y}) outside {m1} × {m2}"
                )));
            }
            bits[x * m2 + y] = true;
        }
        Ok(Relation { m1, m2, bits })
    }

    /// Builds the relation from 0/1 rows, one per left point.
    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let m1 = rows.len();
        let m2 = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m2) {
            return Err(Error::Hypothesis("ragged relation rows".into()));
        }
        let bits = rows.iter().flatten().copied().collect();
        Ok(Relation { m1, m2, bits })
    }

    pub fn left_size(&self) -> usize {
        self.m1
    }

    pub fn right_size(&self) -> usize {
        self.m2
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.m2 + y]
    }

    /// Relabels the left index set along a bijection.
    pub fn relabel_left(&self, perm: &[usize]) -> Result<Relation> {
        if perm.len() != self.m1 {
            return Err(Error::Hypothesis("permutation has wrong length".into()));
        }
        let mut bits = vec![false; self.m1 * self.m2];
        for x in 0..self.m1 {
            for y in 0..self.m2 {
                bits[perm[x] * self.m2 + y] = self.contains(x, y);
            }
        }
        Ok(Relation { m1: self.m1, m2: self.m2, bits })
    }
}

/// One rectangle of a decomposition: `left × atom ⊆ R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rectangle {
    pub left: Vec<usize>,
    pub atom: Vec<usize>,
}

/// Rectangular decomposition of a relation: pairwise disjoint nonempty
/// atoms on the right, each with the full set of left points whose
/// section contains it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectDecomposition {
    pub rects: Vec<Rectangle>,
}

/// Decomposes a relation into rectangles over the atoms of the Boolean
/// algebra generated by its sections: right points are grouped by their
/// membership signature across all sections, signatures that lie in no
/// section are dropped, and `left_i = {x : {x} × atom_i ⊆ R}`. Atoms are
/// sorted by their least element, so the output is canonical and does
/// not depend on any left-side labeling.
pub fn fv_decompose(r: &Relation) -> RectDecomposition {
    let m1 = r.left_size();
    let m2 = r.right_size();
    // Signature of a right point: the set of sections containing it.
    let mut groups: Vec<(Vec<bool>, Vec<usize>)> = Vec::new();
    for y in 0..m2 {
        let sig: Vec<bool> = (0..m1).map(|x| r.contains(x, y)).collect();
        if sig.iter().all(|&b| !b) {
            continue;
        }
        match groups.iter_mut().find(|(s, _)| *s == sig) {
            Some((_, members)) => members.push(y),
            None => groups.push((sig, vec![y])),
        }
    }
    groups.sort_by_key(|(_, members)| members[0]);
    let rects = groups
        .into_iter()
        .map(|(sig, atom)| Rectangle {
            left: (0..m1).filter(|&x| sig[x]).collect(),
            atom,
        })
        .collect();
    RectDecomposition { rects }
}

/// Rebuilds the relation `∪ left_i × atom_i` from a decomposition.
pub fn fv_reconstruct(m1: usize, m2: usize, d: &RectDecomposition) -> Result<Relation> {
    let mut pairs = Vec::new();
    for rect in &d.rects {
        for &x in &rect.left {
            for &y in &rect.atom {
                pairs.push((x, y));
            }
        }
    }
    Relation::new(m1, m2, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{direct_product, make_cyclic};
    use num::rational::Rational64;
    use proptest::prelude::*;

    /// Every partial function from a domain of size `n` into a codomain
    /// of size `c`, as graphs.
    fn all_partial_functions(n: usize, c: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new()];
        for x in 0..n {
            let mut next = Vec::new();
            for g in &out {
                next.push(g.clone());
                for v in 0..c {
                    let mut g2 = g.clone();
                    g2.push((x, v));
                    next.push(g2);
                }
            }
            out = next;
        }
        out
    }

    #[test]
    fn pair_twist_round_trips_exhaustively() {
        // |F| = 3 into S₁ × S₂ with |S₁| = |S₂| = 2: all 125 partial
        // functions.
        let fns = all_partial_functions(3, 4);
        assert_eq!(fns.len(), 125);
        for graph in fns {
            let h = TwistCode::new(3, 4, &graph).unwrap();
            let (c1, c2) = embed_pair_twist(&h, 2, 2).unwrap();
            assert_eq!(decode_pair_twist(&c1, &c2).unwrap(), h);
        }
    }

    #[test]
    fn pair_twist_edge_cases() {
        let empty = TwistCode::empty(4, 6);
        let (c1, c2) = embed_pair_twist(&empty, 2, 3).unwrap();
        assert!(c1.graph().is_empty() && c2.graph().is_empty());

        let single = TwistCode::new(1, 6, &[(0, 5)]).unwrap();
        let (c1, c2) = embed_pair_twist(&single, 2, 3).unwrap();
        assert_eq!(c1.graph(), &[(0, 1)]);
        assert_eq!(c2.graph(), &[(0, 2)]);
    }

    #[test]
    fn twist_code_rejects_double_values() {
        let err = TwistCode::new(2, 2, &[(0, 0), (0, 1)]).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn cyclic_cover_surjective_small() {
        for d in 1..=6usize {
            let b = Arc::new(make_cyclic(d).unwrap());
            for k in 1..=3usize {
                let cover = CyclicCover::new(&b, k).unwrap();
                cover.verify_surjective().unwrap();
            }
        }
    }

    #[test]
    fn cyclic_cover_examples() {
        let b = Arc::new(make_cyclic(3).unwrap());
        let cover = CyclicCover::new(&b, 2).unwrap();
        // All 9 targets covered, and the identity tuple lifts over the
        // identity base.
        cover.verify_surjective().unwrap();
        let (base, _) = cover.preimage(&[0, 0]).unwrap();
        assert_eq!(base, b.identity());
        // Spot-check the defining formula.
        let t = cover.apply(1, &[2, 3]).unwrap();
        assert_eq!(t, vec![2, 0]);
    }

    #[test]
    fn cyclic_cover_rejects_noncyclic() {
        let v4 = Arc::new(
            direct_product(&make_cyclic(2).unwrap(), &make_cyclic(2).unwrap()).unwrap(),
        );
        let err = CyclicCover::new(&v4, 1).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)));
    }

    #[test]
    fn twist_by_power_round_trips_exhaustively() {
        // d = 2, k = 1: all 9 partial functions B → S with |S| = 2.
        let b = Arc::new(make_cyclic(2).unwrap());
        let cover = CyclicCover::new(&b, 1).unwrap();
        let fns = all_partial_functions(2, 2);
        assert_eq!(fns.len(), 9);
        let mut images = Vec::new();
        for graph in fns {
            let x = TwistCode::new(2, 2, &graph).unwrap();
            let y = embed_twist_by_power(&cover, &x).unwrap();
            assert_eq!(decode_twist_by_power(&cover, &y).unwrap(), x);
            images.push(y);
        }
        // Injective on codes.
        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                assert_ne!(images[i], images[j]);
            }
        }
        // d = 4, k = 2 at a single probe point, still exact.
        let b4 = Arc::new(make_cyclic(4).unwrap());
        let cover42 = CyclicCover::new(&b4, 2).unwrap();
        let x = TwistCode::new(16, 3, &[(0, 1), (5, 2), (15, 0)]).unwrap();
        let y = embed_twist_by_power(&cover42, &x).unwrap();
        assert_eq!(decode_twist_by_power(&cover42, &y).unwrap(), x);
    }

    #[test]
    fn twist_by_power_totality_and_emptiness() {
        let b = Arc::new(make_cyclic(3).unwrap());
        let cover = CyclicCover::new(&b, 1).unwrap();
        let empty = TwistCode::empty(3, 2);
        assert!(embed_twist_by_power(&cover, &empty).unwrap().graph().is_empty());
        let total = TwistCode::new(3, 2, &[(0, 0), (1, 1), (2, 0)]).unwrap();
        let y = embed_twist_by_power(&cover, &total).unwrap();
        assert!(y.is_total());
    }

    #[test]
    fn decode_twist_rejects_non_images() {
        let b = Arc::new(make_cyclic(2).unwrap());
        let cover = CyclicCover::new(&b, 1).unwrap();
        // Fiber of target (0): cover-domain points with b^a = 0; defined
        // on one of them only.
        let partial = TwistCode::new(4, 2, &[(0, 0)]).unwrap();
        assert!(decode_twist_by_power(&cover, &partial).is_err());
    }

    fn q(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn gamma_function_examples() {
        // Constant function.
        let h = vec![q(1, 2); 3];
        let code = code_gamma_function(&h).unwrap();
        assert_eq!(code.image.len(), 1);
        assert_eq!(code.ranks, vec![0, 0, 0]);
        assert_eq!(decode_gamma_function(&code).unwrap(), h);

        // Injective increasing function has ranks 0, 1, 2.
        let h = vec![q(-1, 1), q(1, 3), q(7, 2)];
        let code = code_gamma_function(&h).unwrap();
        assert_eq!(code.ranks, vec![0, 1, 2]);
        assert_eq!(decode_gamma_function(&code).unwrap(), h);
    }

    #[test]
    fn gamma_function_round_trips_exhaustively() {
        // All 256 functions 0..4 → a fixed 4-element rational set.
        let values = [q(-2, 1), q(0, 1), q(1, 3), q(5, 2)];
        for mask in 0..256usize {
            let h: Vec<Rational64> =
                (0..4).map(|i| values[(mask >> (2 * i)) & 3]).collect();
            let code = code_gamma_function(&h).unwrap();
            assert_eq!(decode_gamma_function(&code).unwrap(), h);
            // The ranking table is the pullback of the value order.
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(code.ranks[i].cmp(&code.ranks[j]), h[i].cmp(&h[j]));
                }
            }
        }
    }

    #[test]
    fn rank_field_codes() {
        assert_eq!(least_prime_at_least(1), 2);
        assert_eq!(least_prime_at_least(4), 5);
        assert_eq!(least_prime_at_least(8), 11);

        // Strict chain on n = 3 over F₅: three distinct rank sets.
        let code = rank_as_prime_field_map(&[0, 1, 2], Some(5)).unwrap();
        assert_eq!(code.p, 5);
        assert_eq!(code.sets.len(), 3);
        assert!(code.sets[0] != code.sets[1] && code.sets[1] != code.sets[2]);
        assert_eq!(decode_rank_field(&code).unwrap(), vec![0, 1, 2]);

        // All-equal ranking: constant map.
        let code = rank_as_prime_field_map(&[0, 0, 0, 0], None).unwrap();
        assert!(code.sets.iter().all(|s| *s == code.sets[0]));

        // Single point.
        let code = rank_as_prime_field_map(&[0], None).unwrap();
        assert_eq!(decode_rank_field(&code).unwrap(), vec![0]);

        // Too-small prime rejected.
        assert!(rank_as_prime_field_map(&[0, 1, 2, 3], Some(3)).is_err());
    }

    #[test]
    fn rank_field_round_trips_exhaustively() {
        // Every ranking table on n = 5 points with ranks < 5.
        for mask in 0..5usize.pow(5) {
            let mut m = mask;
            let ranks: Vec<usize> = (0..5)
                .map(|_| {
                    let r = m % 5;
                    m /= 5;
                    r
                })
                .collect();
            let code = rank_as_prime_field_map(&ranks, None).unwrap();
            assert_eq!(decode_rank_field(&code).unwrap(), ranks);
        }
    }

    #[test]
    fn stabilizer_codes_match_hand_values() {
        let full = subgroup_stabilizer_code(5, &[1, 2, 3, 4]).unwrap();
        assert_eq!(full.y, vec![1, 2, 3, 4]);
        assert_eq!(full.stabilizer, vec![1, 2, 3, 4]);

        let one = subgroup_stabilizer_code(8, &[1]).unwrap();
        assert_eq!(one.y, vec![1]);
        assert_eq!(one.stabilizer, vec![1]);

        let pm = subgroup_stabilizer_code(5, &[1, 4]).unwrap();
        assert_eq!(pm.y, vec![1, 4]);
        assert_eq!(pm.stabilizer, vec![1, 4]);

        assert!(subgroup_stabilizer_code(8, &[1, 2]).is_err());
        assert!(subgroup_stabilizer_code(5, &[1, 2]).is_err());
    }

    #[test]
    fn stabilizer_codes_for_all_subgroups_up_to_24() {
        use crate::group::all_subgroups;
        for n in 1..=24usize {
            let (units, values) = unit_group(n).unwrap();
            for sub in all_subgroups(&units) {
                let members: Vec<usize> =
                    sub.members().map(|i| values[i]).collect();
                let code = subgroup_stabilizer_code(n, &members).unwrap();
                let mut expect = members.clone();
                expect.sort_unstable();
                assert_eq!(code.stabilizer, expect);
            }
        }
    }

    #[test]
    fn fv_examples() {
        let empty = Relation::new(3, 4, &[]).unwrap();
        assert!(fv_decompose(&empty).rects.is_empty());

        let full = Relation::new(3, 4, &{
            let mut v = Vec::new();
            for x in 0..3 {
                for y in 0..4 {
                    v.push((x, y));
                }
            }
            v
        })
        .unwrap();
        let d = fv_decompose(&full);
        assert_eq!(d.rects.len(), 1);
        assert_eq!(d.rects[0].left, vec![0, 1, 2]);
        assert_eq!(d.rects[0].atom, vec![0, 1, 2, 3]);

        // Two distinct sections.
        let r = Relation::new(
            3,
            4,
            &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (2, 3)],
        )
        .unwrap();
        let d = fv_decompose(&r);
        assert!(d.rects.len() <= 4);
        assert_eq!(fv_reconstruct(3, 4, &d).unwrap(), r);
    }

    #[test]
    fn fv_exhaustive_3x3_reconstruction_and_canonicity() {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for mask in 0..512usize {
            let rows: Vec<Vec<bool>> = (0..3)
                .map(|x| (0..3).map(|y| mask >> (3 * x + y) & 1 == 1).collect())
                .collect();
            let r = Relation::from_rows(&rows).unwrap();
            let d = fv_decompose(&r);
            assert_eq!(fv_reconstruct(3, 3, &d).unwrap(), r);
            // Atoms nonempty and pairwise disjoint, sorted by minimum.
            let mut seen = vec![false; 3];
            let mut last_min = None;
            for rect in &d.rects {
                assert!(!rect.atom.is_empty());
                assert!(last_min < Some(rect.atom[0]));
                last_min = Some(rect.atom[0]);
                for &y in &rect.atom {
                    assert!(!seen[y]);
                    seen[y] = true;
                }
            }
            // Relabeling the left factor relabels left parts and keeps
            // the identical atoms.
            for perm in &perms {
                let rp = r.relabel_left(perm).unwrap();
                let dp = fv_decompose(&rp);
                assert_eq!(dp.rects.len(), d.rects.len());
                for (a, b) in d.rects.iter().zip(&dp.rects) {
                    assert_eq!(a.atom, b.atom);
                    let mut relabeled: Vec<usize> =
                        a.left.iter().map(|&x| perm[x]).collect();
                    relabeled.sort_unstable();
                    assert_eq!(relabeled, b.left);
                }
            }
        }
    }

    proptest! {
        /// Pair-twist round trip on random partial functions at sizes
        /// beyond the exhaustive sweep.
        #[test]
        fn pair_twist_round_trips_random(
            entries in proptest::collection::vec((0usize..6, 0usize..12), 0..6),
            ) {
            let mut graph = entries;
            graph.sort_unstable();
            graph.dedup_by_key(|e| e.0);
            let h = TwistCode::new(6, 12, &graph).unwrap();
            let (c1, c2) = embed_pair_twist(&h, 3, 4).unwrap();
            prop_assert_eq!(decode_pair_twist(&c1, &c2).unwrap(), h);
        }

        /// Rectangular decomposition reconstructs random relations.
        #[test]
        fn fv_reconstructs_random_relations(bits in proptest::collection::vec(any::<bool>(), 36)) {
            let rows: Vec<Vec<bool>> =
                bits.chunks(6).map(|c| c.to_vec()).collect();
            let r = Relation::from_rows(&rows).unwrap();
            let d = fv_decompose(&r);
            prop_assert_eq!(fv_reconstruct(6, 6, &d).unwrap(), r);
        }
    }
}

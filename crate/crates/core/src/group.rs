//! Finite groups as dense multiplication tables.
//!
//! Elements are indices `0..n`. The table representation is deliberately
//! naive: it makes every later enumeration (cocycles, witnesses, orbit
//! scans) a table lookup, and it lets construction *prove* the group laws
//! instead of assuming them. Associativity is checked with Light's test
//! (middle element restricted to a generating set), which is exact and
//! keeps construction quadratic-ish instead of cubic.
//!
//! Composition convention, used crate-wide: `mul(a, b)` means "apply `b`
//! first, then `a`" wherever elements act on anything, so
//! `act(mul(a, b), x) = act(a, act(b, x))`.

use crate::{Error, Result};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

/// Hard cap on group order. Dense tables grow quadratically; past this
/// size the crate's exhaustive style stops being honest desk arithmetic.
pub const MAX_GROUP_ORDER: usize = 6000;

/// A finite group given by its full multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    label: String,
    n: usize,
    /// Row-major: `mul[a * n + b]` is `a · b`.
    mul: Vec<u16>,
    inv: Vec<u16>,
    identity: u16,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.label, self.n)
    }
}

impl FiniteGroup {
    /// Builds a group from a multiplication table, deriving the identity
    /// and inverses, and verifying all group laws.
    pub fn from_table(label: impl Into<String>, table: &[Vec<usize>]) -> Result<Self> {
        let label = label.into();
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::Guard(format!(
                "group order {n} exceeds the table cap {MAX_GROUP_ORDER}"
            )));
        }
        let mut mul = vec![0u16; n * n];
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup(format!(
                    "row {a} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (b, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::InvalidGroup(format!(
                        "entry ({a},{b}) = {v} out of range"
                    )));
                }
                mul[a * n + b] = v as u16;
            }
        }
        Self::from_flat(label, n, mul)
    }

    pub(crate) fn from_flat(label: String, n: usize, mul: Vec<u16>) -> Result<Self> {
        // Identity: the unique e with e·x = x·e = x for all x.
        let mut identity = None;
        'search: for e in 0..n {
            for x in 0..n {
                if mul[e * n + x] != x as u16 || mul[x * n + e] != x as u16 {
                    continue 'search;
                }
            }
            identity = Some(e as u16);
            break;
        }
        let identity =
            identity.ok_or_else(|| Error::InvalidGroup("no two-sided identity".into()))?;

        // Inverses from the table; also catches non-Latin rows.
        let mut inv = vec![u16::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == identity {
                    if mul[b * n + a] != identity {
                        return Err(Error::InvalidGroup(format!(
                            "{b} is a right but not left inverse of {a}"
                        )));
                    }
                    inv[a] = b as u16;
                    break;
                }
            }
            if inv[a] == u16::MAX {
                return Err(Error::InvalidGroup(format!("element {a} has no inverse")));
            }
        }

        let g = FiniteGroup { label, n, mul, inv, identity };
        g.light_associativity()?;
        Ok(g)
    }

    /// Light's associativity test: `(x·g)·y = x·(g·y)` for every `x`, `y`
    /// and `g` in a generating set. Exact for closed tables with identity.
    fn light_associativity(&self) -> Result<()> {
        let n = self.n;
        let gens = self.generating_sequence();
        for &g in &gens {
            for x in 0..n {
                let xg = self.mul(x, g);
                for y in 0..n {
                    if self.mul(xg, y) != self.mul(x, self.mul(g, y)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails at ({x},{g},{y})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Brute-force associativity over all triples. Test oracle only;
    /// cubic, so keep it to small groups.
    pub fn associativity_by_all_triples(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    #[inline]
    pub fn identity(&self) -> usize {
        self.identity as usize
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    /// `a` conjugated by `g`, that is `g · a · g⁻¹`.
    pub fn conj(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inv(g))
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut acc = self.identity();
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut ord = 1;
        while x != self.identity() {
            x = self.mul(x, a);
            ord += 1;
        }
        ord
    }

    pub fn exponent(&self) -> usize {
        self.elements()
            .map(|a| self.element_order(a))
            .fold(1, lcm)
    }

    pub fn is_abelian(&self) -> bool {
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
            }
        }
        true
    }

    /// Closure of a subset under multiplication and inverses.
    pub fn closure(&self, seed: &[usize]) -> Vec<usize> {
        let mut in_set = vec![false; self.n];
        let mut members = vec![self.identity()];
        in_set[self.identity()] = true;
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &s in seed {
            if !in_set[s] {
                in_set[s] = true;
                members.push(s);
                queue.push_back(s);
            }
        }
        // Products with every current member, both sides; inverses come
        // for free in a finite group (powers reach them).
        let mut i = 0;
        while i < members.len() {
            let a = members[i];
            i += 1;
            for j in 0..members.len() {
                let b = members[j];
                for p in [self.mul(a, b), self.mul(b, a)] {
                    if !in_set[p] {
                        in_set[p] = true;
                        members.push(p);
                    }
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// Deterministic generating sequence: repeatedly take the element of
    /// largest order (lowest index on ties) outside the subgroup generated
    /// so far. Short in practice and stable across runs, which keeps every
    /// enumeration keyed on generators reproducible.
    pub fn generating_sequence(&self) -> Vec<usize> {
        let mut gens: Vec<usize> = Vec::new();
        let mut have = self.closure(&[]);
        while have.len() < self.n {
            let mut best: Option<(usize, usize)> = None; // (order, element)
            for a in 0..self.n {
                if have.binary_search(&a).is_err() {
                    let ord = self.element_order(a);
                    let better = match best {
                        None => true,
                        Some((bo, _)) => ord > bo,
                    };
                    if better {
                        best = Some((ord, a));
                    }
                }
            }
            let (_, pick) = best.expect("non-covering closure must miss an element");
            gens.push(pick);
            have = self.closure(&gens);
        }
        gens
    }

    /// Serializes to the documented plain-text table format.
    pub fn to_text(&self) -> String {
        let mut out = format!("group {}\n", self.n);
        for a in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|b| self.mul(a, b).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the plain-text table format produced by [`to_text`].
    ///
    /// [`to_text`]: FiniteGroup::to_text
    pub fn from_text(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut cur = crate::io::Cursor::new(text);
        let g = crate::io::parse_group_block(&mut cur, label.into())?;
        cur.expect_end()?;
        Ok(g)
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// A subgroup, stored as the sorted member list of a shared parent.
#[derive(Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<u16>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subgroup(order {} of {})",
            self.members.len(),
            self.parent.label()
        )
    }
}

impl Subgroup {
    /// Validates closure under product and inverse before accepting.
    pub fn new(parent: &Arc<FiniteGroup>, members: &[usize]) -> Result<Self> {
        let mut ms: Vec<u16> = Vec::with_capacity(members.len());
        for &m in members {
            if m >= parent.order() {
                return Err(Error::NotSubgroup(format!("member {m} out of range")));
            }
            ms.push(m as u16);
        }
        ms.sort_unstable();
        ms.dedup();
        if ms.binary_search(&(parent.identity() as u16)).is_err() {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        for &a in &ms {
            if ms
                .binary_search(&(parent.inv(a as usize) as u16))
                .is_err()
            {
                return Err(Error::NotSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &ms {
                let p = parent.mul(a as usize, b as usize) as u16;
                if ms.binary_search(&p).is_err() {
                    return Err(Error::NotSubgroup(format!(
                        "product {a}·{b} = {p} missing"
                    )));
                }
            }
        }
        Ok(Subgroup { parent: Arc::clone(parent), members: ms })
    }

    pub fn trivial(parent: &Arc<FiniteGroup>) -> Self {
        Subgroup {
            parent: Arc::clone(parent),
            members: vec![parent.identity() as u16],
        }
    }

    pub fn full(parent: &Arc<FiniteGroup>) -> Self {
        Subgroup {
            parent: Arc::clone(parent),
            members: (0..parent.order() as u16).collect(),
        }
    }

    /// Subgroup generated by a seed set.
    pub fn generated(parent: &Arc<FiniteGroup>, seed: &[usize]) -> Self {
        let members = parent.closure(seed);
        Subgroup {
            parent: Arc::clone(parent),
            members: members.into_iter().map(|m| m as u16).collect(),
        }
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index_in_parent(&self) -> usize {
        self.parent.order() / self.order()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&m| m as usize)
    }

    pub fn member_list(&self) -> Vec<usize> {
        self.members().collect()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.members.binary_search(&(a as u16)).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn conjugate(&self, g: usize) -> Subgroup {
        let mut ms: Vec<u16> = self
            .members
            .iter()
            .map(|&a| self.parent.conj(g, a as usize) as u16)
            .collect();
        ms.sort_unstable();
        Subgroup { parent: Arc::clone(&self.parent), members: ms }
    }

    pub fn is_normal(&self) -> bool {
        self.normality_witness().is_none()
    }

    /// Returns a `(conjugator, member)` pair that escapes, if any.
    pub fn normality_witness(&self) -> Option<(usize, usize)> {
        for g in self.parent.elements() {
            for &a in &self.members {
                if !self.contains(self.parent.conj(g, a as usize)) {
                    return Some((g, a as usize));
                }
            }
        }
        None
    }

    /// Intersection as member sets (always a subgroup).
    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let members: Vec<u16> = self
            .members
            .iter()
            .copied()
            .filter(|m| other.members.binary_search(m).is_ok())
            .collect();
        Subgroup { parent: Arc::clone(&self.parent), members }
    }

    /// Repackages the subgroup as a standalone group, returning the member
    /// list that embeds the new indices back into the parent.
    pub fn as_group(&self, label: impl Into<String>) -> (FiniteGroup, Vec<usize>) {
        let k = self.members.len();
        let pos = |x: u16| self.members.binary_search(&x).expect("closed") as u16;
        let mut mul = vec![0u16; k * k];
        for i in 0..k {
            for j in 0..k {
                let p = self.parent.mul(self.members[i] as usize, self.members[j] as usize);
                mul[i * k + j] = pos(p as u16);
            }
        }
        let g = FiniteGroup::from_flat(label.into(), k, mul)
            .expect("a closed member set satisfies the group laws");
        (g, self.member_list())
    }
}

/// Largest normal subgroup of the parent contained in `h`: the
/// intersection of all conjugates of `h`.
pub fn core_of_subgroup(h: &Subgroup) -> Subgroup {
    let parent = h.parent().clone();
    let mut core = h.clone();
    for g in parent.elements() {
        core = core.intersect(&h.conjugate(g));
        if core.is_trivial() {
            break;
        }
    }
    core
}

/// Every subgroup of `g`, found by closing upward from the trivial
/// subgroup one generator at a time. Sorted by (order, members) so the
/// listing is deterministic.
pub fn all_subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    let mut seen: BTreeSet<Vec<u16>> = BTreeSet::new();
    let trivial = Subgroup::trivial(g);
    seen.insert(trivial.members.clone());
    let mut queue: VecDeque<Vec<u16>> = VecDeque::new();
    queue.push_back(trivial.members.clone());
    while let Some(base) = queue.pop_front() {
        for x in g.elements() {
            if base.binary_search(&(x as u16)).is_ok() {
                continue;
            }
            let mut seed: Vec<usize> = base.iter().map(|&m| m as usize).collect();
            seed.push(x);
            let closed: Vec<u16> = g.closure(&seed).into_iter().map(|m| m as u16).collect();
            if seen.insert(closed.clone()) {
                queue.push_back(closed);
            }
        }
    }
    let mut subs: Vec<Subgroup> = seen
        .into_iter()
        .map(|members| Subgroup { parent: Arc::clone(g), members })
        .collect();
    subs.sort_by_key(|s| (s.order(), s.members.clone()));
    subs
}

/// A verified homomorphism between finite groups.
#[derive(Clone)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<u16>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHom({} -> {})", self.source.label(), self.target.label())
    }
}

impl GroupHom {
    pub fn new(
        source: &Arc<FiniteGroup>,
        target: &Arc<FiniteGroup>,
        map: Vec<usize>,
    ) -> Result<Self> {
        if map.len() != source.order() {
            return Err(Error::InvalidGroup(format!(
                "map has {} entries for a group of order {}",
                map.len(),
                source.order()
            )));
        }
        for &v in &map {
            if v >= target.order() {
                return Err(Error::InvalidGroup(format!("image {v} out of range")));
            }
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.mul(a, b)] != target.mul(map[a], map[b])
                {
                    return Err(Error::InvalidGroup(format!(
                        "not multiplicative at ({a},{b})"
                    )));
                }
            }
        }
        Ok(GroupHom {
            source: Arc::clone(source),
            target: Arc::clone(target),
            map: map.into_iter().map(|v| v as u16).collect(),
        })
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a] as usize
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<usize> = self
            .source
            .elements()
            .filter(|&a| self.apply(a) == self.target.identity())
            .collect();
        Subgroup::new(&self.source, &members).expect("kernels are subgroups")
    }

    pub fn image(&self) -> Subgroup {
        let mut members: Vec<usize> = self.source.elements().map(|a| self.apply(a)).collect();
        members.sort_unstable();
        members.dedup();
        Subgroup::new(&self.target, &members).expect("images are subgroups")
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }
}

/// Quotient of `g` by a normal subgroup. Cosets are indexed by their
/// minimal member, ascending, so quotients are canonical. Returns the
/// quotient together with the projection homomorphism.
pub fn quotient(g: &Arc<FiniteGroup>, n: &Subgroup) -> Result<(Arc<FiniteGroup>, GroupHom)> {
    if !Arc::ptr_eq(g, n.parent()) {
        return Err(Error::Hypothesis("subgroup belongs to a different group".into()));
    }
    if let Some((conjugator, member)) = n.normality_witness() {
        return Err(Error::NotNormal { conjugator, member });
    }
    let order = g.order();
    // Left cosets a·N; for normal N these are also right cosets.
    let mut coset_of = vec![u16::MAX; order];
    let mut reps: Vec<usize> = Vec::new();
    for a in g.elements() {
        if coset_of[a] != u16::MAX {
            continue;
        }
        let idx = reps.len() as u16;
        reps.push(a);
        for m in n.members() {
            coset_of[g.mul(a, m)] = idx;
        }
    }
    let k = reps.len();
    let mut mul = vec![0u16; k * k];
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate() {
            mul[i * k + j] = coset_of[g.mul(a, b)];
        }
    }
    let q = Arc::new(FiniteGroup::from_flat(
        format!("{}/{}", g.label(), n.order()),
        k,
        mul,
    )?);
    let proj = GroupHom::new(g, &q, coset_of.iter().map(|&c| c as usize).collect())?;
    Ok((q, proj))
}

/// All automorphisms of `g`, as permutation maps on element indices, in
/// lexicographic order. Candidates assign generator images of equal
/// element order and are extended by the table; survivors are verified
/// multiplicative on every `(element, generator)` pair, which suffices
/// once the generators cover the group.
pub fn automorphism_list(g: &FiniteGroup) -> Vec<Vec<u16>> {
    homomorphism_search(g, g, true)
}

/// The automorphism group as a table group, together with the list of
/// automorphism maps (index `i` of the group is `maps[i]`).
pub fn automorphism_group(g: &FiniteGroup) -> (FiniteGroup, Vec<Vec<u16>>) {
    let maps = automorphism_list(g);
    let k = maps.len();
    let find = |m: &[u16]| -> u16 {
        maps.binary_search_by(|probe| probe.as_slice().cmp(m)).expect("closed under composition")
            as u16
    };
    let mut mul = vec![0u16; k * k];
    let n = g.order();
    let mut buf = vec![0u16; n];
    for (i, a) in maps.iter().enumerate() {
        for (j, b) in maps.iter().enumerate() {
            // Convention: (a·b)(x) = a(b(x)).
            for x in 0..n {
                buf[x] = a[b[x] as usize];
            }
            mul[i * k + j] = find(&buf);
        }
    }
    let grp = FiniteGroup::from_flat(format!("Aut({})", g.label()), k, mul)
        .expect("automorphisms form a group under composition");
    (grp, maps)
}

/// All homomorphisms `source -> target`, as maps on element indices, in
/// lexicographic order.
pub fn all_homomorphisms(source: &FiniteGroup, target: &FiniteGroup) -> Vec<Vec<u16>> {
    homomorphism_search(source, target, false)
}

fn homomorphism_search(source: &FiniteGroup, target: &FiniteGroup, bijective: bool) -> Vec<Vec<u16>> {
    let gens = source.generating_sequence();
    if gens.is_empty() {
        // Trivial source: only the map sending identity to identity.
        return vec![vec![target.identity() as u16]];
    }
    // Candidate images per generator: element order must divide the
    // generator's order (equal order, for automorphisms).
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let so = source.element_order(s);
            target
                .elements()
                .filter(|&t| {
                    let to = target.element_order(t);
                    if bijective {
                        to == so
                    } else {
                        so % to == 0
                    }
                })
                .collect()
        })
        .collect();

    let mut found: Vec<Vec<u16>> = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    'outer: loop {
        let images: Vec<usize> = (0..gens.len()).map(|i| candidates[i][choice[i]]).collect();
        if let Some(map) = extend_by_generators(source, target, &gens, &images) {
            let ok = !bijective || {
                let mut seen = vec![false; target.order()];
                map.iter().all(|&v| {
                    let v = v as usize;
                    !std::mem::replace(&mut seen[v], true)
                })
            };
            if ok {
                found.push(map);
            }
        }
        // Odometer over candidate tuples.
        for i in (0..gens.len()).rev() {
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    found.sort();
    found.dedup();
    found
}

/// Tries to extend generator images to a full homomorphism. Produces the
/// unique extension if one exists, checking multiplicativity against every
/// `(element, generator)` pair.
fn extend_by_generators(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<u16>> {
    let n = source.order();
    let unset = u16::MAX;
    let mut map = vec![unset; n];
    map[source.identity()] = target.identity() as u16;
    let mut frontier = vec![source.identity()];
    while let Some(x) = frontier.pop() {
        for (i, &g) in gens.iter().enumerate() {
            let xg = source.mul(x, g);
            let img = target.mul(map[x] as usize, images[i]) as u16;
            if map[xg] == unset {
                map[xg] = img;
                frontier.push(xg);
            } else if map[xg] != img {
                return None;
            }
        }
    }
    debug_assert!(map.iter().all(|&v| v != unset), "generators must cover the group");
    for x in 0..n {
        for (i, &g) in gens.iter().enumerate() {
            if map[source.mul(x, g)] != target.mul(map[x] as usize, images[i]) as u16 {
                return None;
            }
        }
    }
    Some(map)
}

/// Searches for an isomorphism between two groups of equal order.
pub fn find_isomorphism(a: &FiniteGroup, b: &FiniteGroup) -> Option<Vec<u16>> {
    if a.order() != b.order() {
        return None;
    }
    let gens = a.generating_sequence();
    if gens.is_empty() {
        return Some(vec![b.identity() as u16]);
    }
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| {
            let so = a.element_order(s);
            b.elements().filter(|&t| b.element_order(t) == so).collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut choice = vec![0usize; gens.len()];
    'outer: loop {
        let images: Vec<usize> = (0..gens.len()).map(|i| candidates[i][choice[i]]).collect();
        if let Some(map) = extend_by_generators(a, b, &gens, &images) {
            let mut seen = vec![false; b.order()];
            if map.iter().all(|&v| !std::mem::replace(&mut seen[v as usize], true)) {
                return Some(map);
            }
        }
        for i in (0..gens.len()).rev() {
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    None
}

/// An action of a group on a finite point set, as a table.
#[derive(Clone)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    points: usize,
    /// Row-major: `table[g * points + x]` is `g · x`.
    table: Vec<u16>,
}

impl fmt::Debug for GroupAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupAction({} on {} points)", self.group.label(), self.points)
    }
}

impl GroupAction {
    pub fn new(group: &Arc<FiniteGroup>, points: usize, table: Vec<usize>) -> Result<Self> {
        if table.len() != group.order() * points {
            return Err(Error::InvalidGroup(format!(
                "action table has {} entries, expected {}",
                table.len(),
                group.order() * points
            )));
        }
        if table.iter().any(|&x| x >= points) {
            return Err(Error::InvalidGroup("action value out of range".into()));
        }
        let act = GroupAction {
            group: Arc::clone(group),
            points,
            table: table.into_iter().map(|x| x as u16).collect(),
        };
        act.verify()?;
        Ok(act)
    }

    fn verify(&self) -> Result<()> {
        let e = self.group.identity();
        for x in 0..self.points {
            if self.act(e, x) != x {
                return Err(Error::InvalidGroup(format!("identity moves point {x}")));
            }
        }
        for g in self.group.elements() {
            for h in self.group.elements() {
                let gh = self.group.mul(g, h);
                for x in 0..self.points {
                    if self.act(gh, x) != self.act(g, self.act(h, x)) {
                        return Err(Error::InvalidGroup(format!(
                            "action law fails at ({g},{h},{x})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g * self.points + x] as usize
    }

    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = vec![false; self.points];
        let mut orbit = vec![x];
        seen[x] = true;
        let mut i = 0;
        while i < orbit.len() {
            let y = orbit[i];
            i += 1;
            for g in self.group.elements() {
                let z = self.act(g, y);
                if !seen[z] {
                    seen[z] = true;
                    orbit.push(z);
                }
            }
        }
        orbit.sort_unstable();
        orbit
    }

    /// Orbits sorted by their minimal point.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut done = vec![false; self.points];
        let mut out = Vec::new();
        for x in 0..self.points {
            if !done[x] {
                let orb = self.orbit(x);
                for &y in &orb {
                    done[y] = true;
                }
                out.push(orb);
            }
        }
        out
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        let members: Vec<usize> = self
            .group
            .elements()
            .filter(|&g| self.act(g, x) == x)
            .collect();
        Subgroup::new(&self.group, &members).expect("stabilizers are subgroups")
    }

    pub fn is_transitive(&self) -> bool {
        self.points > 0 && self.orbit(0).len() == self.points
    }

    pub fn kernel(&self) -> Subgroup {
        let members: Vec<usize> = self
            .group
            .elements()
            .filter(|&g| (0..self.points).all(|x| self.act(g, x) == x))
            .collect();
        Subgroup::new(&self.group, &members).expect("action kernels are subgroups")
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel().is_trivial()
    }
}

// ---------------------------------------------------------------------------
// Catalog constructors
// ---------------------------------------------------------------------------

/// Cyclic group of order `n`, identity at index 0.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::Guard("cyclic group needs order at least 1".into()));
    }
    if n > MAX_GROUP_ORDER {
        return Err(Error::Guard(format!("order {n} exceeds cap {MAX_GROUP_ORDER}")));
    }
    let mut mul = vec![0u16; n * n];
    for a in 0..n {
        for b in 0..n {
            mul[a * n + b] = ((a + b) % n) as u16;
        }
    }
    FiniteGroup::from_flat(format!("C{n}"), n, mul)
}

/// Symmetric group on `n` letters with its natural action on `0..n`.
/// Permutations are indexed in lexicographic order of one-line notation,
/// so the identity is element 0. `mul(p, q)` is `p ∘ q` (apply `q` first).
pub fn make_symmetric(n: usize) -> Result<GroupAction> {
    if n == 0 || n > 8 {
        return Err(Error::Guard(format!("symmetric group wants 1 ≤ n ≤ 8, got {n}")));
    }
    let order: usize = (1..=n).product();
    if order > MAX_GROUP_ORDER {
        return Err(Error::Guard(format!(
            "S{n} has order {order}, beyond the table cap {MAX_GROUP_ORDER}"
        )));
    }
    let perms = all_permutations(n);
    let rank = |p: &[u8]| -> u16 {
        perms
            .binary_search_by(|probe| probe.as_slice().cmp(p))
            .expect("closed under composition") as u16
    };
    let mut mul = vec![0u16; order * order];
    let mut buf = vec![0u8; n];
    for (i, p) in perms.iter().enumerate() {
        for (j, q) in perms.iter().enumerate() {
            for x in 0..n {
                buf[x] = p[q[x] as usize];
            }
            mul[i * order + j] = rank(&buf);
        }
    }
    let group = Arc::new(FiniteGroup::from_flat(format!("S{n}"), order, mul)?);
    let mut table = vec![0usize; order * n];
    for (i, p) in perms.iter().enumerate() {
        for x in 0..n {
            table[i * n + x] = p[x] as usize;
        }
    }
    GroupAction::new(&group, n, table)
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(p: &mut [u8]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Dihedral group of order `2n`: indices `0..n` are rotations `x ↦ x + k`,
/// indices `n..2n` are reflections `x ↦ k − x` on `Z/n`.
pub fn make_dihedral(n: usize) -> Result<FiniteGroup> {
    if n == 0 || 2 * n > MAX_GROUP_ORDER {
        return Err(Error::Guard(format!("dihedral parameter {n} out of range")));
    }
    let m = 2 * n;
    let compose = |a: usize, b: usize| -> usize {
        // Element (k, ε): x ↦ k + εx; apply b then a.
        let (ka, ea) = if a < n { (a, 1i64) } else { (a - n, -1i64) };
        let (kb, eb) = if b < n { (b, 1i64) } else { (b - n, -1i64) };
        let k = (ka as i64 + ea * kb as i64).rem_euclid(n as i64) as usize;
        if ea * eb == 1 {
            k
        } else {
            n + k
        }
    };
    let mut mul = vec![0u16; m * m];
    for a in 0..m {
        for b in 0..m {
            mul[a * m + b] = compose(a, b) as u16;
        }
    }
    FiniteGroup::from_flat(format!("D{n}"), m, mul)
}

/// Quaternion group of order 8. Indices: 1, i, j, k, −1, −i, −j, −k.
pub fn make_quaternion() -> FiniteGroup {
    // Basis products with sign: (i·j = k, j·i = −k, i² = −1, ...).
    const BASE: [[(usize, bool); 4]; 4] = [
        [(0, false), (1, false), (2, false), (3, false)],
        [(1, false), (0, true), (3, false), (2, true)],
        [(2, false), (3, true), (0, true), (1, false)],
        [(3, false), (2, false), (1, true), (0, true)],
    ];
    let mut mul = vec![0u16; 64];
    for a in 0..8 {
        for b in 0..8 {
            let (ra, sa) = (a % 4, a / 4 == 1);
            let (rb, sb) = (b % 4, b / 4 == 1);
            let (rc, sc) = BASE[ra][rb];
            let neg = sa ^ sb ^ sc;
            mul[a * 8 + b] = (rc + if neg { 4 } else { 0 }) as u16;
        }
    }
    FiniteGroup::from_flat("Q8".into(), 8, mul).expect("fixed table")
}

/// Direct product with index `(a, b) ↦ a·|B| + b`.
pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    if n > MAX_GROUP_ORDER {
        return Err(Error::Guard(format!(
            "product order {n} exceeds cap {MAX_GROUP_ORDER}"
        )));
    }
    let mut mul = vec![0u16; n * n];
    for xa in 0..na {
        for xb in 0..nb {
            let x = xa * nb + xb;
            for ya in 0..na {
                for yb in 0..nb {
                    let y = ya * nb + yb;
                    mul[x * n + y] = (a.mul(xa, ya) * nb + b.mul(xb, yb)) as u16;
                }
            }
        }
    }
    FiniteGroup::from_flat(format!("{}x{}", a.label(), b.label()), n, mul)
}

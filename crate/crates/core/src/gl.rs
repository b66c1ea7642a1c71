//! Small finite fields and matrix groups with a Frobenius symmetry.
//!
//! Fields are polynomial quotients `F_p[x]/(f)` with one fixed irreducible
//! `f` per size, so element indexing is reproducible: an element
//! `Σ cᵢ·x^i` has index `Σ cᵢ·p^i` (base-`p` digits). The irreducibles:
//!
//! | size | modulus        |
//! |-----:|----------------|
//! |    4 | x² + x + 1     |
//! |    8 | x³ + x + 1     |
//! |   16 | x⁴ + x + 1     |
//! |    9 | x² + 1         |
//!
//! Prime fields use the modulus `x` (plain arithmetic mod `p`).
//!
//! [`make_gl`] builds the group of invertible `n×n` matrices over the
//! field with `q^m` elements, acted on by a cyclic symmetry group of order
//! `m` through the entrywise `q`-power Frobenius.

use crate::cohomology::GammaGroup;
use crate::group::{FiniteGroup, MAX_GROUP_ORDER};
use crate::{Error, Result};
use std::sync::Arc;

/// An explicit finite field of size at most 16, with dense operation
/// tables.
pub struct FiniteField {
    p: usize,
    degree: usize,
    size: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

/// Low coefficients of the fixed monic irreducible for `F_{p^d}`
/// (the leading coefficient 1 is implicit).
fn modulus_for(p: usize, degree: usize) -> Result<Vec<usize>> {
    Ok(match (p, degree) {
        (_, 1) => vec![0],
        (2, 2) => vec![1, 1],
        (2, 3) => vec![1, 1, 0],
        (2, 4) => vec![1, 1, 0, 0],
        (3, 2) => vec![1, 0],
        _ => {
            return Err(Error::Guard(format!(
                "no documented irreducible for p = {p}, degree = {degree}"
            )))
        }
    })
}

impl FiniteField {
    /// The field with `p^degree` elements, `p` prime.
    pub fn new(p: usize, degree: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Guard(format!("{p} is not prime")));
        }
        let size = p.checked_pow(degree as u32).filter(|&s| s <= 16).ok_or_else(|| {
            Error::Guard(format!("field size p^{degree} with p = {p} exceeds 16"))
        })?;
        let modulus = modulus_for(p, degree)?;

        let digits = |mut e: usize| -> Vec<usize> {
            let mut d = vec![0usize; degree];
            for slot in d.iter_mut() {
                *slot = e % p;
                e /= p;
            }
            d
        };
        let pack = |d: &[usize]| -> usize {
            d.iter().rev().fold(0, |acc, &c| acc * p + c)
        };

        let mut add = vec![0u16; size * size];
        let mut mul = vec![0u16; size * size];
        for a in 0..size {
            let da = digits(a);
            for b in 0..size {
                let db = digits(b);
                let sum: Vec<usize> =
                    (0..degree).map(|i| (da[i] + db[i]) % p).collect();
                add[a * size + b] = pack(&sum) as u16;

                // Convolution, then reduction by the monic modulus.
                let mut prod = vec![0usize; 2 * degree - 1];
                for i in 0..degree {
                    for j in 0..degree {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                for i in (degree..prod.len()).rev() {
                    let c = prod[i];
                    if c != 0 {
                        prod[i] = 0;
                        for (j, &mj) in modulus.iter().enumerate() {
                            // x^degree ≡ −Σ mⱼ·x^j.
                            prod[i - degree + j] =
                                (prod[i - degree + j] + (p - mj % p) * c) % p;
                        }
                    }
                }
                mul[a * size + b] = pack(&prod[..degree]) as u16;
            }
        }

        let mut inv = vec![0u16; size];
        for a in 1..size {
            let found = (1..size).find(|&b| mul[a * size + b] == 1).ok_or_else(|| {
                Error::Guard(format!(
                    "element {a} has no inverse; the modulus is not irreducible"
                ))
            })?;
            inv[a] = found as u16;
        }

        Ok(FiniteField { p, degree, size, add, mul, inv })
    }

    /// The field of size `f`, factored as a prime power internally.
    pub fn of_size(f: usize) -> Result<Self> {
        let (p, d) = prime_power(f)
            .ok_or_else(|| Error::Guard(format!("{f} is not a prime power")))?;
        Self::new(p, d)
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn one(&self) -> usize {
        1
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.size + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.size + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        (0..self.size)
            .find(|&b| self.add(a, b) == 0)
            .expect("additive inverses exist")
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: usize) -> Result<usize> {
        if a == 0 {
            return Err(Error::Hypothesis("zero has no inverse".into()));
        }
        Ok(self.inv[a] as usize)
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut acc = 1;
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

    /// The `q`-power map `x ↦ x^q`; a field automorphism when `q` is a
    /// power of the characteristic.
    pub fn frobenius(&self, q: usize, a: usize) -> usize {
        self.pow(a, q as u64)
    }
}

pub(crate) fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Writes `n` as `p^k` with `p` prime, if possible.
pub(crate) fn prime_power(n: usize) -> Option<(usize, usize)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|&d| n % d == 0).expect("n >= 2 has a least divisor");
    if !is_prime(p) {
        return None;
    }
    let mut m = n;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    if m == 1 {
        Some((p, k))
    } else {
        None
    }
}

/// The group of invertible `n×n` matrices over the field with `q^m`
/// elements, with a cyclic symmetry group of order `m` acting entrywise by
/// `x ↦ x^q`.
///
/// Matrices are indexed in lexicographic order of their row-major entry
/// vectors, restricted to the invertible ones.
pub fn make_gl(n: usize, q: usize, m: usize) -> Result<Arc<GammaGroup>> {
    if !(1..=2).contains(&n) {
        return Err(Error::Guard(format!("matrix dimension n = {n} not in 1..=2")));
    }
    if ![2, 3, 4, 5].contains(&q) {
        return Err(Error::Guard(format!("base size q = {q} not in {{2,3,4,5}}")));
    }
    if !(1..=3).contains(&m) {
        return Err(Error::Guard(format!("extension degree m = {m} not in 1..=3")));
    }
    let f = q
        .checked_pow(m as u32)
        .filter(|&f| f <= 16)
        .ok_or_else(|| Error::Guard(format!("q^m = {q}^{m} exceeds 16")))?;
    let field = FiniteField::of_size(f)?;

    // Group order Π_{i<n} (f^n − f^i), checked against the table cap
    // before any allocation.
    let order: usize = (0..n)
        .map(|i| f.pow(n as u32) - f.pow(i as u32))
        .product();
    if order > MAX_GROUP_ORDER {
        return Err(Error::Guard(format!(
            "GL_{n} over the {f}-element field has order {order}, beyond the table cap {MAX_GROUP_ORDER}"
        )));
    }

    // Enumerate invertible matrices in lexicographic entry order.
    let nn = n * n;
    let mut mats: Vec<Vec<u16>> = Vec::with_capacity(order);
    let mut entries = vec![0usize; nn];
    loop {
        if invertible(&field, n, &entries) {
            mats.push(entries.iter().map(|&e| e as u16).collect());
        }
        let mut i = nn;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            entries[i] += 1;
            if entries[i] < f {
                break;
            }
            entries[i] = 0;
        }
        if entries.iter().all(|&e| e == 0) {
            break;
        }
    }
    debug_assert_eq!(mats.len(), order);

    let rank = |mat: &[u16]| -> usize {
        mats.binary_search_by(|probe| probe.as_slice().cmp(mat))
            .expect("products of invertible matrices are invertible")
    };

    let mut mul = vec![0u16; order * order];
    let mut buf = vec![0u16; nn];
    for (i, a) in mats.iter().enumerate() {
        for (j, b) in mats.iter().enumerate() {
            matmul(&field, n, a, b, &mut buf);
            mul[i * order + j] = rank(&buf) as u16;
        }
    }
    let label = format!("GL{n}(F{f})");
    let group = Arc::new(FiniteGroup::from_flat(label, order, mul)?);

    // Γ = C_m acting by powers of the q-Frobenius.
    let gamma = Arc::new(crate::group::make_cyclic(m)?);
    let mut action = Vec::with_capacity(m * order);
    for j in 0..m {
        let qj = q.pow(j as u32);
        for mat in &mats {
            let image: Vec<u16> = mat
                .iter()
                .map(|&e| field.frobenius(qj, e as usize) as u16)
                .collect();
            action.push(rank(&image));
        }
    }
    Ok(Arc::new(GammaGroup::new(&gamma, &group, action)?))
}

fn matmul(field: &FiniteField, n: usize, a: &[u16], b: &[u16], out: &mut [u16]) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0usize;
            for k in 0..n {
                acc = field.add(
                    acc,
                    field.mul(a[i * n + k] as usize, b[k * n + j] as usize),
                );
            }
            out[i * n + j] = acc as u16;
        }
    }
}

fn invertible(field: &FiniteField, n: usize, entries: &[usize]) -> bool {
    match n {
        1 => entries[0] != 0,
        2 => {
            let det = field.sub(
                field.mul(entries[0], entries[3]),
                field.mul(entries[1], entries[2]),
            );
            det != 0
        }
        _ => unreachable!("dimension guard"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{h1, enumerate_z1};
    use crate::Budget;

    fn field_laws(f: &FiniteField) {
        let s = f.size();
        for a in 0..s {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..s {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..s {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c))
                    );
                }
            }
        }
    }

    #[test]
    fn all_documented_fields_satisfy_field_laws() {
        for size in [2usize, 3, 4, 5, 8, 9, 16] {
            let f = FiniteField::of_size(size).unwrap();
            assert_eq!(f.size(), size);
            field_laws(&f);
        }
    }

    #[test]
    fn non_prime_powers_rejected() {
        assert!(FiniteField::of_size(6).is_err());
        assert!(FiniteField::of_size(12).is_err());
        assert!(FiniteField::of_size(1).is_err());
    }

    #[test]
    fn frobenius_fixes_exactly_the_base_field() {
        // x ↦ x^q fixes exactly q elements of the field with q^m elements.
        for (q, m) in [(2usize, 2usize), (2, 3), (3, 2), (4, 2)] {
            let f = FiniteField::of_size(q.pow(m as u32)).unwrap();
            let fixed = (0..f.size()).filter(|&a| f.frobenius(q, a) == a).count();
            assert_eq!(fixed, q, "q = {q}, m = {m}");
        }
    }

    #[test]
    fn frobenius_is_additive_and_multiplicative() {
        let f = FiniteField::of_size(9).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(
                    f.frobenius(3, f.add(a, b)),
                    f.add(f.frobenius(3, a), f.frobenius(3, b))
                );
                assert_eq!(
                    f.frobenius(3, f.mul(a, b)),
                    f.mul(f.frobenius(3, a), f.frobenius(3, b))
                );
            }
        }
    }

    #[test]
    fn gl_orders_match_the_product_formula() {
        // |GL_n(F)| = Π (f^n − f^i), f = q^m, by construction count.
        let cases = [
            (1, 2, 1, 1usize),
            (1, 3, 1, 2),
            (1, 2, 2, 3),
            (2, 2, 1, 6),
            (2, 3, 1, 48),
            (2, 2, 2, 180),
            (2, 5, 1, 480),
        ];
        for (n, q, m, expect) in cases {
            let g = make_gl(n, q, m).unwrap();
            assert_eq!(g.coeff().order(), expect, "GL_{n}(q={q},m={m})");
            assert_eq!(g.gamma().order(), m);
        }
    }

    #[test]
    fn gl1_is_cyclic_of_order_q_minus_one() {
        for q in [2usize, 3, 5] {
            let g = make_gl(1, q, 1).unwrap();
            assert_eq!(g.coeff().order(), q - 1);
            assert!(g.coeff().is_abelian());
        }
    }

    #[test]
    fn oversized_gl_is_rejected_by_the_guard() {
        // GL₂ over the 16-element field has order 61200.
        assert!(matches!(make_gl(2, 4, 2), Err(Error::Guard(_))));
    }

    #[test]
    fn parameter_guards() {
        assert!(make_gl(3, 2, 1).is_err());
        assert!(make_gl(2, 6, 1).is_err());
        assert!(make_gl(2, 2, 4).is_err());
        assert!(make_gl(1, 5, 2).is_err()); // 25 > 16
    }

    #[test]
    fn hilbert_90_smallest_case() {
        // GL₁ over F₄ with the squaring action of C₂: H¹ must be a single
        // class, with |Z¹| = |A| / |A^Γ| = 3/1 = 3.
        let g = make_gl(1, 2, 2).unwrap();
        let z = enumerate_z1(&g, &Budget::default()).unwrap();
        assert_eq!(z.len(), 3);
        let classes = h1(&g, &Budget::default()).unwrap();
        assert_eq!(classes.class_count(), 1);
    }

    #[test]
    fn hilbert_90_gl2_f4() {
        // GL₂(F₄) with the C₂ Frobenius: a non-abelian check that the
        // class count is 1. |Z¹| = |GL₂(F₄)| / |GL₂(F₂)| = 180/6 = 30.
        let g = make_gl(2, 2, 2).unwrap();
        let z = enumerate_z1(&g, &Budget::default()).unwrap();
        assert_eq!(z.len(), 30);
        let classes = h1(&g, &Budget::default()).unwrap();
        assert_eq!(classes.class_count(), 1);
    }
}

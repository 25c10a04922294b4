//! Finite-field arithmetic, matrix rank, and random-coding decodability.
//!
//! Supports binary extension fields GF(2^m) for 1 <= m <= 16 and prime
//! fields GF(p) for p < 2^16. The decodability of a random linear code is
//! the probability that a uniformly random n x k coefficient matrix has
//! rank k; three routes are provided: the exact product formula, a
//! verbatim evaluation of a published closed form kept for reference (it
//! is not a probability for k < n), and a seeded Monte-Carlo estimate.

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GfError {
    #[error("field order {0} is not a supported prime or power of two")]
    UnsupportedOrder(u64),
    #[error("polynomial {0:#x} is not irreducible of degree {1}")]
    ReduciblePolynomial(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("published decode formula evaluates to {0}, outside [0, 1]")]
    Unrepresentable(f64),
}

#[derive(Debug, Clone, PartialEq)]
enum FieldKind {
    /// GF(2^m) with shift-and-xor reduction; log/antilog tables for m <= 8.
    Binary {
        m: u32,
        poly: u32,
        tables: Option<Box<LogTables>>,
    },
    /// GF(p), p prime.
    Prime { p: u32 },
}

#[derive(Debug, Clone, PartialEq)]
struct LogTables {
    log: Vec<u16>,
    alog: Vec<u16>,
}

/// A concrete finite field: its order plus how to multiply in it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    order: u32,
    kind: FieldKind,
}

/// Polynomial multiplication in GF(2)[x] reduced modulo `poly` of degree `m`.
fn clmul_mod(mut a: u32, mut b: u32, poly: u32, m: u32) -> u32 {
    let high_bit = 1u32 << (m - 1);
    let mask = (1u32 << m) - 1;
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        let carry = a & high_bit != 0;
        a = (a << 1) & mask;
        if carry {
            a ^= poly & mask;
        }
    }
    acc
}

/// Irreducibility over GF(2) by exhaustive trial division: a degree-m
/// polynomial is reducible iff it has a factor of degree 1..=m/2.
fn is_irreducible(poly: u32, m: u32) -> bool {
    if m == 0 {
        return false;
    }
    for d in 1..=m / 2 {
        for low in 0..(1u32 << d) {
            let divisor = (1u32 << d) | low;
            if poly_rem(poly, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while poly_degree(a) >= db && a != 0 {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Numerically smallest irreducible polynomial of degree `m`.
fn default_polynomial(m: u32) -> u32 {
    let base = 1u32 << m;
    for low in 1..(1u32 << m) {
        if is_irreducible(base | low, m) {
            return base | low;
        }
    }
    unreachable!("an irreducible polynomial exists for every degree")
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// Field of the given order: a power of two up to 2^16 or a prime
    /// below 2^16. Binary fields get the default reduction polynomial.
    pub fn new(order: u64) -> Result<Self, GfError> {
        if order >= 2 && order.is_power_of_two() && order <= 1 << 16 {
            return Self::binary(order.trailing_zeros());
        }
        if order < (1 << 16) && is_prime(order as u32) {
            return Ok(FieldSpec {
                order: order as u32,
                kind: FieldKind::Prime { p: order as u32 },
            });
        }
        Err(GfError::UnsupportedOrder(order))
    }

    /// GF(2^m) with the numerically smallest irreducible polynomial.
    pub fn binary(m: u32) -> Result<Self, GfError> {
        if m == 0 || m > 16 {
            return Err(GfError::UnsupportedOrder(1u64 << m));
        }
        Self::binary_with_poly(m, default_polynomial(m))
    }

    /// GF(2^m) with an explicit reduction polynomial, e.g. 0x11B for the
    /// AES field GF(2^8).
    pub fn binary_with_poly(m: u32, poly: u32) -> Result<Self, GfError> {
        if m == 0 || m > 16 {
            return Err(GfError::UnsupportedOrder(1u64 << m));
        }
        if poly_degree(poly) != m as i32 || !is_irreducible(poly, m) {
            return Err(GfError::ReduciblePolynomial(poly, m));
        }
        let tables = (m <= 8).then(|| Box::new(Self::build_tables(m, poly)));
        Ok(FieldSpec {
            order: 1 << m,
            kind: FieldKind::Binary { m, poly, tables },
        })
    }

    fn build_tables(m: u32, poly: u32) -> LogTables {
        let q = 1usize << m;
        // Find a multiplicative generator, then tabulate its powers.
        let group = (q - 1) as u32;
        // GF(2) has the trivial multiplicative group; 1 generates it.
        let generator = if group == 1 { 1 } else { (2..q as u32)
            .find(|&cand| {
                let mut x = 1u32;
                for _ in 0..group - 1 {
                    x = clmul_mod(x, cand, poly, m);
                    if x == 1 {
                        return false;
                    }
                }
                true
            })
            .expect("multiplicative group of a finite field is cyclic") };
        let mut log = vec![0u16; q];
        let mut alog = vec![0u16; q - 1];
        let mut x = 1u32;
        for i in 0..group {
            alog[i as usize] = x as u16;
            log[x as usize] = i as u16;
            x = clmul_mod(x, generator, poly, m);
        }
        LogTables { log, alog }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Reduction polynomial bitmask for binary fields, `None` for prime
    /// fields.
    pub fn reduction_polynomial(&self) -> Option<u32> {
        match &self.kind {
            FieldKind::Binary { poly, .. } => Some(*poly),
            FieldKind::Prime { .. } => None,
        }
    }

    fn check(&self, a: u32) -> u32 {
        debug_assert!(a < self.order, "element {a} out of range for GF({})", self.order);
        a
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            FieldKind::Binary { .. } => self.check(a) ^ self.check(b),
            FieldKind::Prime { p } => ((self.check(a) as u64 + self.check(b) as u64) % *p as u64) as u32,
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            FieldKind::Binary { .. } => self.check(a) ^ self.check(b),
            FieldKind::Prime { p } => {
                ((self.check(a) as u64 + *p as u64 - self.check(b) as u64) % *p as u64) as u32
            }
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.kind {
            FieldKind::Binary { m, poly, tables } => {
                let (a, b) = (self.check(a), self.check(b));
                if a == 0 || b == 0 {
                    return 0;
                }
                if let Some(t) = tables {
                    let group = self.order - 1;
                    let e = (t.log[a as usize] as u32 + t.log[b as usize] as u32) % group;
                    t.alog[e as usize] as u32
                } else {
                    clmul_mod(a, b, *poly, *m)
                }
            }
            FieldKind::Prime { p } => {
                ((self.check(a) as u64 * self.check(b) as u64) % *p as u64) as u32
            }
        }
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32, GfError> {
        if self.check(a) == 0 {
            return Err(GfError::DivisionByZero);
        }
        if let FieldKind::Binary { tables: Some(t), .. } = &self.kind {
            let group = self.order - 1;
            let e = (group - t.log[a as usize] as u32) % group;
            return Ok(t.alog[e as usize] as u32);
        }
        // Fermat: a^(q-2).
        Ok(self.pow(a, self.order as u64 - 2))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.random_range(0..self.order)
    }
}

/// Dense row-major matrix over a finite field.
#[derive(Debug, Clone, PartialEq)]
pub struct GfMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl GfMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u32>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        GfMatrix { rows, cols, entries }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        GfMatrix { rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, spec: &FieldSpec, rng: &mut R) -> Self {
        let entries = (0..rows * cols).map(|_| spec.random(rng)).collect();
        GfMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.cols + c]
    }

    /// Rank by Gaussian elimination over the field.
    pub fn rank(&self, spec: &FieldSpec) -> usize {
        let mut m = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0;
        for col in 0..cols {
            let Some(pivot) = (rank..rows).find(|&r| m[r * cols + col] != 0) else {
                continue;
            };
            if pivot != rank {
                for c in 0..cols {
                    m.swap(pivot * cols + c, rank * cols + c);
                }
            }
            let inv = spec
                .inv(m[rank * cols + col])
                .expect("pivot is nonzero");
            for c in col..cols {
                m[rank * cols + c] = spec.mul(m[rank * cols + c], inv);
            }
            for r in 0..rows {
                if r != rank && m[r * cols + col] != 0 {
                    let factor = m[r * cols + col];
                    for c in col..cols {
                        let sub = spec.mul(factor, m[rank * cols + c]);
                        m[r * cols + c] = spec.sub(m[r * cols + c], sub);
                    }
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

/// Probability that a uniformly random `n_received` x `k` matrix over the
/// field has full column rank k: `prod_{i=0}^{k-1} (1 - q^(i - n))`,
/// accumulated in log space.
pub fn full_rank_prob_exact(n_received: usize, k: usize, spec: &FieldSpec) -> f64 {
    assert!(k >= 1, "generation size must be positive");
    if n_received < k {
        return 0.0;
    }
    let ln_q = (spec.order() as f64).ln();
    let log_p: f64 = (0..k)
        .map(|i| (-((n_received - i) as f64) * ln_q).exp())
        .map(|x| (-x).ln_1p())
        .sum();
    log_p.exp()
}

/// Verbatim evaluation, in exact rational arithmetic, of a published
/// closed form for the decode probability:
///
/// `sum_{j=0}^{n-k} (-1)^j C(n,j) prod_{i=0}^{k-1} (q^n - q^i) / (q^k - 1)^n`
///
/// The expression only yields a probability at k = n, where it coincides
/// with [`full_rank_prob_exact`]; elsewhere it falls outside [0, 1] and is
/// reported as [`GfError::Unrepresentable`]. Kept for documentation and
/// cross-checks, not for production use.
pub fn decode_prob_paper(n: usize, k: usize, spec: &FieldSpec) -> Result<f64, GfError> {
    assert!(k >= 1 && k <= n, "requires 1 <= k <= n");
    let q = BigInt::from(spec.order());
    let mut alt_sum = BigInt::zero();
    let mut binom = BigInt::one();
    for j in 0..=(n - k) {
        if j > 0 {
            binom = binom * BigInt::from(n - j + 1) / BigInt::from(j);
        }
        if j % 2 == 0 {
            alt_sum += &binom;
        } else {
            alt_sum -= &binom;
        }
    }
    let q_n = q.pow(n as u32);
    let mut numer = alt_sum;
    for i in 0..k {
        numer *= &q_n - q.pow(i as u32);
    }
    let denom = (q.pow(k as u32) - BigInt::one()).pow(n as u32);
    let value = big_ratio_to_f64(&numer, &denom);
    if !(0.0..=1.0).contains(&value) {
        return Err(GfError::Unrepresentable(value));
    }
    Ok(value)
}

/// numer/denom as f64 without intermediate overflow.
fn big_ratio_to_f64(numer: &BigInt, denom: &BigInt) -> f64 {
    let sign = if numer.is_negative() { -1.0 } else { 1.0 };
    let scaled = (numer.abs() << 64u32) / denom;
    let mut value = 0.0f64;
    let mut scale = 2f64.powi(-64);
    for digit in scaled.to_u64_digits().1 {
        value += digit as f64 * scale;
        scale *= 2f64.powi(64);
    }
    sign * value
}

/// Monte-Carlo decode probability: fraction of seeded trials in which a
/// random n x k matrix reaches rank k, with the binomial standard error.
pub fn decode_prob_mc(
    n: usize,
    k: usize,
    spec: &FieldSpec,
    trials: u64,
    seed: u64,
) -> (f64, f64) {
    assert!(trials >= 1);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut successes = 0u64;
    for _ in 0..trials {
        let m = GfMatrix::random(n, k, spec, &mut rng);
        if m.rank(spec) == k {
            successes += 1;
        }
    }
    let p = successes as f64 / trials as f64;
    let stderr = (p * (1.0 - p) / trials as f64).sqrt();
    (p, stderr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exhaustive oracle: fraction of all q^(n*k) matrices with rank k,
    /// enumerated entry by entry.
    fn full_rank_prob_by_enumeration(n: usize, k: usize, spec: &FieldSpec) -> f64 {
        let q = spec.order() as u64;
        let cells = n * k;
        let total = q.pow(cells as u32);
        let mut full = 0u64;
        for code in 0..total {
            let mut rem = code;
            let entries = (0..cells)
                .map(|_| {
                    let e = (rem % q) as u32;
                    rem /= q;
                    e
                })
                .collect();
            if GfMatrix::new(n, k, entries).rank(spec) == k {
                full += 1;
            }
        }
        full as f64 / total as f64
    }

    #[test]
    fn aes_field_inverse() {
        let f = FieldSpec::binary_with_poly(8, 0x11B).unwrap();
        assert_eq!(f.inv(0x53).unwrap(), 0xCA);
        assert_eq!(f.mul(0x53, 0xCA), 1);
    }

    #[test]
    fn default_degree_8_polynomial_is_aes() {
        let f = FieldSpec::new(256).unwrap();
        assert_eq!(f.reduction_polynomial(), Some(0x11B));
    }

    #[test]
    fn rejects_reducible_polynomial() {
        assert_eq!(
            FieldSpec::binary_with_poly(8, 0x11A),
            Err(GfError::ReduciblePolynomial(0x11A, 8))
        );
    }

    #[test]
    fn rejects_unsupported_orders() {
        for order in [0u64, 1, 6, 12, 1 << 17, 100_000] {
            assert_eq!(FieldSpec::new(order), Err(GfError::UnsupportedOrder(order)));
        }
        assert!(FieldSpec::new(1 << 16).is_ok());
        assert!(FieldSpec::new(65521).is_ok()); // largest prime below 2^16
    }

    #[test]
    fn binary_field_addition_is_involutive() {
        let f = FieldSpec::new(256).unwrap();
        for a in 0..256u32 {
            assert_eq!(f.add(a, a), 0);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.sub(a, a), 0);
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_orders() {
        for order in [8u64, 16, 7] {
            let f = FieldSpec::new(order).unwrap();
            let q = f.order();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
            assert_eq!(f.inv(0), Err(GfError::DivisionByZero));
        }
    }

    #[test]
    fn wide_binary_field_inverses() {
        // m > 8 has no lookup tables; exercise the shift-and-xor route.
        let f = FieldSpec::new(1 << 16).unwrap();
        for a in [1u32, 2, 3, 0x1234, 0xFFFF, 0xBEEF] {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        let f12 = FieldSpec::new(1 << 12).unwrap();
        for a in 1..100u32 {
            assert_eq!(f12.mul(a, f12.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn prime_field_inverse() {
        let f = FieldSpec::new(7).unwrap();
        assert_eq!(f.inv(3).unwrap(), 5);
        assert_eq!(f.sub(2, 5), 4);
    }

    #[test]
    fn rank_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(GfMatrix::identity(4).rank(&f2), 4);
        assert_eq!(GfMatrix::zero(3, 3).rank(&f2), 0);
        let f5 = FieldSpec::new(5).unwrap();
        // Second row is twice the first.
        assert_eq!(GfMatrix::new(2, 2, vec![1, 2, 2, 4]).rank(&f5), 1);
        let f256 = FieldSpec::new(256).unwrap();
        // Third row is the XOR of the first two.
        let m = GfMatrix::new(3, 3, vec![1, 2, 3, 4, 5, 6, 5, 7, 5]);
        assert_eq!(m.rank(&f256), 2);
    }

    #[test]
    fn full_rank_prob_hand_values() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(full_rank_prob_exact(1, 1, &f2), 0.5);
        assert!((full_rank_prob_exact(2, 1, &f2) - 0.75).abs() < 1e-15);
        assert_eq!(full_rank_prob_exact(3, 4, &f2), 0.0);
    }

    #[test]
    fn full_rank_prob_matches_enumeration() {
        for q in [2u64, 3, 4] {
            let f = FieldSpec::new(q).unwrap();
            for n in 1..=3usize {
                for k in 1..=n {
                    let exact = full_rank_prob_exact(n, k, &f);
                    let oracle = full_rank_prob_by_enumeration(n, k, &f);
                    assert!(
                        (exact - oracle).abs() < 1e-12,
                        "q={q} n={n} k={k}: {exact} vs {oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn full_rank_prob_monotone_in_receptions_and_field_size() {
        let f16 = FieldSpec::new(16).unwrap();
        let f256 = FieldSpec::new(256).unwrap();
        for n in 4..12usize {
            assert!(full_rank_prob_exact(n + 1, 4, &f16) > full_rank_prob_exact(n, 4, &f16));
            assert!(full_rank_prob_exact(n, 4, &f256) > full_rank_prob_exact(n, 4, &f16));
        }
        let f64k = FieldSpec::new(1 << 16).unwrap();
        assert!(full_rank_prob_exact(12, 4, &f64k) > 0.999_999);
    }

    #[test]
    fn paper_closed_form_is_unrepresentable_below_full_rate() {
        let f2 = FieldSpec::new(2).unwrap();
        match decode_prob_paper(2, 1, &f2) {
            Err(GfError::Unrepresentable(v)) => assert!((v + 3.0).abs() < 1e-12),
            other => panic!("expected unrepresentable value, got {other:?}"),
        }
        assert!(decode_prob_paper(6, 4, &FieldSpec::new(16).unwrap()).is_err());
    }

    #[test]
    fn paper_closed_form_agrees_at_full_rate() {
        // The closed form normalizes by (q^k - 1)^n rather than q^(n*k),
        // so agreement with the exact probability is asymptotic in q^k.
        for (n, q) in [(10usize, 256u64), (10, 1 << 16), (5, 65521)] {
            let f = FieldSpec::new(q).unwrap();
            let paper = decode_prob_paper(n, n, &f).unwrap();
            let exact = full_rank_prob_exact(n, n, &f);
            assert!((paper - exact).abs() < 1e-12, "n={n} q={q}");
        }
        // At small q^k the normalization mismatch is visible: the verbatim
        // value for a 1x1 system over GF(2) is 1, not 1/2.
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(decode_prob_paper(1, 1, &f2).unwrap(), 1.0);
    }

    #[test]
    fn mc_decode_prob_is_deterministic_and_consistent() {
        let f = FieldSpec::new(4).unwrap();
        let (p1, se1) = decode_prob_mc(3, 2, &f, 50_000, 11);
        let (p2, _) = decode_prob_mc(3, 2, &f, 50_000, 11);
        assert_eq!(p1, p2);
        let exact = full_rank_prob_exact(3, 2, &f);
        assert!((p1 - exact).abs() < 4.0 * se1, "{p1} vs {exact} (se {se1})");
    }

    proptest! {
        #[test]
        fn random_products_invert(q in prop::sample::select(vec![4u64, 256, 65536, 251]),
                                  a in 1u32..100_000, b in 1u32..100_000) {
            let f = FieldSpec::new(q).unwrap();
            let a = a % (f.order() - 1) + 1;
            let b = b % (f.order() - 1) + 1;
            let prod = f.mul(a, b);
            prop_assert_eq!(f.div(prod, b).unwrap(), a);
            prop_assert_eq!(f.div(prod, a).unwrap(), b);
        }

        #[test]
        fn pow_matches_repeated_multiplication(a in 1u32..255, e in 0u64..20) {
            let f = FieldSpec::new(256).unwrap();
            let mut expected = 1u32;
            for _ in 0..e {
                expected = f.mul(expected, a);
            }
            prop_assert_eq!(f.pow(a, e), expected);
        }
    }
}

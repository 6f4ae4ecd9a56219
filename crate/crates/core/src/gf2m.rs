//! Arithmetic over GF(2^m) and over binary polynomials.
//!
//! Field elements are packed bit-integers over the power basis
//! `{1, alpha, ..., alpha^(m-1)}`; multiplication goes through log/antilog
//! tables built from a fixed primitive polynomial per degree. On top of the
//! field sit cyclotomic cosets and minimal polynomials, which is all the
//! code construction needs.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Fixed primitive polynomial per degree m (2..=16), packed as an integer
/// with bit i = coefficient of x^i. Standard minimum-weight choices; the
/// selection only relabels field coordinates, so it is pinned for stable
/// golden values.
const PRIMITIVE_POLYS: [(usize, u32); 15] = [
    (2, 0b111),
    (3, 0b1011),
    (4, 0b1_0011),
    (5, 0b10_0101),
    (6, 0b100_0011),
    (7, 0b1000_1001),
    (8, 0b1_0001_1101),
    (9, 0b10_0001_0001),
    (10, 0b100_0000_1001),
    (11, 0b1000_0000_0101),
    (12, 0b1_0000_0101_0011),
    (13, 0b10_0000_0001_1011),
    (14, 0b100_0100_0100_0011),
    (15, 0b1000_0000_0000_0011),
    (16, 0b1_0001_0000_0000_1011),
];

/// An element of GF(2^m): `value` packs the coefficients over the power
/// basis, so `value < 2^m`. Zero is value 0, the multiplicative identity is
/// value 1 and the generator alpha is value 2 (the polynomial x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub value: u32,
    pub m: u8,
}

impl FieldElement {
    pub fn new(value: u32, m: u8) -> Self {
        debug_assert!(value < (1u32 << m));
        FieldElement { value, m }
    }

    pub fn zero(m: u8) -> Self {
        FieldElement { value: 0, m }
    }

    pub fn one(m: u8) -> Self {
        FieldElement { value: 1, m }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

/// Log/antilog tables realizing multiplication in GF(2^m).
///
/// `antilog[i]` is the value of alpha^i for `i` in `[0, 2^m - 2]`, and
/// `log[v]` is the exponent of the nonzero value `v` (`log[0]` is unused).
#[derive(Debug, Clone)]
pub struct FieldTable {
    pub m: u8,
    pub primitive_poly: Gf2Poly,
    log: Vec<u32>,
    antilog: Vec<u32>,
}

impl FieldTable {
    /// Build the tables for degree `m` from the module's fixed primitive
    /// polynomial. Construction verifies that x generates the full
    /// multiplicative group.
    pub fn new(m: usize) -> Result<Self> {
        let &(_, poly) = PRIMITIVE_POLYS
            .iter()
            .find(|&&(deg, _)| deg == m)
            .ok_or(Error::UnsupportedDegree(m))?;
        let order = (1usize << m) - 1;
        let mut antilog = vec![0u32; order];
        let mut log = vec![0u32; 1 << m];
        let mut acc: u32 = 1;
        for (i, slot) in antilog.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = i as u32;
            // multiply by x, reduce by the primitive polynomial
            acc <<= 1;
            if acc >> m & 1 == 1 {
                acc ^= poly;
            }
        }
        // x is primitive iff the powers 1, x, x^2, ... are pairwise distinct
        // over a full period.
        let mut seen = vec![false; 1 << m];
        for &v in &antilog {
            assert!(
                !seen[v as usize] && v != 0,
                "primitive polynomial table for m={m} is broken"
            );
            seen[v as usize] = true;
        }
        assert_eq!(acc, 1, "alpha^(2^m-1) must close the cycle");
        Ok(FieldTable {
            m: m as u8,
            primitive_poly: Gf2Poly::from_packed(poly as u64),
            log,
            antilog,
        })
    }

    /// Multiplicative group order, 2^m - 1.
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    /// alpha^e (exponent taken modulo 2^m - 1).
    pub fn alpha_pow(&self, e: usize) -> FieldElement {
        FieldElement::new(self.antilog[e % self.order()], self.m)
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: FieldElement) -> u32 {
        debug_assert!(!a.is_zero());
        self.log[a.value as usize]
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert_eq!(a.m, b.m);
        FieldElement::new(a.value ^ b.value, a.m)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert_eq!(a.m, b.m);
        debug_assert_eq!(a.m, self.m);
        if a.is_zero() || b.is_zero() {
            return FieldElement::zero(self.m);
        }
        let e = (self.log[a.value as usize] as usize + self.log[b.value as usize] as usize)
            % self.order();
        FieldElement::new(self.antilog[e], self.m)
    }

    pub fn pow(&self, a: FieldElement, e: usize) -> FieldElement {
        if a.is_zero() {
            return if e == 0 { FieldElement::one(self.m) } else { a };
        }
        let exp = (self.log[a.value as usize] as usize * e) % self.order();
        FieldElement::new(self.antilog[exp], self.m)
    }
}

/// The cyclotomic coset of `j` modulo 2^m - 1: the orbit `{j, 2j, 4j, ...}`,
/// sorted ascending.
pub fn cyclotomic_coset(j: usize, m: usize) -> Vec<usize> {
    let order = (1usize << m) - 1;
    let mut coset = Vec::new();
    let mut c = j % order;
    loop {
        coset.push(c);
        c = (c * 2) % order;
        if c == j % order {
            break;
        }
    }
    coset.sort_unstable();
    coset
}

/// The minimal polynomial of alpha^j over GF(2), computed by expanding
/// `prod_{c in coset(j)} (x + alpha^c)` in GF(2^m). Panics if any expanded
/// coefficient falls outside {0, 1}: that would mean the tables are broken,
/// not that the input is bad.
pub fn minimal_polynomial(j: usize, table: &FieldTable) -> Gf2Poly {
    let coset = cyclotomic_coset(j, table.m as usize);
    // coefficients in GF(2^m), lowest degree first
    let mut coeffs = vec![FieldElement::one(table.m)];
    for &c in &coset {
        let root = table.alpha_pow(c);
        let mut next = vec![FieldElement::zero(table.m); coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            // (x + root) * a x^i  contributes a to x^(i+1) and root*a to x^i
            next[i + 1] = table.add(next[i + 1], a);
            next[i] = table.add(next[i], table.mul(root, a));
        }
        coeffs = next;
    }
    let bits: Vec<u8> = coeffs
        .iter()
        .map(|c| {
            assert!(c.value <= 1, "minimal polynomial coefficient not in GF(2)");
            c.value as u8
        })
        .collect();
    Gf2Poly::from_coeffs(&bits)
}

/// A polynomial over GF(2), coefficients stored lowest degree first with no
/// trailing zeros; the zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gf2Poly {
    coeffs: Vec<u8>,
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Gf2Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Gf2Poly { coeffs: vec![1] }
    }

    /// Build from coefficients (lowest degree first); trailing zeros are
    /// stripped so the leading coefficient of any nonzero polynomial is 1.
    pub fn from_coeffs(coeffs: &[u8]) -> Self {
        let mut c: Vec<u8> = coeffs.iter().map(|&b| b & 1).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Gf2Poly { coeffs: c }
    }

    /// Build from a packed integer with bit i = coefficient of x^i.
    pub fn from_packed(bits: u64) -> Self {
        let mut coeffs = Vec::new();
        for i in 0..64 {
            coeffs.push(((bits >> i) & 1) as u8);
        }
        Gf2Poly::from_coeffs(&coeffs)
    }

    /// x^d
    pub fn x_pow(d: usize) -> Self {
        let mut coeffs = vec![0u8; d + 1];
        coeffs[d] = 1;
        Gf2Poly { coeffs }
    }

    /// x^n + 1 (equal to x^n - 1 in characteristic 2).
    pub fn x_pow_plus_one(n: usize) -> Self {
        let mut coeffs = vec![0u8; n + 1];
        coeffs[0] = 1;
        coeffs[n] = 1;
        Gf2Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of x^i (0 beyond the stored range).
    pub fn coeff(&self, i: usize) -> u8 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[u8] {
        &self.coeffs
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c == 1).count()
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs: Vec<u8> = (0..n).map(|i| self.coeff(i) ^ other.coeff(i)).collect();
        Gf2Poly::from_coeffs(&coeffs)
    }

    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let mut coeffs = vec![0u8; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] ^= b;
            }
        }
        Gf2Poly::from_coeffs(&coeffs)
    }

    /// Long division: returns `(q, r)` with `self = q * div + r` and
    /// `deg r < deg div`.
    pub fn divmod(&self, div: &Gf2Poly) -> Result<(Gf2Poly, Gf2Poly)> {
        if div.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        let dd = div.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Gf2Poly::zero(), self.clone()));
        }
        let mut quot = vec![0u8; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i] == 1 {
                quot[i - dd] = 1;
                for (k, &c) in div.coeffs.iter().enumerate() {
                    rem[i - dd + k] ^= c;
                }
            }
        }
        Ok((Gf2Poly::from_coeffs(&quot), Gf2Poly::from_coeffs(&rem)))
    }

    pub fn rem(&self, div: &Gf2Poly) -> Result<Gf2Poly> {
        Ok(self.divmod(div)?.1)
    }

    pub fn gcd(&self, other: &Gf2Poly) -> Gf2Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    /// Least common multiple; `lcm(a, b) * gcd(a, b) = a * b`.
    pub fn lcm(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let g = self.gcd(other);
        let (q, r) = self.divmod(&g).expect("gcd divides");
        debug_assert!(r.is_zero());
        q.mul(other)
    }

    /// Evaluate at a field element by Horner's rule over GF(2^m).
    pub fn eval_in(&self, table: &FieldTable, x: FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(table.m);
        for &c in self.coeffs.iter().rev() {
            acc = table.mul(acc, x);
            if c == 1 {
                acc = table.add(acc, FieldElement::one(table.m));
            }
        }
        acc
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            if self.coeffs[i] == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

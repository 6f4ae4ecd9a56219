//! Construction of BCH and punctured Reed-Muller codes, their extended
//! versions, the coordinate permutations induced by field translations, and
//! the parity-check matrices the decoder runs on.
//!
//! Coordinate conventions: a cyclic codeword of length `n = 2^m - 1` is the
//! coefficient vector of its code polynomial, lowest degree first. The
//! extended code prepends the overall parity bit, so extended coordinate 0
//! is the parity bit and extended coordinate `v >= 1` is cyclic coordinate
//! `v - 1`. The index map `f` sends 0 to the field zero and `i >= 1` to
//! `alpha^(i-1)`, which makes the extended coordinate set `{0, ..., n}` a
//! copy of GF(2^m).

use crate::gf2m::{minimal_polynomial, FieldTable, Gf2Poly};
use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Code family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeFamily {
    Bch,
    PuncturedRm,
}

impl CodeFamily {
    fn as_str(&self) -> &'static str {
        match self {
            CodeFamily::Bch => "bch",
            CodeFamily::PuncturedRm => "punctured_rm",
        }
    }
}

/// A constructed cyclic code, optionally extended by an overall parity bit.
///
/// For BCH codes `design_param` is the designed-distance parameter (the
/// generator collects the minimal polynomials of the first `design_param`
/// odd powers of alpha); for punctured RM codes it is the order `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub family: CodeFamily,
    pub m: usize,
    /// Cyclic code length, 2^m - 1.
    pub n_cyclic: usize,
    pub k: usize,
    pub generator: Gf2Poly,
    pub check_poly: Gf2Poly,
    pub design_param: usize,
    pub extended: bool,
}

impl CodeSpec {
    /// BCH code of length 2^m - 1 whose generator is the lcm of the minimal
    /// polynomials of alpha, alpha^3, ..., alpha^(2*delta - 1).
    pub fn bch(m: usize, delta: usize) -> Result<CodeSpec> {
        if delta < 1 {
            return Err(Error::InvalidParameter("bch requires delta >= 1".into()));
        }
        let table = FieldTable::new(m)?;
        let exponents: Vec<usize> = (0..delta).map(|i| 2 * i + 1).collect();
        Self::from_exponents(CodeFamily::Bch, m, delta, &table, &exponents)
    }

    /// Punctured Reed-Muller code of order `r` and length 2^m - 1. The
    /// generator collects the minimal polynomials of alpha^j for every j
    /// whose binary weight lies in [1, m - r - 1].
    pub fn punctured_rm(m: usize, r: usize) -> Result<CodeSpec> {
        if r + 2 > m {
            return Err(Error::InvalidParameter(
                "punctured RM requires 0 <= r <= m - 2".into(),
            ));
        }
        let table = FieldTable::new(m)?;
        let max_weight = m - r - 1;
        let exponents: Vec<usize> = (1..=(1usize << m) - 2)
            .filter(|j| {
                let w = j.count_ones() as usize;
                (1..=max_weight).contains(&w)
            })
            .collect();
        if exponents.is_empty() {
            return Err(Error::DegenerateCode("empty generator exponent set".into()));
        }
        let spec = Self::from_exponents(CodeFamily::PuncturedRm, m, r, &table, &exponents)?;
        // The dimension must agree with the binomial-sum count for RM codes.
        let expect: usize = (0..=r).map(|i| binomial(m, i)).sum();
        if spec.k != expect {
            return Err(Error::DegenerateCode(format!(
                "punctured RM dimension {} does not match expected {}",
                spec.k, expect
            )));
        }
        Ok(spec)
    }

    fn from_exponents(
        family: CodeFamily,
        m: usize,
        design_param: usize,
        table: &FieldTable,
        exponents: &[usize],
    ) -> Result<CodeSpec> {
        let n = (1usize << m) - 1;
        let mut g = Gf2Poly::one();
        for &j in exponents {
            g = g.lcm(&minimal_polynomial(j, table));
        }
        let deg = g.degree().expect("nonzero generator");
        if deg >= n {
            return Err(Error::DegenerateCode(format!(
                "generator degree {deg} leaves no message bits at n={n}"
            )));
        }
        let h = check_polynomial(&g, n)?;
        Ok(CodeSpec {
            family,
            m,
            n_cyclic: n,
            k: n - deg,
            generator: g,
            check_poly: h,
            design_param,
            extended: false,
        })
    }

    /// The same code with the overall parity bit prepended. Idempotent.
    pub fn to_extended(&self) -> CodeSpec {
        CodeSpec {
            extended: true,
            ..self.clone()
        }
    }

    /// Transmitted block length: `n_cyclic` for the cyclic code, `2^m` for
    /// the extended code.
    pub fn length(&self) -> usize {
        self.n_cyclic + usize::from(self.extended)
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.length() as f64
    }

    /// Systematic encoding: the message occupies the high-degree cyclic
    /// coordinates and the low coordinates carry the remainder of dividing
    /// by the generator. Extended codes prepend the overall parity bit.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                got: message.len(),
            });
        }
        let shift = self.n_cyclic - self.k;
        let mut coeffs = vec![0u8; self.n_cyclic];
        coeffs[shift..].copy_from_slice(message);
        let shifted = Gf2Poly::from_coeffs(&coeffs);
        let rem = shifted.rem(&self.generator).expect("nonzero generator");
        let mut cyclic = vec![0u8; self.n_cyclic];
        for (i, slot) in cyclic.iter_mut().enumerate() {
            *slot = if i < shift {
                rem.coeff(i)
            } else {
                message[i - shift]
            };
        }
        if !self.extended {
            return Ok(cyclic);
        }
        let parity = cyclic.iter().fold(0u8, |a, &b| a ^ b);
        let mut word = Vec::with_capacity(self.n_cyclic + 1);
        word.push(parity);
        word.extend_from_slice(&cyclic);
        Ok(word)
    }

    /// True iff `bits` is a codeword. The slice length must equal
    /// [`CodeSpec::length`].
    pub fn is_codeword(&self, bits: &[u8]) -> bool {
        assert_eq!(bits.len(), self.length(), "is_codeword length");
        let cyclic = if self.extended {
            let parity = bits.iter().fold(0u8, |a, &b| a ^ b);
            if parity != 0 {
                return false;
            }
            &bits[1..]
        } else {
            bits
        };
        Gf2Poly::from_coeffs(cyclic)
            .rem(&self.generator)
            .expect("nonzero generator")
            .is_zero()
    }

    /// Short label used in reports, e.g. `bch(15,7)` or `bch-ext(16,7)`.
    pub fn label(&self) -> String {
        let fam = match self.family {
            CodeFamily::Bch => "bch",
            CodeFamily::PuncturedRm => "prm",
        };
        let ext = if self.extended { "-ext" } else { "" };
        format!("{fam}{ext}({},{})", self.length(), self.k)
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// The parity-check polynomial `(x^n - 1) / g`. Fails if the generator does
/// not divide `x^n - 1`, which signals a construction bug upstream.
pub fn check_polynomial(generator: &Gf2Poly, n: usize) -> Result<Gf2Poly> {
    let (q, r) = Gf2Poly::x_pow_plus_one(n).divmod(generator)?;
    if !r.is_zero() {
        return Err(Error::DegenerateCode(
            "generator does not divide x^n - 1".into(),
        ));
    }
    Ok(q)
}

// ---------------------------------------------------------------------------
// Dense binary matrices
// ---------------------------------------------------------------------------

/// Dense binary matrix with 0/1 entries stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<u8>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v & 1;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Inner product of row `r` with `bits` over GF(2).
    pub fn row_dot(&self, r: usize, bits: &[u8]) -> u8 {
        self.row(r)
            .iter()
            .zip(bits)
            .fold(0u8, |acc, (&h, &b)| acc ^ (h & b))
    }

    pub fn column_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c) == 1).count()
    }

    /// Rows of '0'/'1' characters, one line per row.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            for &b in self.row(r) {
                s.push(if b == 1 { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

/// The classic `(n-k) x n` parity-check matrix of a cyclic code: row `i` is
/// the reversed coefficient vector of the check polynomial shifted right by
/// `i` positions.
pub fn eq1_check_matrix(spec: &CodeSpec) -> Result<BinMatrix> {
    if spec.extended {
        return Err(Error::InvalidParameter(
            "eq1_check_matrix takes the cyclic (non-extended) code".into(),
        ));
    }
    let n = spec.n_cyclic;
    let k = spec.k;
    let mut mat = BinMatrix::zeros(n - k, n);
    for i in 0..n - k {
        for d in 0..=k {
            mat.set(i, i + d, spec.check_poly.coeff(k - d));
        }
    }
    Ok(mat)
}

/// The `(n-1) x n` parity-check matrix of the extended code (`n = 2^m`):
/// an all-zero column in front of the full circulant whose rows are all
/// `n - 1` cyclic shifts of the reversed check polynomial.
pub fn build_h0(spec: &CodeSpec) -> Result<BinMatrix> {
    if !spec.extended {
        return Err(Error::InvalidParameter(
            "build_h0 takes the extended code".into(),
        ));
    }
    let nc = spec.n_cyclic;
    let k = spec.k;
    // base[p] = coefficient h_(k-p); zero beyond degree k
    let mut base = vec![0u8; nc];
    for (p, slot) in base.iter_mut().enumerate().take(k + 1) {
        *slot = spec.check_poly.coeff(k - p);
    }
    let mut mat = BinMatrix::zeros(nc, nc + 1);
    for r in 0..nc {
        for p in 0..nc {
            // row r is the base row cyclically shifted right by r
            mat.set(r, 1 + p, base[(p + nc - r) % nc]);
        }
    }
    Ok(mat)
}

// ---------------------------------------------------------------------------
// Index map and translation permutations
// ---------------------------------------------------------------------------

/// The bijection `f` between extended coordinates `{0, ..., n}` and GF(2^m):
/// `f(0) = 0` and `f(i) = alpha^(i-1)` for `i >= 1`.
#[derive(Debug, Clone)]
pub struct IndexMap {
    pub m: u8,
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl IndexMap {
    pub fn new(table: &FieldTable) -> Self {
        let size = 1usize << table.m;
        let mut forward = vec![0u32; size];
        let mut inverse = vec![0u32; size];
        for i in 1..size {
            let v = table.alpha_pow(i - 1).value;
            forward[i] = v;
            inverse[v as usize] = i as u32;
        }
        IndexMap {
            m: table.m,
            forward,
            inverse,
        }
    }

    /// Number of extended coordinates, 2^m.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self, i: usize) -> u32 {
        self.forward[i]
    }

    pub fn inverse(&self, value: u32) -> usize {
        self.inverse[value as usize] as usize
    }
}

/// The permutation of extended coordinates induced by the field translation
/// `X -> X + f(j)`. An involution; `j = 0` is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaPermutation {
    pub j: usize,
    mapping: Vec<u32>,
}

impl SigmaPermutation {
    #[inline]
    pub fn apply(&self, v: usize) -> usize {
        self.mapping[v] as usize
    }

    pub fn mapping(&self) -> &[u32] {
        &self.mapping
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(v, &w)| v as u32 == w)
    }

    /// `out[v] = xs[sigma(v)]`. Because sigma is an involution this is both
    /// the forward and the inverse coordinate permutation.
    pub fn permute<T: Copy>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(xs.len(), self.mapping.len());
        self.mapping.iter().map(|&w| xs[w as usize]).collect()
    }
}

/// Build the translation permutation for index `j`.
pub fn sigma(j: usize, map: &IndexMap) -> SigmaPermutation {
    assert!(j < map.len());
    let fj = map.forward(j);
    let mapping = (0..map.len())
        .map(|v| map.inverse(map.forward(v) ^ fj) as u32)
        .collect();
    SigmaPermutation { j, mapping }
}

/// All 2^m translation permutations, in index order.
pub fn all_sigmas(map: &IndexMap) -> Vec<SigmaPermutation> {
    (0..map.len()).map(|j| sigma(j, map)).collect()
}

// ---------------------------------------------------------------------------
// Stacked parity-check matrix
// ---------------------------------------------------------------------------

/// The large parity-check matrix used by the decoder: `P` blocks, where
/// block `z` is `H_0` with its columns permuted by `sigma_z`, i.e.
/// `H_z[i, sigma_z(j)] = H_0[i, j]`. Column `z` of block `z` is all-zero
/// (the image of the zero column) and every other column has exactly `u`
/// ones, where `u` is the weight of the check polynomial.
#[derive(Debug, Clone)]
pub struct StackedCheckMatrix {
    pub code: CodeSpec,
    pub p: usize,
    pub u: usize,
    pub blocks: Vec<BinMatrix>,
    pub sigmas: Vec<SigmaPermutation>,
}

impl StackedCheckMatrix {
    pub fn build(spec: &CodeSpec, p: usize) -> Result<Self> {
        if !spec.extended {
            return Err(Error::InvalidParameter(
                "stacked matrix takes the extended code".into(),
            ));
        }
        let n = spec.length();
        if p < 1 || p > n {
            return Err(Error::InvalidParameter(format!(
                "P must lie in [1, {n}], got {p}"
            )));
        }
        let h0 = build_h0(spec)?;
        let table = FieldTable::new(spec.m)?;
        let map = IndexMap::new(&table);
        let mut blocks = Vec::with_capacity(p);
        let mut sigmas = Vec::with_capacity(p);
        for z in 0..p {
            let s = sigma(z, &map);
            let mut block = BinMatrix::zeros(h0.rows, h0.cols);
            for i in 0..h0.rows {
                for j in 0..h0.cols {
                    if h0.get(i, j) == 1 {
                        block.set(i, s.apply(j), 1);
                    }
                }
            }
            blocks.push(block);
            sigmas.push(s);
        }
        Ok(StackedCheckMatrix {
            code: spec.clone(),
            p,
            u: spec.check_poly.weight(),
            blocks,
            sigmas,
        })
    }

    /// Column count, 2^m.
    pub fn n(&self) -> usize {
        self.code.length()
    }

    /// Rows per block, 2^m - 1.
    pub fn rows_per_block(&self) -> usize {
        self.n() - 1
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CodeSpecRepr {
    family: String,
    m: usize,
    delta_or_r: usize,
    n: usize,
    k: usize,
    generator_coeffs: Vec<u8>,
    primitive_poly: Vec<u8>,
    extended: bool,
}

impl Serialize for CodeSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let table = FieldTable::new(self.m).map_err(serde::ser::Error::custom)?;
        CodeSpecRepr {
            family: self.family.as_str().to_string(),
            m: self.m,
            delta_or_r: self.design_param,
            n: self.n_cyclic,
            k: self.k,
            generator_coeffs: self.generator.coeffs().to_vec(),
            primitive_poly: table.primitive_poly.coeffs().to_vec(),
            extended: self.extended,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CodeSpecRepr::deserialize(deserializer)?;
        let rebuilt = match repr.family.as_str() {
            "bch" => CodeSpec::bch(repr.m, repr.delta_or_r),
            "punctured_rm" => CodeSpec::punctured_rm(repr.m, repr.delta_or_r),
            other => {
                return Err(D::Error::custom(format!("unknown code family `{other}`")));
            }
        }
        .map_err(D::Error::custom)?;
        let table = FieldTable::new(repr.m).map_err(D::Error::custom)?;
        if repr.n != rebuilt.n_cyclic
            || repr.k != rebuilt.k
            || repr.generator_coeffs != rebuilt.generator.coeffs()
            || repr.primitive_poly != table.primitive_poly.coeffs()
        {
            return Err(D::Error::custom(
                "code parameters do not match their reconstruction",
            ));
        }
        Ok(if repr.extended {
            rebuilt.to_extended()
        } else {
            rebuilt
        })
    }
}

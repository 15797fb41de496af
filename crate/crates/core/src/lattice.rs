//! Even lattices and their discriminant forms.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cyclotomic::CycloNumber;
use crate::error::{Error, Result};
use crate::intmat::{determinant, smith_normal_form, IntMatrix};

/// A nondegenerate even integral lattice given by its Gram matrix.
#[derive(Clone, Debug)]
pub struct Lattice {
    gram: IntMatrix,
    entries: Vec<Vec<i64>>,
    sig_pos: usize,
    sig_neg: usize,
    det: BigInt,
}

pub fn validate_lattice(gram: &[Vec<i64>]) -> Result<Lattice> {
    let n = gram.len();
    if n == 0 {
        return Err(Error::InvalidLattice("empty Gram matrix".into()));
    }
    for (i, row) in gram.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidLattice(format!(
                "Gram matrix is not square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(Error::InvalidLattice(format!(
                    "Gram matrix is not symmetric: entry ({i},{j}) = {} but ({j},{i}) = {}",
                    gram[i][j], gram[j][i]
                )));
            }
        }
        if gram[i][i] % 2 != 0 {
            return Err(Error::InvalidLattice(format!(
                "lattice is not even: diagonal entry ({i},{i}) = {} is odd",
                gram[i][i]
            )));
        }
    }
    let m = IntMatrix::from_rows(gram);
    let det = determinant(&m);
    if det.is_zero() {
        return Err(Error::InvalidLattice("Gram matrix is singular".into()));
    }
    let (sig_pos, sig_neg) = inertia(gram);
    Ok(Lattice { gram: m, entries: gram.to_vec(), sig_pos, sig_neg, det })
}

/// Inertia (positive, negative) of a nonsingular symmetric matrix by exact
/// congruence diagonalization.
fn inertia(gram: &[Vec<i64>]) -> (usize, usize) {
    let n = gram.len();
    let mut a: Vec<Vec<BigRational>> = gram
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // row_k += row_j, col_k += col_j: a_kk becomes 2 a_kj
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[k][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][k] += t;
                }
            } else {
                continue;
            }
        }
        let p = a[k][k].clone();
        if p.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for c in k..n {
                let s = &f * &a[k][c];
                a[i][c] -= s;
            }
            for r in k..n {
                let s = &f * &a[r][k];
                a[r][i] -= s;
            }
        }
    }
    (pos, neg)
}

impl Lattice {
    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn gram_matrix(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.sig_pos, self.sig_neg)
    }

    /// sig_pos − sig_neg.
    pub fn signature_index(&self) -> i64 {
        self.sig_pos as i64 - self.sig_neg as i64
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// True for signature (2, l) with l ≥ 3.
    pub fn is_orthogonal_type(&self) -> bool {
        self.sig_pos == 2 && self.sig_neg >= 3
    }

    /// l for signature (2, l).
    pub fn l(&self) -> Option<usize> {
        (self.sig_pos == 2).then_some(self.sig_neg)
    }

    /// (v, w) for integer coordinate vectors.
    pub fn inner(&self, v: &[BigRational], w: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                if self.entries[i][j] != 0 {
                    acc += vi * wj * BigRational::from_integer(self.entries[i][j].into());
                }
            }
        }
        acc
    }

    pub fn discriminant_form(&self) -> DiscriminantForm {
        discriminant_form(self)
    }
}

/// Coordinates of an element of L'/L with respect to the generators of a
/// [`DiscriminantForm`]; `coords[i]` lies in `0..orders[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DfElement {
    pub coords: Vec<u64>,
}

impl DfElement {
    pub fn new(coords: Vec<u64>) -> Self {
        DfElement { coords }
    }
}

#[derive(Debug)]
struct Embedding {
    /// Generators g_i as rational vectors in lattice coordinates.
    generators: Vec<Vec<BigRational>>,
    /// Rows of U·G for the nontrivial elementary divisors; row i applied to
    /// v ∈ L' gives coords[i] mod d_i.
    projector: Vec<Vec<BigInt>>,
    lattice_rank: usize,
}

/// The finite quadratic module L'/L.
///
/// Values of q and (·,·) are stored as residues modulo `level`: `q_res[i]`
/// is level·q(g_i) mod level and `b_res[i][j]` is level·(g_i,g_j) mod level.
#[derive(Clone)]
pub struct DiscriminantForm {
    orders: Vec<u64>,
    level: u64,
    size: u64,
    q_res: Vec<u64>,
    b_res: Vec<Vec<u64>>,
    strides: Vec<u64>,
    embedding: Option<Arc<Embedding>>,
}

impl PartialEq for DiscriminantForm {
    fn eq(&self, other: &Self) -> bool {
        self.orders == other.orders
            && self.level == other.level
            && self.q_res == other.q_res
            && self.b_res == other.b_res
    }
}

impl Eq for DiscriminantForm {}

fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::InvalidDiscriminantForm(format!("{what} {x} does not fit in 64 bits")))
}

fn residue(r: &BigRational, level: u64) -> u64 {
    let v = r * BigRational::from_integer(level.into());
    debug_assert!(v.is_integer());
    v.to_integer().mod_floor(&BigInt::from(level)).to_u64().unwrap()
}

pub fn discriminant_form(lat: &Lattice) -> DiscriminantForm {
    let g = &lat.gram;
    let n = lat.rank();
    let snf = smith_normal_form(g);
    let nontrivial: Vec<usize> = (0..n).filter(|&i| !snf.diag[i].is_one()).collect();
    let orders: Vec<BigInt> = nontrivial.iter().map(|&i| snf.diag[i].clone()).collect();
    let generators: Vec<Vec<BigRational>> = nontrivial
        .iter()
        .map(|&i| {
            (0..n)
                .map(|r| BigRational::new(snf.v[(r, i)].clone(), snf.diag[i].clone()))
                .collect()
        })
        .collect();
    let ug = snf.u.mul(g);
    let projector = nontrivial.iter().map(|&i| ug.row(i).to_vec()).collect();
    let k = generators.len();
    let mut gram_q = vec![vec![BigRational::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let b = lat.inner(&generators[i], &generators[j]);
            gram_q[i][j] = if i == j { b / BigInt::from(2) } else { b };
        }
    }
    let orders_u: Vec<u64> = orders
        .iter()
        .map(|d| to_u64(d, "elementary divisor").expect("discriminant group too large"))
        .collect();
    let mut df = DiscriminantForm::from_rational_tables(orders_u, &gram_q)
        .expect("lattice discriminant form is consistent by construction");
    df.embedding = Some(Arc::new(Embedding { generators, projector, lattice_rank: n }));
    df
}

impl DiscriminantForm {
    /// The trivial module (unimodular lattices).
    pub fn trivial() -> Self {
        Self::from_rational_tables(vec![], &[]).unwrap()
    }

    /// Builds a module from generator orders and the table whose diagonal
    /// holds q(g_i) and whose off-diagonal entries hold (g_i, g_j), both
    /// taken mod 1.
    pub fn from_rational_tables(orders: Vec<u64>, q_gram: &[Vec<BigRational>]) -> Result<Self> {
        let k = orders.len();
        if q_gram.len() != k || q_gram.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidDiscriminantForm(format!(
                "q_gram must be {k}x{k} to match {k} generator orders"
            )));
        }
        if let Some(i) = orders.iter().position(|&d| d < 2) {
            return Err(Error::InvalidDiscriminantForm(format!(
                "generator order {} at position {i} must exceed 1",
                orders[i]
            )));
        }
        let mut level = BigInt::one();
        for i in 0..k {
            for j in 0..k {
                if i != j && q_gram[i][j] != q_gram[j][i] {
                    return Err(Error::InvalidDiscriminantForm(format!(
                        "bilinear table not symmetric at ({i},{j})"
                    )));
                }
                let di = BigInt::from(orders[i]);
                let ok = if i == j {
                    (&q_gram[i][i] * BigRational::from_integer(&di * &di)).is_integer()
                        && (&q_gram[i][i] * BigRational::from_integer(&di * 2)).is_integer()
                } else {
                    (&q_gram[i][j] * BigRational::from_integer(di)).is_integer()
                };
                if !ok {
                    return Err(Error::InvalidDiscriminantForm(format!(
                        "entry ({i},{j}) = {} is incompatible with generator order {}",
                        q_gram[i][j], orders[i]
                    )));
                }
                level = level.lcm(q_gram[i][j].denom());
            }
        }
        let level = to_u64(&level, "level")?;
        let mut q_res = vec![0; k];
        let mut b_res = vec![vec![0; k]; k];
        for i in 0..k {
            q_res[i] = residue(&q_gram[i][i], level);
            for j in 0..k {
                b_res[i][j] = if i == j {
                    (2 * q_res[i]) % level
                } else {
                    residue(&q_gram[i][j], level)
                };
            }
        }
        let mut size: u64 = 1;
        for &d in &orders {
            size = size.checked_mul(d).ok_or_else(|| {
                Error::InvalidDiscriminantForm("discriminant group too large".into())
            })?;
        }
        let mut strides = vec![1u64; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1];
        }
        Ok(DiscriminantForm { orders, level, size, q_res, b_res, strides, embedding: None })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// The table of q(g_i) (diagonal) and (g_i, g_j) (off-diagonal) mod 1.
    pub fn q_gram(&self) -> Vec<Vec<Rational64>> {
        let l = self.level as i64;
        (0..self.rank())
            .map(|i| {
                (0..self.rank())
                    .map(|j| {
                        let r = if i == j { self.q_res[i] } else { self.b_res[i][j] };
                        Rational64::new(r as i64, l)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn zero(&self) -> DfElement {
        DfElement { coords: vec![0; self.rank()] }
    }

    pub fn generator(&self, i: usize) -> DfElement {
        let mut e = self.zero();
        e.coords[i] = 1;
        e
    }

    /// Reduces arbitrary integer coordinates into canonical range.
    pub fn normalize(&self, coords: &[i64]) -> DfElement {
        assert_eq!(coords.len(), self.rank(), "coordinate vector has wrong length");
        DfElement {
            coords: coords
                .iter()
                .zip(&self.orders)
                .map(|(&c, &d)| c.rem_euclid(d as i64) as u64)
                .collect(),
        }
    }

    pub fn index_of(&self, a: &DfElement) -> usize {
        a.coords
            .iter()
            .zip(&self.strides)
            .zip(&self.orders)
            .map(|((&c, &s), &d)| (c % d) * s)
            .sum::<u64>() as usize
    }

    pub fn element(&self, idx: usize) -> DfElement {
        let idx = idx as u64;
        DfElement {
            coords: self
                .strides
                .iter()
                .zip(&self.orders)
                .map(|(&s, &d)| (idx / s) % d)
                .collect(),
        }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = DfElement> + '_ {
        (0..self.size as usize).map(|i| self.element(i))
    }

    pub fn add(&self, a: &DfElement, b: &DfElement) -> DfElement {
        DfElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.orders)
                .map(|((&x, &y), &d)| (x + y) % d)
                .collect(),
        }
    }

    pub fn neg(&self, a: &DfElement) -> DfElement {
        DfElement {
            coords: a
                .coords
                .iter()
                .zip(&self.orders)
                .map(|(&x, &d)| (d - x % d) % d)
                .collect(),
        }
    }

    /// Index of −α for each α, in index order.
    pub fn negation_table(&self) -> Vec<usize> {
        self.elements().map(|a| self.index_of(&self.neg(&a))).collect()
    }

    /// level·q(a) mod level.
    pub fn q_residue(&self, a: &DfElement) -> u64 {
        let l = self.level as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            let ai = (a.coords[i] % self.orders[i]) as u128;
            if ai == 0 {
                continue;
            }
            acc += (ai * ai % l) * self.q_res[i] as u128;
            for j in i + 1..self.rank() {
                let aj = (a.coords[j] % self.orders[j]) as u128;
                acc += (ai * aj % l) * self.b_res[i][j] as u128;
            }
            acc %= l;
        }
        (acc % l) as u64
    }

    /// level·(a, b) mod level.
    pub fn b_residue(&self, a: &DfElement, b: &DfElement) -> u64 {
        let l = self.level as u128;
        let mut acc: u128 = 0;
        for i in 0..self.rank() {
            let ai = (a.coords[i] % self.orders[i]) as u128;
            if ai == 0 {
                continue;
            }
            for j in 0..self.rank() {
                let bj = (b.coords[j] % self.orders[j]) as u128;
                acc += (ai * bj % l) * self.b_res[i][j] as u128;
            }
            acc %= l;
        }
        (acc % l) as u64
    }

    /// level·q(α) mod level for every α in index order.
    pub fn q_residues(&self) -> Vec<u64> {
        self.elements().map(|a| self.q_residue(&a)).collect()
    }

    /// Preimage representative of a ∈ L'/L as a rational lattice vector;
    /// only available for forms computed from a lattice.
    pub fn representative(&self, a: &DfElement) -> Option<Vec<BigRational>> {
        let emb = self.embedding.as_ref()?;
        let mut v = vec![BigRational::zero(); emb.lattice_rank];
        for (c, g) in a.coords.iter().zip(&emb.generators) {
            for (vi, gi) in v.iter_mut().zip(g) {
                *vi += gi * BigRational::from_integer((*c).into());
            }
        }
        Some(v)
    }

    /// Class in L'/L of a vector v ∈ L' given in lattice coordinates.
    pub fn class_of(&self, v: &[BigRational]) -> Result<DfElement> {
        let emb = self.embedding.as_ref().ok_or_else(|| {
            Error::Precondition("discriminant form carries no lattice embedding".into())
        })?;
        let mut coords = Vec::with_capacity(self.rank());
        for (row, &d) in emb.projector.iter().zip(&self.orders) {
            let mut acc = BigRational::zero();
            for (r, x) in row.iter().zip(v) {
                acc += BigRational::from_integer(r.clone()) * x;
            }
            if !acc.is_integer() {
                return Err(Error::Precondition("vector does not lie in the dual lattice".into()));
            }
            coords.push(acc.to_integer().mod_floor(&BigInt::from(d)).to_u64().unwrap());
        }
        Ok(DfElement { coords })
    }
}

pub fn qvalue(df: &DiscriminantForm, a: &DfElement) -> Rational64 {
    Rational64::new(df.q_residue(a) as i64, df.level as i64)
}

pub fn bilinear(df: &DiscriminantForm, a: &DfElement, b: &DfElement) -> Rational64 {
    Rational64::new(df.b_residue(a, b) as i64, df.level as i64)
}

/// lcm(level, 8): the field holding every e(q(α)) and every eighth root of
/// unity.
pub fn gauss_modulus(df: &DiscriminantForm) -> u64 {
    df.level.lcm(&8)
}

/// Σ_α e(q(α)) in Q(ζ_M) with M = lcm(level, 8).
pub fn gauss_sum(df: &DiscriminantForm) -> CycloNumber {
    let m = gauss_modulus(df);
    let step = (m / df.level) as usize;
    let mut counts = vec![0i64; m as usize];
    for r in df.q_residues() {
        counts[r as usize * step] += 1;
    }
    CycloNumber::from_exponent_counts(m, &counts)
}

/// Checks g = √|L'/L| · e(sig/8) exactly: with x = g·ζ_8^{−sig}, x must be
/// real, positive and satisfy x² = |L'/L|.
pub fn milgram_check(lat: &Lattice) -> bool {
    let df = discriminant_form(lat);
    milgram_holds(&df, lat.signature_index())
}

pub fn milgram_holds(df: &DiscriminantForm, signature: i64) -> bool {
    let g = gauss_sum(df);
    let m = g.modulus();
    let x = g.mul_root(-signature * (m as i64 / 8));
    x == x.conj() && &x * &x == CycloNumber::from_integer(m, df.size) && x.embed().re > 0.0
}

impl fmt::Debug for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiscriminantForm {{ orders: {:?}, level: {}, q_gram: [", self.orders, self.level)?;
        for (i, row) in self.q_gram().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(|r| r.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "] }}")
    }
}

impl fmt::Display for DiscriminantForm {
    /// Text table: orders, level, size, then the q/bilinear table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "orders: {:?}", self.orders)?;
        writeln!(f, "size:   {}", self.size)?;
        writeln!(f, "level:  {}", self.level)?;
        writeln!(f, "q_gram (diagonal q(g_i), off-diagonal (g_i,g_j), mod 1):")?;
        for row in self.q_gram() {
            let cells: Vec<String> = row.iter().map(|r| format!("{:>6}", r.to_string())).collect();
            writeln!(f, "  {}", cells.join(" "))?;
        }
        Ok(())
    }
}

//! The Weil representation of Mp₂(Z) on C[L'/L], exactly over Q(ζ_M) and in
//! double precision.
//!
//! Basis vectors e_α are indexed by [`DiscriminantForm::index_of`]. On the
//! generators,
//!
//!   ρ(T) e_α = e(q(α)) e_α,
//!   ρ(S) e_α = g⁻¹ Σ_β e(−(β, α)) e_β,   g = Σ_α e(q(α)),
//!
//! and the dual ρ* is the entrywise conjugate.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;

use crate::cyclotomic::CycloNumber;
use crate::lattice::{gauss_modulus, gauss_sum, DiscriminantForm};
use crate::metaplectic::{word_decompose, Generator, MetaplecticElement, Word};

/// A square matrix with entries in a single cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeilMatrix {
    m: u64,
    dim: usize,
    entries: Vec<CycloNumber>,
}

impl WeilMatrix {
    pub fn identity(m: u64, dim: usize) -> Self {
        let mut entries = vec![CycloNumber::zero(m); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = CycloNumber::one(m);
        }
        WeilMatrix { m, dim, entries }
    }

    pub fn from_fn(m: u64, dim: usize, f: impl Fn(usize, usize) -> CycloNumber) -> Self {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        WeilMatrix { m, dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> &CycloNumber {
        &self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[CycloNumber] {
        &self.entries
    }

    pub fn mul(&self, other: &WeilMatrix) -> WeilMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        assert_eq!(self.m, other.m, "matrices over different cyclotomic fields");
        let n = self.dim;
        let m = self.m;
        let entries = (0..n * n)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let mut acc = CycloNumber::zero(m);
                for l in 0..n {
                    let a = self.entry(i, l);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.entry(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                acc
            })
            .collect();
        WeilMatrix { m, dim: n, entries }
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> WeilMatrix {
        WeilMatrix {
            m: self.m,
            dim: self.dim,
            entries: self.entries.iter().map(CycloNumber::conj).collect(),
        }
    }

    pub fn transpose(&self) -> WeilMatrix {
        let n = self.dim;
        WeilMatrix::from_fn(self.m, n, |i, j| self.entry(j, i).clone())
    }

    pub fn conj_transpose(&self) -> WeilMatrix {
        self.transpose().conj()
    }

    pub fn is_unitary(&self) -> bool {
        self.mul(&self.conj_transpose()) == WeilMatrix::identity(self.m, self.dim)
    }

    /// Multiplies column j by ζ_M^{exps[j]}.
    fn scale_columns(&self, exps: &[i64]) -> WeilMatrix {
        let n = self.dim;
        let entries = (0..n * n)
            .into_par_iter()
            .map(|k| self.entries[k].mul_root(exps[k % n]))
            .collect();
        WeilMatrix { m: self.m, dim: n, entries }
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.entries.iter().map(CycloNumber::embed).collect()
    }
}

/// Generator data of the Weil representation for one discriminant form.
#[derive(Clone, Debug)]
pub struct WeilRepresentation {
    df: DiscriminantForm,
    m: u64,
    /// e(q(α)) = ζ_M^{t_exp[α]}.
    t_exp: Vec<i64>,
    gauss: CycloNumber,
    s: WeilMatrix,
    s_inv: WeilMatrix,
}

impl WeilRepresentation {
    pub fn new(df: &DiscriminantForm) -> Self {
        let m = gauss_modulus(df);
        let step = (m / df.level()) as i64;
        let elems: Vec<_> = df.elements().collect();
        let t_exp: Vec<i64> = elems.iter().map(|a| df.q_residue(a) as i64 * step).collect();
        let gauss = gauss_sum(df);
        let g_inv = gauss.inverse().expect("Gauss sum of a nondegenerate form is nonzero");
        let g_conj_inv = g_inv.conj();
        let n = elems.len();
        let f_exp: Vec<i64> = (0..n * n)
            .map(|k| df.b_residue(&elems[k / n], &elems[k % n]) as i64 * step)
            .collect();
        let s = WeilMatrix::from_fn(m, n, |i, j| g_inv.mul_root(-f_exp[i * n + j]));
        let s_inv = WeilMatrix::from_fn(m, n, |i, j| g_conj_inv.mul_root(f_exp[i * n + j]));
        WeilRepresentation { df: df.clone(), m, t_exp, gauss, s, s_inv }
    }

    pub fn df(&self) -> &DiscriminantForm {
        &self.df
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn gauss_sum(&self) -> &CycloNumber {
        &self.gauss
    }

    pub fn rho_t(&self) -> WeilMatrix {
        self.rho_t_pow(1)
    }

    pub fn rho_t_pow(&self, e: i64) -> WeilMatrix {
        let n = self.t_exp.len();
        let mut out = WeilMatrix::identity(self.m, n);
        for i in 0..n {
            out.entries[i * n + i] = CycloNumber::root_of_unity(self.m, e * self.t_exp[i]);
        }
        out
    }

    pub fn rho_s(&self) -> WeilMatrix {
        self.s.clone()
    }

    pub fn rho_s_inv(&self) -> WeilMatrix {
        self.s_inv.clone()
    }

    pub fn rho_word(&self, word: &Word) -> WeilMatrix {
        let mut acc = WeilMatrix::identity(self.m, self.t_exp.len());
        for &(g, e) in &word.letters {
            match g {
                Generator::T => {
                    let exps: Vec<i64> = self.t_exp.iter().map(|t| t * e).collect();
                    acc = acc.scale_columns(&exps);
                }
                Generator::S => {
                    let e = e.rem_euclid(8);
                    // S⁸ acts trivially; pick the shorter direction.
                    let (step, count) = if e <= 4 { (&self.s, e) } else { (&self.s_inv, 8 - e) };
                    for _ in 0..count {
                        acc = acc.mul(step);
                    }
                }
            }
        }
        acc
    }

    pub fn rho(&self, a: &MetaplecticElement) -> WeilMatrix {
        self.rho_word(&word_decompose(a))
    }

    pub fn rho_dual(&self, a: &MetaplecticElement) -> WeilMatrix {
        self.rho(a).conj()
    }

    pub fn to_float(&self) -> WeilFloat {
        WeilFloat {
            dim: self.t_exp.len(),
            t_phase: self
                .t_exp
                .iter()
                .map(|&t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / self.m as f64))
                .collect(),
            t_exp: self.t_exp.clone(),
            m: self.m,
            s: self.s.to_complex(),
        }
    }
}

pub fn rho_t(df: &DiscriminantForm) -> WeilMatrix {
    WeilRepresentation::new(df).rho_t()
}

pub fn rho_s(df: &DiscriminantForm) -> WeilMatrix {
    WeilRepresentation::new(df).rho_s()
}

pub fn rho(df: &DiscriminantForm, a: &MetaplecticElement) -> WeilMatrix {
    WeilRepresentation::new(df).rho(a)
}

pub fn rho_dual(df: &DiscriminantForm, a: &MetaplecticElement) -> WeilMatrix {
    WeilRepresentation::new(df).rho_dual(a)
}

/// Double-precision generators for the numeric Eisenstein pipeline.
#[derive(Clone, Debug)]
pub struct WeilFloat {
    dim: usize,
    m: u64,
    t_exp: Vec<i64>,
    t_phase: Vec<Complex64>,
    /// Row-major ρ(S).
    s: Vec<Complex64>,
}

impl WeilFloat {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// e(j·q(α)).
    pub fn t_power_phase(&self, alpha: usize, j: i64) -> Complex64 {
        let e = (self.t_exp[alpha] * j).rem_euclid(self.m as i64);
        Complex64::from_polar(1.0, std::f64::consts::TAU * e as f64 / self.m as f64)
    }

    /// v ← v·ρ(S)^{±1} for a row vector v.
    fn row_times_s(&self, v: &[Complex64], inverse: bool, out: &mut [Complex64]) {
        let n = self.dim;
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::zero();
            for (i, vi) in v.iter().enumerate() {
                // ρ(S)⁻¹ = conj(ρ(S))ᵀ and ρ(S) is symmetric.
                let s = self.s[i * n + j];
                acc += vi * if inverse { s.conj() } else { s };
            }
            *o = acc;
        }
    }

    /// Row `row` of ρ(word).
    pub fn row_of_word(&self, word: &Word, row: usize) -> Vec<Complex64> {
        let n = self.dim;
        let mut v = vec![Complex64::zero(); n];
        v[row] = Complex64::new(1.0, 0.0);
        let mut tmp = vec![Complex64::zero(); n];
        for &(g, e) in &word.letters {
            match g {
                Generator::T => {
                    if e == 1 {
                        for (x, p) in v.iter_mut().zip(&self.t_phase) {
                            *x *= p;
                        }
                    } else {
                        for (j, x) in v.iter_mut().enumerate() {
                            *x *= self.t_power_phase(j, e);
                        }
                    }
                }
                Generator::S => {
                    let e = e.rem_euclid(8);
                    let (inverse, count) = if e <= 4 { (false, e) } else { (true, 8 - e) };
                    for _ in 0..count {
                        self.row_times_s(&v, inverse, &mut tmp);
                        std::mem::swap(&mut v, &mut tmp);
                    }
                }
            }
        }
        v
    }

    /// Full matrix ρ(word), row-major.
    pub fn matrix_of_word(&self, word: &Word) -> Vec<Complex64> {
        (0..self.dim).flat_map(|r| self.row_of_word(word, r)).collect()
    }
}

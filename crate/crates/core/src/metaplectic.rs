//! The metaplectic group Mp₂(Z).
//!
//! An element is a pair (γ, φ) with γ ∈ SL₂(Z) and φ a holomorphic square
//! root of cτ + d on the upper half plane. For every (c, d) the principal
//! square root of cτ + d is already holomorphic on H (cτ + d never crosses the
//! negative real axis there unless c = 0), so φ = ε·√(cτ+d) with ε = ±1 and
//! the element is stored as (γ, ε).

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MetaplecticElement {
    /// Row-major [[a, b], [c, d]].
    pub mat: [i64; 4],
    /// φ(τ) = branch · principal √(cτ + d).
    pub branch: i8,
}

/// Principal argument of the Gaussian integer x + iy.
fn arg(x: i128, y: i128) -> f64 {
    (y as f64).atan2(x as f64)
}

impl MetaplecticElement {
    pub fn new(mat: [i64; 4], branch: i8) -> Self {
        assert!(branch == 1 || branch == -1, "branch must be ±1");
        let [a, b, c, d] = mat;
        assert_eq!(
            a as i128 * d as i128 - b as i128 * c as i128,
            1,
            "matrix must have determinant 1"
        );
        MetaplecticElement { mat, branch }
    }

    pub fn identity() -> Self {
        MetaplecticElement { mat: [1, 0, 0, 1], branch: 1 }
    }

    /// T = ([[1,1],[0,1]], 1).
    pub fn t() -> Self {
        MetaplecticElement { mat: [1, 1, 0, 1], branch: 1 }
    }

    /// S = ([[0,−1],[1,0]], √τ).
    pub fn s() -> Self {
        MetaplecticElement { mat: [0, -1, 1, 0], branch: 1 }
    }

    /// Z = S² = (−I, i).
    pub fn z() -> Self {
        MetaplecticElement { mat: [-1, 0, 0, -1], branch: 1 }
    }

    pub fn a(&self) -> i64 {
        self.mat[0]
    }
    pub fn b(&self) -> i64 {
        self.mat[1]
    }
    pub fn c(&self) -> i64 {
        self.mat[2]
    }
    pub fn d(&self) -> i64 {
        self.mat[3]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// φ(τ).
    pub fn phi(&self, tau: Complex64) -> Complex64 {
        let w = if self.c() == 0 {
            Complex64::new(self.d() as f64, 0.0)
        } else {
            tau * self.c() as f64 + self.d() as f64
        };
        w.sqrt() * self.branch as f64
    }

    /// γτ = (aτ + b)/(cτ + d).
    pub fn act(&self, tau: Complex64) -> Complex64 {
        let [a, b, c, d] = self.mat.map(|x| x as f64);
        (tau * a + b) / (tau * c + d)
    }

    pub fn mul(&self, other: &Self) -> Self {
        mp_mul(self, other)
    }

    pub fn inv(&self) -> Self {
        mp_inv(self)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { *self };
        let mut acc = Self::identity();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }
}

/// (g, φ)(h, ψ) = (gh, (φ∘h)·ψ).
///
/// At τ₀ = i, with w₂ = c_h i + d_h and w₃ = c_{gh} i + d_{gh}, the factor
/// φ(hτ₀) equals ε_g √(w₃/w₂). The product of principal roots √(w₃/w₂)·√w₂
/// equals √w₃ exactly when the principal arguments add up without wrapping.
pub fn mp_mul(g: &MetaplecticElement, h: &MetaplecticElement) -> MetaplecticElement {
    let [a1, b1, c1, d1] = g.mat.map(|x| x as i128);
    let [a2, b2, c2, d2] = h.mat.map(|x| x as i128);
    let prod = [
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
    ];
    let mat = prod.map(|x| i64::try_from(x).expect("metaplectic product overflows i64"));
    let (x2, y2) = (d2, c2);
    let (x3, y3) = (prod[3], prod[2]);
    // w3 · conj(w2)
    let (x1, y1) = (x3 * x2 + y3 * y2, y3 * x2 - x3 * y2);
    let wrap = arg(x1, y1) + arg(x2, y2) - arg(x3, y3);
    let sign: i8 = if wrap.abs() < std::f64::consts::PI { 1 } else { -1 };
    MetaplecticElement { mat, branch: g.branch * h.branch * sign }
}

pub fn mp_inv(g: &MetaplecticElement) -> MetaplecticElement {
    let [a, b, c, d] = g.mat;
    let cand = MetaplecticElement { mat: [d, -b, -c, a], branch: 1 };
    if mp_mul(g, &cand).branch == 1 {
        cand
    } else {
        MetaplecticElement { branch: -1, ..cand }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    S,
    T,
}

/// A word in S and T, stored as runs (generator, exponent) with nonzero
/// exponents. Evaluates left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    pub letters: Vec<(Generator, i64)>,
}

impl Word {
    pub fn new() -> Self {
        Word::default()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Appends g^e, merging with the last run.
    pub fn push(&mut self, g: Generator, e: i64) {
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == g {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((g, e));
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &(g, e) in &other.letters {
            w.push(g, e);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        let mut w = Word::new();
        for &(g, e) in self.letters.iter().rev() {
            w.push(g, -e);
        }
        w
    }

    pub fn eval(&self) -> MetaplecticElement {
        let s = MetaplecticElement::s();
        let s_inv = mp_inv(&s);
        let mut acc = MetaplecticElement::identity();
        for &(g, e) in &self.letters {
            match g {
                Generator::T => {
                    acc = mp_mul(&acc, &MetaplecticElement { mat: [1, e, 0, 1], branch: 1 });
                }
                Generator::S => {
                    let step = if e > 0 { s } else { s_inv };
                    for _ in 0..e.unsigned_abs() {
                        acc = mp_mul(&acc, &step);
                    }
                }
            }
        }
        acc
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, e)| {
                let name = match g {
                    Generator::S => "S",
                    Generator::T => "T",
                };
                if e == 1 { name.to_string() } else { format!("{name}^{e}") }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Writes `g` as a word in S and T by a Euclidean reduction of the first
/// column, then fixes the branch with a trailing S⁴ = (I, −1) if needed.
pub fn word_decompose(g: &MetaplecticElement) -> Word {
    let mut word = Word::new();
    let [mut a, mut b, mut c, mut d] = g.mat;
    // Invariant: g.mat = word · [[a,b],[c,d]] as matrices.
    while c != 0 {
        let q = Integer::div_floor(&a, &c);
        word.push(Generator::T, q);
        word.push(Generator::S, 1);
        // S⁻¹ T⁻q [[a,b],[c,d]]
        let (a1, b1) = (a - q * c, b - q * d);
        (a, b, c, d) = (c, d, -a1, -b1);
    }
    if a == 1 {
        word.push(Generator::T, b);
    } else {
        debug_assert_eq!(a, -1);
        word.push(Generator::S, 2);
        word.push(Generator::T, -b);
    }
    debug_assert_eq!(d, a);
    if word.eval().branch != g.branch {
        word.push(Generator::S, 4);
    }
    word
}

/// Completes a coprime bottom row (c, d) to [[a, b], [c, d]] ∈ SL₂(Z).
pub fn complete_bottom_row(c: i64, d: i64) -> [i64; 4] {
    let e = c.extended_gcd(&d);
    assert_eq!(e.gcd.abs(), 1, "bottom row ({c}, {d}) is not coprime");
    // x c + y d = g = ±1  ⇒  a = y/g, b = −x/g
    let g = e.gcd;
    [e.y * g, -e.x * g, c, d]
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = MetaplecticElement;

    #[test]
    fn generator_relations() {
        let (s, t) = (M::s(), M::t());
        assert_eq!(mp_mul(&t, &t), M { mat: [1, 2, 0, 1], branch: 1 });
        let s2 = s.pow(2);
        assert_eq!(s2, M::z());
        assert_ne!(s2, M::identity());
        assert_eq!(s.pow(4), M { mat: [1, 0, 0, 1], branch: -1 });
        assert_eq!(s.pow(8), M::identity());
        let st = mp_mul(&s, &t);
        assert_eq!(st.pow(3), s2);
        assert_eq!(mp_mul(&mp_inv(&s), &s), M::identity());
    }

    #[test]
    fn phi_squares_to_automorphy_factor() {
        let tau = Complex64::new(0.3, 1.7);
        for g in [M::s(), M::t(), M::z(), mp_mul(&M::s(), &M::t()).pow(2)] {
            let p = g.phi(tau);
            let w = tau * g.c() as f64 + g.d() as f64;
            assert!((p * p - w).norm() < 1e-12);
        }
    }

    #[test]
    fn product_rule_holds_pointwise() {
        let gens = [M::s(), M::t(), mp_inv(&M::s()), mp_inv(&M::t()), M::z()];
        let tau = Complex64::new(-0.41, 0.83);
        let mut g = M::identity();
        for i in 0..40 {
            let h = gens[(i * 7 + 3) % gens.len()];
            let gh = mp_mul(&g, &h);
            let lhs = gh.phi(tau);
            let rhs = g.phi(h.act(tau)) * h.phi(tau);
            assert!((lhs - rhs).norm() < 1e-9, "step {i}");
            g = gh;
        }
    }

    #[test]
    fn decomposition_round_trips() {
        assert!(word_decompose(&M::identity()).is_empty());
        assert_eq!(word_decompose(&M::t()).to_string(), "T");
        for mat in [[1, 0, 1, 1], [2, 1, 7, 4], [-3, -2, 5, 3], [13, -8, -21, 13], [-1, 5, 0, -1]] {
            for branch in [1, -1] {
                let g = M::new(mat, branch);
                assert_eq!(word_decompose(&g).eval(), g, "{mat:?} {branch}");
            }
        }
    }

    #[test]
    fn completion() {
        for (c, d) in [(1, 0), (2, 1), (7, -3), (-5, 8), (0, 1), (0, -1)] {
            let m = complete_bottom_row(c, d);
            assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
            assert_eq!((m[2], m[3]), (c, d));
        }
    }
}

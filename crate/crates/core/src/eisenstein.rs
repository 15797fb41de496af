//! Numeric vector-valued Eisenstein series
//!
//!   E(τ) = Σ_{(γ,φ) ∈ Γ̃∞\Mp₂(Z)} φ(τ)^{−2k} ρ*(γ,φ)^{−1} e_0,
//!
//! with Γ̃∞ generated by T and Z. Cosets are indexed by bottom rows (c, d)
//! up to sign. For fixed c > 0 the sum over d ≡ d₀ (mod c) is done exactly by
//! Poisson summation (Lipschitz's formula), so truncation happens only in c:
//!
//!   E_β(τ) = δ_{β,0} + C_k Σ_{ν ∈ Z − q(β), ν > 0} ν^{k−1} K(β, ν) e(ντ),
//!   K(β, ν) = Σ_{c ≥ 1} c^{−k} Σ_{d mod c, (c,d)=1} ρ(γ_{c,d})_{0β} e(νd/c),
//!   C_k = (−2πi)^k / Γ(k).
//!
//! Since ρ*(γ)^{−1} e_0 is row 0 of ρ(γ), only that row is ever computed.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{FloatTable, FourierTable, NumCoeff};
use crate::lattice::{gauss_sum, DiscriminantForm};
use crate::metaplectic::{complete_bottom_row, word_decompose, MetaplecticElement};
use crate::weil::{WeilFloat, WeilRepresentation};

/// Γ(k) for k ∈ ½Z, k > 0.
pub fn gamma_half_integer(k: Rational64) -> f64 {
    let two_k = (k * 2).to_integer();
    assert!(two_k > 0 && (k * 2).is_integer(), "Γ only for positive half-integers");
    let (mut x, mut acc) = if two_k % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    while x < two_k as f64 / 2.0 - 0.25 {
        acc *= x;
        x += 1.0;
    }
    acc
}

/// (−2πi)^k / Γ(k), principal branch.
pub fn lipschitz_constant(k: Rational64) -> Complex64 {
    let kf = k.to_f64().unwrap();
    let modulus = std::f64::consts::TAU.powf(kf) / gamma_half_integer(k);
    Complex64::from_polar(modulus, -std::f64::consts::FRAC_PI_2 * kf)
}

/// sig(L) mod 8 read off from the Gauss sum, g = √|D| e(sig/8).
pub fn signature_mod_8(df: &DiscriminantForm) -> i64 {
    let g = gauss_sum(df).embed();
    let eighth = g.arg() / (std::f64::consts::TAU / 8.0);
    (eighth.round() as i64).rem_euclid(8)
}

/// Checks k > 2, k ∈ ½Z and 2k + sig ≡ 0 (mod 4), the condition for the
/// coset sum over Γ̃∞ = ⟨T, Z⟩ to be well defined and nonzero.
pub fn check_weight(df: &DiscriminantForm, k: Rational64) -> Result<()> {
    let err = |reason: String| Error::Weight { weight: k.to_string(), reason };
    if !(k * 2).is_integer() {
        return Err(err("weight must be a half-integer".into()));
    }
    if k <= Rational64::from_integer(2) {
        return Err(err("the Eisenstein series only converges for k > 2".into()));
    }
    let sig = signature_mod_8(df);
    if ((k * 2).to_integer() + sig).rem_euclid(4) != 0 {
        return Err(err(format!(
            "2k + sig ≢ 0 (mod 4) for sig ≡ {sig} (mod 8); Z acts by a nontrivial scalar"
        )));
    }
    Ok(())
}

/// One representative per coset of Γ̃∞ with 0 ≤ c ≤ `c_max`: the identity
/// for c = 0, and for c > 0 each d in [0, c) coprime to c, completed to
/// SL₂(Z) and lifted with branch +1.
pub fn coset_reps(c_max: u64) -> Vec<MetaplecticElement> {
    let mut out = vec![MetaplecticElement::identity()];
    for c in 1..=c_max as i64 {
        for d in 0..c {
            if c.gcd(&d) == 1 {
                out.push(MetaplecticElement::new(complete_bottom_row(c, d), 1));
            }
        }
    }
    out
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct Compensated {
    sum: Complex64,
    comp: Complex64,
}

impl Compensated {
    fn add(&mut self, x: Complex64) {
        fn step(s: f64, c: &mut f64, x: f64) -> f64 {
            let t = s + x;
            if s.abs() >= x.abs() {
                *c += (s - t) + x;
            } else {
                *c += (x - t) + s;
            }
            t
        }
        let (mut cr, mut ci) = (self.comp.re, self.comp.im);
        self.sum = Complex64::new(step(self.sum.re, &mut cr, x.re), step(self.sum.im, &mut ci, x.im));
        self.comp = Complex64::new(cr, ci);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// A Fourier index of E: component β and exponent ν = (t·level + s_β)/level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NuIndex {
    pub beta: usize,
    /// ν · level, a positive integer.
    pub nu_level: u64,
}

/// Truncated Eisenstein coefficients for c ≤ `c_max` and ν ≤ `nu_max`.
///
/// The c-tail decays only like 1/C for half-integral weight, so alongside
/// the partial sums at C/4, C/2 and C the series keeps the first-order
/// Richardson extrapolation R(C) = 2K(C) − K(C/2). Its error is estimated
/// by 2|R(C) − R(C/2)| + |K(C) − K(C/2)|; the second term covers indices
/// whose tail oscillates rather than decaying smoothly.
#[derive(Clone, Debug)]
pub struct EisensteinSeries {
    pub k: Rational64,
    pub level: u64,
    pub dim: usize,
    pub c_max: u64,
    pub indices: Vec<NuIndex>,
    /// Extrapolated c(E, β, ν).
    pub values: Vec<Complex64>,
    pub errors: Vec<f64>,
    /// Plain partial sums over c ≤ C, C/2 and C/4.
    pub raw: [Vec<Complex64>; 3],
}

impl EisensteinSeries {
    pub fn compute(df: &DiscriminantForm, k: Rational64, c_max: u64, nu_max: Rational64) -> Result<Self> {
        check_weight(df, k)?;
        if c_max < 4 {
            return Err(Error::Precondition("coset bound C must be at least 4".into()));
        }
        let wf = WeilRepresentation::new(df).to_float();
        Ok(Self::compute_with(df, &wf, k, c_max, nu_max))
    }

    pub fn compute_with(
        df: &DiscriminantForm,
        wf: &WeilFloat,
        k: Rational64,
        c_max: u64,
        nu_max: Rational64,
    ) -> Self {
        let level = df.level();
        let dim = df.size() as usize;
        let nu_cap = (nu_max * Rational64::from_integer(level as i64)).floor().to_integer().max(0) as u64;
        let mut indices = Vec::new();
        for (beta, r) in df.q_residues().into_iter().enumerate() {
            // ν·level ≡ −level·q(β) (mod level)
            let mut nl = (level - r) % level;
            if nl == 0 {
                nl = level;
            }
            while nl <= nu_cap {
                indices.push(NuIndex { beta, nu_level: nl });
                nl += level;
            }
        }
        let kf = k.to_f64().unwrap();
        let per_c: Vec<Vec<Complex64>> = (1..=c_max)
            .into_par_iter()
            .map(|c| c_contribution(wf, &indices, level, c as i64, kf))
            .collect();
        // partial[m] = Σ_{c ≤ m}, kept for m ≥ C/4.
        let first = (c_max / 4) as usize;
        let mut acc = vec![Compensated::default(); indices.len()];
        let mut partial: Vec<Vec<Complex64>> = Vec::with_capacity(c_max as usize - first + 1);
        for (ci, contrib) in per_c.iter().enumerate() {
            for (a, x) in acc.iter_mut().zip(contrib) {
                a.add(*x);
            }
            if ci + 1 >= first {
                partial.push(acc.iter().map(Compensated::value).collect());
            }
        }
        let ck = lipschitz_constant(k);
        let scale: Vec<Complex64> = indices
            .iter()
            .map(|idx| ck * (idx.nu_level as f64 / level as f64).powf(kf - 1.0))
            .collect();
        let at = |m: u64, i: usize| scale[i] * partial[m as usize - first][i];
        let raw = [c_max, c_max / 2, c_max / 4].map(|m| (0..indices.len()).map(|i| at(m, i)).collect::<Vec<_>>());
        // Richardson value R(m) = 2·S(m) − S(m/2) assuming a 1/m tail; the
        // error is its largest drift over m ∈ [C/2, C].
        let mut values = Vec::with_capacity(indices.len());
        let mut errors = Vec::with_capacity(indices.len());
        for i in 0..indices.len() {
            let rich = |m: u64| 2.0 * at(m, i) - at(m / 2, i);
            let r = rich(c_max);
            let drift = (c_max / 2..=c_max).map(|m| (rich(m) - r).norm()).fold(0.0, f64::max);
            values.push(r);
            errors.push(drift + r.im.abs() + 32.0 * f64::EPSILON * r.norm().max(1.0));
        }
        EisensteinSeries { k, level, dim, c_max, indices, values, errors, raw }
    }

    /// Extrapolated coefficient and its error estimate.
    pub fn coefficient(&self, beta: usize, nu_level: u64) -> Option<(Complex64, f64)> {
        let pos = self
            .indices
            .iter()
            .position(|i| i.beta == beta && i.nu_level == nu_level)?;
        Some((self.values[pos], self.errors[pos]))
    }

    /// E(τ) from the truncated Fourier expansion.
    pub fn eval(&self, tau: Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.dim];
        out[0] = Complex64::new(1.0, 0.0);
        for (idx, v) in self.indices.iter().zip(&self.values) {
            let nu = idx.nu_level as f64 / self.level as f64;
            out[idx.beta] += v * (Complex64::new(0.0, std::f64::consts::TAU * nu) * tau).exp();
        }
        out
    }
}

/// c^{−k} Σ_{d mod c, (c,d)=1} ρ(γ_{c,d})_{0β} e(νd/c) for every index.
fn c_contribution(wf: &WeilFloat, indices: &[NuIndex], level: u64, c: i64, k: f64) -> Vec<Complex64> {
    let lc = level as i64 * c;
    let roots: Vec<Complex64> = (0..lc)
        .map(|j| Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / lc as f64))
        .collect();
    let mut out = vec![Complex64::zero(); indices.len()];
    for d in 0..c {
        if c.gcd(&d) != 1 {
            continue;
        }
        let g = MetaplecticElement::new(complete_bottom_row(c, d), 1);
        let row = wf.row_of_word(&word_decompose(&g), 0);
        for (o, idx) in out.iter_mut().zip(indices) {
            let v = row[idx.beta];
            if v.norm_sqr() < 1e-30 {
                continue;
            }
            let e = (idx.nu_level as i64 * d).rem_euclid(lc);
            *o += v * roots[e as usize];
        }
    }
    let w = (c as f64).powf(-k);
    out.iter_mut().for_each(|x| *x *= w);
    out
}

/// Smallest ν beyond which ν^k·e^{−2πνy} (times a generous coefficient
/// bound) is below 1e−18.
pub fn nu_cutoff(k: Rational64, y: f64) -> u64 {
    let kf = k.to_f64().unwrap();
    let mut v = 1u64;
    while (kf * (v as f64).ln()) + 10.0 * (10f64).ln() - std::f64::consts::TAU * v as f64 * y > -18.0 * (10f64).ln() {
        v += 1;
    }
    v
}

/// Truncated E(τ) (c ≤ C) and a bound for the neglected part, built from
/// the extrapolated coefficient errors.
pub fn eval_e(df: &DiscriminantForm, k: Rational64, tau: Complex64, c_max: u64) -> Result<(Vec<Complex64>, f64)> {
    if tau.im <= 0.0 {
        return Err(Error::Precondition(format!("Im τ must be positive, got τ = {tau}")));
    }
    let nu_max = nu_cutoff(k, tau.im);
    let series = EisensteinSeries::compute(df, k, c_max, Rational64::from_integer(nu_max as i64))?;
    let tail = series
        .indices
        .iter()
        .zip(&series.errors)
        .map(|(idx, e)| e * (-std::f64::consts::TAU * idx.nu_level as f64 / series.level as f64 * tau.im).exp())
        .sum();
    Ok((series.eval(tau), tail))
}

fn float_table_from_series(df: &DiscriminantForm, series: &EisensteinSeries, n_max: u64) -> FloatTable {
    let mut table = FourierTable::new(series.k, df.clone(), n_max);
    let level = df.level() as i64;
    for (beta, r) in df.q_residues().into_iter().enumerate() {
        if r == 0 {
            let v = if beta == 0 { 1.0 } else { 0.0 };
            table.coeffs.insert(
                (beta, Rational64::zero()),
                NumCoeff { value: Complex64::new(v, 0.0), err: 0.0 },
            );
        }
    }
    for ((idx, v), e) in series.indices.iter().zip(&series.values).zip(&series.errors) {
        let n = Rational64::new(idx.nu_level as i64, level);
        if n <= Rational64::from_integer(n_max as i64) {
            table.coeffs.insert((idx.beta, n), NumCoeff { value: *v, err: *e });
        }
    }
    table
}

/// c(E, β, n) for 0 ≤ n ≤ N read off directly from the truncated coset sum.
pub fn eisenstein_coefficients(df: &DiscriminantForm, k: Rational64, n_max: u64, c_max: u64) -> Result<FloatTable> {
    let series = EisensteinSeries::compute(df, k, c_max, Rational64::from_integer(n_max as i64))?;
    Ok(float_table_from_series(df, &series, n_max))
}

/// How the coefficients are extracted from the truncated coset sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Read off from the expansion of each coset block.
    Direct,
    /// Equally spaced samples at height y, then a discrete Fourier transform.
    Sample { samples: usize, y: f64 },
}

pub fn numeric_coefficients(df: &DiscriminantForm, k: Rational64, n_max: u64, c_max: u64, method: Method) -> Result<FloatTable> {
    match method {
        Method::Direct => eisenstein_coefficients(df, k, n_max, c_max),
        Method::Sample { samples, y } => fourier_coeffs_e(df, k, n_max, c_max, samples, y),
    }
}

/// Minimum sample count for [`fourier_coeffs_e`].
pub fn min_samples(df: &DiscriminantForm, n_max: u64) -> usize {
    8 * (n_max + df.level()) as usize
}

/// c(E, β, n) for 0 ≤ n ≤ N from equally spaced samples of the truncated E
/// on the horizontal line Im τ = y over one period [0, level).
///
/// The reported error adds the truncation error of the sampled series to
/// the rounding in the samples amplified by e^{2πny}.
pub fn fourier_coeffs_e(
    df: &DiscriminantForm,
    k: Rational64,
    n_max: u64,
    c_max: u64,
    samples: usize,
    y: f64,
) -> Result<FloatTable> {
    let needed = min_samples(df, n_max);
    if samples < needed {
        return Err(Error::InsufficientSamples { needed, got: samples });
    }
    if y <= 0.0 {
        return Err(Error::Precondition(format!("sampling height y must be positive, got {y}")));
    }
    let level = df.level();
    // Frequencies above samples/level would alias; stop the series well below.
    let nu_max = nu_cutoff(k, y).max(n_max + 1).min((samples as u64 / level).saturating_sub(1).max(n_max));
    let series = EisensteinSeries::compute(df, k, c_max, Rational64::from_integer(nu_max as i64))?;
    let values: Vec<Vec<Complex64>> = (0..samples)
        .into_par_iter()
        .map(|j| series.eval(Complex64::new(level as f64 * j as f64 / samples as f64, y)))
        .collect();
    let scale = values.iter().flatten().map(|v| v.norm()).fold(1.0, f64::max);
    let direct = float_table_from_series(df, &series, n_max);
    let mut table = FourierTable::new(k, df.clone(), n_max);
    for (&(beta, n), d) in &direct.coeffs {
        let m = (n * Rational64::from_integer(level as i64)).to_integer();
        let mut acc = Compensated::default();
        for (j, v) in values.iter().enumerate() {
            let phase = -std::f64::consts::TAU * ((m * j as i64).rem_euclid(samples as i64)) as f64 / samples as f64;
            acc.add(v[beta] * Complex64::from_polar(1.0, phase));
        }
        let nf = n.to_f64().unwrap();
        let amp = (std::f64::consts::TAU * nf * y).exp();
        let value = acc.value() / samples as f64 * amp;
        let err = d.err + 1e-15 * scale * amp * (samples as f64).sqrt();
        table.coeffs.insert((beta, n), NumCoeff { value, err });
    }
    Ok(table)
}

/// ‖f(γτ) − φ(τ)^{2k} σ(γ) f(τ)‖ / ‖f(γτ)‖ with σ = ρ*, or ρ when `dual`
/// is false.
pub fn transformation_residual(
    wf: &WeilFloat,
    k: Rational64,
    g: &MetaplecticElement,
    tau: Complex64,
    f: &dyn Fn(Complex64) -> Vec<Complex64>,
    dual: bool,
) -> f64 {
    let n = wf.dim();
    let mut m = wf.matrix_of_word(&word_decompose(g));
    if dual {
        m.iter_mut().for_each(|x| *x = x.conj());
    }
    let two_k = (k * 2).to_integer() as i32;
    let factor = g.phi(tau).powi(two_k);
    let lhs = f(g.act(tau));
    let ft = f(tau);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let mut r = Complex64::zero();
        for j in 0..n {
            r += m[i * n + j] * ft[j];
        }
        num += (lhs[i] - factor * r).norm_sqr();
        den += lhs[i].norm_sqr();
    }
    (num / den.max(f64::MIN_POSITIVE)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma_half_integer(Rational64::new(5, 2)) - 1.329_340_388_179_137).abs() < 1e-14);
        assert!((gamma_half_integer(Rational64::from_integer(12)) - 39_916_800.0).abs() < 1e-6);
    }

    #[test]
    fn lipschitz_formula_matches_direct_sum() {
        // Σ_n (z+n)^{-k} = C_k Σ_{m≥1} m^{k-1} e(mz)
        let k = Rational64::new(5, 2);
        let z = Complex64::new(0.17, 0.9);
        let mut direct = Complex64::zero();
        for n in -200_000i64..=200_000 {
            direct += (z + n as f64).powf(-2.5);
        }
        let ck = lipschitz_constant(k);
        let mut series = Complex64::zero();
        for m in 1..60 {
            let m = m as f64;
            series += ck * m.powf(1.5) * (Complex64::new(0.0, std::f64::consts::TAU * m) * z).exp();
        }
        assert!((direct - series).norm() < 1e-6, "{direct} vs {series}");
    }

    #[test]
    fn coset_counts() {
        let reps = coset_reps(2);
        let rows: Vec<(i64, i64)> = reps.iter().map(|g| (g.c(), g.d())).collect();
        assert_eq!(rows, vec![(0, 1), (1, 0), (2, 1)]);
        assert_eq!(coset_reps(0).len(), 1);
    }
}

//! Fourier coefficient tables and their JSON form.
//!
//! Index conventions. Forms transforming with the dual representation ρ*
//! (the Eisenstein series E and the cusp forms it is compared against) have
//! exponents n ∈ Z − q(α). Principal parts of forms transforming with ρ
//! have n ∈ Z + q(α). A principal-part term (α, n) therefore pairs with the
//! coefficient (α, −n) of a ρ*-form.
//!
//! Rationals are written as "p/q" strings in JSON.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{qvalue, DfElement, DiscriminantForm};

/// A numerically computed coefficient with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumCoeff {
    pub value: Complex64,
    pub err: f64,
}

/// Key (index of α, n).
pub type CoeffKey = (usize, Rational64);

/// Holomorphic Fourier coefficients (α, n) ↦ c(α, n), 0 ≤ n ≤ N, for a form
/// of weight k transforming with ρ*.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierTable<T> {
    pub k: Rational64,
    pub df: DiscriminantForm,
    pub n_max: u64,
    pub coeffs: BTreeMap<CoeffKey, T>,
}

pub type RationalTable = FourierTable<BigRational>;
pub type FloatTable = FourierTable<NumCoeff>;

/// n ∈ Z − q(α).
pub fn dual_index_ok(df: &DiscriminantForm, alpha: &DfElement, n: Rational64) -> bool {
    (n + qvalue(df, alpha)).is_integer()
}

/// n ∈ Z + q(α).
pub fn index_ok(df: &DiscriminantForm, alpha: &DfElement, n: Rational64) -> bool {
    (n - qvalue(df, alpha)).is_integer()
}

/// All admissible indices (α, n) with 0 ≤ n ≤ N and n ∈ Z − q(α), in
/// canonical order.
pub fn dual_indices(df: &DiscriminantForm, n_max: u64) -> Vec<CoeffKey> {
    let level = df.level() as i64;
    let mut out = Vec::new();
    for (i, r) in df.q_residues().into_iter().enumerate() {
        let mut nl = (level - r as i64) % level;
        while nl <= n_max as i64 * level {
            out.push((i, Rational64::new(nl, level)));
            nl += level;
        }
    }
    out
}

impl<T: Clone> FourierTable<T> {
    pub fn new(k: Rational64, df: DiscriminantForm, n_max: u64) -> Self {
        FourierTable { k, df, n_max, coeffs: BTreeMap::new() }
    }

    pub fn get(&self, alpha: usize, n: Rational64) -> Option<&T> {
        self.coeffs.get(&(alpha, n))
    }

    /// Checks every stored index against n ∈ Z − q(α) and 0 ≤ n ≤ N.
    pub fn validate(&self) -> Result<()> {
        for &(a, n) in self.coeffs.keys() {
            if a >= self.df.size() as usize {
                return Err(Error::Format(format!("component index {a} out of range")));
            }
            let alpha = self.df.element(a);
            if !dual_index_ok(&self.df, &alpha, n) {
                return Err(Error::Format(format!(
                    "index (α = {:?}, n = {n}) violates n ∈ Z − q(α), q(α) = {}",
                    alpha.coords,
                    qvalue(&self.df, &alpha)
                )));
            }
            if n < Rational64::zero() || n > Rational64::from_integer(self.n_max as i64) {
                return Err(Error::Format(format!(
                    "index (α = {:?}, n = {n}) outside 0 ≤ n ≤ {}",
                    alpha.coords, self.n_max
                )));
            }
        }
        Ok(())
    }
}

impl RationalTable {
    pub fn coeff(&self, alpha: usize, n: Rational64) -> BigRational {
        self.coeffs.get(&(alpha, n)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, s: &BigRational) -> RationalTable {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v = &*v * s;
        }
        out
    }

    /// True if every n = 0 coefficient vanishes.
    pub fn is_cusp(&self) -> bool {
        self.coeffs.iter().all(|((_, n), c)| !n.is_zero() || c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Truncates to n ≤ N.
    pub fn truncate(&self, n_max: u64) -> RationalTable {
        let bound = Rational64::from_integer(n_max as i64);
        let mut out = FourierTable::new(self.k, self.df.clone(), n_max.min(self.n_max));
        out.coeffs = self
            .coeffs
            .iter()
            .filter(|((_, n), _)| *n <= bound)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        out
    }

    /// f(τ) = Σ c(α, n) e(nτ), truncated at the stored depth.
    pub fn eval(&self, tau: Complex64) -> Vec<Complex64> {
        use num_traits::ToPrimitive;
        let mut out = vec![Complex64::zero(); self.df.size() as usize];
        for (&(a, n), c) in &self.coeffs {
            let nf = n.to_f64().unwrap();
            let cf = c.to_f64().unwrap();
            out[a] += cf * (Complex64::new(0.0, std::f64::consts::TAU * nf) * tau).exp();
        }
        out
    }
}

/// Negative-index part Σ c(α, n) e(nτ) e_α of a weakly holomorphic form
/// transforming with ρ; n ∈ Z + q(α), −N ≤ n < 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalPart {
    pub df: DiscriminantForm,
    pub terms: BTreeMap<CoeffKey, BigInt>,
}

impl PrincipalPart {
    pub fn new(df: DiscriminantForm) -> Self {
        PrincipalPart { df, terms: BTreeMap::new() }
    }

    pub fn with_terms(df: DiscriminantForm, terms: &[(usize, Rational64, i64)]) -> Result<Self> {
        let mut p = PrincipalPart::new(df);
        for &(a, n, c) in terms {
            p.terms.insert((a, n), BigInt::from(c));
        }
        p.validate()?;
        Ok(p)
    }

    /// max |n| over the terms.
    pub fn depth(&self) -> Rational64 {
        self.terms.keys().map(|(_, n)| -*n).max().unwrap_or_else(Rational64::zero)
    }

    pub fn validate(&self) -> Result<()> {
        for &(a, n) in self.terms.keys() {
            if a >= self.df.size() as usize {
                return Err(Error::Format(format!("component index {a} out of range")));
            }
            let alpha = self.df.element(a);
            if !index_ok(&self.df, &alpha, n) {
                return Err(Error::Format(format!(
                    "principal part index (α = {:?}, n = {n}) violates n ∈ Z + q(α), q(α) = {}",
                    alpha.coords,
                    qvalue(&self.df, &alpha)
                )));
            }
            if n >= Rational64::zero() {
                return Err(Error::Format(format!(
                    "principal part index (α = {:?}, n = {n}) must be negative",
                    alpha.coords
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Full,
    Cusp,
}

/// A basis of M_{k} or S_{k} with integral coefficients, truncated at N.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisTable {
    pub k: Rational64,
    pub kind: BasisKind,
    pub df: DiscriminantForm,
    pub n_max: u64,
    pub forms: Vec<RationalTable>,
}

// ---- JSON ----

#[derive(Serialize, Deserialize)]
pub struct DfJson {
    pub orders: Vec<u64>,
    pub q_gram: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
pub struct CoeffJson {
    pub alpha: Vec<u64>,
    pub n: String,
    pub c: String,
}

#[derive(Serialize, Deserialize)]
pub struct FloatCoeffJson {
    pub alpha: Vec<u64>,
    pub n: String,
    pub re: f64,
    pub im: f64,
    pub err: f64,
}

#[derive(Serialize, Deserialize)]
pub struct TableJson {
    pub k: String,
    pub df: DfJson,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
pub struct FloatTableJson {
    pub k: String,
    pub df: DfJson,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub coeffs: Vec<FloatCoeffJson>,
}

#[derive(Serialize, Deserialize)]
pub struct PrincipalPartJson {
    pub df: Option<DfJson>,
    pub terms: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
pub struct FormJson {
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize)]
pub struct BasisJson {
    pub k: String,
    pub kind: BasisKind,
    pub df: DfJson,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub forms: Vec<FormJson>,
}

pub fn parse_small_rational(s: &str, what: &str) -> Result<Rational64> {
    s.trim()
        .parse::<Rational64>()
        .map_err(|_| Error::Format(format!("{what}: cannot parse rational {s:?}")))
}

pub fn parse_big_rational(s: &str, what: &str) -> Result<BigRational> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|_| Error::Format(format!("{what}: cannot parse rational {s:?}")))
}

pub fn df_to_json(df: &DiscriminantForm) -> DfJson {
    DfJson {
        orders: df.orders().to_vec(),
        q_gram: df
            .q_gram()
            .iter()
            .map(|row| row.iter().map(|r| r.to_string()).collect())
            .collect(),
    }
}

pub fn df_from_json(j: &DfJson) -> Result<DiscriminantForm> {
    let rows = j
        .q_gram
        .iter()
        .map(|row| row.iter().map(|s| parse_big_rational(s, "q_gram")).collect())
        .collect::<Result<Vec<Vec<BigRational>>>>()?;
    DiscriminantForm::from_rational_tables(j.orders.clone(), &rows)
}

fn element_index(df: &DiscriminantForm, coords: &[u64]) -> Result<usize> {
    if coords.len() != df.rank() || coords.iter().zip(df.orders()).any(|(c, d)| c >= d) {
        return Err(Error::Format(format!(
            "alpha {coords:?} is not a reduced element of a group with orders {:?}",
            df.orders()
        )));
    }
    Ok(df.index_of(&DfElement::new(coords.to_vec())))
}

fn coeffs_to_json<T>(df: &DiscriminantForm, coeffs: &BTreeMap<CoeffKey, T>, f: impl Fn(&T) -> String) -> Vec<CoeffJson> {
    coeffs
        .iter()
        .map(|(&(a, n), c)| CoeffJson { alpha: df.element(a).coords, n: n.to_string(), c: f(c) })
        .collect()
}

fn coeffs_from_json(df: &DiscriminantForm, list: &[CoeffJson]) -> Result<BTreeMap<CoeffKey, BigRational>> {
    let mut out = BTreeMap::new();
    for c in list {
        let a = element_index(df, &c.alpha)?;
        let n = parse_small_rational(&c.n, "coefficient index n")?;
        let v = parse_big_rational(&c.c, "coefficient value")?;
        if out.insert((a, n), v).is_some() {
            return Err(Error::Format(format!("duplicate coefficient (α = {:?}, n = {n})", c.alpha)));
        }
    }
    Ok(out)
}

impl RationalTable {
    pub fn to_json(&self) -> TableJson {
        TableJson {
            k: self.k.to_string(),
            df: df_to_json(&self.df),
            n_max: self.n_max,
            coeffs: coeffs_to_json(&self.df, &self.coeffs, |c| c.to_string()),
        }
    }

    pub fn from_json(j: &TableJson) -> Result<Self> {
        let df = df_from_json(&j.df)?;
        let coeffs = coeffs_from_json(&df, &j.coeffs)?;
        let t = FourierTable { k: parse_small_rational(&j.k, "weight")?, df, n_max: j.n_max, coeffs };
        t.validate()?;
        Ok(t)
    }
}

impl FloatTable {
    pub fn to_json(&self) -> FloatTableJson {
        FloatTableJson {
            k: self.k.to_string(),
            df: df_to_json(&self.df),
            n_max: self.n_max,
            coeffs: self
                .coeffs
                .iter()
                .map(|(&(a, n), c)| FloatCoeffJson {
                    alpha: self.df.element(a).coords,
                    n: n.to_string(),
                    re: c.value.re,
                    im: c.value.im,
                    err: c.err,
                })
                .collect(),
        }
    }
}

impl PrincipalPart {
    pub fn to_json(&self) -> PrincipalPartJson {
        PrincipalPartJson {
            df: Some(df_to_json(&self.df)),
            terms: coeffs_to_json(&self.df, &self.terms, |c| c.to_string()),
        }
    }

    /// Reads a principal part; `df` is used when the file omits it and must
    /// match it otherwise.
    pub fn from_json(j: &PrincipalPartJson, df: Option<&DiscriminantForm>) -> Result<Self> {
        let df = match (&j.df, df) {
            (Some(dj), given) => {
                let parsed = df_from_json(dj)?;
                if let Some(g) = given {
                    ensure_same_df(g, &parsed, "principal part")?;
                }
                parsed
            }
            (None, Some(g)) => g.clone(),
            (None, None) => {
                return Err(Error::Format("principal part carries no discriminant form".into()))
            }
        };
        let mut terms = BTreeMap::new();
        for (key, v) in coeffs_from_json(&df, &j.terms)? {
            if !v.is_integer() {
                return Err(Error::Format(format!(
                    "principal part coefficient at (α index {}, n = {}) must be an integer, got {v}",
                    key.0, key.1
                )));
            }
            terms.insert(key, v.to_integer());
        }
        let p = PrincipalPart { df, terms };
        p.validate()?;
        Ok(p)
    }
}

impl BasisTable {
    pub fn to_json(&self) -> BasisJson {
        BasisJson {
            k: self.k.to_string(),
            kind: self.kind,
            df: df_to_json(&self.df),
            n_max: self.n_max,
            forms: self
                .forms
                .iter()
                .map(|f| FormJson { coeffs: coeffs_to_json(&self.df, &f.coeffs, |c| c.to_string()) })
                .collect(),
        }
    }

    pub fn from_json(j: &BasisJson) -> Result<Self> {
        let df = df_from_json(&j.df)?;
        let k = parse_small_rational(&j.k, "weight")?;
        let mut forms = Vec::new();
        for (i, f) in j.forms.iter().enumerate() {
            let t = FourierTable { k, df: df.clone(), n_max: j.n_max, coeffs: coeffs_from_json(&df, &f.coeffs)? };
            t.validate()?;
            if !t.is_integral() {
                return Err(Error::Format(format!("basis form {i} has non-integral coefficients")));
            }
            if j.kind == BasisKind::Cusp && !t.is_cusp() {
                return Err(Error::Format(format!("basis form {i} of a cusp basis has a nonzero n = 0 coefficient")));
            }
            forms.push(t);
        }
        Ok(BasisTable { k, kind: j.kind, df, n_max: j.n_max, forms })
    }
}

pub fn ensure_same_df(expected: &DiscriminantForm, got: &DiscriminantForm, what: &str) -> Result<()> {
    if expected != got {
        let show = |df: &DiscriminantForm| {
            let rows: Vec<String> = df
                .q_gram()
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            format!("orders {:?} with q_gram [{}]", df.orders(), rows.join("; "))
        };
        return Err(Error::DfMismatch(format!("{what} is attached to {}, expected {}", show(got), show(expected))));
    }
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    use num_integer::Integer;
    values
        .into_iter()
        .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()))
        .abs()
}

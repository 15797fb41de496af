//! Pairings of principal parts with holomorphic forms, the obstruction
//! criterion, the constant-term formula and congruences between the
//! Eisenstein series and cusp forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{dual_indices, ensure_same_df, BasisKind, BasisTable, CoeffKey, FourierTable, PrincipalPart, RationalTable};
use crate::intmat::{rank_over_q, solve_integer, IntMatrix};

fn describe(df: &crate::lattice::DiscriminantForm, key: &CoeffKey) -> String {
    format!("(α = {:?}, n = {})", df.element(key.0).coords, key.1)
}

fn check_depth(p: &PrincipalPart, n_max: u64, what: &str) -> Result<()> {
    if p.depth() > Rational64::from_integer(n_max as i64) {
        return Err(Error::DepthMismatch(format!(
            "principal part reaches depth {} but {what} is truncated at N = {n_max}",
            p.depth()
        )));
    }
    Ok(())
}

/// ⟨a, f⟩ = Σ a(α, n)·c(f, α, −n) over the terms of `a` (all n < 0).
pub fn pairing(a: &PrincipalPart, f: &RationalTable) -> Result<BigRational> {
    ensure_same_df(&f.df, &a.df, "principal part")?;
    check_depth(a, f.n_max, "the form")?;
    let mut s = BigRational::zero();
    for (&(alpha, n), c) in &a.terms {
        s += f.coeff(alpha, -n) * BigRational::from_integer(c.clone());
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Obstruction {
    pub admissible: bool,
    /// First basis form with a nonzero pairing.
    pub witness: Option<usize>,
    pub pairings: Vec<String>,
}

/// A principal part is admissible iff it pairs to zero with every cusp form.
pub fn obstruction_check(p: &PrincipalPart, cusps: &BasisTable) -> Result<Obstruction> {
    if cusps.kind != BasisKind::Cusp {
        return Err(Error::Precondition("obstruction check needs a cusp-space basis".into()));
    }
    ensure_same_df(&cusps.df, &p.df, "principal part")?;
    check_depth(p, cusps.n_max, "the cusp basis")?;
    let values = cusps.forms.iter().map(|f| pairing(p, f)).collect::<Result<Vec<_>>>()?;
    let witness = values.iter().position(|v| !v.is_zero());
    Ok(Obstruction {
        admissible: witness.is_none(),
        witness,
        pairings: values.iter().map(|v| v.to_string()).collect(),
    })
}

/// E rescaled so that c(E, 0, 0) = 2.
fn normalized_e(e: &RationalTable) -> Result<RationalTable> {
    let c00 = e.coeff(0, Rational64::zero());
    if c00.is_zero() {
        return Err(Error::Precondition("Eisenstein table has c(E, 0, 0) = 0".into()));
    }
    Ok(e.scale(&(BigRational::from_integer(2.into()) / c00)))
}

/// c(f, 0, 0) = −½ Σ c(E, α, n)·p(α, −n) with E normalized to c(E, 0, 0) = 2.
pub fn constant_term(p: &PrincipalPart, e: &RationalTable) -> Result<BigRational> {
    let e2 = normalized_e(e)?;
    let s = pairing(p, &e2)?;
    Ok(-s / BigRational::from_integer(2.into()))
}

/// Constant term of the weakly holomorphic form with principal part `p`,
/// after checking that such a form exists. It must be an integer.
pub fn integral_constant_term(p: &PrincipalPart, e: &RationalTable, cusps: &BasisTable) -> Result<BigInt> {
    let ob = obstruction_check(p, cusps)?;
    if let Some(w) = ob.witness {
        return Err(Error::Precondition(format!(
            "principal part is not admissible: pairing with cusp form {w} is {}",
            ob.pairings[w]
        )));
    }
    let c = constant_term(p, e)?;
    if !c.is_integer() {
        return Err(Error::Integrality(format!(
            "constant term {c} of an admissible integral principal part is not an integer"
        )));
    }
    Ok(c.to_integer())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CongruenceSolution {
    /// Coefficients of f in the cusp basis, reduced into [0, d).
    pub combo: Vec<BigInt>,
    pub f: RationalTable,
    pub d: BigInt,
    pub n_max: u64,
}

#[derive(Serialize)]
pub struct CongruenceSolutionJson {
    pub combo: Vec<String>,
    pub d: String,
    #[serde(rename = "N")]
    pub n_max: u64,
    pub f: crate::fourier::TableJson,
}

impl CongruenceSolution {
    pub fn to_json(&self) -> CongruenceSolutionJson {
        CongruenceSolutionJson {
            combo: self.combo.iter().map(|x| x.to_string()).collect(),
            d: self.d.to_string(),
            n_max: self.n_max,
            f: self.f.to_json(),
        }
    }
}

fn integer_at(t: &RationalTable, key: &CoeffKey, what: &str) -> Result<BigInt> {
    let c = t.coeff(key.0, key.1);
    if !c.is_integer() {
        return Err(Error::Precondition(format!(
            "{what} is not integral at {}: {c}",
            describe(&t.df, key)
        )));
    }
    Ok(c.to_integer())
}

/// Finds an integral combination f of the cusp basis with
/// c(f, α, n) ≡ c(d·E, α, n) (mod d) for all n ≤ N.
pub fn congruence_solve(e: &RationalTable, d: &BigInt, cusps: &BasisTable, n_max: u64) -> Result<CongruenceSolution> {
    if !d.is_positive() {
        return Err(Error::Precondition(format!("modulus d must be positive, got {d}")));
    }
    ensure_same_df(&cusps.df, &e.df, "Eisenstein table")?;
    if e.n_max < n_max || cusps.n_max < n_max {
        return Err(Error::DepthMismatch(format!(
            "N = {n_max} exceeds the Eisenstein depth {} or the cusp basis depth {}",
            e.n_max, cusps.n_max
        )));
    }
    let de = e.scale(&BigRational::from_integer(d.clone()));
    let keys = dual_indices(&e.df, n_max);
    let m = cusps.forms.len();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut row_keys = Vec::new();
    for key in &keys {
        let target = integer_at(&de, key, "d·E")?;
        let row = cusps
            .forms
            .iter()
            .enumerate()
            .map(|(i, f)| integer_at(f, key, &format!("cusp form {i}")))
            .collect::<Result<Vec<_>>>()?;
        if key.1.is_zero() {
            if !target.is_multiple_of(d) {
                return Err(Error::NoSolution(format!(
                    "c(d·E) = {target} at {} is not divisible by d = {d}, but cusp forms vanish there",
                    describe(&e.df, key)
                )));
            }
            continue;
        }
        if row.iter().all(Zero::is_zero) {
            if !target.is_multiple_of(d) {
                return Err(Error::NoSolution(format!(
                    "all cusp forms vanish at {} but c(d·E) = {target} is not divisible by d = {d}",
                    describe(&e.df, key)
                )));
            }
            continue;
        }
        rows.push(row);
        rhs.push(target);
        row_keys.push(*key);
    }
    let solve = |count: usize| -> Option<Vec<BigInt>> {
        // [A | d·I] (x, y) = b
        let mut aug = IntMatrix::zeros(count, m + count);
        for i in 0..count {
            for j in 0..m {
                aug[(i, j)] = rows[i][j].clone();
            }
            aug[(i, m + i)] = d.clone();
        }
        solve_integer(&aug, &rhs[..count]).map(|v| v[..m].to_vec())
    };
    let x = if m == 0 || d.is_one() {
        Some(vec![BigInt::zero(); m])
    } else {
        solve(rows.len())
    };
    let Some(x) = x else {
        let bad = (1..=rows.len()).find(|&c| solve(c).is_none()).unwrap_or(rows.len());
        return Err(Error::NoSolution(format!(
            "congruences become inconsistent at row {}",
            describe(&e.df, &row_keys[bad - 1])
        )));
    };
    let combo: Vec<BigInt> = x.iter().map(|v| v.mod_floor(d)).collect();
    let mut f: RationalTable = FourierTable::new(e.k, e.df.clone(), n_max);
    for key in &keys {
        let mut s = BigRational::zero();
        for (xi, form) in combo.iter().zip(&cusps.forms) {
            s += form.coeff(key.0, key.1) * BigRational::from_integer(xi.clone());
        }
        f.coeffs.insert(*key, s);
    }
    for key in &keys {
        let diff = integer_at(&f, key, "f")? - integer_at(&de, key, "d·E")?;
        if !diff.is_multiple_of(d) {
            return Err(Error::NoSolution(format!(
                "post-hoc check failed at {}: c(f) − c(d·E) = {diff} is not divisible by {d}",
                describe(&e.df, key)
            )));
        }
    }
    Ok(CongruenceSolution { combo, f, d: d.clone(), n_max })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilization {
    pub rank: usize,
    /// Rank using only the coefficients with n ≤ N − 1.
    pub rank_previous: usize,
    pub dim: usize,
    /// The truncated coefficients determine the forms: rank = dim.
    pub stable: bool,
}

fn coefficient_rank(cusps: &BasisTable, n_max: u64) -> usize {
    let bound = Rational64::from_integer(n_max as i64);
    let rows: Vec<Vec<BigRational>> = dual_indices(&cusps.df, n_max)
        .into_iter()
        .filter(|(_, n)| *n <= bound)
        .map(|(a, n)| cusps.forms.iter().map(|f| f.coeff(a, n)).collect())
        .collect();
    rank_over_q(&rows)
}

pub fn stabilization_rank(cusps: &BasisTable, n_max: u64) -> Result<Stabilization> {
    if n_max > cusps.n_max {
        return Err(Error::DepthMismatch(format!(
            "N = {n_max} exceeds the basis depth {}",
            cusps.n_max
        )));
    }
    let dim = cusps.forms.len();
    let rank = coefficient_rank(cusps, n_max);
    let rank_previous = if n_max == 0 { 0 } else { coefficient_rank(cusps, n_max - 1) };
    Ok(Stabilization { rank, rank_previous, dim, stable: rank == dim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DiscriminantForm;

    fn q(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn scalar(k: i64, coeffs: &[i64]) -> RationalTable {
        let mut t = FourierTable::new(q(k), DiscriminantForm::trivial(), coeffs.len() as u64 - 1);
        for (n, c) in coeffs.iter().enumerate() {
            t.coeffs.insert((0, q(n as i64)), BigRational::from_integer((*c).into()));
        }
        t
    }

    fn cusp_basis(forms: Vec<RationalTable>, n_max: u64) -> BasisTable {
        BasisTable { k: q(12), kind: BasisKind::Cusp, df: DiscriminantForm::trivial(), n_max, forms }
    }

    #[test]
    fn pairing_and_obstruction() {
        let delta = scalar(12, &[0, 1, -24, 252]);
        let p = PrincipalPart::with_terms(DiscriminantForm::trivial(), &[(0, q(-2), 1), (0, q(-1), 24)]).unwrap();
        assert!(pairing(&p, &delta).unwrap().is_zero());
        let cusps = cusp_basis(vec![delta.clone()], 3);
        assert!(obstruction_check(&p, &cusps).unwrap().admissible);
        let bad = PrincipalPart::with_terms(DiscriminantForm::trivial(), &[(0, q(-1), 1)]).unwrap();
        let ob = obstruction_check(&bad, &cusps).unwrap();
        assert_eq!((ob.admissible, ob.witness), (false, Some(0)));
        let deep = PrincipalPart::with_terms(DiscriminantForm::trivial(), &[(0, q(-5), 1)]).unwrap();
        assert!(matches!(pairing(&deep, &delta), Err(Error::DepthMismatch(_))));
    }

    #[test]
    fn stabilization_flags_degenerate_truncation() {
        let s = stabilization_rank(&cusp_basis(vec![scalar(12, &[0, 1, -24])], 2), 1).unwrap();
        assert_eq!((s.rank, s.rank_previous, s.stable), (1, 0, true));
        let two = cusp_basis(vec![scalar(12, &[0, 1, 5, 7]), scalar(12, &[0, 2, 10, 1])], 3);
        assert!(!stabilization_rank(&two, 2).unwrap().stable);
        assert!(stabilization_rank(&two, 3).unwrap().stable);
        assert!(stabilization_rank(&cusp_basis(vec![], 0), 0).unwrap().stable);
    }

    #[test]
    fn congruence_no_solution_names_row() {
        // 2·x ≡ 1 (mod 4) has no solution.
        let cusps = cusp_basis(vec![scalar(12, &[0, 2])], 1);
        let mut e = scalar(12, &[4, 1]);
        e.coeffs.insert((0, q(1)), BigRational::new(1.into(), 4.into()));
        let err = congruence_solve(&e, &BigInt::from(4), &cusps, 1).unwrap_err();
        assert!(matches!(err, Error::NoSolution(ref s) if s.contains("n = 1")), "{err}");
    }
}

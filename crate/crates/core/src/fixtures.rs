//! Small built-in inputs: the rank-5 example lattice and the level-one
//! cusp form Δ.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};

use crate::fourier::{BasisKind, BasisTable, FourierTable};
use crate::lattice::DiscriminantForm;

/// diag(2, 2, −2, −2, −2): signature (2, 3), discriminant group (Z/2)⁵.
pub fn example_gram() -> Vec<Vec<i64>> {
    (0..5)
        .map(|i| (0..5).map(|j| if i != j { 0 } else if i < 2 { 2 } else { -2 }).collect())
        .collect()
}

/// τ(0), …, τ(N) from Δ = q ∏ (1 − qⁿ)²⁴.
pub fn delta_coefficients(n_max: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::from(0); n_max + 1];
    p[0] = BigInt::from(1);
    for m in 1..=n_max {
        for _ in 0..24 {
            for i in (m..=n_max).rev() {
                let t = p[i - m].clone();
                p[i] -= t;
            }
        }
    }
    let mut tau = vec![BigInt::from(0)];
    tau.extend(p.into_iter().take(n_max));
    tau
}

/// {Δ} as a cusp basis of weight 12 for the trivial discriminant form.
pub fn delta_basis(n_max: u64) -> BasisTable {
    let df = DiscriminantForm::trivial();
    let k = Rational64::from_integer(12);
    let mut f = FourierTable::new(k, df.clone(), n_max);
    for (n, c) in delta_coefficients(n_max as usize).into_iter().enumerate() {
        f.coeffs.insert((0, Rational64::from_integer(n as i64)), BigRational::from_integer(c));
    }
    BasisTable { k, kind: BasisKind::Cusp, df, n_max, forms: vec![f] }
}

mod common;

use common::{crate_root, example_gram, level_one_eisenstein, ramanujan_tau};
use num_rational::{BigRational, Rational64};
use vvforms::fixtures::{delta_basis, delta_coefficients};
use vvforms::fourier::{read_json, BasisJson, BasisKind, BasisTable, RationalTable, TableJson};
use vvforms::lattice::{discriminant_form, validate_lattice, DiscriminantForm};

fn fixture(name: &str) -> std::path::PathBuf {
    crate_root().join("fixtures").join(name)
}

fn basis(name: &str) -> BasisTable {
    BasisTable::from_json(&read_json::<BasisJson>(&fixture(name)).unwrap()).unwrap()
}

fn table(name: &str) -> RationalTable {
    RationalTable::from_json(&read_json::<TableJson>(&fixture(name)).unwrap()).unwrap()
}

fn gram(name: &str) -> Vec<Vec<i64>> {
    let v: serde_json::Value = read_json(&fixture(name)).unwrap();
    serde_json::from_value(v["gram"].clone()).unwrap()
}

#[test]
fn built_in_delta_matches_oracle() {
    let c = delta_coefficients(15);
    assert_eq!(c[0], 0.into());
    for n in 1..=15u64 {
        assert_eq!(c[n as usize], ramanujan_tau(n), "n = {n}");
    }
    assert_eq!(delta_basis(12), basis("l22_cusps.json"));
}

#[test]
fn level_one_eisenstein_fixtures() {
    for (name, k) in [("l22_eisenstein.json", 12), ("l10_eisenstein.json", 6)] {
        let t = table(name);
        assert_eq!(t.k, Rational64::from_integer(k as i64));
        assert_eq!(t.df, DiscriminantForm::trivial());
        let oracle = level_one_eisenstein(k, t.n_max);
        assert_eq!(t.coeffs.len(), oracle.len());
        for (n, c) in oracle.into_iter().enumerate() {
            assert_eq!(t.coeff(0, Rational64::from_integer(n as i64)), c, "{name}, n = {n}");
        }
    }
    assert_eq!(
        table("l22_eisenstein.json").coeff(0, Rational64::from_integer(1)),
        BigRational::new(65520.into(), 691.into())
    );
}

#[test]
fn lattice_fixtures() {
    assert_eq!(gram("example5.json"), example_gram());
    assert_eq!(gram("hyperbolic.json"), vec![vec![0, 1], vec![1, 0]]);
    let hyp = discriminant_form(&validate_lattice(&gram("hyperbolic.json")).unwrap());
    assert_eq!(hyp.size(), 1);
}

#[test]
fn empty_cusp_bases() {
    let l10 = basis("l10_cusps.json");
    assert!(l10.forms.is_empty());
    assert_eq!((l10.k, l10.kind), (Rational64::from_integer(6), BasisKind::Cusp));
    let ex = basis("example5_cusps.json");
    assert!(ex.forms.is_empty());
    assert_eq!(ex.k, Rational64::new(5, 2));
    assert_eq!(ex.df, discriminant_form(&validate_lattice(&example_gram()).unwrap()));
}

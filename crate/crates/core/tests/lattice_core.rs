mod common;

use common::{example_gram, q};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, Zero};
use vvforms::cyclotomic::CycloNumber;
use vvforms::error::Error;
use vvforms::intmat::{inverse_over_q, IntMatrix};
use vvforms::lattice::*;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn validation_examples() {
    let h = validate_lattice(&[vec![0, 1], vec![1, 0]]).unwrap();
    assert_eq!((h.rank(), h.signature()), (2, (1, 1)));
    let e = validate_lattice(&example_gram()).unwrap();
    assert_eq!((e.rank(), e.signature()), (5, (2, 3)));
    assert!(e.is_orthogonal_type());
    assert_eq!(e.l(), Some(3));
    assert!(!h.is_orthogonal_type());
    let odd = validate_lattice(&[vec![2, 1], vec![1, 1]]).unwrap_err();
    assert!(matches!(odd, Error::InvalidLattice(ref s) if s.contains("odd")), "{odd}");
    assert!(validate_lattice(&[vec![2, 1], vec![0, 2]]).is_err());
    assert!(validate_lattice(&[vec![2, 2], vec![2, 2]]).is_err());
}

#[test]
fn discriminant_form_examples() {
    let triv = discriminant_form(&validate_lattice(&[vec![0, 1], vec![1, 0]]).unwrap());
    assert!(triv.orders().is_empty());
    assert_eq!(triv.size(), 1);

    let df = discriminant_form(&validate_lattice(&example_gram()).unwrap());
    assert_eq!(df.orders(), &[2, 2, 2, 2, 2]);
    assert_eq!((df.size(), df.level()), (32, 4));
    let quarter = df.elements().filter(|a| qvalue(&df, a) == r(1, 4)).count();
    let three_quarters = df.elements().filter(|a| qvalue(&df, a) == r(3, 4)).count();
    // Brute force over (½Z)⁵/Z⁵: q(½x) = (x₁² + x₂² − x₃² − x₄² − x₅²)/4 mod 1.
    let mut counts = [0usize; 4];
    for m in 0..32u32 {
        let x: Vec<i64> = (0..5).map(|i| ((m >> i) & 1) as i64).collect();
        let v = x[0] + x[1] - x[2] - x[3] - x[4];
        counts[v.rem_euclid(4) as usize] += 1;
    }
    assert_eq!((quarter, three_quarters), (counts[1], counts[3]));

    let a1 = discriminant_form(&validate_lattice(&[vec![2]]).unwrap());
    assert_eq!(a1.orders(), &[2]);
    assert_eq!(qvalue(&a1, &a1.generator(0)), r(1, 4));
}

#[test]
fn qvalue_and_bilinear_examples() {
    let lat = validate_lattice(&example_gram()).unwrap();
    let df = discriminant_form(&lat);
    assert_eq!(qvalue(&df, &df.zero()), r(0, 1));
    // gen₁ = class of ½e₁.
    let half = |i: usize| {
        let mut v = vec![BigRational::zero(); 5];
        v[i] = q(1, 2);
        v
    };
    let g1 = df.class_of(&half(0)).unwrap();
    let g2 = df.class_of(&half(1)).unwrap();
    assert_eq!(qvalue(&df, &g1), r(1, 4));
    assert_eq!(qvalue(&df, &df.add(&g1, &g2)), r(1, 2));
    assert_eq!(bilinear(&df, &g1, &g1), r(1, 2));
    assert_eq!(bilinear(&df, &df.zero(), &g2), r(0, 1));
    assert_eq!(qvalue(&df, &df.class_of(&half(2)).unwrap()), r(3, 4));
}

#[test]
fn gauss_sum_examples() {
    let triv = DiscriminantForm::trivial();
    assert_eq!(gauss_sum(&triv), CycloNumber::one(8));
    let df = discriminant_form(&validate_lattice(&example_gram()).unwrap());
    let g = gauss_sum(&df);
    let i = CycloNumber::root_of_unity(4, 1);
    let expected = CycloNumber::from_integer(4, 4) - &i * &CycloNumber::from_integer(4, 4);
    assert_eq!(g, expected);
    let z = g.embed();
    assert!((z.re - 4.0).abs() < 1e-12 && (z.im + 4.0).abs() < 1e-12);
    let a1 = discriminant_form(&validate_lattice(&[vec![2]]).unwrap());
    assert_eq!(gauss_sum(&a1), CycloNumber::one(4) + i);
}

#[test]
fn milgram_examples() {
    for g in [vec![vec![0, 1], vec![1, 0]], example_gram(), vec![vec![2]]] {
        assert!(milgram_check(&validate_lattice(&g).unwrap()), "{g:?}");
    }
    // Wrong signature must fail.
    let df = discriminant_form(&validate_lattice(&[vec![2]]).unwrap());
    assert!(!milgram_holds(&df, -1));
}

#[test]
fn size_matches_determinant_and_classes_exhaust_dual() {
    for g in [example_gram(), vec![vec![2, 1], vec![1, -4]], vec![vec![4, 2, 0], vec![2, 6, 1], vec![0, 1, -2]]] {
        let lat = validate_lattice(&g).unwrap();
        let df = discriminant_form(&lat);
        assert_eq!(BigInt::from(df.size()), lat.det().abs());
        // Columns of G⁻¹ generate L'; their integer combinations hit every class.
        let inv = inverse_over_q(&IntMatrix::from_rows(&g)).unwrap();
        let n = g.len();
        let mut seen = std::collections::BTreeSet::new();
        let bound = df.size() as i64;
        let mut w = vec![0i64; n];
        loop {
            let v: Vec<BigRational> = (0..n)
                .map(|i| (0..n).map(|j| &inv[i][j] * BigRational::from_integer(w[j].into())).sum())
                .collect();
            let a = df.class_of(&v).unwrap();
            // q(v) computed directly from the Gram matrix.
            let qv = lat.inner(&v, &v) / q(2, 1);
            let frac = &qv - qv.floor();
            let got = qvalue(&df, &a);
            assert_eq!(q(*got.numer(), *got.denom()), frac);
            seen.insert(a);
            let mut i = 0;
            while i < n {
                w[i] += 1;
                if w[i] < bound.min(6) {
                    break;
                }
                w[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        assert_eq!(seen.len() as u64, df.size(), "{g:?}");
    }
}

#[test]
fn table_is_printable() {
    let df = discriminant_form(&validate_lattice(&[vec![2]]).unwrap());
    let s = df.to_string();
    assert!(s.contains("1/4"), "{s}");
}

#[test]
fn negation_and_polarization_exhaustive() {
    let g = vec![vec![2, 1, 0], vec![1, -4, 1], vec![0, 1, 6]];
    let df = discriminant_form(&validate_lattice(&g).unwrap());
    assert!(df.size() <= 512);
    for a in df.elements() {
        assert_eq!(qvalue(&df, &df.neg(&a)), qvalue(&df, &a));
        for b in df.elements() {
            let lhs = qvalue(&df, &df.add(&a, &b)) - qvalue(&df, &a) - qvalue(&df, &b) - bilinear(&df, &a, &b);
            assert!(lhs.is_integer());
            assert_eq!(bilinear(&df, &a, &b), bilinear(&df, &b, &a));
        }
    }
    assert_eq!((2 * df.size()) % df.level(), 0);
}

#[test]
fn unimodular_representatives() {
    let df = discriminant_form(&validate_lattice(&[vec![0, 1], vec![1, 0]]).unwrap());
    assert_eq!(df.size(), 1);
    let zero = df.representative(&df.zero()).unwrap();
    assert_eq!(zero.len(), 2);
    assert_eq!(df.class_of(&zero).unwrap(), df.zero());
}

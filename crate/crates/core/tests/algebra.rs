mod common;

use common::{example_gram, q};
use num_complex::Complex64;
use vvforms::cyclotomic::CycloNumber;
use vvforms::lattice::{discriminant_form, validate_lattice, DiscriminantForm};
use vvforms::metaplectic::{mp_inv, mp_mul, word_decompose, MetaplecticElement as M};
use vvforms::weil::{rho, rho_dual, rho_s, rho_t, WeilMatrix, WeilRepresentation};

fn df_of(g: &[Vec<i64>]) -> DiscriminantForm {
    discriminant_form(&validate_lattice(g).unwrap())
}

#[test]
fn roots_of_unity() {
    assert_eq!(CycloNumber::root_of_unity(1, 0), CycloNumber::one(1));
    let i = CycloNumber::root_of_unity(4, 1);
    assert_eq!(i.coeffs(), vec![q(0, 1), q(1, 1)]);
    let s = CycloNumber::root_of_unity(3, 1) + CycloNumber::root_of_unity(3, 2);
    assert_eq!(s, CycloNumber::from_integer(3, -1));
    for m in 1..=200u64 {
        for j in [1, 7, m as i64 - 1] {
            assert_eq!(CycloNumber::root_of_unity(m, j).pow(m), CycloNumber::one(m), "ζ_{m}^{j}");
        }
    }
}

#[test]
fn field_operations() {
    let i = CycloNumber::root_of_unity(4, 1);
    assert_eq!(i.conj(), -&i);
    let g = CycloNumber::from_integer(4, 4) - &i * &CycloNumber::from_integer(4, 4);
    assert_eq!(&g * &g.conj(), CycloNumber::from_integer(4, 32));
    let one_plus_i = CycloNumber::one(4) + i.clone();
    let expected = (CycloNumber::one(4) - i).scale(&q(1, 2));
    assert_eq!(one_plus_i.inverse().unwrap(), expected);
    assert!(CycloNumber::zero(8).inverse().is_err());
    // Mixed moduli lift to the lcm.
    let z3 = CycloNumber::root_of_unity(3, 1);
    let z4 = CycloNumber::root_of_unity(4, 1);
    assert_eq!((&z3 * &z4).modulus() % 12, 0);
    assert_eq!(&z3 * &z4, CycloNumber::root_of_unity(12, 7));
}

#[test]
fn embeddings() {
    assert_eq!(CycloNumber::one(5).embed(), Complex64::new(1.0, 0.0));
    let z8 = CycloNumber::root_of_unity(8, 1).embed();
    assert!((z8.re - 0.5f64.sqrt()).abs() < 1e-15 && (z8.im - 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn metaplectic_examples() {
    assert_eq!(mp_mul(&M::t(), &M::t()), M::new([1, 2, 0, 1], 1));
    let s = M::s();
    assert_ne!(s.pow(2), M::identity());
    assert_eq!(s.pow(4), M::new([1, 0, 0, 1], -1));
    assert_eq!(s.pow(8), M::identity());
    assert_eq!(mp_mul(&mp_inv(&s), &s), M::identity());
    assert!(word_decompose(&M::identity()).is_empty());
    assert_eq!(word_decompose(&M::t()).to_string(), "T");
    for branch in [1, -1] {
        let g = M::new([1, 0, 1, 1], branch);
        assert_eq!(word_decompose(&g).eval(), g);
    }
}

#[test]
fn generator_matrices() {
    let triv = DiscriminantForm::trivial();
    assert_eq!(rho_t(&triv), WeilMatrix::identity(8, 1));
    assert_eq!(rho_s(&triv), WeilMatrix::identity(8, 1));

    let a1 = df_of(&[vec![2]]);
    let i = CycloNumber::root_of_unity(4, 1);
    let t = rho_t(&a1);
    assert_eq!(*t.entry(0, 0), CycloNumber::one(4));
    assert_eq!(*t.entry(1, 1), i);
    assert!(t.entry(0, 1).is_zero());
    let c = (CycloNumber::one(4) + i).inverse().unwrap();
    let s = rho_s(&a1);
    assert_eq!(*s.entry(0, 0), c);
    assert_eq!(*s.entry(0, 1), c);
    assert_eq!(*s.entry(1, 1), -&c);

    let df = df_of(&example_gram());
    let s = rho_s(&df);
    assert_eq!(s.dim(), 32);
    let sq = CycloNumber::from_rational(8, &q(1, 32));
    for e in s.entries() {
        assert_eq!(e * &e.conj(), sq);
    }
}

#[test]
fn representation_examples() {
    for g in [vec![vec![2]], example_gram(), vec![vec![2, 1], vec![1, -4]]] {
        let df = df_of(&g);
        let rep = WeilRepresentation::new(&df);
        assert_eq!(rho(&df, &M::identity()), WeilMatrix::identity(rep.modulus(), df.size() as usize));
        let z = rep.rho_s().mul(&rep.rho_s());
        assert_eq!(z, rep.rho(&M::z()));
        for k in [1, 2, 5] {
            let tk = rep.rho_t_pow(k);
            assert_eq!(z.mul(&tk), tk.mul(&z));
        }
        let st = mp_mul(&M::s(), &M::t());
        assert_eq!(rep.rho(&st.pow(3)), rep.rho(&M::s().pow(2)));
        let a = M::new([3, 1, 2, 1], -1);
        assert_eq!(rho_dual(&df, &a), rho(&df, &a).conj());
        // ρ(S)² sends e_α to a multiple of e_{−α}.
        let neg = df.negation_table();
        for (a, &na) in neg.iter().enumerate() {
            for b in 0..df.size() as usize {
                assert_eq!(z.entry(b, a).is_zero(), b != na);
            }
        }
    }
}

//! Seeded random inputs for self-tests: even lattices and pairs of words
//! that evaluate to the same metaplectic element.

use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::lattice::{validate_lattice, Lattice};
use crate::metaplectic::{word_decompose, Generator, Word};

/// A random even nondegenerate lattice of rank 1..=`max_rank` with
/// 0 < |det| ≤ `max_det`: symmetric, even diagonal in [−8, 8], off-diagonal
/// entries in [−3, 3], resampled until the determinant bound holds.
pub fn random_even_lattice<R: Rng>(rng: &mut R, max_rank: usize, max_det: u64) -> Lattice {
    loop {
        let n = rng.gen_range(1..=max_rank);
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            g[i][i] = 2 * rng.gen_range(-4..=4);
            for j in 0..i {
                let x = rng.gen_range(-3..=3);
                g[i][j] = x;
                g[j][i] = x;
            }
        }
        let Ok(lat) = validate_lattice(&g) else { continue };
        let det = lat.det().abs();
        if !det.is_zero() && det.to_u64().is_some_and(|d| d <= max_det) {
            return lat;
        }
    }
}

/// A random word of `len` letters with exponents in [−3, 3].
pub fn random_word<R: Rng>(rng: &mut R, len: usize) -> Word {
    let mut w = Word::new();
    for _ in 0..len {
        let g = if rng.gen_bool(0.5) { Generator::S } else { Generator::T };
        w.push(g, rng.gen_range(-3..=3));
    }
    w
}

/// Words equal to 1 in Mp₂(Z).
fn relators() -> Vec<Word> {
    let mut st3 = Word::new();
    for _ in 0..3 {
        st3.push(Generator::S, 1);
        st3.push(Generator::T, 1);
    }
    st3.push(Generator::S, -2);
    // Z = S² is central.
    let mut zt = Word::new();
    zt.push(Generator::S, 2);
    zt.push(Generator::T, 1);
    zt.push(Generator::S, -2);
    zt.push(Generator::T, -1);
    let mut s8 = Word::new();
    s8.push(Generator::S, 8);
    vec![st3, zt, s8]
}

/// Two different words for the same element: a random word with relators
/// spliced in at random positions, and the normal form of its value.
pub fn equal_word_pair<R: Rng>(rng: &mut R, len: usize) -> (Word, Word) {
    let base = random_word(rng, len);
    let rels = relators();
    let mut w = Word::new();
    for &(g, e) in &base.letters {
        if rng.gen_bool(0.4) {
            let r = &rels[rng.gen_range(0..rels.len())];
            let r = if rng.gen_bool(0.5) { r.clone() } else { r.inverse() };
            w = w.concat(&r);
        }
        w.push(g, e);
    }
    let normal = word_decompose(&w.eval());
    (w, normal)
}

//! Deterministic random instances for the verification suites.
//!
//! Every trial draws from its own stream, derived from `(seed, trial)`, so
//! trials can run in any order (or in parallel) and still reproduce.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{frac, int, Bilinear, Matrix, Ring, Scalar, Vector};

pub type TrialRng = ChaCha8Rng;

pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Small rational `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 4`.
pub fn rational(rng: &mut TrialRng) -> Scalar {
    frac(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

pub fn nonzero_rational(rng: &mut TrialRng) -> Scalar {
    loop {
        let r = rational(rng);
        if !Ring::is_zero(&r) {
            return r;
        }
    }
}

pub fn small_int(rng: &mut TrialRng, lo: i64, hi: i64) -> Scalar {
    int(rng.gen_range(lo..=hi))
}

pub fn dim(rng: &mut TrialRng, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi)
}

pub fn vector(rng: &mut TrialRng, n: usize) -> Vector {
    (0..n).map(|_| rational(rng)).collect()
}

pub fn nonzero_vector(rng: &mut TrialRng, n: usize) -> Vector {
    assert!(n > 0, "no nonzero vector in a zero-dimensional space");
    loop {
        let v = vector(rng, n);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn matrix(rng: &mut TrialRng, rows: usize, cols: usize) -> Matrix {
    let entries: Vec<Scalar> = (0..rows * cols).map(|_| rational(rng)).collect();
    Matrix::from_fn(rows, cols, |i, j| entries[i * cols + j].clone())
}

pub fn invertible(rng: &mut TrialRng, n: usize) -> Matrix {
    loop {
        let m = matrix(rng, n, n);
        if !Ring::is_zero(&m.det().expect("square")) {
            return m;
        }
    }
}

/// Integer matrix with determinant ±1, so its inverse is integral too.
pub fn unimodular(rng: &mut TrialRng, n: usize) -> Matrix {
    let mut m: Matrix = Matrix::identity(n);
    for _ in 0..2 * n {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let f = small_int(rng, -2, 2);
        for c in 0..n {
            let d = &f * &m[(j, c)];
            m[(i, c)] = &m[(i, c)] + d;
        }
    }
    if n > 0 && rng.gen_bool(0.5) {
        for c in 0..n {
            m[(0, c)] = -m[(0, c)].clone();
        }
    }
    m
}

pub fn bilinear(rng: &mut TrialRng, n3: usize, n1: usize, n2: usize) -> Bilinear {
    let entries: Vec<Scalar> = (0..n3 * n1 * n2).map(|_| rational(rng)).collect();
    Bilinear::from_fn(n3, n1, n2, |u, i, b| entries[(u * n1 + i) * n2 + b].clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_reproduce() {
        let a = vector(&mut trial_rng(7, 3), 5);
        let b = vector(&mut trial_rng(7, 3), 5);
        let c = vector(&mut trial_rng(7, 4), 5);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unimodular_has_unit_determinant() {
        let mut rng = trial_rng(0, 0);
        for n in 1..5 {
            let d = unimodular(&mut rng, n).det().unwrap();
            assert!(d == int(1) || d == int(-1));
        }
    }
}

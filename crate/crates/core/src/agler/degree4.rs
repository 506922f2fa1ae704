//! Four variables: the subset matrix reduces to the Christoffel–Darboux
//! Gram matrix `A` plus one 2x2 block `X`, giving a closed-form test.
//!
//! Subsets of `{1,2,3}` are taken in size-sections
//! `∅, {1}, {2}, {3}, {1,2}, {2,3}, {1,3}, {1,2,3}`. Conjugating by
//! `R = 2 diag(1, C, C, 1)`, `C` the 3-point Fourier matrix, leaves
//! `A` on positions `(0, 1, 4, 7)`, `X` on `(5, 2)` and
//! `diag(1, conj mu) X diag(1, mu)` on `(6, 3)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{build_agler_matrix, solve_b_tensor};
use crate::cd::{cd_gram, CDGram};
use crate::error::{Error, Result};
use crate::numerics::CMatrix;
use crate::poly::SymMultiAffinePoly;

/// Bitmasks in size-section order.
pub const SECTION_ORDER: [usize; 8] = [0b000, 0b001, 0b010, 0b100, 0b011, 0b110, 0b101, 0b111];

const SECTIONS: [std::ops::Range<usize>; 4] = [0..1, 1..4, 4..7, 7..8];
const A_POSITIONS: [usize; 4] = [0, 1, 4, 7];
const X_POSITIONS: [usize; 2] = [5, 2];
const TWIN_POSITIONS: [usize; 2] = [6, 3];
/// Off-block mass allowed relative to `||B||_F`.
const BLOCK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Degree4Check {
    /// `8(|p0|^2 - |p4|^2) - (|p1|^2 - |p3|^2)`.
    pub lhs: f64,
    /// `2 |p2 conj(p1) - conj(p2) p3 - 2(p1 conj(p0) - conj(p3) p4)|`.
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Degree4Blocks {
    /// `S[j][k]`: rows of size `j`, columns of size `k`, scaled by 4.
    pub s: Vec<Vec<CMatrix>>,
    /// `R B R^*` in section order.
    pub conjugated: CMatrix,
    /// `X` read off the conjugated matrix.
    pub x: CMatrix,
    /// `X` from the Gram entries.
    pub x_closed_form: CMatrix,
    pub gram: CDGram,
    /// Frobenius mass outside the three diagonal blocks.
    pub off_block_mass: f64,
    /// `||B||_F` of the unconjugated matrix.
    pub matrix_norm: f64,
    /// Max entry gap between the `A` block and the Gram matrix.
    pub a_mismatch: f64,
    /// Max entry gap between `X` and its closed form.
    pub x_mismatch: f64,
    /// Max entry gap between the third block and the phase-twisted `X`.
    pub twin_mismatch: f64,
}

fn mu() -> Complex64 {
    Complex64::from_polar(1.0, TAU / 3.0)
}

fn check_degree(p: &SymMultiAffinePoly) -> Result<()> {
    if p.d() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: p.d(),
        });
    }
    Ok(())
}

/// Closed-form PSD test for four variables; `pass` is `lhs >= rhs - tol`.
pub fn degree4_closed_form(p: &SymMultiAffinePoly, tol: f64) -> Result<Degree4Check> {
    check_degree(p)?;
    let w = p.weights();
    let lhs = 8.0 * (w[0].norm_sqr() - w[4].norm_sqr()) - (w[1].norm_sqr() - w[3].norm_sqr());
    let inner = w[2] * w[1].conj() - w[2].conj() * w[3] - (w[1] * w[0].conj() - w[3].conj() * w[4]) * 2.0;
    let rhs = 2.0 * inner.norm();
    Ok(Degree4Check {
        lhs,
        rhs,
        pass: lhs >= rhs - tol,
    })
}

/// `X = 1/4 [[(9A00 - A11)/2, mu (A21 - 3A10)], [mu^2 (A12 - 3A01), (9A00 - A11)/2]]`.
pub fn x_from_gram(g: &CDGram) -> CMatrix {
    let a = |j: usize, k: usize| g.g[(j, k)];
    let mu = mu();
    let diag = (a(0, 0) * 9.0 - a(1, 1)) * 0.5;
    CMatrix::from_rows(&[
        vec![diag, mu * (a(2, 1) - a(1, 0) * 3.0)],
        vec![mu * mu * (a(1, 2) - a(0, 1) * 3.0), diag],
    ])
    .expect("2x2")
    .scale(Complex64::new(0.25, 0.0))
}

fn max_gap(a: &CMatrix, b: &CMatrix) -> f64 {
    a.sub(b).map_or(f64::INFINITY, |m| m.max_abs())
}

/// Block decomposition of the four-variable subset matrix. Fails with
/// `BlockStructure` if the conjugated matrix is not block diagonal.
pub fn degree4_blocks(p: &SymMultiAffinePoly) -> Result<Degree4Blocks> {
    check_degree(p)?;
    let b = build_agler_matrix(&solve_b_tensor(p)?, 4)?;
    let bp = b.m.as_matrix().select(&SECTION_ORDER, &SECTION_ORDER);

    let s = SECTIONS
        .iter()
        .map(|rj| {
            SECTIONS
                .iter()
                .map(|rk| {
                    let rows: Vec<usize> = rj.clone().collect();
                    let cols: Vec<usize> = rk.clone().collect();
                    bp.select(&rows, &cols).scale(Complex64::new(4.0, 0.0))
                })
                .collect()
        })
        .collect();

    let mu = mu();
    let one = Complex64::new(1.0, 0.0);
    let c = [[one, one, one], [one, mu, mu * mu], [one, mu * mu, mu]];
    let mut r = CMatrix::zeros(8, 8);
    r[(0, 0)] = one * 2.0;
    r[(7, 7)] = one * 2.0;
    for base in [1, 4] {
        for i in 0..3 {
            for j in 0..3 {
                r[(base + i, base + j)] = c[i][j] * 2.0;
            }
        }
    }
    let conjugated = r.matmul(&bp)?.matmul(&r.adjoint())?;

    let mut in_block = [[false; 8]; 8];
    for set in [&A_POSITIONS[..], &X_POSITIONS[..], &TWIN_POSITIONS[..]] {
        for &i in set {
            for &j in set {
                in_block[i][j] = true;
            }
        }
    }
    let mut off = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            if !in_block[i][j] {
                off += conjugated[(i, j)].norm_sqr();
            }
        }
    }
    let off_block_mass = off.sqrt();
    let matrix_norm = b.m.frobenius_norm();
    if off_block_mass > BLOCK_TOL * matrix_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::BlockStructure { mass: off_block_mass });
    }

    let gram = cd_gram(&p.diagonal(), 4)?;
    let a_block = conjugated.select(&A_POSITIONS, &A_POSITIONS);
    let x = conjugated.select(&X_POSITIONS, &X_POSITIONS);
    let twin = conjugated.select(&TWIN_POSITIONS, &TWIN_POSITIONS);
    let x_closed_form = x_from_gram(&gram);
    let phase = CMatrix::from_rows(&[vec![one, Complex64::new(0.0, 0.0)], vec![Complex64::new(0.0, 0.0), mu]])?;
    let twisted = phase.adjoint().matmul(&x_closed_form)?.matmul(&phase)?;

    Ok(Degree4Blocks {
        s,
        a_mismatch: max_gap(&a_block, gram.g.as_matrix()),
        x_mismatch: max_gap(&x, &x_closed_form),
        twin_mismatch: max_gap(&twin, &twisted),
        conjugated,
        x,
        x_closed_form,
        gram,
        off_block_mass,
        matrix_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermitian_eigenvalues, HermitianMatrix};
    use crate::poly::sample::random_stable_sym;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_examples() {
        let cases = [
            ([1.0, -1.0, 0.0, 0.0, 0.0], 7.0, 4.0),
            ([1.0, -4.0, 6.0, -4.0, 1.0], 0.0, 0.0),
            ([1.0, 0.0, 0.0, 0.0, 0.0], 8.0, 0.0),
        ];
        for (w, lhs, rhs) in cases {
            let c = degree4_closed_form(&SymMultiAffinePoly::from_real(&w).unwrap(), 1e-9).unwrap();
            assert!((c.lhs - lhs).abs() < 1e-12 && (c.rhs - rhs).abs() < 1e-12, "{c:?}");
            assert!(c.pass);
        }
        assert!(degree4_closed_form(&SymMultiAffinePoly::one(3).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn constant_blocks() {
        let blk = degree4_blocks(&SymMultiAffinePoly::one(4).unwrap()).unwrap();
        assert!(blk.off_block_mass < 1e-14);
        assert!(blk.a_mismatch < 1e-14 && blk.x_mismatch < 1e-14 && blk.twin_mismatch < 1e-14);
        // A = I, so X = diag(1, 1) with zero coupling.
        assert!((blk.x[(0, 0)] - 1.0).norm() < 1e-14 && blk.x[(0, 1)].norm() < 1e-14);
        assert!((blk.s[0][0][(0, 0)] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn section_blocks_match_gram_entries() {
        let p = SymMultiAffinePoly::new(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.3, 0.1),
            Complex64::new(0.2, 0.2),
            Complex64::new(0.0, -0.1),
            Complex64::new(0.05, 0.0),
        ])
        .unwrap();
        let blk = degree4_blocks(&p).unwrap();
        let a = |j: usize, k: usize| blk.gram.g[(j, k)];
        let s = &blk.s;
        assert!((s[0][0][(0, 0)] - a(0, 0)).norm() < 1e-13);
        assert!((s[3][3][(0, 0)] - a(0, 0)).norm() < 1e-13);
        assert!((s[0][3][(0, 0)] - a(0, 3)).norm() < 1e-13);
        for k in 0..3 {
            assert!((s[0][1][(0, k)] - a(0, 1) / 3.0).norm() < 1e-13);
            assert!((s[0][2][(0, k)] - a(0, 2) / 3.0).norm() < 1e-13);
        }
        let diag = a(0, 0) / 4.0 + a(1, 1) / 12.0;
        let offd = (a(1, 1) - a(0, 0)) / 8.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { diag } else { offd };
                assert!((s[1][1][(i, j)] - want).norm() < 1e-13);
                assert!((s[2][2][(i, j)] - want).norm() < 1e-13);
            }
        }
        let sum = (a(1, 2) + a(0, 1)) / 12.0;
        let diff = (a(1, 2) - a(0, 1)) / 6.0;
        let want = [[sum, diff, sum], [sum, sum, diff], [diff, sum, sum]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((s[1][2][(i, j)] - want[i][j]).norm() < 1e-13, "S12 ({i},{j})");
            }
        }
    }

    #[test]
    fn boundary_example_has_singular_x() {
        let p = SymMultiAffinePoly::from_real(&[1.0, -4.0, 6.0, -4.0, 1.0]).unwrap();
        let blk = degree4_blocks(&p).unwrap();
        let ev = hermitian_eigenvalues(&HermitianMatrix::symmetrized(blk.x.clone())).unwrap();
        assert!(ev.iter().all(|v| v.abs() < 1e-9), "{ev:?}");
    }

    #[test]
    fn random_inputs_are_block_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let p = random_stable_sym(&mut rng, 4);
            let blk = degree4_blocks(&p).unwrap();
            assert!(blk.a_mismatch < 1e-10);
            assert!(blk.x_mismatch < 1e-10);
            assert!(blk.twin_mismatch < 1e-10);
        }
    }
}

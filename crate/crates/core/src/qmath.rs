//! Small dense complex linear algebra and the Wootters concurrence.
//!
//! Everything here works on fixed-size arrays: two qubits never need more
//! than a 4×4 matrix (8×8 for the singular-value embedding used by the
//! concurrence), so there is no need for a general matrix library.

use num_complex::Complex64;

use crate::consts::{EIGEN_INPUT_HERMITIAN_TOL, HERMITIAN_TOL, MAP_TOL, PSD_TOL, TRACE_TOL};
use crate::{Error, Result};

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity<const N: usize>() -> [[C64; N]; N] {
    let mut m = [[ZERO; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

pub fn matmul<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == ZERO {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn dagger<const N: usize>(a: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

/// Kronecker product A ⊗ B with qubit A as the most significant index.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// U ρ U†.
pub fn conjugate_by<const N: usize>(u: &[[C64; N]; N], rho: &[[C64; N]; N]) -> [[C64; N]; N] {
    matmul(&matmul(u, rho), &dagger(u))
}

pub fn trace<const N: usize>(m: &[[C64; N]; N]) -> C64 {
    (0..N).map(|i| m[i][i]).sum()
}

/// Largest elementwise |m_ij − conj(m_ji)|.
pub fn hermitian_deviation<const N: usize>(m: &[[C64; N]; N]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in i..N {
            worst = worst.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    worst
}

/// Max |U†U − I| over all entries.
pub fn unitarity_deviation<const N: usize>(u: &[[C64; N]; N]) -> f64 {
    let p = matmul(&dagger(u), u);
    let mut worst = 0.0f64;
    for (i, row) in p.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// Cyclic complex Jacobi diagonalisation of a Hermitian matrix.
///
/// Returns eigenvalues sorted descending and the unitary whose columns are
/// the matching eigenvectors. Only the upper triangle and the real part of
/// the diagonal are read.
pub fn jacobi_eigh<const N: usize>(m: &[[C64; N]; N]) -> ([f64; N], [[C64; N]; N]) {
    let mut a = *m;
    for i in 0..N {
        a[i][i] = C64::new(a[i][i].re, 0.0);
        for j in (i + 1)..N {
            a[j][i] = a[i][j].conj();
        }
    }
    let mut v = identity::<N>();

    let scale: f64 = a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        return ([0.0; N], v);
    }

    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|i| ((i + 1)..N).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                // Phase-strip the pivot, then a real symmetric Jacobi rotation.
                let phase = apq / mag;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // J = diag(1, conj(phase)) · [[c, s], [-s, c]] on (p, q).
                let jpp = C64::new(cs, 0.0);
                let jpq = C64::new(sn, 0.0);
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;

                for row in a.iter_mut() {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = akp * jpp + akq * jqp;
                    row[q] = akp * jpq + akq * jqq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q][k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
                a[p][p] = C64::new(a[p][p].re, 0.0);
                a[q][q] = C64::new(a[q][q].re, 0.0);

                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = vkp * jpp + vkq * jqp;
                    row[q] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&x, &y| a[y][y].re.total_cmp(&a[x][x].re));
    let values = std::array::from_fn(|k| a[order[k]][order[k]].re);
    let mut vectors = [[ZERO; N]; N];
    for (k, &src) in order.iter().enumerate() {
        for (row, vrow) in vectors.iter_mut().zip(v.iter()) {
            row[k] = vrow[src];
        }
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian 4×4 matrix, descending.
pub fn hermitian_eigenvalues(m: &Mat4) -> Result<[f64; 4]> {
    Ok(hermitian_eigh(m)?.0)
}

/// Eigenvalues (descending) and eigenvectors (as columns) of a Hermitian
/// matrix, rejecting inputs that are not Hermitian within
/// [`EIGEN_INPUT_HERMITIAN_TOL`].
pub fn hermitian_eigh<const N: usize>(m: &[[C64; N]; N]) -> Result<([f64; N], [[C64; N]; N])> {
    let deviation = hermitian_deviation(m);
    if !(deviation <= EIGEN_INPUT_HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi_eigh(m))
}

/// Two-qubit density matrix in the basis {|00⟩, |01⟩, |10⟩, |11⟩}.
///
/// Construction checks Hermiticity, unit trace and positivity, so every
/// value of this type satisfies them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix4(Mat4);

impl DensityMatrix4 {
    pub fn new(elements: Mat4) -> Result<Self> {
        check_density(&elements)?;
        Ok(Self(elements))
    }

    pub fn maximally_mixed() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = C64::new(0.25, 0.0);
        }
        Self(m)
    }

    /// Projector onto a normalised pure state.
    pub fn pure(psi: &[C64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|x| x.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::InvalidState(format!("state vector norm² = {norm}")));
        }
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(m)
    }

    /// ρ_A ⊗ ρ_B for single-qubit density matrices.
    pub fn product(rho_a: &Mat2, rho_b: &Mat2) -> Result<Self> {
        Self::new(kron(rho_a, rho_b))
    }

    pub fn elements(&self) -> &Mat4 {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    /// Real part of a diagonal element.
    pub fn population(&self, i: usize) -> f64 {
        self.0[i][i].re
    }

    pub fn into_inner(self) -> Mat4 {
        self.0
    }

    /// U ρ U† for a unitary U.
    pub fn evolve(&self, u: &Mat4) -> Result<Self> {
        Self::new(conjugate_by(u, &self.0))
    }

    pub fn is_x_state(&self, tol: f64) -> bool {
        is_x_state(self, tol)
    }

    /// Largest modulus among the eight elements outside the X pattern.
    pub fn max_off_x(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j && i + j != 3 {
                    worst = worst.max(self.0[i][j].norm());
                }
            }
        }
        worst
    }
}

fn check_density(m: &Mat4) -> Result<()> {
    if m.iter().flatten().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::InvalidState("non-finite element".into()));
    }
    let dev = hermitian_deviation(m);
    if dev > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!(
            "not Hermitian (deviation {dev:e})"
        )));
    }
    let tr = trace(m);
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
    }
    let (vals, _) = jacobi_eigh(m);
    if vals[3] < -PSD_TOL {
        return Err(Error::InvalidState(format!(
            "negative eigenvalue {:e}",
            vals[3]
        )));
    }
    Ok(())
}

/// True iff every element off the diagonal and anti-diagonal has modulus
/// at most `tol`.
pub fn is_x_state(rho: &DensityMatrix4, tol: f64) -> bool {
    rho.max_off_x() <= tol
}

/// σ_y ⊗ σ_y, which happens to be real in the computational basis.
fn spin_flip() -> Mat4 {
    let mut y = [[ZERO; 4]; 4];
    y[0][3] = C64::new(-1.0, 0.0);
    y[1][2] = ONE;
    y[2][1] = ONE;
    y[3][0] = C64::new(-1.0, 0.0);
    y
}

/// Singular values √λ_k of ρ·ρ̃, descending.
///
/// With ρ = Σ_k w_k w_k† the √λ_k are the singular values of the complex
/// symmetric matrix τ_jk = w_jᵀ (σ_y⊗σ_y) w_k. They are read off as the
/// positive half of the spectrum of the Hermitian embedding
/// [[0, τ], [τ†, 0]], which keeps absolute accuracy near rank deficiency
/// (taking square roots of λ would not).
fn wootters_singular_values(rho: &DensityMatrix4) -> [f64; 4] {
    let (vals, vecs) = jacobi_eigh(rho.elements());
    let y = spin_flip();
    let mut w = [[ZERO; 4]; 4]; // w[k] = √p_k v_k
    for k in 0..4 {
        // check_density already rejected anything below -PSD_TOL.
        let weight = vals[k].max(0.0).sqrt();
        for i in 0..4 {
            w[k][i] = vecs[i][k] * weight;
        }
    }
    let mut tau = [[ZERO; 4]; 4];
    for j in 0..4 {
        let mut yw = [ZERO; 4];
        for (i, out) in yw.iter_mut().enumerate() {
            *out = (0..4).map(|l| y[i][l] * w[j][l]).sum();
        }
        for k in 0..4 {
            // τ is symmetric; compute w_kᵀ Y w_j.
            tau[k][j] = (0..4).map(|i| w[k][i] * yw[i]).sum();
        }
    }
    let mut emb = [[ZERO; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            emb[i][4 + j] = tau[i][j];
            emb[4 + j][i] = tau[i][j].conj();
        }
    }
    let (ev, _) = jacobi_eigh(&emb);
    [ev[0].max(0.0), ev[1].max(0.0), ev[2].max(0.0), ev[3].max(0.0)]
}

/// √λ1 − √λ2 − √λ3 − √λ4 before clamping at zero.
pub fn wootters_signed(rho: &DensityMatrix4) -> f64 {
    let s = wootters_singular_values(rho);
    s[0] - s[1] - s[2] - s[3]
}

/// Wootters concurrence max(0, √λ1 − √λ2 − √λ3 − √λ4), clamped to [0, 1].
pub fn wootters_concurrence(rho: &DensityMatrix4) -> f64 {
    wootters_signed(rho).clamp(0.0, 1.0)
}

/// Wootters concurrence of a raw matrix, validating it first.
pub fn wootters_concurrence_of(m: &Mat4) -> Result<f64> {
    Ok(wootters_concurrence(&DensityMatrix4::new(*m)?))
}

/// Linear map on single-qubit density matrices,
/// ρ_{ii'}(t) = Σ_{ll'} A_{ii'}^{ll'} ρ_{ll'}(0), stored as `[i][i'][l][l']`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitMap {
    transfer: [[[[C64; 2]; 2]; 2]; 2],
}

impl SingleQubitMap {
    pub fn identity() -> Self {
        let mut transfer = [[[[ZERO; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for ip in 0..2 {
                transfer[i][ip][i][ip] = ONE;
            }
        }
        Self { transfer }
    }

    /// Builds a map and checks trace and hermiticity preservation.
    pub fn new(transfer: [[[[C64; 2]; 2]; 2]; 2]) -> Result<Self> {
        let map = Self { transfer };
        let (tr, herm) = map.preservation_defects();
        if tr > MAP_TOL || herm > MAP_TOL {
            return Err(Error::InvalidState(format!(
                "single-qubit map violates trace ({tr:e}) or hermiticity ({herm:e}) preservation"
            )));
        }
        Ok(map)
    }

    /// Map with population transfer matrix `pop[i][l]` = P(l → i) and
    /// coherence factor `coh` multiplying ⟨1|ρ|0⟩ (its conjugate multiplies
    /// ⟨0|ρ|1⟩). No population/coherence mixing.
    pub fn secular(pop: [[f64; 2]; 2], coh: C64) -> Result<Self> {
        let mut transfer = [[[[ZERO; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for l in 0..2 {
                transfer[i][i][l][l] = C64::new(pop[i][l], 0.0);
            }
        }
        transfer[1][0][1][0] = coh;
        transfer[0][1][0][1] = coh.conj();
        Self::new(transfer)
    }

    pub fn coefficient(&self, i: usize, ip: usize, l: usize, lp: usize) -> C64 {
        self.transfer[i][ip][l][lp]
    }

    /// (max |Σ_i A_ii^{ll'} − δ_ll'|, max |A_ii'^{ll'} − conj(A_i'i^{l'l})|).
    pub fn preservation_defects(&self) -> (f64, f64) {
        let a = &self.transfer;
        let mut tr = 0.0f64;
        let mut herm = 0.0f64;
        for l in 0..2 {
            for lp in 0..2 {
                let s = a[0][0][l][lp] + a[1][1][l][lp];
                let target = if l == lp { ONE } else { ZERO };
                tr = tr.max((s - target).norm());
                for i in 0..2 {
                    for ip in 0..2 {
                        herm = herm.max((a[i][ip][l][lp] - a[ip][i][lp][l].conj()).norm());
                    }
                }
            }
        }
        (tr, herm)
    }

    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let mut out = [[ZERO; 2]; 2];
        for i in 0..2 {
            for ip in 0..2 {
                let mut acc = ZERO;
                for l in 0..2 {
                    for lp in 0..2 {
                        acc += self.transfer[i][ip][l][lp] * rho[l][lp];
                    }
                }
                out[i][ip] = acc;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell_psi_plus() -> DensityMatrix4 {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        DensityMatrix4::pure(&[ZERO, h, h, ZERO]).unwrap()
    }

    #[test]
    fn scalar_matrix_eigenvalues() {
        let rho = DensityMatrix4::maximally_mixed();
        let ev = hermitian_eigenvalues(rho.elements()).unwrap();
        for v in ev {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let mut m = [[ZERO; 4]; 4];
        m[2][2] = ONE;
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = identity::<4>();
        m[0][1] = c(0.0, 1.0);
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigenvectors_reconstruct() {
        let mut m = [[ZERO; 4]; 4];
        let vals = [0.3, -1.2, 2.0, 0.7];
        for i in 0..4 {
            m[i][i] = c(vals[i], 0.0);
        }
        m[0][1] = c(0.4, -0.9);
        m[1][0] = m[0][1].conj();
        m[2][3] = c(-0.1, 0.25);
        m[3][2] = m[2][3].conj();
        m[0][3] = c(0.05, 0.6);
        m[3][0] = m[0][3].conj();
        let (ev, v) = hermitian_eigh(&m).unwrap();
        assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        assert!(unitarity_deviation(&v) < 1e-13);
        for k in 0..4 {
            for i in 0..4 {
                let mv: C64 = (0..4).map(|j| m[i][j] * v[j][k]).sum();
                assert!((mv - v[i][k] * ev[k]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn bell_state_fully_entangled() {
        assert!((wootters_concurrence(&bell_psi_plus()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_separable() {
        assert_eq!(wootters_concurrence(&DensityMatrix4::maximally_mixed()), 0.0);
    }

    #[test]
    fn x_state_detection() {
        assert!(bell_psi_plus().is_x_state(1e-14));
        assert!(DensityMatrix4::maximally_mixed().is_x_state(0.0));
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let p = DensityMatrix4::pure(&[h, h, ZERO, ZERO]).unwrap();
        assert!(!is_x_state(&p, 1e-3));
    }

    #[test]
    fn invalid_states_rejected() {
        let mut m = DensityMatrix4::maximally_mixed().into_inner();
        m[0][0] = c(0.5, 0.0);
        assert!(DensityMatrix4::new(m).is_err());

        let mut m = DensityMatrix4::maximally_mixed().into_inner();
        m[0][1] = c(0.1, 0.0);
        assert!(DensityMatrix4::new(m).is_err());

        // trace one and Hermitian, but a negative eigenvalue
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = c(1.2, 0.0);
        m[1][1] = c(-0.2, 0.0);
        assert!(DensityMatrix4::new(m).is_err());
        assert!(wootters_concurrence_of(&m).is_err());
    }

    #[test]
    fn product_state_separable() {
        let a = [[c(0.7, 0.0), c(0.2, 0.3)], [c(0.2, -0.3), c(0.3, 0.0)]];
        let b = [[c(0.5, 0.0), c(0.0, 0.5)], [c(0.0, -0.5), c(0.5, 0.0)]];
        let rho = DensityMatrix4::product(&a, &b).unwrap();
        assert!(wootters_concurrence(&rho) < 1e-10);
    }

    #[test]
    fn identity_map_preserves() {
        let map = SingleQubitMap::identity();
        assert_eq!(map.preservation_defects(), (0.0, 0.0));
        let rho = [[c(0.6, 0.0), c(0.1, 0.2)], [c(0.1, -0.2), c(0.4, 0.0)]];
        assert_eq!(map.apply(&rho), rho);
    }

    #[test]
    fn non_trace_preserving_map_rejected() {
        assert!(SingleQubitMap::secular([[0.9, 0.0], [0.0, 1.0]], ONE).is_err());
    }
}

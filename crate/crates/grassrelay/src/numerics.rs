//! Dense complex linear algebra, SVD and reproducible random sampling.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex<f64>`; the
//! decomposition kernel is nalgebra's SVD, extended here to full (square)
//! unitary factors with deterministic column phases so that tests can
//! compare vectors directly.

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Entries with modulus below this are treated as zero when picking a
/// phase reference.
pub const PHASE_EPS: f64 = 1e-12;

// ── Random streams ──────────────────────────────────────────────────────────

/// A counter-based random stream: the pair `(seed, stream)` fully
/// determines the draws, independent of worker count or iteration order.
///
/// Streams form a tree via [`RngStream::child`]; every Monte-Carlo
/// consumer (one coherence interval, one noise lane, one solver restart
/// pool) owns its own leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Derive a sub-stream; distinct tags give statistically independent
    /// streams under the same seed.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        }
    }

    /// Instantiate the generator. Two calls return identical generators.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

// ── Sampling ────────────────────────────────────────────────────────────────

/// One draw from the circularly symmetric standard complex Gaussian:
/// real and imaginary parts independent with variance 1/2 each.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Fill a `p x q` matrix with i.i.d. unit-variance complex Gaussian
/// entries, drawn from an already-instantiated generator.
pub fn gaussian_matrix_with<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> CMatrix {
    CMatrix::from_fn(p, q, |_, _| complex_gaussian(rng))
}

/// As [`gaussian_matrix_with`] but keyed by a stream: the same
/// `(seed, stream)` always yields the bit-identical matrix.
pub fn sample_complex_gaussian_matrix(stream: &RngStream, p: usize, q: usize) -> CMatrix {
    gaussian_matrix_with(&mut stream.rng(), p, q)
}

/// A uniformly distributed point on the unit sphere of `C^dim`
/// (normalized complex Gaussian).
pub fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    loop {
        let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

// ── Phase canonicalization ──────────────────────────────────────────────────

/// Rotate `v` by a global phase so its first entry of modulus above
/// `PHASE_EPS` becomes real and nonnegative. Idempotent; preserves the
/// complex line spanned by `v`.
pub fn canonical_phase(v: &CVector) -> Result<CVector> {
    let idx = v.iter().position(|e| e.norm() > PHASE_EPS).ok_or(Error::ZeroVector)?;
    let pivot = v[idx];
    let modulus = pivot.norm();
    let rot = pivot.conj().unscale(modulus);
    let mut out = v.map(|e| e * rot);
    // Snap the pivot exactly real so the operation is bitwise idempotent.
    out[idx] = C64::new(modulus, 0.0);
    Ok(out)
}

// ── SVD ─────────────────────────────────────────────────────────────────────

/// Full singular value decomposition `H = U diag(s) V^H` with square
/// unitary `U` (p x p) and `V` (q x q); `singulars` has length
/// `min(p, q)`, sorted nonincreasing. Columns beyond the rank deficit
/// span the corresponding null spaces.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub left: CMatrix,
    pub singulars: Vec<f64>,
    pub right: CMatrix,
}

impl SvdFactors {
    /// Largest singular value (zero for an all-zero matrix).
    pub fn top_singular(&self) -> f64 {
        self.singulars.first().copied().unwrap_or(0.0)
    }

    /// i-th left singular vector (column of `U`).
    pub fn left_vector(&self, i: usize) -> CVector {
        self.left.column(i).into_owned()
    }

    /// i-th right singular vector (column of `V`).
    pub fn right_vector(&self, i: usize) -> CVector {
        self.right.column(i).into_owned()
    }

    /// Rebuild `U diag(s) V^H`.
    pub fn reconstruct(&self) -> CMatrix {
        let p = self.left.nrows();
        let q = self.right.nrows();
        let mut sigma = CMatrix::zeros(p, q);
        for (i, s) in self.singulars.iter().enumerate() {
            sigma[(i, i)] = C64::new(*s, 0.0);
        }
        &self.left * sigma * self.right.adjoint()
    }

    /// Numerical rank: singular values above `rel_tol * max(singular)`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.top_singular();
        if top == 0.0 {
            return 0;
        }
        self.singulars.iter().filter(|s| **s > rel_tol * top).count()
    }
}

pub fn finite(h: &CMatrix) -> bool {
    h.iter().all(|e| e.re.is_finite() && e.im.is_finite())
}

/// Full SVD of a dense complex matrix.
///
/// The thin factors come from nalgebra; they are completed to square
/// unitaries by Gram-Schmidt against the standard basis, and each
/// singular pair `(u_i, v_i)` is rotated by a common phase so the first
/// significant entry of `v_i` is real nonnegative (the product
/// `u_i v_i^H` is unchanged). Null-space columns are canonicalized
/// individually.
pub fn svd(h: &CMatrix) -> Result<SvdFactors> {
    if !finite(h) {
        return Err(Error::NonFiniteMatrix);
    }
    let (p, q) = h.shape();
    let k = p.min(q);
    let dec = h.clone().svd(true, true);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));

    let u_thin = dec.u.as_ref().expect("svd requested u");
    let v_thin = dec.v_t.as_ref().expect("svd requested v_t").adjoint();

    let mut singulars = Vec::with_capacity(k);
    let mut left_cols: Vec<CVector> = Vec::with_capacity(p);
    let mut right_cols: Vec<CVector> = Vec::with_capacity(q);
    for &j in &order {
        singulars.push(dec.singular_values[j].max(0.0));
        let v = v_thin.column(j).into_owned();
        let u = u_thin.column(j).into_owned();
        // Common rotation keeps u s v^H invariant.
        match v.iter().find(|e| e.norm() > PHASE_EPS) {
            Some(pivot) => {
                let rot = C64::from_polar(1.0, -pivot.arg());
                right_cols.push(v.map(|e| e * rot));
                left_cols.push(u.map(|e| e * rot));
            }
            None => {
                right_cols.push(v);
                left_cols.push(u);
            }
        }
    }
    complete_basis(&mut left_cols, p);
    complete_basis(&mut right_cols, q);

    Ok(SvdFactors {
        left: CMatrix::from_columns(&left_cols),
        singulars,
        right: CMatrix::from_columns(&right_cols),
    })
}

/// Extend a set of orthonormal columns to a full orthonormal basis of
/// `C^dim`, sweeping the standard basis in index order (deterministic).
fn complete_basis(cols: &mut Vec<CVector>, dim: usize) {
    let mut e = 0;
    while cols.len() < dim {
        assert!(e < dim, "orthonormal completion ran out of candidates");
        let mut cand = CVector::zeros(dim);
        cand[e] = C64::new(1.0, 0.0);
        e += 1;
        // Two Gram-Schmidt passes for orthogonality near machine precision.
        for _ in 0..2 {
            for c in cols.iter() {
                let proj = c.dotc(&cand);
                cand -= c * proj;
            }
        }
        let n = cand.norm();
        if n > 1e-8 {
            let cand = cand.unscale(n);
            cols.push(canonical_phase(&cand).expect("nonzero by construction"));
        }
    }
}

/// Unit-normalized copy of `v`; falls back to the first basis vector if
/// `v` is numerically zero, so downstream combiners stay well defined.
pub fn normalized_or_basis(v: &CVector) -> CVector {
    let n = v.norm();
    if n > 1e-300 {
        v.unscale(n)
    } else {
        let mut e = CVector::zeros(v.len());
        e[0] = C64::new(1.0, 0.0);
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frob(h: &CMatrix) -> f64 {
        h.norm()
    }

    #[test]
    fn svd_identity_has_unit_singulars() {
        let h = CMatrix::identity(2, 2);
        let f = svd(&h).unwrap();
        assert!((f.singulars[0] - 1.0).abs() < 1e-12);
        assert!((f.singulars[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_diagonal_matches_entries() {
        let h = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        let f = svd(&h).unwrap();
        assert!((f.singulars[0] - 3.0).abs() < 1e-12);
        assert!(f.singulars[1].abs() < 1e-12);
        // Right vectors are the standard basis up to phase.
        let v0 = f.right_vector(0);
        assert!((v0[0].norm() - 1.0).abs() < 1e-12);
        assert!(v0[1].norm() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        for trial in 0..1000 {
            let stream = RngStream::new(42, trial);
            let mut rng = stream.rng();
            let p = 1 + (rng.gen::<u64>() % 4) as usize;
            let q = 1 + (rng.gen::<u64>() % 4) as usize;
            let h = gaussian_matrix_with(&mut rng, p, q);
            let f = svd(&h).unwrap();
            let err = frob(&(f.reconstruct() - &h)) / frob(&h);
            assert!(err <= 1e-9, "relative reconstruction error {err}");
            // Unitarity of the full factors.
            let iu = f.left.adjoint() * &f.left - CMatrix::identity(p, p);
            let iv = f.right.adjoint() * &f.right - CMatrix::identity(q, q);
            assert!(frob(&iu) <= 1e-10);
            assert!(frob(&iv) <= 1e-10);
            // Sorted nonincreasing, nonnegative.
            for w in f.singulars.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert!(f.singulars.iter().all(|s| *s >= 0.0));
        }
    }

    #[test]
    fn svd_rejects_non_finite_input() {
        let mut h = CMatrix::identity(2, 2);
        h[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(svd(&h), Err(Error::NonFiniteMatrix)));
    }

    #[test]
    fn top_singular_dominates_random_search() {
        let stream = RngStream::new(5, 0);
        let mut rng = stream.rng();
        let h = gaussian_matrix_with(&mut rng, 3, 3);
        let f = svd(&h).unwrap();
        let mut best = 0.0f64;
        for _ in 0..10_000 {
            let s = sample_unit_vector(&mut rng, 3);
            best = best.max((&h * s).norm());
        }
        assert!(best <= f.top_singular() + 1e-8);
        // The attained value must also be achievable: check at v1.
        let at_v1 = (&h * f.right_vector(0)).norm();
        assert!((at_v1 - f.top_singular()).abs() < 1e-10);
    }

    #[test]
    fn gaussian_entries_have_unit_mean_square() {
        let stream = RngStream::new(9, 1);
        let mut rng = stream.rng();
        let n = 100_000;
        let mean_sq: f64 =
            (0..n).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean_sq - 1.0).abs() < 0.02, "mean |h|^2 = {mean_sq}");
    }

    #[test]
    fn same_stream_reproduces_bit_identical_matrices() {
        let stream = RngStream::new(123, 456);
        let a = sample_complex_gaussian_matrix(&stream, 3, 2);
        let b = sample_complex_gaussian_matrix(&stream, 3, 2);
        assert_eq!(a, b);
        let c = sample_complex_gaussian_matrix(&stream.child(1), 3, 2);
        assert_ne!(a, c);
    }

    #[test]
    fn squared_singular_values_sum_to_matrix_dimensions_on_average() {
        // E{sum s_i^2} = E{|H|_F^2} = p*q for unit-variance entries.
        let n = 100_000;
        let mut acc = 0.0;
        let mut rng = RngStream::new(11, 0).rng();
        for _ in 0..n {
            let h = gaussian_matrix_with(&mut rng, 3, 3);
            acc += h.norm_squared();
        }
        let mean = acc / n as f64;
        assert!((mean - 9.0).abs() < 0.1, "E sum = {mean}");
    }

    #[test]
    fn canonical_phase_rotates_leading_entry_real() {
        let v = CVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)]);
        let c = canonical_phase(&v).unwrap();
        assert!((c[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(c[1].norm() < 1e-15);
        // Idempotent.
        let c2 = canonical_phase(&c).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn canonical_phase_preserves_the_line() {
        let mut rng = RngStream::new(3, 3).rng();
        for _ in 0..100 {
            let v = sample_unit_vector(&mut rng, 4);
            let c = canonical_phase(&v).unwrap();
            assert!((c.dotc(&v).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_phase_rejects_zero() {
        let v = CVector::zeros(3);
        assert!(matches!(canonical_phase(&v), Err(Error::ZeroVector)));
    }
}

//! Beamforming codebooks: chordal distance, max-min line packings,
//! random codebooks, nearest/best codeword queries and the text file
//! format used to exchange codebooks.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::numerics::{canonical_phase, sample_unit_vector, CMatrix, CVector, RngStream};
use crate::{Error, Result};

/// Pairs closer than this are considered the same line and rejected at
/// construction.
pub const DUPLICATE_LINE_EPS: f64 = 1e-8;

const UNIT_NORM_TOL: f64 = 1e-6;

/// Sine of the principal angle between the lines spanned by two unit
/// vectors: `sqrt(1 - |w1^H w2|^2)`. Symmetric and invariant under
/// independent phase rotation of either argument.
///
/// Evaluated as the projection residual `|w2 - (w1^H w2) w1|`, which is
/// the same quantity but stays accurate for nearly parallel lines where
/// `1 - |c|^2` cancels.
pub fn chordal_distance(w1: &CVector, w2: &CVector) -> Result<f64> {
    for w in [w1, w2] {
        let norm = w.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NonUnitVector { norm });
        }
    }
    if w1.len() != w2.len() {
        return Err(Error::DimensionMismatch(format!(
            "chordal distance between C^{} and C^{}",
            w1.len(),
            w2.len()
        )));
    }
    let residual = w2 - w1 * w1.dotc(w2);
    Ok(residual.norm().min(1.0))
}

/// How a codebook came to be; kept for bookkeeping and file metadata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodebookKind {
    Grassmannian,
    Random,
    External,
}

impl std::fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CodebookKind::Grassmannian => write!(f, "grassmannian"),
            CodebookKind::Random => write!(f, "random"),
            CodebookKind::External => write!(f, "external"),
        }
    }
}

/// A set of `N` distinct unit vectors in `C^dim` with its cached
/// minimum pairwise chordal distance.
#[derive(Debug, Clone)]
pub struct Codebook {
    dim: usize,
    vectors: Vec<CVector>,
    min_distance: Option<f64>,
    kind: CodebookKind,
}

impl Codebook {
    /// Validate and take ownership of a vector set. Vectors must be unit
    /// to within 1e-6 (they are renormalized exactly) and pairwise
    /// distinct as lines.
    pub fn new(vectors: Vec<CVector>, kind: CodebookKind) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::CodebookTooSmall { needed: 1, got: 0 });
        }
        let dim = vectors[0].len();
        let mut normalized = Vec::with_capacity(vectors.len());
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "codeword in C^{} inside a C^{dim} codebook",
                    v.len()
                )));
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::NonUnitVector { norm });
            }
            normalized.push(v.unscale(norm));
        }
        let min_distance = cache_min_distance(&normalized)?;
        Ok(Self { dim, vectors: normalized, min_distance, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.vectors.len()
    }

    pub fn kind(&self) -> CodebookKind {
        self.kind
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &CVector {
        &self.vectors[i]
    }

    /// Minimum pairwise chordal distance; needs at least two codewords.
    pub fn min_distance(&self) -> Result<f64> {
        self.min_distance.ok_or(Error::CodebookTooSmall { needed: 2, got: self.size() })
    }

    /// Closest codeword to `s` in chordal distance; ties resolve to the
    /// lowest index.
    pub fn nearest_codeword(&self, s: &CVector) -> Result<(usize, &CVector, f64)> {
        self.check_dim(s)?;
        let mut best: Option<(usize, f64)> = None;
        for (i, w) in self.vectors.iter().enumerate() {
            let d = chordal_distance(w, s)?;
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, d) = best.expect("codebook is nonempty");
        Ok((i, &self.vectors[i], d))
    }

    /// Codeword maximizing the received power `gain * |H w|^2`; ties
    /// resolve to the lowest index. Returns the attained SNR.
    pub fn best_codeword_by_gain(
        &self,
        h: &CMatrix,
        gain: f64,
    ) -> Result<(usize, &CVector, f64)> {
        if h.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "channel with {} columns against a C^{} codebook",
                h.ncols(),
                self.dim
            )));
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, w) in self.vectors.iter().enumerate() {
            let snr = gain * (h * w).norm_squared();
            if best.is_none_or(|(_, bs)| snr > bs) {
                best = Some((i, snr));
            }
        }
        let (i, snr) = best.expect("codebook is nonempty");
        Ok((i, &self.vectors[i], snr))
    }

    /// Hash of the exact codeword values, for run manifests.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.dim as u64).to_le_bytes());
        hasher.update((self.size() as u64).to_le_bytes());
        for v in &self.vectors {
            for e in v.iter() {
                hasher.update(e.re.to_le_bytes());
                hasher.update(e.im.to_le_bytes());
            }
        }
        let mut out = String::new();
        for byte in hasher.finalize() {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }

    fn check_dim(&self, s: &CVector) -> Result<()> {
        if s.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector in C^{} against a C^{} codebook",
                s.len(),
                self.dim
            )));
        }
        Ok(())
    }
}

fn cache_min_distance(vectors: &[CVector]) -> Result<Option<f64>> {
    if vectors.len() < 2 {
        return Ok(None);
    }
    let mut min = f64::INFINITY;
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let d = chordal_distance(&vectors[i], &vectors[j])?;
            if d <= DUPLICATE_LINE_EPS {
                return Err(Error::DuplicateCodeword { i, j });
            }
            min = min.min(d);
        }
    }
    Ok(Some(min))
}

/// `N` independent uniformly distributed unit vectors.
pub fn generate_random_codebook(stream: &RngStream, dim: usize, size: usize) -> Result<Codebook> {
    if size < 1 {
        return Err(Error::CodebookTooSmall { needed: 1, got: 0 });
    }
    let mut rng = stream.rng();
    let vectors = (0..size)
        .map(|_| canonical_phase(&sample_unit_vector(&mut rng, dim)).expect("unit vector"))
        .collect();
    Codebook::new(vectors, CodebookKind::Random)
}

/// Multi-start max-min packing search.
///
/// Each restart refines a random configuration by gradient descent on a
/// smooth surrogate of the largest pairwise squared correlation
/// (softmax with an increasing sharpness schedule), renormalizing after
/// every step and keeping the best min-distance snapshot seen anywhere
/// along the trajectory. The best restart wins.
pub fn generate_grassmannian(
    stream: &RngStream,
    dim: usize,
    size: usize,
    restarts: usize,
    iterations: usize,
) -> Result<Codebook> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "packing needs ambient dimension >= 2, got {dim}"
        )));
    }
    if size < 2 {
        return Err(Error::CodebookTooSmall { needed: 2, got: size });
    }
    if restarts < 1 || iterations < 1 {
        return Err(Error::InvalidParameter(
            "packing search needs at least one restart and one iteration".into(),
        ));
    }
    let mut best: Option<(f64, Vec<CVector>)> = None;
    for r in 0..restarts {
        let mut rng = stream.child(r as u64).rng();
        let start: Vec<CVector> = (0..size).map(|_| sample_unit_vector(&mut rng, dim)).collect();
        let (d, vs) = refine_packing(start, iterations);
        if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
            best = Some((d, vs));
        }
    }
    let (_, vectors) = best.expect("at least one restart");
    let vectors = vectors
        .iter()
        .map(|v| canonical_phase(v).expect("unit vector"))
        .collect();
    Codebook::new(vectors, CodebookKind::Grassmannian)
}

fn min_pairwise(vectors: &[CVector]) -> f64 {
    let mut min = f64::INFINITY;
    for i in 0..vectors.len() {
        for j in (i + 1)..vectors.len() {
            let d2 = 1.0 - vectors[i].dotc(&vectors[j]).norm_sqr();
            min = min.min(d2.max(0.0).sqrt());
        }
    }
    min
}

fn refine_packing(mut vs: Vec<CVector>, iterations: usize) -> (f64, Vec<CVector>) {
    let n = vs.len();
    let step: f64 = 0.35;
    let beta_lo: f64 = 8.0;
    let beta_hi: f64 = 8192.0;
    let mut best_d = min_pairwise(&vs);
    let mut best_vs = vs.clone();
    for it in 0..iterations {
        let t = it as f64 / (iterations.max(2) - 1) as f64;
        let beta = beta_lo * (beta_hi / beta_lo).powf(t);

        // Pairwise correlations and softmax weights over pairs.
        let mut corr = vec![nalgebra::Complex::new(0.0, 0.0); n * n];
        let mut gmax = f64::NEG_INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let c = vs[i].dotc(&vs[j]);
                corr[i * n + j] = c;
                gmax = gmax.max(c.norm_sqr());
            }
        }
        let mut weights = vec![0.0; n * n];
        let mut wsum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let w = (beta * (corr[i * n + j].norm_sqr() - gmax)).exp();
                weights[i * n + j] = w;
                wsum += w;
            }
        }

        // Weighted repulsion step: each vector moves against its
        // projections onto the offending neighbours.
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let mut grad = CVector::zeros(vs[i].len());
            for (j, other) in vs.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (a, b) = (i.min(j), i.max(j));
                let p = weights[a * n + b] / wsum;
                if p == 0.0 {
                    continue;
                }
                // c = w_i^H w_j regardless of the stored (a,b) orientation.
                let cij = if i < j { corr[a * n + b] } else { corr[a * n + b].conj() };
                grad += other * (cij.conj() * p);
            }
            let moved = &vs[i] - grad * nalgebra::Complex::new(step, 0.0);
            next.push(moved.unscale(moved.norm()));
        }
        vs = next;

        let d = min_pairwise(&vs);
        if d > best_d {
            best_d = d;
            best_vs = vs.clone();
        }
    }
    (best_d, best_vs)
}

// ── File format ─────────────────────────────────────────────────────────────
//
// Text format: the first significant line is `m N`; each of the next N
// significant lines holds one codeword as 2m decimal floats
// `re1 im1 re2 im2 ...`. Lines starting with `#` and blank lines are
// ignored. Values are written with 17 significant digits so the
// round-trip is exact.

pub fn save_codebook(codebook: &Codebook, path: &Path) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", codebook.dim(), codebook.size());
    for v in codebook.vectors() {
        let row: Vec<String> = v
            .iter()
            .flat_map(|e| [format!("{:.16e}", e.re), format!("{:.16e}", e.im)])
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn load_codebook(path: &Path) -> Result<Codebook> {
    let text = std::fs::read_to_string(path)?;
    let name = path.display().to_string();
    let parse_err = |line: usize, message: String| Error::CodebookParse {
        path: name.clone(),
        line,
        message,
    };

    let mut significant = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = significant
        .next()
        .ok_or_else(|| parse_err(1, "empty codebook file".into()))?;
    let mut parts = header.split_whitespace();
    let dim: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(header_line, "expected `m N` header".into()))?;
    let size: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(header_line, "expected `m N` header".into()))?;
    if parts.next().is_some() {
        return Err(parse_err(header_line, "trailing tokens after `m N` header".into()));
    }
    if dim < 1 || size < 1 {
        return Err(parse_err(header_line, format!("invalid dimensions m={dim} N={size}")));
    }

    let mut vectors = Vec::with_capacity(size);
    for row in 0..size {
        let (line_no, line) = significant.next().ok_or_else(|| {
            parse_err(
                text.lines().count(),
                format!("expected {size} codeword rows, found {row}"),
            )
        })?;
        let values: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(|t| t.parse::<f64>()).collect();
        let values =
            values.map_err(|e| parse_err(line_no, format!("bad float in row {row}: {e}")))?;
        if values.len() != 2 * dim {
            return Err(parse_err(
                line_no,
                format!("row {row} has {} values, expected {}", values.len(), 2 * dim),
            ));
        }
        let v =
            CVector::from_fn(dim, |i, _| nalgebra::Complex::new(values[2 * i], values[2 * i + 1]));
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(parse_err(line_no, format!("row {row} has norm {norm}, expected unit")));
        }
        vectors.push(v);
    }
    if let Some((line_no, _)) = significant.next() {
        return Err(parse_err(line_no, format!("more than {size} codeword rows")));
    }
    Codebook::new(vectors, CodebookKind::External)
}

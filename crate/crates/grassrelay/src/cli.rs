//! Config-driven scenario runner behind the `grassrelay` binary:
//! scenario configs (TOML), BER sweeps with CSV output, bound-report
//! generation, bundled example scenarios, and a fast self-check suite.
//!
//! Output files carry no timestamps or absolute paths, so re-running a
//! scenario with the same config and seed reproduces them byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{
    check_bound_no_direct, check_bound_with_direct, cascade_difference_check, quantization_continuity_check, spectral_sandwich_check,
    ratio_difference_check, sample_relay_spectrum_gap, spectral_gap_db, BoundReport,
};
use crate::channels::{sample_channel_set, CoherenceSchedule, LinkGains, SystemDims};
use crate::codebooks::{
    generate_grassmannian, generate_random_codebook, load_codebook, save_codebook, Codebook,
};
use crate::numerics::{sample_unit_vector, RngStream};
use crate::schemes::{optimal_no_direct, two_hop_snr, DEFAULT_ASCENT_TOL};
use crate::simulator::{
    feedback_bits, simulate_ber, simulate_ber_serial, FeedbackBudget, SchemeId, SchemeSpec,
    SimulationSetup, SweepVariable,
};
use crate::{Error, Result};

/// Number of threads used for interval-parallel runs, from the
/// `GRASSRELAY_THREADS` environment variable. `None` leaves the choice
/// to the runtime.
pub fn configured_threads() -> Option<usize> {
    std::env::var("GRASSRELAY_THREADS").ok().and_then(|v| v.parse().ok())
}

/// Full-scale schedule (20000 intervals x 200 symbols); the presets
/// default to a twentieth of it.
pub const FULL_SCALE: (u64, u64) = (20_000, 200);

// ── Config schema ───────────────────────────────────────────────────────────

fn default_scalar_bits() -> u64 {
    4
}

fn default_bound_channels() -> usize {
    2_000
}

fn default_pack_restarts() -> usize {
    24
}

fn default_pack_iterations() -> usize {
    600
}

fn default_solver_tol() -> f64 {
    DEFAULT_ASCENT_TOL
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Master seed of the simulation streams.
    pub seed: u64,
    pub include_direct: bool,
    /// Bits per scalar feedback quantity in the bit accounting.
    #[serde(default = "default_scalar_bits")]
    pub scalar_bits: u64,
    /// Default output directory; the CLI `--out` flag overrides it.
    #[serde(default)]
    pub output: Option<String>,
    pub dims: DimsConfig,
    pub schedule: ScheduleConfig,
    pub gains: GainsConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub codebooks: BTreeMap<String, CodebookConfig>,
    pub schemes: Vec<SchemeConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsConfig {
    pub tx: usize,
    pub relay: usize,
    pub rx: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub intervals: u64,
    pub symbols: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsConfig {
    /// Direct link SNR in dB; required when the direct link is modeled
    /// and not swept.
    #[serde(default)]
    pub direct_db: Option<f64>,
    pub tx_relay_db: f64,
    pub relay_rx_db: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// One of `p0`, `p1`, `p2`.
    pub variable: String,
    pub grid_db: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Random multi-start budget; defaults to `max(8, 4 tx)`.
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default = "default_solver_tol")]
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { restarts: None, tol: default_solver_tol() }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    /// Channel draws per bound-report row.
    #[serde(default = "default_bound_channels")]
    pub channels: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { channels: default_bound_channels() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CodebookConfig {
    Grassmannian {
        dim: usize,
        size: usize,
        seed: u64,
        #[serde(default = "default_pack_restarts")]
        restarts: usize,
        #[serde(default = "default_pack_iterations")]
        iterations: usize,
    },
    Random {
        dim: usize,
        size: usize,
        seed: u64,
    },
    File {
        path: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub scheme: String,
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub c0: Option<String>,
    #[serde(default)]
    pub c1: Option<String>,
    #[serde(default)]
    pub c2: Option<String>,
    /// Random-ensemble baseline: codebook size per book.
    #[serde(default)]
    pub size: Option<usize>,
    /// Random-ensemble baseline: number of averaged books.
    #[serde(default)]
    pub books: Option<usize>,
    /// Random-ensemble baseline: generation seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Bundled example scenarios, runnable as `--config <name>`.
pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig6" => Some(include_str!("../presets/fig6.toml")),
        "fig7" => Some(include_str!("../presets/fig7.toml")),
        "fig8" => Some(include_str!("../presets/fig8.toml")),
        "fig9" => Some(include_str!("../presets/fig9.toml")),
        "fig10" => Some(include_str!("../presets/fig10.toml")),
        _ => None,
    }
}

pub fn preset_names() -> &'static [&'static str] {
    &["fig6", "fig7", "fig8", "fig9", "fig10"]
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOverrides {
    pub seed: Option<u64>,
    pub intervals: Option<u64>,
    pub symbols: Option<u64>,
    pub full_scale: bool,
    pub bound_channels: Option<usize>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// Load from a file path or, when the argument names a bundled
    /// preset, from the built-in scenario of that name.
    pub fn load(spec: &str) -> Result<(Self, PathBuf)> {
        if let Some(text) = preset(spec) {
            return Ok((Self::from_toml_str(text)?, PathBuf::from(".")));
        }
        let path = Path::new(spec);
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config `{spec}` (not a preset either): {e}"))
        })?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Ok((Self::from_toml_str(&text)?, base))
    }

    fn resolve_codebook(&self, id: &str, base_dir: &Path) -> Result<Codebook> {
        let spec = self.codebooks.get(id).ok_or_else(|| {
            Error::InvalidConfig(format!("scheme references unknown codebook `{id}`"))
        })?;
        match spec {
            CodebookConfig::Grassmannian { dim, size, seed, restarts, iterations } => {
                generate_grassmannian(&RngStream::new(*seed, 0), *dim, *size, *restarts, *iterations)
            }
            CodebookConfig::Random { dim, size, seed } => {
                generate_random_codebook(&RngStream::new(*seed, 0), *dim, *size)
            }
            CodebookConfig::File { path } => load_codebook(&base_dir.join(path)),
        }
    }

    /// Resolve codebooks and assemble the simulation setup.
    pub fn build(&self, base_dir: &Path, overrides: &RunOverrides) -> Result<BuiltScenario> {
        let dims = SystemDims::new(self.dims.tx, self.dims.relay, self.dims.rx);
        let sweep = SweepVariable::parse(&self.sweep.variable)?;
        if self.include_direct
            && self.gains.direct_db.is_none()
            && sweep != SweepVariable::Direct
        {
            return Err(Error::InvalidConfig(
                "gains.direct_db is required when the direct link is fixed".into(),
            ));
        }

        let mut intervals = self.schedule.intervals;
        let mut symbols = self.schedule.symbols;
        if overrides.full_scale {
            (intervals, symbols) = FULL_SCALE;
        }
        if let Some(v) = overrides.intervals {
            intervals = v;
        }
        if let Some(v) = overrides.symbols {
            symbols = v;
        }

        let mut books: BTreeMap<String, Codebook> = BTreeMap::new();
        let mut resolve = |id: &Option<String>| -> Result<Option<Codebook>> {
            match id {
                None => Ok(None),
                Some(id) => {
                    if !books.contains_key(id) {
                        books.insert(id.clone(), self.resolve_codebook(id, base_dir)?);
                    }
                    Ok(Some(books[id].clone()))
                }
            }
        };

        let mut labels = std::collections::BTreeSet::new();
        let mut specs = Vec::with_capacity(self.schemes.len());
        for scheme in &self.schemes {
            let id = SchemeId::parse(&scheme.scheme)?;
            let label = scheme.label.clone().unwrap_or_else(|| id.as_str().to_string());
            if !labels.insert(label.clone()) {
                return Err(Error::InvalidConfig(format!("duplicate scheme label `{label}`")));
            }
            let spec = if id == SchemeId::RandomCodebookBaseline {
                let size = scheme.size.ok_or_else(|| {
                    Error::InvalidConfig(format!("scheme `{label}` needs `size`"))
                })?;
                let count = scheme.books.unwrap_or(10);
                let seed = scheme.seed.ok_or_else(|| {
                    Error::InvalidConfig(format!("scheme `{label}` needs `seed`"))
                })?;
                let root = RngStream::new(seed, 0);
                let pairs = (0..count as u64)
                    .map(|b| {
                        Ok((
                            generate_random_codebook(&root.child(2 * b), dims.tx, size)?,
                            generate_random_codebook(&root.child(2 * b + 1), dims.relay, size)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                SchemeSpec::random_ensemble(label, pairs)
            } else {
                SchemeSpec {
                    id,
                    label,
                    c0: resolve(&scheme.c0)?,
                    c1: resolve(&scheme.c1)?,
                    c2: resolve(&scheme.c2)?,
                    ensemble: Vec::new(),
                }
            };
            specs.push(spec);
        }

        let setup = SimulationSetup {
            dims,
            schedule: CoherenceSchedule::new(intervals, symbols),
            include_direct: self.include_direct,
            direct_db: self.gains.direct_db.unwrap_or(0.0),
            tx_relay_db: self.gains.tx_relay_db,
            relay_rx_db: self.gains.relay_rx_db,
            sweep,
            grid_db: self.sweep.grid_db.clone(),
            schemes: specs,
            scalar_bits: self.scalar_bits,
            seed: overrides.seed.unwrap_or(self.seed),
            solver_restarts: self
                .solver
                .restarts
                .unwrap_or_else(|| crate::schemes::default_restarts(dims.tx)),
            solver_tol: self.solver.tol,
        };
        Ok(BuiltScenario {
            setup,
            books,
            bound_channels: overrides.bound_channels.unwrap_or(self.bounds.channels),
        })
    }
}

/// A config with its codebooks resolved.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub setup: SimulationSetup,
    /// Named codebooks, keyed by their config id.
    pub books: BTreeMap<String, Codebook>,
    pub bound_channels: usize,
}

// ── Scenario execution and artifacts ────────────────────────────────────────

/// Paths written by a scenario run, relative to the output directory.
#[derive(Debug, Clone)]
pub struct ScenarioArtifacts {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

fn ber_csv(curves: &[crate::simulator::BerCurve]) -> String {
    let mut out = String::from(
        "scheme,sweep_var,snr_db,bit_errors,bits_sent,ber,stderr,feedback_bits,seed\n",
    );
    for curve in curves {
        for p in &curve.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                curve.label,
                curve.sweep,
                p.snr_db,
                p.bit_errors,
                p.bits_sent,
                p.ber,
                p.stderr,
                curve.feedback_bits,
                curve.seed
            );
        }
    }
    out
}

struct BoundRow {
    label: String,
    sweep: SweepVariable,
    snr_db: f64,
    report: BoundReport,
}

fn bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from(
        "scheme,sweep_var,snr_db,empirical_loss,bound_value,standard_error,samples,satisfied\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.label,
            r.sweep,
            r.snr_db,
            r.report.empirical_loss,
            r.report.bound_value,
            r.report.standard_error,
            r.report.samples,
            r.report.satisfied
        );
    }
    out
}

const BOUNDS_STREAM_TAG: u64 = 0xb0;

fn compute_bound_rows(built: &BuiltScenario) -> Result<Vec<BoundRow>> {
    let setup = &built.setup;
    let mut rows = Vec::new();
    for spec in &setup.schemes {
        let applicable = matches!(
            spec.id,
            SchemeId::QuantizedNoDirect | SchemeId::ProperlyQuantizedDirect
        );
        if !applicable {
            continue;
        }
        for (pt, &snr_db) in setup.grid_db.iter().enumerate() {
            let gains = LinkGains::from_db(
                if setup.sweep == SweepVariable::Direct { snr_db } else { setup.direct_db },
                if setup.sweep == SweepVariable::TxRelay { snr_db } else { setup.tx_relay_db },
                if setup.sweep == SweepVariable::RelayRx { snr_db } else { setup.relay_rx_db },
            );
            let stream = RngStream::new(setup.seed, 0).child(BOUNDS_STREAM_TAG).child(pt as u64);
            let report = match spec.id {
                SchemeId::QuantizedNoDirect => check_bound_no_direct(
                    setup.dims,
                    gains,
                    spec.c1.as_ref().expect("validated"),
                    spec.c2.as_ref().expect("validated"),
                    built.bound_channels,
                    &stream,
                )?,
                SchemeId::ProperlyQuantizedDirect => check_bound_with_direct(
                    setup.dims,
                    gains,
                    spec.c1.as_ref().expect("validated"),
                    spec.c2.as_ref().expect("validated"),
                    spec.c0.as_ref(),
                    built.bound_channels,
                    &stream,
                    setup.solver_restarts,
                    setup.solver_tol,
                )?,
                _ => unreachable!(),
            };
            rows.push(BoundRow { label: spec.label.clone(), sweep: setup.sweep, snr_db, report });
        }
    }
    Ok(rows)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let mut out = String::new();
    for byte in hasher.finalize() {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn write_all(out_dir: &Path, files: &[(PathBuf, String)]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (rel, content) in files {
        let path = out_dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        if let Err(e) = std::fs::write(&path, content) {
            for done in &written {
                let _ = std::fs::remove_file(out_dir.join(done));
            }
            return Err(e.into());
        }
        written.push(rel.clone());
    }
    Ok(written)
}

fn manifest(config: &ScenarioConfig, setup: &SimulationSetup, files: &[(PathBuf, String)]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "fingerprint: {}", setup.fingerprint());
    let _ = writeln!(out, "seed: {}", setup.seed);
    let _ = writeln!(out, "\n[files]");
    for (rel, content) in files {
        let _ = writeln!(out, "{} sha256:{}", rel.display(), sha256_hex(content.as_bytes()));
    }
    let _ = writeln!(out, "\n[config]");
    let echo = toml::to_string_pretty(config).unwrap_or_else(|_| "<unserializable>".into());
    out.push_str(&echo);
    out
}

/// Run the full scenario: BER sweep, bound reports where applicable,
/// codebook files and a manifest, all under `out_dir`. Everything is
/// computed before anything is written; on a write failure the partial
/// outputs are removed.
pub fn run_scenario(
    config: &ScenarioConfig,
    base_dir: &Path,
    out_dir: &Path,
    overrides: &RunOverrides,
) -> Result<ScenarioArtifacts> {
    let built = config.build(base_dir, overrides)?;
    let curves = simulate_ber(&built.setup)?;
    let bound_rows = compute_bound_rows(&built)?;

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    files.push((PathBuf::from("ber.csv"), ber_csv(&curves)));
    if !bound_rows.is_empty() {
        files.push((PathBuf::from("bounds.csv"), bounds_csv(&bound_rows)));
    }
    for (id, book) in &built.books {
        let mut text = format!("# codebook `{id}` ({})\n", book.kind());
        let mut body = String::new();
        let _ = writeln!(body, "{} {}", book.dim(), book.size());
        for v in book.vectors() {
            let row: Vec<String> = v
                .iter()
                .flat_map(|e| [format!("{:.16e}", e.re), format!("{:.16e}", e.im)])
                .collect();
            let _ = writeln!(body, "{}", row.join(" "));
        }
        text.push_str(&body);
        files.push((PathBuf::from("codebooks").join(format!("{id}.cbk")), text));
    }
    files.push((PathBuf::from("manifest.txt"), manifest(config, &built.setup, &files)));

    let written = write_all(out_dir, &files)?;
    Ok(ScenarioArtifacts { out_dir: out_dir.to_path_buf(), files: written })
}

/// Run only the bound reports of a scenario.
pub fn run_bounds(
    config: &ScenarioConfig,
    base_dir: &Path,
    out_dir: &Path,
    overrides: &RunOverrides,
) -> Result<ScenarioArtifacts> {
    let built = config.build(base_dir, overrides)?;
    let bound_rows = compute_bound_rows(&built)?;
    if bound_rows.is_empty() {
        return Err(Error::InvalidConfig(
            "no scheme in this scenario has a quantization loss bound".into(),
        ));
    }
    let files = vec![(PathBuf::from("bounds.csv"), bounds_csv(&bound_rows))];
    let mut files = files;
    files.push((PathBuf::from("manifest.txt"), manifest(config, &built.setup, &files)));
    let written = write_all(out_dir, &files)?;
    Ok(ScenarioArtifacts { out_dir: out_dir.to_path_buf(), files: written })
}

// ── Self-check suite ────────────────────────────────────────────────────────

/// One named check of the fast invariant suite.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

/// Fast invariant suite: bit accounting, two-hop optimality oracle,
/// inequality fuzz, the spectral-gap constant, codebook generation
/// quality, parallel/serial agreement, plus validation of any supplied
/// codebook files. Completes in well under a minute.
pub fn run_selfcheck(extra_codebooks: &[PathBuf]) -> Vec<CheckOutcome> {
    let mut checks = Vec::new();

    // Feedback-bit accounting totals.
    {
        let dims = SystemDims::new(3, 3, 3);
        let mk = |n: usize| FeedbackBudget {
            n0: n,
            n1: n,
            n2: n,
            scalar_bits: 4,
            direct_rank: 3,
        };
        let got = [
            feedback_bits(SchemeId::ProperlyQuantizedDirect, &mk(8), dims, true),
            feedback_bits(SchemeId::ProperlyQuantizedDirect, &mk(16), dims, true),
            feedback_bits(SchemeId::ModifiedQuantizedDirect, &mk(8), dims, true),
            feedback_bits(SchemeId::ModifiedQuantizedDirect, &mk(16), dims, true),
            feedback_bits(SchemeId::MmseBaseline, &mk(8), dims, true),
        ];
        let want = [31u64, 36, 17, 20, 58];
        let ok = got.iter().zip(&want).all(|(g, w)| matches!(g, Ok(v) if v == w));
        checks.push(CheckOutcome::new(
            "feedback-bit-accounting",
            ok,
            format!("b=4 budgets, expected {want:?}"),
        ));
    }

    // Two-hop optimality oracle at reduced size.
    {
        let mut rng = RngStream::new(0x5e1f, 0).rng();
        let dims = SystemDims::new(2, 2, 2);
        let gains = LinkGains::from_db(0.0, 4.0, 8.0);
        let mut worst: f64 = 0.0;
        'outer: for k in 0..20 {
            let ch = sample_channel_set(&RngStream::new(0x5e1f, 1).child(k), dims, gains, false);
            let best = optimal_no_direct(&ch).expect("finite").snr.total;
            for _ in 0..2_000 {
                let s = sample_unit_vector(&mut rng, 2);
                let r = sample_unit_vector(&mut rng, 2);
                let g1 = gains.tx_relay * (&ch.tx_relay * &s).norm_squared();
                let g2 = gains.relay_rx * (ch.relay_rx.adjoint() * &r).norm_squared();
                let attained = two_hop_snr(g1, g2);
                worst = worst.max((attained - best) / best);
                if attained > best * (1.0 + 1e-9) {
                    break 'outer;
                }
            }
        }
        checks.push(CheckOutcome::new(
            "two-hop-optimality-oracle",
            worst <= 1e-9,
            format!("worst relative excess {worst:.2e}"),
        ));
    }

    // Scalar and vector inequality fuzz.
    {
        let mut rng = RngStream::new(0x5e1f, 2).rng();
        let mut ok = true;
        for _ in 0..10_000 {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
                use rand::Rng as _;
                rng.gen_range(0.0..100.0f64)
            };
            ok &= cascade_difference_check(draw(&mut rng), draw(&mut rng), draw(&mut rng), draw(&mut rng));
            ok &= ratio_difference_check(draw(&mut rng), draw(&mut rng), draw(&mut rng) + 1e-3);
            let (attained, ceiling) = sample_relay_spectrum_gap(&mut rng, 3);
            ok &= attained <= ceiling * (1.0 + 1e-12) + 1e-15;
        }
        let cb = generate_grassmannian(&RngStream::new(0x5e1f, 3), 3, 8, 6, 300)
            .expect("generation succeeds");
        for k in 0..1_000 {
            let h = crate::numerics::sample_complex_gaussian_matrix(
                &RngStream::new(0x5e1f, 4).child(k),
                3,
                3,
            );
            let s = sample_unit_vector(&mut rng, 3);
            ok &= quantization_continuity_check(&h, &s, &cb).unwrap_or(false);
            ok &= spectral_sandwich_check(&h, &s).unwrap_or(false);
        }
        checks.push(CheckOutcome::new("inequality-fuzz", ok, "10^4 scalar + 10^3 vector draws"));
    }

    // Spectral-gap constant at reduced sample count.
    {
        let gap = spectral_gap_db(3, 3, 20_000, &RngStream::new(0x5e1f, 5));
        let (ok, detail) = match gap {
            Ok(g) => ((g - 1.24).abs() < 0.1, format!("estimate {g:.3} dB, expect 1.24")),
            Err(e) => (false, e.to_string()),
        };
        checks.push(CheckOutcome::new("spectral-gap-constant", ok, detail));
    }

    // Codebook generation quality floor.
    {
        let cb = generate_grassmannian(&RngStream::new(0x5e1f, 6), 2, 4, 8, 400);
        let (ok, detail) = match cb.and_then(|c| c.min_distance()) {
            Ok(d) => (d >= 0.70, format!("(2,4) packing min distance {d:.4}")),
            Err(e) => (false, e.to_string()),
        };
        checks.push(CheckOutcome::new("packing-quality-floor", ok, detail));
    }

    // Parallel/serial agreement on a micro run.
    {
        let setup = SimulationSetup {
            dims: SystemDims::new(2, 2, 2),
            schedule: CoherenceSchedule::new(20, 20),
            include_direct: false,
            direct_db: 0.0,
            tx_relay_db: 4.0,
            relay_rx_db: 8.0,
            sweep: SweepVariable::TxRelay,
            grid_db: vec![0.0, 6.0],
            schemes: vec![SchemeSpec::unquantized(SchemeId::OptimalNoDirect)],
            scalar_bits: 4,
            seed: 0x5e1f,
            solver_restarts: 8,
            solver_tol: 1e-10,
        };
        let a = simulate_ber(&setup);
        let b = simulate_ber_serial(&setup);
        let ok = match (&a, &b) {
            (Ok(a), Ok(b)) => a
                .iter()
                .zip(b)
                .all(|(x, y)| x.points.iter().zip(&y.points).all(|(p, q)| p.bit_errors == q.bit_errors)),
            _ => false,
        };
        checks.push(CheckOutcome::new("parallel-serial-agreement", ok, "20x20 micro run"));
    }

    // Supplied codebook files.
    for path in extra_codebooks {
        let name = format!("codebook {}", path.display());
        match load_codebook(path) {
            Ok(cb) => {
                let detail = match cb.min_distance() {
                    Ok(d) => format!("{} vectors in C^{}, min distance {d:.4}", cb.size(), cb.dim()),
                    Err(_) => format!("1 vector in C^{}", cb.dim()),
                };
                checks.push(CheckOutcome::new(name, true, detail));
            }
            Err(e) => checks.push(CheckOutcome::new(name, false, e.to_string())),
        }
    }

    checks
}

/// Generate a codebook per CLI arguments and save it.
pub fn generate_codebook_file(
    kind: &str,
    dim: usize,
    size: usize,
    seed: u64,
    restarts: usize,
    iterations: usize,
    out: &Path,
) -> Result<Codebook> {
    let stream = RngStream::new(seed, 0);
    let cb = match kind {
        "grassmannian" => generate_grassmannian(&stream, dim, size, restarts, iterations)?,
        "random" => generate_random_codebook(&stream, dim, size)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown codebook kind `{other}` (expected grassmannian or random)"
            )))
        }
    };
    save_codebook(&cb, out)?;
    Ok(cb)
}

//! Acceptance suite: every release-gating property of the crate, one
//! test per criterion, each printing a PASS line with the measured
//! values (visible with `--nocapture`).
//!
//! Monte-Carlo sizes and tolerances are pinned here; all runs are
//! deterministic through counter-based random streams.

use grassrelay::analysis::{
    check_bound_no_direct, check_bound_with_direct, correlation_difference_check, ks_critical_value,
    ks_statistic, cascade_difference_check, quantization_continuity_check, spectral_sandwich_check, ratio_difference_check,
    sample_relay_spectrum_gap, spectral_gap_db, sphere_alignment_cdf,
};
use grassrelay::channels::{sample_channel_set, ChannelSet, CoherenceSchedule, LinkGains, SystemDims};
use grassrelay::cli::{run_scenario, RunOverrides, ScenarioConfig};
use grassrelay::codebooks::{generate_grassmannian, generate_random_codebook, Codebook};
use grassrelay::numerics::{
    gaussian_matrix_with, sample_unit_vector, svd, CMatrix, CVector, RngStream, C64,
};
use grassrelay::schemes::{optimal_with_direct, two_hop_snr};
use grassrelay::simulator::{
    feedback_bits, simulate_ber, simulate_ber_serial, BerCurve, FeedbackBudget, SchemeId,
    SchemeSpec, SimulationSetup, SweepVariable,
};
use rand::Rng;
use rayon::prelude::*;
use std::path::Path;

fn pass(name: &str, detail: String) {
    println!("PASS {name}: {detail}");
}

#[test]
fn a01_feedback_bit_accounting_is_exact() {
    let dims = SystemDims::new(3, 3, 3);
    for b in 1..=8u64 {
        let mk = |n: usize| FeedbackBudget { n0: n, n1: n, n2: n, scalar_bits: b, direct_rank: 3 };
        assert_eq!(
            feedback_bits(SchemeId::ProperlyQuantizedDirect, &mk(8), dims, true).unwrap(),
            15 + 4 * b
        );
        assert_eq!(
            feedback_bits(SchemeId::ProperlyQuantizedDirect, &mk(16), dims, true).unwrap(),
            20 + 4 * b
        );
        assert_eq!(
            feedback_bits(SchemeId::ModifiedQuantizedDirect, &mk(8), dims, true).unwrap(),
            9 + 2 * b
        );
        assert_eq!(
            feedback_bits(SchemeId::ModifiedQuantizedDirect, &mk(16), dims, true).unwrap(),
            12 + 2 * b
        );
        assert_eq!(feedback_bits(SchemeId::MmseBaseline, &mk(8), dims, true).unwrap(), 54 + b);
    }
    pass(
        "feedback bit accounting",
        "properly 15+4b/20+4b, modified 9+2b/12+2b, mmse 54+b, exact for b in 1..=8".into(),
    );
}

#[test]
fn a02_spectral_gap_constant_at_second_decimal() {
    let samples = 100_000;
    let gap = spectral_gap_db(3, 3, samples, &RngStream::new(0xa02, 0)).unwrap();
    assert!(
        (gap - 1.24).abs() <= 0.05,
        "spectral gap {gap:.4} dB departs from 1.24 +/- 0.05 dB"
    );
    pass(
        "spectral gap constant",
        format!("10 log10(1 + E(nu2^2)/E(nu1^2)) = {gap:.4} dB at {samples} samples"),
    );
}

#[test]
fn a03_mean_channel_energy_matches_dimensions() {
    let samples: u64 = 100_000;
    let mut details = Vec::new();
    for (p, q) in [(2usize, 2usize), (3, 3), (2, 3)] {
        let sum: f64 = (0..samples)
            .into_par_iter()
            .map(|k| {
                let h = grassrelay::numerics::sample_complex_gaussian_matrix(
                    &RngStream::new(0xa03, 0).child(k * 4 + (p * 10 + q) as u64),
                    p,
                    q,
                );
                svd(&h).unwrap().singulars.iter().map(|s| s * s).sum::<f64>()
            })
            .sum();
        let mean = sum / samples as f64;
        let expect = (p * q) as f64;
        assert!(
            (mean - expect).abs() <= 0.02 * expect,
            "E(sum sigma^2) = {mean:.4} for {p}x{q}, expected {expect} +/- 2%"
        );
        details.push(format!("{p}x{q}: {mean:.3}"));
    }
    pass("mean channel energy", details.join(", "));
}

/// SNR attained by a random relay matrix scaled onto the power budget,
/// for random unit terminals. Independent of the solver code paths.
fn random_feasible_triple_snr<R: Rng>(ch: &ChannelSet, rng: &mut R) -> f64 {
    let s = sample_unit_vector(rng, ch.dims.tx);
    let r = sample_unit_vector(rng, ch.dims.rx);
    let raw = gaussian_matrix_with(rng, ch.dims.relay, ch.dims.relay);
    let relay_in = (&ch.tx_relay * &s).scale(ch.gains.tx_relay.sqrt());
    let budget = (&raw * &relay_in).norm_squared() + raw.norm_squared();
    let w = raw.scale(budget.sqrt().recip());
    let numer = ch.gains.tx_relay
        * ch.gains.relay_rx
        * (r.adjoint() * &ch.relay_rx * &w * (&ch.tx_relay * &s)).norm_squared();
    let amplified = ch.gains.relay_rx * (w.adjoint() * ch.relay_rx.adjoint() * &r).norm_squared();
    numer / (amplified + 1.0)
}

#[test]
fn a04_two_hop_closed_form_is_unbeaten_by_random_search() {
    let dims = SystemDims::new(2, 2, 2);
    let gains = LinkGains::from_db(0.0, 4.0, 8.0);
    let instances: u64 = 200;
    let draws = 10_000;
    let worst = (0..instances)
        .into_par_iter()
        .map(|k| {
            let ch = sample_channel_set(&RngStream::new(0xa04, 0).child(k), dims, gains, false);
            let f1 = svd(&ch.tx_relay).unwrap();
            let f2 = svd(&ch.relay_rx).unwrap();
            let closed_form = two_hop_snr(
                gains.tx_relay * f1.top_singular().powi(2),
                gains.relay_rx * f2.top_singular().powi(2),
            );
            let mut rng = RngStream::new(0xa04, 1).child(k).rng();
            let mut worst: f64 = f64::NEG_INFINITY;
            for _ in 0..draws {
                let snr = random_feasible_triple_snr(&ch, &mut rng);
                worst = worst.max((snr - closed_form) / closed_form);
            }
            worst
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    assert!(
        worst <= 1e-9,
        "a random feasible triple beat the closed form by relative {worst:.3e}"
    );
    pass(
        "two-hop optimality oracle",
        format!("{instances} instances x {draws} feasible triples, worst relative excess {worst:.2e}"),
    );
}

#[test]
fn a05_quantization_loss_bounds_hold() {
    let channels = 10_000;
    let mut details = Vec::new();

    // Two-hop bound at m = n = l = 2, relay-Rx at 8 dB.
    let dims2 = SystemDims::new(2, 2, 2);
    for (n, seed) in [(4usize, 0xa05u64), (8, 0xa15)] {
        let c1 = generate_grassmannian(&RngStream::new(seed, 1), 2, n, 24, 600).unwrap();
        let c2 = generate_grassmannian(&RngStream::new(seed, 2), 2, n, 24, 600).unwrap();
        for p1_db in [0.0, 4.0, 8.0] {
            let gains = LinkGains::from_db(0.0, p1_db, 8.0);
            let report = check_bound_no_direct(
                dims2,
                gains,
                &c1,
                &c2,
                channels,
                &RngStream::new(seed, 3),
            )
            .unwrap();
            assert!(
                report.satisfied,
                "two-hop bound violated at N={n}, P1={p1_db} dB: {report:?}"
            );
            details.push(format!(
                "2hop N={n} P1={p1_db}: loss {:.3} <= bound {:.1}",
                report.empirical_loss, report.bound_value
            ));
        }
    }

    // Direct-link bounds at m = n = l = 3, hops at 2 dB: full direct
    // knowledge and quantized singular vectors.
    let dims3 = SystemDims::new(3, 3, 3);
    let c0 = generate_grassmannian(&RngStream::new(0xa25, 0), 3, 8, 24, 600).unwrap();
    let c1 = generate_grassmannian(&RngStream::new(0xa25, 1), 3, 8, 24, 600).unwrap();
    let c2 = generate_grassmannian(&RngStream::new(0xa25, 2), 3, 8, 24, 600).unwrap();
    for p0_db in [-4.0, 0.0, 4.0] {
        let gains = LinkGains::from_db(p0_db, 2.0, 2.0);
        for (c0_opt, tag) in [(None, "full"), (Some(&c0), "quantized")] {
            let report = check_bound_with_direct(
                dims3,
                gains,
                &c1,
                &c2,
                c0_opt,
                channels,
                &RngStream::new(0xa25, 3),
                12,
                1e-10,
            )
            .unwrap();
            assert!(
                report.satisfied,
                "direct-link ({tag}) bound violated at P0={p0_db} dB: {report:?}"
            );
            details.push(format!(
                "direct/{tag} P0={p0_db}: loss {:.3} <= bound {:.1}",
                report.empirical_loss, report.bound_value
            ));
        }
    }
    pass("quantization loss bounds", details.join("; "));
}

fn haar_unitary<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = gaussian_matrix_with(rng, dim, dim).qr();
    let q = qr.q();
    let r = qr.r();
    let cols: Vec<CVector> = (0..dim)
        .map(|j| {
            let d = r[(j, j)];
            let phase =
                if d.norm() > 0.0 { d.unscale(d.norm()) } else { C64::new(1.0, 0.0) };
            q.column(j).into_owned() * phase
        })
        .collect();
    CMatrix::from_columns(&cols)
}

#[test]
fn a06_transmit_direction_is_uniform_on_the_sphere() {
    let dims = SystemDims::new(3, 3, 3);
    let gains = LinkGains::from_db(2.0, 2.0, 2.0);
    let instances: u64 = 2_000;
    let q = sample_unit_vector(&mut RngStream::new(5150, 0).rng(), 3);

    let mut samples: Vec<f64> = (0..instances)
        .into_par_iter()
        .map(|k| {
            let stream = RngStream::new(4242, 0).child(k);
            let ch = sample_channel_set(&stream, dims, gains, true);
            let sol = optimal_with_direct(&ch, &stream.child(9), 12, 1e-10).unwrap();
            q.dotc(&sol.tx).norm_sqr()
        })
        .collect();
    let d = ks_statistic(&mut samples, |x| sphere_alignment_cdf(x, 3));
    let crit = ks_critical_value(instances as usize, 0.01);
    assert!(d <= crit, "KS statistic {d:.5} rejects uniformity (critical {crit:.5})");

    // Rotating the transmit-side channels must not move the attainable
    // optimum.
    let worst = (0..200u64)
        .into_par_iter()
        .map(|k| {
            let stream = RngStream::new(777, 0).child(k);
            let ch = sample_channel_set(&stream, dims, gains, true);
            let rotation = haar_unitary(&mut stream.child(50).rng(), 3);
            let rotated = ChannelSet {
                direct: ch.direct.as_ref().map(|h0| h0 * &rotation),
                tx_relay: &ch.tx_relay * &rotation,
                relay_rx: ch.relay_rx.clone(),
                gains: ch.gains,
                dims: ch.dims,
            };
            let a = optimal_with_direct(&ch, &stream.child(9), 16, 1e-12).unwrap();
            let b = optimal_with_direct(&rotated, &stream.child(10), 16, 1e-12).unwrap();
            (a.snr.total - b.snr.total).abs() / (1.0 + a.snr.total)
        })
        .reduce(|| 0.0, f64::max);
    assert!(worst <= 1e-8, "rotation equivariance gap {worst:.3e} exceeds 1e-8");

    pass(
        "transmit-direction uniformity",
        format!("KS {d:.4} <= {crit:.4} over {instances} solves; equivariance gap {worst:.1e}"),
    );
}

fn find_curve<'c>(curves: &'c [BerCurve], label: &str) -> &'c BerCurve {
    curves.iter().find(|c| c.label == label).expect("curve exists")
}

fn assert_ordered_with_slack(better: &BerCurve, worse: &BerCurve) {
    for (a, b) in better.points.iter().zip(&worse.points) {
        let slack = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!(
            a.ber <= b.ber + slack,
            "{} ({:.5}) > {} ({:.5}) at {} dB",
            better.label,
            a.ber,
            worse.label,
            b.ber,
            a.snr_db
        );
    }
}

#[test]
fn a07_two_hop_quantization_ordering_at_desk_scale() {
    let c1_8 = generate_grassmannian(&RngStream::new(7201, 0), 2, 8, 24, 600).unwrap();
    let c2_8 = generate_grassmannian(&RngStream::new(7202, 0), 2, 8, 24, 600).unwrap();
    let c1_4 = generate_grassmannian(&RngStream::new(7203, 0), 2, 4, 24, 600).unwrap();
    let c2_4 = generate_grassmannian(&RngStream::new(7204, 0), 2, 4, 24, 600).unwrap();
    let pairs: Vec<(Codebook, Codebook)> = (0..10u64)
        .map(|b| {
            (
                generate_random_codebook(&RngStream::new(7205, 0).child(2 * b), 2, 4).unwrap(),
                generate_random_codebook(&RngStream::new(7205, 0).child(2 * b + 1), 2, 4).unwrap(),
            )
        })
        .collect();
    let setup = SimulationSetup {
        dims: SystemDims::new(2, 2, 2),
        schedule: CoherenceSchedule::new(2_000, 100),
        include_direct: false,
        direct_db: 0.0,
        tx_relay_db: 0.0,
        relay_rx_db: 8.0,
        sweep: SweepVariable::TxRelay,
        grid_db: vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0],
        schemes: vec![
            SchemeSpec::unquantized(SchemeId::OptimalNoDirect),
            SchemeSpec::two_hop(SchemeId::QuantizedNoDirect, "g8", c1_8, c2_8),
            SchemeSpec::two_hop(SchemeId::QuantizedNoDirect, "g4", c1_4, c2_4),
            SchemeSpec::random_ensemble("rand4", pairs),
        ],
        scalar_bits: 4,
        seed: 0xa07,
        solver_restarts: 8,
        solver_tol: 1e-10,
    };
    let curves = simulate_ber(&setup).unwrap();
    let optimal = find_curve(&curves, "optimal_no_dl");
    let g8 = find_curve(&curves, "g8");
    let g4 = find_curve(&curves, "g4");
    let rand4 = find_curve(&curves, "rand4");
    assert_ordered_with_slack(optimal, g8);
    assert_ordered_with_slack(g8, g4);
    assert_ordered_with_slack(g4, rand4);
    pass(
        "two-hop quantization ordering",
        format!(
            "optimal <= packed-8 <= packed-4 <= random-4 at all {} points (2000x100)",
            setup.grid_db.len()
        ),
    );
}

#[test]
fn a08_direct_link_quantized_schemes_stay_close_and_beat_mmse() {
    let c0 = generate_grassmannian(&RngStream::new(9104, 0), 3, 16, 24, 600).unwrap();
    let c1 = generate_grassmannian(&RngStream::new(9105, 0), 3, 16, 24, 600).unwrap();
    let c2 = generate_grassmannian(&RngStream::new(9106, 0), 3, 16, 24, 600).unwrap();
    let schemes = |c0: &Codebook, c1: &Codebook, c2: &Codebook| {
        vec![
            SchemeSpec::with_direct_books(
                SchemeId::ProperlyQuantizedDirect,
                "properly",
                c0.clone(),
                c1.clone(),
                c2.clone(),
            ),
            SchemeSpec::with_direct_books(
                SchemeId::ModifiedQuantizedDirect,
                "modified",
                c0.clone(),
                c1.clone(),
                c2.clone(),
            ),
            SchemeSpec::unquantized(SchemeId::MmseBaseline),
        ]
    };
    let base = SimulationSetup {
        dims: SystemDims::new(3, 3, 3),
        schedule: CoherenceSchedule::new(2_000, 100),
        include_direct: true,
        direct_db: -4.0,
        tx_relay_db: 2.0,
        relay_rx_db: 2.0,
        sweep: SweepVariable::Direct,
        grid_db: vec![-8.0, -4.0, 0.0],
        schemes: schemes(&c0, &c1, &c2),
        scalar_bits: 4,
        seed: 0xa08,
        solver_restarts: 12,
        solver_tol: 1e-10,
    };
    let mut complementary = base.clone();
    complementary.sweep = SweepVariable::TxRelay;
    complementary.grid_db = vec![-2.0, 2.0, 6.0, 10.0];
    complementary.seed = 0xa18;

    let mut checked_points = 0usize;
    let mut mmse_beaten = 0usize;
    for setup in [&base, &complementary] {
        let curves = simulate_ber(setup).unwrap();
        let properly = find_curve(&curves, "properly");
        let modified = find_curve(&curves, "modified");
        let mmse = find_curve(&curves, "mmse_baseline");
        for ((p, m), q) in properly.points.iter().zip(&modified.points).zip(&mmse.points) {
            checked_points += 1;
            assert!(
                m.ber <= 1.5 * p.ber,
                "modified {:.5} exceeds 1.5x properly {:.5} at {} dB ({})",
                m.ber,
                p.ber,
                p.snr_db,
                setup.sweep
            );
            if p.ber < q.ber && m.ber < q.ber {
                mmse_beaten += 1;
            }
        }
    }
    let frac = mmse_beaten as f64 / checked_points as f64;
    assert!(
        frac >= 0.8,
        "quantized schemes beat the component quantizer at only {mmse_beaten}/{checked_points} points"
    );
    pass(
        "direct-link quantized closeness",
        format!(
            "modified within 1.5x of properly at {checked_points}/{checked_points} points; \
             both beat the component quantizer at {mmse_beaten}/{checked_points}"
        ),
    );
}

#[test]
fn a09_inequality_fuzz_suites_have_zero_violations() {
    let draws: u64 = 100_000;

    // Scalar inequalities.
    let scalars_ok = (0..draws)
        .into_par_iter()
        .all(|k| {
            let mut rng = RngStream::new(0xa09, 0).child(k).rng();
            let mut draw = || -> f64 {
                let exp: f64 = rng.gen_range(-2.0..3.0);
                rng.gen_range(0.0..1.0) * 10f64.powf(exp)
            };
            cascade_difference_check(draw(), draw(), draw(), draw())
                && ratio_difference_check(draw(), draw(), draw() + 1e-9)
        });
    assert!(scalars_ok, "scalar inequality violated");

    // Vector inequalities and the relay spectrum ceiling.
    let cb = generate_grassmannian(&RngStream::new(0xa09, 1), 3, 8, 16, 500).unwrap();
    let vectors_ok = (0..draws)
        .into_par_iter()
        .all(|k| {
            let stream = RngStream::new(0xa09, 2).child(k);
            let mut rng = stream.rng();
            let h = gaussian_matrix_with(&mut rng, 3, 3);
            let s = sample_unit_vector(&mut rng, 3);
            let u = sample_unit_vector(&mut rng, 3);
            let v = sample_unit_vector(&mut rng, 3);
            let w = sample_unit_vector(&mut rng, 3);
            let (attained, ceiling) = sample_relay_spectrum_gap(&mut rng, 3);
            quantization_continuity_check(&h, &s, &cb).unwrap()
                && spectral_sandwich_check(&h, &s).unwrap()
                && correlation_difference_check(&u, &v, &w).unwrap()
                && attained <= ceiling * (1.0 + 1e-12) + 1e-15
        });
    assert!(vectors_ok, "vector inequality violated");

    pass(
        "inequality fuzz",
        format!("quantization-continuity, spectral-sandwich, cascade-ceiling and scalar suites: 0 violations in {draws} draws each"),
    );
}

const DETERMINISM_TWO_HOP: &str = r#"
seed = 1010
include_direct = false

[dims]
tx = 2
relay = 2
rx = 2

[schedule]
intervals = 40
symbols = 25

[gains]
tx_relay_db = 4.0
relay_rx_db = 8.0

[sweep]
variable = "p1"
grid_db = [0.0, 6.0]

[bounds]
channels = 100

[codebooks.a]
kind = "grassmannian"
dim = 2
size = 4
seed = 1
restarts = 4
iterations = 200

[codebooks.b]
kind = "random"
dim = 2
size = 4
seed = 2

[[schemes]]
scheme = "optimal_no_dl"

[[schemes]]
scheme = "quantized_no_dl"
label = "packed4"
c1 = "a"
c2 = "b"
"#;

const DETERMINISM_DIRECT: &str = r#"
seed = 2020
include_direct = true

[dims]
tx = 3
relay = 3
rx = 3

[schedule]
intervals = 25
symbols = 20

[gains]
tx_relay_db = 2.0
relay_rx_db = 2.0

[sweep]
variable = "p0"
grid_db = [-4.0, 0.0]

[bounds]
channels = 50

[codebooks.d0]
kind = "grassmannian"
dim = 3
size = 8
seed = 3
restarts = 4
iterations = 200

[codebooks.d1]
kind = "grassmannian"
dim = 3
size = 8
seed = 4
restarts = 4
iterations = 200

[codebooks.d2]
kind = "grassmannian"
dim = 3
size = 8
seed = 5
restarts = 4
iterations = 200

[[schemes]]
scheme = "optimal_dl"

[[schemes]]
scheme = "properly_quantized_dl"
label = "properly"
c0 = "d0"
c1 = "d1"
c2 = "d2"

[[schemes]]
scheme = "mmse_baseline"
"#;

#[test]
fn a10_scenario_reruns_are_byte_identical() {
    let mut checked_files = 0usize;
    for (tag, toml) in [("two-hop", DETERMINISM_TWO_HOP), ("direct", DETERMINISM_DIRECT)] {
        let config = ScenarioConfig::from_toml_str(toml).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        let overrides = RunOverrides::default();
        let a = run_scenario(&config, Path::new("."), &out_a, &overrides).unwrap();
        let b = run_scenario(&config, Path::new("."), &out_b, &overrides).unwrap();
        assert_eq!(a.files, b.files, "{tag}: file lists differ");
        for rel in &a.files {
            let x = std::fs::read(out_a.join(rel)).unwrap();
            let y = std::fs::read(out_b.join(rel)).unwrap();
            assert_eq!(x, y, "{tag}: {} differs between reruns", rel.display());
            checked_files += 1;
        }
    }
    // The engine itself is also schedule-order independent.
    let config = ScenarioConfig::from_toml_str(DETERMINISM_TWO_HOP).unwrap();
    let built = config.build(Path::new("."), &RunOverrides::default()).unwrap();
    let parallel = simulate_ber(&built.setup).unwrap();
    let serial = simulate_ber_serial(&built.setup).unwrap();
    for (x, y) in parallel.iter().zip(&serial) {
        for (p, q) in x.points.iter().zip(&y.points) {
            assert_eq!(p.bit_errors, q.bit_errors);
        }
    }
    pass(
        "scenario determinism",
        format!("{checked_files} files byte-identical across reruns; parallel == serial"),
    );
}

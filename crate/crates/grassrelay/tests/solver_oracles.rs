//! Heavy randomized oracles for the beamforming solvers: random-search
//! validation of the direct-link ascent, the single-hop loss bound, and
//! the average penalty of the reduced transmit objective.

use grassrelay::analysis::bound_single_hop;
use grassrelay::channels::{linear_to_db, sample_channel_set, LinkGains, SystemDims};
use grassrelay::codebooks::generate_grassmannian;
use grassrelay::numerics::{sample_unit_vector, svd, RngStream};
use grassrelay::schemes::{
    direct_link_objective, modified_unquantized_with_direct, optimal_with_direct,
};
use rayon::prelude::*;

#[test]
fn ascent_beats_exhaustive_random_probes() {
    let dims = SystemDims::new(3, 3, 3);
    let gains = LinkGains::from_db(1.0, 2.0, 2.0);
    let cases = 100u64;
    let probes = 100_000u64;
    let worst = (0..cases)
        .into_par_iter()
        .map(|k| {
            let stream = RngStream::new(0x50a, 0).child(k);
            let ch = sample_channel_set(&stream, dims, gains, true);
            let gamma2 = gains.relay_rx
                * svd(&ch.relay_rx).unwrap().top_singular().powi(2);
            let sol = optimal_with_direct(&ch, &stream.child(9), 12, 1e-10).unwrap();
            let (attained, _) = direct_link_objective(&ch, &sol.tx, gamma2).unwrap();
            let mut rng = stream.child(10).rng();
            let mut excess: f64 = f64::NEG_INFINITY;
            for _ in 0..probes {
                let probe = sample_unit_vector(&mut rng, 3);
                let (value, _) = direct_link_objective(&ch, &probe, gamma2).unwrap();
                excess = excess.max(value - attained);
            }
            excess
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    assert!(
        worst <= 1e-9,
        "a random probe beat the ascent objective by {worst:.3e}"
    );
}

#[test]
fn single_hop_loss_respects_its_bound() {
    // One quantized beamforming hop: empirical average loss against the
    // closed-form bound built from the codebook's (N, delta) and the
    // Monte-Carlo top-singular-value moment.
    let gain = 4.0f64;
    let cb = generate_grassmannian(&RngStream::new(0x50b, 0), 2, 4, 24, 600).unwrap();
    let channels = 100_000u64;
    let stats: Vec<(f64, f64)> = (0..channels)
        .into_par_iter()
        .map(|k| {
            let h = grassrelay::numerics::sample_complex_gaussian_matrix(
                &RngStream::new(0x50b, 1).child(k),
                2,
                2,
            );
            let top_sq = svd(&h).unwrap().top_singular().powi(2);
            let best_quantized = cb.best_codeword_by_gain(&h, gain).unwrap().2;
            (top_sq, gain * top_sq - best_quantized)
        })
        .collect();
    let mean_top_sq = stats.iter().map(|(t, _)| t).sum::<f64>() / channels as f64;
    let mean_loss = stats.iter().map(|(_, l)| l).sum::<f64>() / channels as f64;
    let bound =
        bound_single_hop(gain, 2, cb.size(), cb.min_distance().unwrap(), mean_top_sq).unwrap();
    assert!(
        mean_loss <= bound,
        "single-hop loss {mean_loss:.4} exceeds bound {bound:.4}"
    );
    assert!(mean_loss > 0.0, "quantization loss cannot vanish for a finite codebook");
}

#[test]
fn reduced_objective_average_penalty_stays_under_the_spectral_gap() {
    // Keeping only the strongest direct-channel mode costs at most
    // 10 log10(1 + E(nu2^2)/E(nu1^2)) dB on average, which is 1.24 dB
    // for 3x3 channels at equal 2 dB hop SNRs.
    let dims = SystemDims::new(3, 3, 3);
    let gains = LinkGains::from_db(2.0, 2.0, 2.0);
    let channels = 4_000u64;
    let pairs: Vec<(f64, f64)> = (0..channels)
        .into_par_iter()
        .map(|k| {
            let stream = RngStream::new(0x50c, 0).child(k);
            let ch = sample_channel_set(&stream, dims, gains, true);
            let best = optimal_with_direct(&ch, &stream.child(9), 12, 1e-10).unwrap();
            let reduced =
                modified_unquantized_with_direct(&ch, &stream.child(10), 12, 1e-10).unwrap();
            assert!(
                reduced.snr.total <= best.snr.total * (1.0 + 1e-9),
                "reduced objective produced a better SNR than the optimum"
            );
            (best.snr.total, reduced.snr.total)
        })
        .collect();
    let mean_best = pairs.iter().map(|(a, _)| a).sum::<f64>() / channels as f64;
    let mean_reduced = pairs.iter().map(|(_, b)| b).sum::<f64>() / channels as f64;
    let gap_db = linear_to_db(mean_best) - linear_to_db(mean_reduced);
    assert!(
        gap_db <= 1.24,
        "average penalty {gap_db:.3} dB exceeds the 1.24 dB ceiling"
    );
    assert!(gap_db >= 0.0);
}

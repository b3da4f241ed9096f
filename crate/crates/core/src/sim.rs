//! Quasi-static Rayleigh flat-fading MIMO simulation with group-wise ML
//! decoding, plus the exhaustive joint decoder used to validate the
//! decomposition.

use crate::linalg::{Complex64, ComplexMatrix};
use crate::rng::TrialRng;
use crate::signal::{average_codeword_energy, SignalError, SignalSet};
use crate::uwd::{encode_group, SymbolVector, WeightDesign};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("joint ML codebook has {size} entries, above the cap {cap}")]
    CodebookTooLarge { size: u128, cap: u128 },
    #[error("trials_per_snr must be at least 1")]
    NoTrials,
    #[error("snr list must be nonempty")]
    NoSnrPoints,
    #[error("receive antenna count must be at least 1")]
    NoReceiveAntennas,
    #[error(transparent)]
    Signal(#[from] SignalError),
}

/// Joint-decoder guard: refuse product codebooks above this size.
pub const JOINT_CODEBOOK_CAP: u128 = 1_000_000;

/// Draws an n x nr channel with i.i.d. circularly symmetric unit-variance
/// complex Gaussian entries (each component has variance 1/2).
pub fn sample_channel(n: usize, nr: usize, rng: &mut TrialRng) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let entries = (0..n * nr)
        .map(|_| {
            let (re, im) = rng.next_gaussian_pair();
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMatrix::new(n, nr, entries)
}

/// Received block Y = S H + W with W i.i.d. complex Gaussian of total
/// per-entry variance `n0`. Panics if the shapes disagree.
pub fn transmit(
    s: &ComplexMatrix,
    h: &ComplexMatrix,
    n0: f64,
    rng: &mut TrialRng,
) -> ComplexMatrix {
    assert_eq!(s.cols(), h.rows(), "codeword/channel shape mismatch");
    let mut y = s.matmul(h);
    if n0 > 0.0 {
        let scale = (n0 / 2.0).sqrt();
        let noise: Vec<Complex64> = (0..y.rows() * y.cols())
            .map(|_| {
                let (re, im) = rng.next_gaussian_pair();
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        y = &y + &ComplexMatrix::new(y.rows(), y.cols(), noise);
    }
    y
}

fn residual_norm_sq(y: &ComplexMatrix, candidate: &ComplexMatrix) -> f64 {
    (y - candidate).frobenius_norm_sq()
}

/// Per-group candidate images A_ij * H, so each candidate costs only a
/// lambda-fold combination of n x nr blocks.
fn group_images(d: &WeightDesign, h: &ComplexMatrix) -> Vec<Vec<ComplexMatrix>> {
    (0..d.groups())
        .map(|i| (1..=d.lambda()).map(|j| d.weight(i, j).matmul(h)).collect())
        .collect()
}

fn combine(images: &[ComplexMatrix], point: &[f64], rows: usize, cols: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(rows, cols);
    for (img, &x) in images.iter().zip(point) {
        if x != 0.0 {
            acc = &acc + &img.scale(Complex64::new(x, 0.0));
        }
    }
    acc
}

pub(crate) fn decode_groupwise_counted(
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    d: &WeightDesign,
    set: &SignalSet,
) -> (Vec<usize>, usize) {
    let images = group_images(d, h);
    let (rows, cols) = (y.rows(), y.cols());
    let mut chosen = Vec::with_capacity(d.groups());
    let mut evaluated = 0usize;
    for group_imgs in &images {
        let mut best_index = 0usize;
        let mut best_metric = f64::INFINITY;
        for (index, point) in set.points().iter().enumerate() {
            let candidate = combine(group_imgs, point, rows, cols);
            let metric = residual_norm_sq(y, &candidate);
            evaluated += 1;
            // strict inequality keeps the lowest index on ties
            if metric < best_metric {
                best_metric = metric;
                best_index = index;
            }
        }
        chosen.push(best_index);
    }
    (chosen, evaluated)
}

fn indices_to_symbols(d: &WeightDesign, set: &SignalSet, indices: &[usize]) -> SymbolVector {
    let mut s = SymbolVector::zeros(d.groups(), d.lambda());
    for (group, &idx) in indices.iter().enumerate() {
        s.set_group(group, &set.points()[idx]);
    }
    s
}

/// Group-wise ML decoding: each group minimizes ||Y - S_i H||_F^2
/// independently over the signal set, g * |set| candidate evaluations in
/// total. Ties break toward the lowest signal-set index.
pub fn ml_decode_groupwise(
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    d: &WeightDesign,
    set: &SignalSet,
) -> SymbolVector {
    let (indices, _) = decode_groupwise_counted(y, h, d, set);
    indices_to_symbols(d, set, &indices)
}

/// Exhaustive joint ML decoding over the full |set|^g product codebook,
/// with the same lowest-index tie-break (lexicographic, group 0 slowest).
pub fn ml_decode_joint(
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    d: &WeightDesign,
    set: &SignalSet,
) -> Result<SymbolVector, SimError> {
    let size = (set.len() as u128).pow(d.groups() as u32);
    if size > JOINT_CODEBOOK_CAP {
        return Err(SimError::CodebookTooLarge {
            size,
            cap: JOINT_CODEBOOK_CAP,
        });
    }
    let images = group_images(d, h);
    let (rows, cols) = (y.rows(), y.cols());
    let mut best_indices = vec![0usize; d.groups()];
    let mut best_metric = f64::INFINITY;
    let mut indices = vec![0usize; d.groups()];
    loop {
        let mut candidate = ComplexMatrix::zeros(rows, cols);
        for (group, &idx) in indices.iter().enumerate() {
            candidate = &candidate + &combine(&images[group], &set.points()[idx], rows, cols);
        }
        let metric = residual_norm_sq(y, &candidate);
        if metric < best_metric {
            best_metric = metric;
            best_indices = indices.clone();
        }
        // odometer increment, last group fastest
        let mut pos = d.groups();
        loop {
            if pos == 0 {
                return Ok(indices_to_symbols(d, set, &best_indices));
            }
            pos -= 1;
            indices[pos] += 1;
            if indices[pos] < set.len() {
                break;
            }
            indices[pos] = 0;
        }
    }
}

/// Monte-Carlo sweep specification. Every group draws uniformly from
/// `signal_set`; trial t of SNR index k consumes the (seed, k, t) stream.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub design: WeightDesign,
    pub signal_set: SignalSet,
    pub nr: usize,
    pub snr_db: Vec<f64>,
    pub trials_per_snr: u64,
    pub seed: u64,
}

/// Error statistics at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub trials: u64,
    /// Symbol error rate of each group separately.
    pub per_group_ser: Vec<f64>,
    /// Symbol error rate pooled over all groups.
    pub group_ser: f64,
    /// Fraction of trials with at least one wrong group.
    pub codeword_er: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub points: Vec<SnrPoint>,
}

/// Runs the sweep. The per-receive-antenna SNR is E_avg * n / N0 where
/// E_avg is the average codeword energy per matrix entry of the configured
/// set, so a unit-average-energy set gives SNR = n / N0.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult, SimError> {
    if cfg.trials_per_snr == 0 {
        return Err(SimError::NoTrials);
    }
    if cfg.snr_db.is_empty() {
        return Err(SimError::NoSnrPoints);
    }
    if cfg.nr == 0 {
        return Err(SimError::NoReceiveAntennas);
    }
    let d = &cfg.design;
    let e_avg = average_codeword_energy(d, &cfg.signal_set)?;
    let groups = d.groups();
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (snr_index, &snr_db) in cfg.snr_db.iter().enumerate() {
        let snr_linear = 10f64.powf(snr_db / 10.0);
        let n0 = e_avg * d.n() as f64 / snr_linear;
        let mut group_errors = vec![0u64; groups];
        let mut codeword_errors = 0u64;
        for trial in 0..cfg.trials_per_snr {
            let mut rng = TrialRng::from_parts(cfg.seed, snr_index as u64, trial);
            let tx_indices: Vec<usize> = (0..groups)
                .map(|_| rng.next_index(cfg.signal_set.len()))
                .collect();
            let mut s = ComplexMatrix::zeros(d.n(), d.n());
            for (group, &idx) in tx_indices.iter().enumerate() {
                s = &s + &encode_group(d, group, &cfg.signal_set.points()[idx]);
            }
            let h = sample_channel(d.n(), cfg.nr, &mut rng);
            let y = transmit(&s, &h, n0, &mut rng);
            let (decoded, _) = decode_groupwise_counted(&y, &h, d, &cfg.signal_set);
            let mut any_wrong = false;
            for (group, (&got, &sent)) in decoded.iter().zip(&tx_indices).enumerate() {
                if got != sent {
                    group_errors[group] += 1;
                    any_wrong = true;
                }
            }
            if any_wrong {
                codeword_errors += 1;
            }
        }
        let trials = cfg.trials_per_snr;
        let per_group_ser: Vec<f64> = group_errors
            .iter()
            .map(|&e| e as f64 / trials as f64)
            .collect();
        let total_errors: u64 = group_errors.iter().sum();
        points.push(SnrPoint {
            snr_db,
            trials,
            per_group_ser,
            group_ser: total_errors as f64 / (trials * groups as u64) as f64,
            codeword_er: codeword_errors as f64 / trials as f64,
        });
    }
    Ok(SimResult { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::rotated_signal_set;
    use crate::uwd::{encode, example1_design, SymbolVector};

    fn sqrt2() -> f64 {
        std::f64::consts::SQRT_2
    }

    #[test]
    fn channel_moments() {
        let mut rng = TrialRng::new(99);
        let draws = 5_000usize;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for _ in 0..draws {
            let h = sample_channel(5, 4, &mut rng);
            for e in h.entries() {
                sum += e;
                sum_sq += e.norm_sqr();
                count += 1;
            }
        }
        let mean = sum / Complex64::new(count as f64, 0.0);
        let var = sum_sq / count as f64;
        assert!(
            mean.re.abs() < 0.02 && mean.im.abs() < 0.02,
            "mean = {mean}"
        );
        assert!((var - 1.0).abs() < 0.02, "per-entry variance = {var}");
    }

    #[test]
    fn channel_is_deterministic_per_key() {
        let mut a = TrialRng::from_parts(5, 1, 2);
        let mut b = TrialRng::from_parts(5, 1, 2);
        let ha = sample_channel(4, 2, &mut a);
        let hb = sample_channel(4, 2, &mut b);
        assert!(ha.approx_eq(&hb, 0.0));
    }

    #[test]
    fn noiseless_transmit_is_exact_product() {
        let d = example1_design();
        let set = rotated_signal_set(sqrt2());
        let mut rng = TrialRng::new(3);
        let s = encode_group(&d, 0, &set.points()[7]);
        let h = sample_channel(4, 2, &mut rng);
        let y = transmit(&s, &h, 0.0, &mut rng);
        assert!(y.approx_eq(&s.matmul(&h), 0.0));
    }

    #[test]
    fn transmit_is_linear_for_a_fixed_noise_draw() {
        // identical stream keys replay the same noise, so received blocks
        // differ exactly by the signal difference
        let d = example1_design();
        let sa = encode_group(&d, 0, &[0.4, -0.2, 0.9, 0.1]);
        let sb = encode_group(&d, 1, &[-0.7, 0.3, 0.0, 0.5]);
        let mut rng = TrialRng::new(21);
        let h = sample_channel(4, 2, &mut rng);
        let n0 = 0.8;
        let ya = transmit(&sa, &h, n0, &mut TrialRng::from_parts(6, 0, 0));
        let yb = transmit(&sb, &h, n0, &mut TrialRng::from_parts(6, 0, 0));
        let diff = &ya - &yb;
        assert!(diff.approx_eq(&(&sa - &sb).matmul(&h), 1e-12));
    }

    #[test]
    fn noise_energy_matches_n0() {
        let n0 = 0.37;
        let zero = ComplexMatrix::zeros(6, 6);
        let h = ComplexMatrix::identity(6);
        let mut rng = TrialRng::new(11);
        let mut acc = 0.0;
        let reps = 3000;
        for _ in 0..reps {
            let y = transmit(&zero, &h, n0, &mut rng);
            acc += y.frobenius_norm_sq() / 36.0;
        }
        let measured = acc / reps as f64;
        assert!(
            (measured - n0).abs() < 0.02 * n0.max(1.0),
            "measured {measured}"
        );
    }

    #[test]
    fn noiseless_decoding_recovers_symbols() {
        let d = example1_design();
        let set = rotated_signal_set(sqrt2());
        for trial in 0..100u64 {
            let mut rng = TrialRng::from_parts(2024, 0, trial);
            let indices: Vec<usize> = (0..d.groups()).map(|_| rng.next_index(set.len())).collect();
            let mut s = SymbolVector::zeros(d.groups(), d.lambda());
            for (group, &idx) in indices.iter().enumerate() {
                s.set_group(group, &set.points()[idx]);
            }
            let cw = encode(&d, &s).unwrap();
            let h = sample_channel(4, 1, &mut rng);
            let y = transmit(&cw.matrix, &h, 0.0, &mut rng);
            let decoded = ml_decode_groupwise(&y, &h, &d, &set);
            assert_eq!(decoded, s, "trial {trial}");
            let joint = ml_decode_joint(&y, &h, &d, &set).unwrap();
            assert_eq!(joint, s, "trial {trial} (joint)");
        }
    }

    #[test]
    fn groupwise_matches_joint_under_noise() {
        let d = example1_design();
        let set = rotated_signal_set(sqrt2());
        let n0 = 4.0 / 10f64.powf(1.0); // 10 dB with unit-average energy
        for trial in 0..50u64 {
            let mut rng = TrialRng::from_parts(77, 0, trial);
            let idx: Vec<usize> = (0..d.groups()).map(|_| rng.next_index(set.len())).collect();
            let mut s = SymbolVector::zeros(d.groups(), d.lambda());
            for (group, &i) in idx.iter().enumerate() {
                s.set_group(group, &set.points()[i]);
            }
            let cw = encode(&d, &s).unwrap();
            let h = sample_channel(4, 1, &mut rng);
            let y = transmit(&cw.matrix, &h, n0, &mut rng);
            let groupwise = ml_decode_groupwise(&y, &h, &d, &set);
            let joint = ml_decode_joint(&y, &h, &d, &set).unwrap();
            assert_eq!(groupwise, joint, "trial {trial}");
        }
    }

    #[test]
    fn joint_decoder_survives_broken_group_separation() {
        // Swap one weight for an off-diagonal anti-Hermitian unitary: the
        // design stays a valid codebook but the inter-group orthogonality
        // breaks, so only the joint decoder is trustworthy. It must still
        // return the transmitted symbols without noise.
        let reference = example1_design();
        let mut weights: Vec<Vec<ComplexMatrix>> = reference.weight_rows().to_vec();
        let c = Complex64::new;
        weights[1][0] = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let broken = crate::uwd::WeightDesign::new(weights).unwrap();
        let report = crate::uwd::verify_design(&broken);
        assert!(!report.group_orthogonality.ok, "expected a broken design");
        assert!(report.independence_ok);

        let set = rotated_signal_set(sqrt2());
        for trial in 0..20u64 {
            let mut rng = TrialRng::from_parts(404, 0, trial);
            let indices: Vec<usize> = (0..broken.groups())
                .map(|_| rng.next_index(set.len()))
                .collect();
            let mut s = SymbolVector::zeros(broken.groups(), broken.lambda());
            for (group, &idx) in indices.iter().enumerate() {
                s.set_group(group, &set.points()[idx]);
            }
            let cw = encode(&broken, &s).unwrap();
            let h = sample_channel(4, 2, &mut rng);
            let y = transmit(&cw.matrix, &h, 0.0, &mut rng);
            let joint = ml_decode_joint(&y, &h, &broken, &set).unwrap();
            assert_eq!(joint, s, "trial {trial}");
        }
    }

    #[test]
    fn groupwise_evaluates_linear_candidate_count() {
        let d = example1_design();
        let set = rotated_signal_set(sqrt2());
        let mut rng = TrialRng::new(1);
        let h = sample_channel(4, 1, &mut rng);
        let y = transmit(&ComplexMatrix::zeros(4, 4), &h, 1.0, &mut rng);
        let (_, evaluated) = decode_groupwise_counted(&y, &h, &d, &set);
        assert_eq!(evaluated, d.groups() * set.len());
    }

    #[test]
    fn joint_codebook_cap_is_enforced() {
        let d = crate::uwd::build_4rsd(4).unwrap(); // g = 6 groups
        let set = rotated_signal_set(sqrt2());
        let mut rng = TrialRng::new(8);
        let h = sample_channel(d.n(), 1, &mut rng);
        let y = ComplexMatrix::zeros(d.n(), 1);
        assert!(matches!(
            ml_decode_joint(&y, &h, &d, &set),
            Err(SimError::CodebookTooLarge { .. })
        ));
    }

    fn quick_config(snr_db: Vec<f64>, trials: u64, seed: u64) -> SimConfig {
        SimConfig {
            design: example1_design(),
            signal_set: rotated_signal_set(sqrt2()),
            nr: 1,
            snr_db,
            trials_per_snr: trials,
            seed,
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let cfg = quick_config(vec![8.0, 16.0], 500, 31);
        let a = simulate(&cfg).unwrap();
        let b = simulate(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn error_rate_decreases_with_snr() {
        let cfg = quick_config(vec![15.0, 25.0], 10_000, 7);
        let result = simulate(&cfg).unwrap();
        let low = &result.points[0];
        let high = &result.points[1];
        assert!(
            low.group_ser > high.group_ser,
            "SER did not fall: {} -> {}",
            low.group_ser,
            high.group_ser
        );
        for p in &result.points {
            assert!(p.group_ser >= 0.0 && p.group_ser <= 1.0);
            assert!(p.codeword_er >= 0.0 && p.codeword_er <= 1.0);
            assert!(p.group_ser <= p.codeword_er + 1e-12);
        }
    }

    #[test]
    fn vanishing_noise_gives_zero_errors() {
        let cfg = quick_config(vec![80.0], 400, 12);
        let result = simulate(&cfg).unwrap();
        assert_eq!(result.points[0].codeword_er, 0.0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = quick_config(vec![10.0], 1, 0);
        cfg.trials_per_snr = 0;
        assert_eq!(simulate(&cfg), Err(SimError::NoTrials));
        let mut cfg = quick_config(vec![], 5, 0);
        cfg.trials_per_snr = 5;
        assert_eq!(simulate(&cfg), Err(SimError::NoSnrPoints));
        let mut cfg = quick_config(vec![10.0], 5, 0);
        cfg.nr = 0;
        assert_eq!(simulate(&cfg), Err(SimError::NoReceiveAntennas));
    }
}

//! Seeded random test signals.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::grid::{Plate, SignalGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalFamily {
    /// Independent uniform samples in `[0,1]`.
    Uniform,
    /// Mostly zero with a fraction of samples set to values in `(0.5, 1]`.
    Spikes,
}

impl SignalFamily {
    /// Alternate families by trial number.
    pub fn for_trial(trial: usize) -> Self {
        if trial.is_multiple_of(2) {
            SignalFamily::Uniform
        } else {
            SignalFamily::Spikes
        }
    }
}

/// Independent stream for one trial of a seeded suite.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn random_signal<R: Rng>(rng: &mut R, plate: &Plate, family: SignalFamily, spike_density: f64) -> SignalGrid {
    let n = plate.sample_count();
    let values: Vec<f64> = match family {
        SignalFamily::Uniform => (0..n).map(|_| rng.gen::<f64>()).collect(),
        SignalFamily::Spikes => {
            let mut v: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.gen_bool(spike_density) {
                        1.0 - 0.5 * rng.gen::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect();
            if v.iter().all(|&x| x == 0.0) {
                let k = rng.gen_range(0..n);
                v[k] = 1.0;
            }
            v
        }
    };
    SignalGrid::from_real(plate.clone(), &values).expect("values match plate")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_are_reproducible_and_distinct() {
        let plate = Plate::unit(&[4, 4]).unwrap();
        let a = random_signal(&mut trial_rng(1, 0), &plate, SignalFamily::Uniform, 0.2);
        let b = random_signal(&mut trial_rng(1, 0), &plate, SignalFamily::Uniform, 0.2);
        let c = random_signal(&mut trial_rng(1, 1), &plate, SignalFamily::Uniform, 0.2);
        assert!(a.values_bit_eq(&b));
        assert!(!a.values_bit_eq(&c));
    }

    #[test]
    fn spikes_are_sparse_nonnegative_and_nonzero() {
        let plate = Plate::unit(&[8, 8]).unwrap();
        for t in 0..20 {
            let f = random_signal(&mut trial_rng(3, t), &plate, SignalFamily::Spikes, 0.01);
            let re = f.real_parts();
            assert!(re.iter().all(|&v| v == 0.0 || (0.5..=1.0).contains(&v)));
            assert!(re.iter().any(|&v| v > 0.0));
        }
    }
}

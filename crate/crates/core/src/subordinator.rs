//! Exact sampling of the tempered `alpha/2`-stable subordinator and of
//! process increments `B_{T(dt)}`.
//!
//! Positive stable draws use Kanter's representation
//! `S = (A(U) / E)^{(1-a)/a}`, `U ~ U(0, pi)`, `E ~ Exp(1)`; tempering by
//! `e^{-m^{2/alpha} u}` is done by rejection.

use std::f64::consts::PI;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::kernels::ProcessParams;

/// Default longest time span sampled by a single rejection step.
pub const DEFAULT_T_MAX_REJECT: f64 = 1.0;

/// A reproducible random stream: the draws are a pure function of
/// `(seed, stream_id)` and the number of values consumed.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Positive `index`-stable sampler with Laplace transform
/// `exp(-t lambda^index)` for a fixed time span `t`.
#[derive(Debug, Clone, Copy)]
pub struct StableSampler {
    a: f64,
    b: f64,
    ln_scale: f64,
}

impl StableSampler {
    pub fn new(t: f64, index: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!(
                "time span must be positive, got {t}"
            )));
        }
        if !(index > 0.0 && index < 1.0) {
            return Err(Error::Config(format!(
                "stable index must lie in (0, 1), got {index}"
            )));
        }
        Ok(Self {
            a: index,
            b: 1.0 - index,
            ln_scale: t.ln() / index,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.a, self.b);
        loop {
            let u: f64 = PI * rng.gen::<f64>();
            let e: f64 = rng.sample(Exp1);
            if u <= 0.0 || e <= 0.0 {
                continue;
            }
            let ln_a = (a / b) * (a * u).sin().ln() + (b * u).sin().ln() - u.sin().ln() / b;
            let s = (self.ln_scale + (b / a) * (ln_a - e.ln())).exp();
            if s > 0.0 && s.is_finite() {
                return s;
            }
        }
    }
}

/// Draw with Laplace transform `exp(-t lambda^index)`.
pub fn sample_stable_increment<R: Rng + ?Sized>(t: f64, index: f64, rng: &mut R) -> Result<f64> {
    Ok(StableSampler::new(t, index)?.sample(rng))
}

/// Sampler for `T(t, m)`, the stable subordinator tilted by
/// `e^{mt} e^{-m^{2/alpha} u}`, for a fixed time span.
#[derive(Debug, Clone, Copy)]
pub struct TemperedSampler {
    stable: StableSampler,
    tilt: f64,
    pieces: usize,
}

impl TemperedSampler {
    pub fn new(t: f64, p: &ProcessParams) -> Result<Self> {
        Self::with_threshold(t, p, DEFAULT_T_MAX_REJECT)
    }

    /// Spans longer than `t_max_reject` are split into equal pieces whose
    /// draws are summed; acceptance per piece is `e^{-m t / pieces}`.
    pub fn with_threshold(t: f64, p: &ProcessParams, t_max_reject: f64) -> Result<Self> {
        if !(t_max_reject > 0.0) {
            return Err(Error::Config(format!(
                "t_max_reject must be positive, got {t_max_reject}"
            )));
        }
        if t_max_reject >= 30.0 / p.m() {
            return Err(Error::Config(format!(
                "t_max_reject = {t_max_reject} >= 30/m = {}: rejection acceptance e^(-m t) would vanish",
                30.0 / p.m()
            )));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!(
                "time span must be positive, got {t}"
            )));
        }
        let pieces = (t / t_max_reject).ceil().max(1.0) as usize;
        Ok(Self {
            stable: StableSampler::new(t / pieces as f64, p.alpha() / 2.0)?,
            tilt: p.tilt(),
            pieces,
        })
    }

    /// One rejection proposal for a single piece: `Some(draw)` if accepted.
    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let s = self.stable.sample(rng);
        let e: f64 = rng.sample(Exp1);
        (e >= self.tilt * s).then_some(s)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut total = 0.0;
        for _ in 0..self.pieces {
            total += loop {
                if let Some(s) = self.propose(rng) {
                    break s;
                }
            };
        }
        total
    }

    pub fn pieces(&self) -> usize {
        self.pieces
    }
}

/// Draw of `T(t, m)`.
pub fn sample_tempered_increment<R: Rng + ?Sized>(
    t: f64,
    p: &ProcessParams,
    rng: &mut R,
) -> Result<f64> {
    Ok(TemperedSampler::new(t, p)?.sample(rng))
}

/// Sampler for increments `B_{T(dt)}` of the process over a fixed step.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    time: TemperedSampler,
    d: usize,
}

impl IncrementSampler {
    pub fn new(dt: f64, p: &ProcessParams) -> Result<Self> {
        Ok(Self {
            time: TemperedSampler::new(dt, p)?,
            d: p.d(),
        })
    }

    /// Subordinator increment only.
    pub fn sample_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.time.sample(rng)
    }

    /// Writes a displacement into `out` and returns the subordinator
    /// increment it was built from.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> f64 {
        let v = self.time.sample(rng);
        let sd = (2.0 * v).sqrt();
        for c in out.iter_mut().take(self.d) {
            let z: f64 = rng.sample(StandardNormal);
            *c = sd * z;
        }
        v
    }
}

/// Displacement `B_{T(dt)}`: a centred Gaussian vector with per-coordinate
/// variance `2 T(dt)`.
pub fn sample_process_increment<R: Rng + ?Sized>(
    dt: f64,
    p: &ProcessParams,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let sampler = IncrementSampler::new(dt, p)?;
    let mut out = vec![0.0; p.d()];
    sampler.sample_into(rng, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, m: f64, d: usize) -> ProcessParams {
        ProcessParams::new(alpha, m, d).unwrap()
    }

    fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = cdf(x);
                (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let mut c = RngStream::new(7, 4);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn stable_laplace_transform() {
        let mut rng = RngStream::new(1, 0);
        let s = StableSampler::new(1.0, 0.5).unwrap();
        let w: Vec<f64> = (0..1_000_000)
            .map(|_| (-s.sample(&mut rng)).exp())
            .collect();
        let (mean, se) = mean_and_stderr(&w);
        assert!((mean - (-1f64).exp()).abs() < 3.0 * se, "{mean} +- {se}");
    }

    #[test]
    fn stable_half_matches_levy_distribution() {
        // Laplace transform e^{-sqrt(lambda)} has cdf erfc(1 / (2 sqrt(u)))
        let mut rng = RngStream::new(2, 0);
        let s = StableSampler::new(1.0, 0.5).unwrap();
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let ks = ks_statistic(xs, |u| libm::erfc(0.5 / u.sqrt()));
        assert!(ks < 1.63 / (n as f64).sqrt(), "ks {ks}");
    }

    #[test]
    fn stable_scaling_of_quantiles() {
        let mut rng = RngStream::new(3, 0);
        let index = 0.7;
        let t = 2.5;
        let s1 = StableSampler::new(1.0, index).unwrap();
        let st = StableSampler::new(t, index).unwrap();
        let n = 100_000;
        let mut a: Vec<f64> = (0..n).map(|_| s1.sample(&mut rng)).collect();
        let mut b: Vec<f64> = (0..n).map(|_| st.sample(&mut rng)).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let factor = t.powf(1.0 / index);
        for &q in &[0.25, 0.5, 0.75] {
            let i = (q * n as f64) as usize;
            let ratio = b[i] / a[i] / factor;
            assert!((ratio - 1.0).abs() < 0.03, "q {q}: {ratio}");
        }
    }

    #[test]
    fn tempered_acceptance_rate() {
        let p = params(1.0, 1.0, 1);
        let sampler = TemperedSampler::new(0.1, &p).unwrap();
        let mut rng = RngStream::new(4, 0);
        let n = 1_000_000;
        let accepted = (0..n)
            .filter(|_| sampler.propose(&mut rng).is_some())
            .count() as f64;
        let rate = accepted / n as f64;
        let want = (-0.1f64).exp();
        let se = (want * (1.0 - want) / n as f64).sqrt();
        assert!((rate - want).abs() < 3.0 * se, "{rate} vs {want}");
    }

    #[test]
    fn tempered_laplace_transform() {
        let p = params(1.0, 1.0, 1);
        let sampler = TemperedSampler::new(1.0, &p).unwrap();
        let mut rng = RngStream::new(5, 0);
        let w: Vec<f64> = (0..1_000_000)
            .map(|_| (-3.0 * sampler.sample(&mut rng)).exp())
            .collect();
        let (mean, se) = mean_and_stderr(&w);
        assert!((mean - (-1f64).exp()).abs() < 3.0 * se, "{mean} +- {se}");
    }

    #[test]
    fn tempered_split_additivity() {
        let p = params(1.3, 1.0, 1);
        let whole = TemperedSampler::with_threshold(2.0, &p, 2.5).unwrap();
        let split = TemperedSampler::with_threshold(2.0, &p, 0.5).unwrap();
        assert_eq!(split.pieces(), 4);
        let mut rng = RngStream::new(6, 0);
        let n = 100_000;
        let mut a: Vec<f64> = (0..n).map(|_| whole.sample(&mut rng)).collect();
        let mut b: Vec<f64> = (0..n).map(|_| split.sample(&mut rng)).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        // two-sample KS at the 1% level
        let mut d: f64 = 0.0;
        let (mut i, mut j) = (0, 0);
        while i < n && j < n {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 - j as f64).abs() / n as f64);
        }
        assert!(d < 1.63 * (2.0 / n as f64).sqrt(), "ks {d}");
    }

    #[test]
    fn tempering_vanishes_as_m_goes_to_zero() {
        let p = params(1.0, 1e-6, 1);
        let sampler = TemperedSampler::new(1.0, &p).unwrap();
        let mut rng = RngStream::new(8, 0);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
        let ks = ks_statistic(xs, |u| libm::erfc(0.5 / u.sqrt()));
        assert!(ks < 0.01, "ks {ks}");
    }

    #[test]
    fn rejects_vanishing_acceptance() {
        let p = params(1.0, 40.0, 1);
        assert!(matches!(
            TemperedSampler::new(0.1, &p),
            Err(Error::Config(_))
        ));
        assert!(TemperedSampler::with_threshold(0.1, &p, 0.5).is_ok());
    }

    #[test]
    fn increment_characteristic_function_and_symmetry() {
        let p = params(1.0, 1.0, 2);
        let sampler = IncrementSampler::new(0.5, &p).unwrap();
        let mut rng = RngStream::new(9, 0);
        let n = 400_000;
        let mut cos = Vec::with_capacity(n);
        let mut first = Vec::with_capacity(n);
        let mut buf = [0.0; 2];
        for _ in 0..n {
            sampler.sample_into(&mut rng, &mut buf);
            cos.push(buf[0].cos());
            first.push(buf[1]);
        }
        let (mean, se) = mean_and_stderr(&cos);
        let want = (0.5 - 0.5 * 2f64.sqrt()).exp();
        assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want}");
        let sorted: Vec<f64> = first.iter().map(|x| x.clamp(-50.0, 50.0)).collect();
        let (m2, se2) = mean_and_stderr(&sorted);
        assert!(m2.abs() < 3.0 * se2);
    }

    #[test]
    fn increment_histogram_matches_cauchy_density() {
        let p = params(1.0, 1.0, 1);
        let mut rng = RngStream::new(10, 0);
        let n = 200_000;
        let h = 0.25;
        let mut counts = [0usize; 16];
        for _ in 0..n {
            let x = sample_process_increment(1.0, &p, &mut rng).unwrap()[0];
            let k = ((x + 2.0) / h).floor();
            if (0.0..16.0).contains(&k) {
                counts[k as usize] += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let lo = -2.0 + k as f64 * h;
            let prob = crate::quadrature::integrate(
                |x| crate::kernels::cauchy_density(1.0, &[x], &p).unwrap(),
                lo,
                lo + h,
                &crate::quadrature::QuadSpec::default(),
            )
            .unwrap();
            let se = (prob * (1.0 - prob) / n as f64).sqrt();
            let freq = c as f64 / n as f64;
            assert!((freq - prob).abs() < 4.0 * se, "bin {k}: {freq} vs {prob}");
        }
    }
}

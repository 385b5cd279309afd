//! Spectral helpers for time series produced by scans.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Strongest non-DC component of a uniformly sampled series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPeak {
    /// FFT bin of the maximum, `1..=len/2`.
    pub bin: usize,
    /// Peak frequency (cycles per unit time) refined by parabolic
    /// interpolation of the log magnitude around `bin`.
    pub frequency: f64,
    /// Frequency spacing of adjacent bins, `1 / (len dt)`.
    pub bin_width: f64,
}

/// Mean-removed, Hann-windowed FFT peak of `series` sampled every `dt`.
pub fn dominant_frequency(series: &[f64], dt: f64) -> Result<SpectralPeak> {
    let n = series.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 samples, got {n}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sample spacing must be positive, got {dt}"
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "series contains non-finite values".into(),
        ));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = series
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let hann = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            Complex::new((v - mean) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let mags: Vec<f64> = buf[..=n / 2].iter().map(|z| z.norm()).collect();
    let (bin, &peak) = mags
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least two bins");
    if peak == 0.0 {
        return Err(Error::InvalidArgument("series is constant".into()));
    }
    let mut offset = 0.0;
    if bin + 1 < mags.len() && mags[bin - 1] > 0.0 && mags[bin + 1] > 0.0 {
        let (a, b, c) = (mags[bin - 1].ln(), peak.ln(), mags[bin + 1].ln());
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
        }
    }
    let bin_width = 1.0 / (n as f64 * dt);
    Ok(SpectralPeak {
        bin,
        frequency: (bin as f64 + offset) * bin_width,
        bin_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|k| f(k as f64 * dt)).collect()
    }

    #[test]
    fn recovers_pure_tone() {
        let (n, dt) = (1024, 0.05);
        let freq = 1.37;
        let s = sampled(
            |t| 3.0 + (2.0 * std::f64::consts::PI * freq * t).cos(),
            n,
            dt,
        );
        let peak = dominant_frequency(&s, dt).unwrap();
        assert!((peak.bin_width - 1.0 / 51.2).abs() < 1e-15);
        assert!(
            (peak.frequency - freq).abs() < 0.1 * peak.bin_width,
            "{peak:?}"
        );
        assert_eq!(peak.bin, (freq / peak.bin_width).round() as usize);
    }

    #[test]
    fn picks_stronger_of_two_tones() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let s = sampled(
            |t| 0.3 * (two_pi * 0.5 * t).sin() + (two_pi * 2.0 * t).sin(),
            2048,
            0.01,
        );
        let peak = dominant_frequency(&s, 0.01).unwrap();
        assert!((peak.frequency - 2.0).abs() < peak.bin_width);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(dominant_frequency(&[1.0, 2.0], 0.1).is_err());
        assert!(dominant_frequency(&[1.0; 16], 0.1).is_err());
        assert!(dominant_frequency(&[0.0, 1.0, 0.0, 1.0], 0.0).is_err());
        assert!(dominant_frequency(&[0.0, f64::NAN, 0.0, 1.0], 0.1).is_err());
    }
}

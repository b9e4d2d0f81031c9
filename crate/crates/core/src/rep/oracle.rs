//! Bloch decomposition of the Harper operator at rational flux, and distances
//! between finite spectra and unions of bands.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{lapack, Flux};
use crate::error::{Error, Result};

/// Spectral bands of `u + u* + v + v*` at flux `p/q`: for each of the `q`
/// Bloch bands, the range of its eigenvalue over a `samples x samples`
/// quasimomentum grid on `[0,1)²`.
pub fn bloch_oracle_hofstadter(flux: Flux, samples: usize) -> Result<Vec<(f64, f64)>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one quasimomentum sample".into()));
    }
    let q = flux.q as usize;
    let alpha = flux.value();
    let mut bands = vec![(f64::INFINITY, f64::NEG_INFINITY); q];
    let mut h = vec![Complex64::new(0.0, 0.0); q * q];
    for s1 in 0..samples {
        let k1 = s1 as f64 / samples as f64;
        let hop = Complex64::from_polar(1.0, TAU * k1);
        for s2 in 0..samples {
            let k2 = s2 as f64 / samples as f64;
            h.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for j in 0..q {
                h[j + j * q] += 2.0 * (TAU * (k2 + j as f64 * alpha)).cos();
                let next = (j + 1) % q;
                // column-major: (row, col) at row + col * q
                h[j + next * q] += hop;
                h[next + j * q] += hop.conj();
            }
            let eig = lapack::zheev(q, &mut h)?;
            for (band, e) in bands.iter_mut().zip(eig) {
                band.0 = band.0.min(e);
                band.1 = band.1.max(e);
            }
        }
    }
    Ok(bands)
}

fn distance_to_sorted(x: f64, sorted: &[f64]) -> f64 {
    let i = sorted.partition_point(|&e| e < x);
    let above = sorted.get(i).map_or(f64::INFINITY, |&e| e - x);
    let below = i.checked_sub(1).map_or(f64::INFINITY, |j| x - sorted[j]);
    above.min(below)
}

fn sorted(eigs: &[f64]) -> Vec<f64> {
    let mut v = eigs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// `sup_{e ∈ eigs} dist(e, ∪ bands)`.
pub fn spectrum_to_bands_distance(eigs: &[f64], bands: &[(f64, f64)]) -> f64 {
    eigs.iter()
        .map(|&e| {
            bands
                .iter()
                .map(|&(lo, hi)| if e < lo { lo - e } else if e > hi { e - hi } else { 0.0 })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `sup_{x ∈ ∪ bands} dist(x, eigs)`, exact: on each band the supremum is
/// attained at an endpoint or at a midpoint between consecutive eigenvalues.
pub fn bands_to_spectrum_distance(eigs: &[f64], bands: &[(f64, f64)]) -> f64 {
    let eigs = sorted(eigs);
    let mut worst: f64 = 0.0;
    for &(lo, hi) in bands {
        worst = worst.max(distance_to_sorted(lo, &eigs)).max(distance_to_sorted(hi, &eigs));
        for w in eigs.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if lo < mid && mid < hi {
                worst = worst.max(distance_to_sorted(mid, &eigs));
            }
        }
    }
    worst
}

/// Hausdorff distance between a finite set and a finite union of closed
/// intervals.
pub fn hausdorff_distance(eigs: &[f64], bands: &[(f64, f64)]) -> f64 {
    if eigs.is_empty() || bands.is_empty() {
        return if eigs.is_empty() && bands.is_empty() { 0.0 } else { f64::INFINITY };
    }
    spectrum_to_bands_distance(eigs, bands).max(bands_to_spectrum_distance(eigs, bands))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_flux_is_one_band() {
        let bands = bloch_oracle_hofstadter(Flux::new(0, 1).unwrap(), 64).unwrap();
        assert_eq!(bands.len(), 1);
        assert!((bands[0].0 + 4.0).abs() < 1e-12);
        assert!((bands[0].1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn half_flux_bands_touch_at_zero() {
        let bands = bloch_oracle_hofstadter(Flux::new(1, 2).unwrap(), 64).unwrap();
        assert_eq!(bands.len(), 2);
        let r8 = 8f64.sqrt();
        assert!((bands[0].0 + r8).abs() < 1e-12 && (bands[1].1 - r8).abs() < 1e-12);
        // closed form ±sqrt(4cos²k₁ + 4cos²k₂) vanishes at k = (1/4, 1/4)
        assert!(bands[0].1.abs() < 1e-12 && bands[1].0.abs() < 1e-12);
    }

    #[test]
    fn half_flux_matches_closed_form_pointwise() {
        let s = 16;
        let mut lo = f64::INFINITY;
        for a in 0..s {
            for b in 0..s {
                let (k1, k2) = (a as f64 / s as f64, b as f64 / s as f64);
                let e = (4.0 * (TAU * k1).cos().powi(2) + 4.0 * (TAU * k2).cos().powi(2)).sqrt();
                lo = lo.min(-e);
            }
        }
        let bands = bloch_oracle_hofstadter(Flux::new(1, 2).unwrap(), s).unwrap();
        assert!((bands[0].0 - lo).abs() < 1e-12);
    }

    #[test]
    fn bands_are_symmetric_under_negation() {
        for (p, q) in [(1, 3), (2, 5), (1, 4), (3, 7)] {
            let bands = bloch_oracle_hofstadter(Flux::new(p, q).unwrap(), 64).unwrap();
            assert_eq!(bands.len(), q as usize);
            for (b, m) in bands.iter().zip(bands.iter().rev()) {
                assert!((b.0 + m.1).abs() < 1e-9 && (b.1 + m.0).abs() < 1e-9, "{p}/{q}: {bands:?}");
            }
        }
    }

    #[test]
    fn third_flux_has_three_separated_bands() {
        let bands = bloch_oracle_hofstadter(Flux::new(1, 3).unwrap(), 64).unwrap();
        assert!(bands[0].1 < bands[1].0 && bands[1].1 < bands[2].0);
        // the outer bands end at 1 + sqrt(3)
        assert!((bands[2].1 - (1.0 + 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_examples() {
        let bands = [(0.0, 1.0), (3.0, 4.0)];
        assert_eq!(spectrum_to_bands_distance(&[0.5, 2.0], &bands), 1.0);
        // 4.0 is 3.5 away from 0.5 and 2.0 away from 2.0
        assert_eq!(bands_to_spectrum_distance(&[0.5, 2.0], &bands), 2.0);
        assert_eq!(hausdorff_distance(&[0.0, 0.5, 1.0, 3.0, 4.0], &bands), 0.5);
        assert_eq!(hausdorff_distance(&[], &bands), f64::INFINITY);
    }

    #[test]
    fn hausdorff_against_brute_force() {
        let eigs = [-1.3, -0.2, 0.1, 0.15, 2.7];
        let bands = [(-1.5, 0.3), (2.0, 3.0)];
        let mut brute: f64 = 0.0;
        for &(lo, hi) in &bands {
            for s in 0..=100_000 {
                let x = lo + (hi - lo) * s as f64 / 100_000.0;
                brute = brute.max(distance_to_sorted(x, &sorted(&eigs)));
            }
        }
        brute = brute.max(spectrum_to_bands_distance(&eigs, &bands));
        assert!((hausdorff_distance(&eigs, &bands) - brute).abs() < 1e-4);
    }
}

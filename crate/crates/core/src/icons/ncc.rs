//! Masked zero-mean normalized cross-correlation.
//!
//! For a template `T` with opaque set `P` (`n = |P|`) and a window `I` at
//! offset `(x, y)`:
//!
//! ```text
//! score = sum_P (T - mean T)(I - mean I) / sqrt(sum_P (T - mean T)^2 * sum_P (I - mean I)^2)
//! ```
//!
//! The dense map is computed in the frequency domain from three correlations
//! (`T'` with `I`, mask with `I`, mask with `I^2`); [`score_at`] evaluates the
//! same quantity directly and is used to rescore and refine candidates.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::raster::GrayPlane;

use super::template::ScaledTemplate;

/// Windows whose summed squared deviation falls below `n * FLAT_VARIANCE`
/// are treated as flat and score 0.
const FLAT_VARIANCE: f64 = 1e-2;

#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    pub width: usize,
    pub height: usize,
    /// Opaque offsets (row-major) with zero-mean template values.
    taps: Vec<(usize, usize, f64)>,
    energy: f64,
}

impl Kernel {
    /// `None` when the template is flat over its mask and cannot correlate.
    pub fn new(template: &ScaledTemplate) -> Option<Kernel> {
        let (w, h) = (template.width() as usize, template.height() as usize);
        let gray = GrayPlane::from_rgb(&template.rgb);
        let mut taps = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if template.mask[y * w + x] {
                    taps.push((x, y, gray.at(x, y)));
                }
            }
        }
        if taps.is_empty() {
            return None;
        }
        let mean = taps.iter().map(|t| t.2).sum::<f64>() / taps.len() as f64;
        for tap in &mut taps {
            tap.2 -= mean;
        }
        let energy: f64 = taps.iter().map(|t| t.2 * t.2).sum();
        if energy <= taps.len() as f64 * FLAT_VARIANCE {
            return None;
        }
        Some(Kernel {
            width: w,
            height: h,
            taps,
            energy,
        })
    }

    pub fn opaque_count(&self) -> usize {
        self.taps.len()
    }
}

fn finish(n: f64, energy: f64, cross: f64, sum: f64, sum_sq: f64) -> f64 {
    let var = sum_sq - sum * sum / n;
    if var <= n * FLAT_VARIANCE {
        return 0.0;
    }
    (cross / (energy * var).sqrt()).clamp(-1.0, 1.0)
}

/// Direct evaluation at one offset. The window must fit inside the plane.
pub(crate) fn score_at(plane: &GrayPlane, kernel: &Kernel, x: usize, y: usize) -> f64 {
    debug_assert!(x + kernel.width <= plane.width && y + kernel.height <= plane.height);
    let n = kernel.opaque_count() as f64;
    let mean = kernel
        .taps
        .iter()
        .map(|&(dx, dy, _)| plane.at(x + dx, y + dy))
        .sum::<f64>()
        / n;
    let mut cross = 0.0;
    let mut var = 0.0;
    for &(dx, dy, t) in &kernel.taps {
        let d = plane.at(x + dx, y + dy) - mean;
        cross += t * d;
        var += d * d;
    }
    if var <= n * FLAT_VARIANCE {
        return 0.0;
    }
    (cross / (kernel.energy * var).sqrt()).clamp(-1.0, 1.0)
}

/// Dense score map: `width x height` valid offsets, row-major.
#[derive(Clone, Debug)]
pub(crate) struct ScoreMap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl ScoreMap {
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Offsets that are 8-neighbourhood maxima with score >= `threshold`.
    pub fn peaks(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let v = self.at(x, y);
                if v < threshold {
                    continue;
                }
                let mut is_peak = true;
                'scan: for ny in y.saturating_sub(1)..=(y + 1).min(self.height - 1) {
                    for nx in x.saturating_sub(1)..=(x + 1).min(self.width - 1) {
                        if self.at(nx, ny) > v {
                            is_peak = false;
                            break 'scan;
                        }
                    }
                }
                if is_peak {
                    out.push((x, y, v));
                }
            }
        }
        out
    }
}

/// Smallest length >= `n` whose only prime factors are 2, 3 and 5.
fn smooth_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

struct Plans {
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

/// Frequency-domain view of one screen, reused across every template and
/// scale matched against it.
pub(crate) struct ScreenSpectrum {
    width: usize,
    height: usize,
    pw: usize,
    ph: usize,
    plans: Plans,
    image: Vec<Complex64>,
    squared: Vec<Complex64>,
}

impl ScreenSpectrum {
    pub fn new(plane: &GrayPlane) -> Self {
        let (pw, ph) = (smooth_len(plane.width), smooth_len(plane.height));
        let mut planner = FftPlanner::new();
        let plans = Plans {
            row_fwd: planner.plan_fft_forward(pw),
            row_inv: planner.plan_fft_inverse(pw),
            col_fwd: planner.plan_fft_forward(ph),
            col_inv: planner.plan_fft_inverse(ph),
        };
        let mut image = vec![Complex64::default(); pw * ph];
        let mut squared = vec![Complex64::default(); pw * ph];
        for y in 0..plane.height {
            for x in 0..plane.width {
                let v = plane.at(x, y);
                image[y * pw + x] = Complex64::new(v, 0.0);
                squared[y * pw + x] = Complex64::new(v * v, 0.0);
            }
        }
        let mut spectrum = ScreenSpectrum {
            width: plane.width,
            height: plane.height,
            pw,
            ph,
            plans,
            image: Vec::new(),
            squared: Vec::new(),
        };
        spectrum.forward(&mut image);
        spectrum.forward(&mut squared);
        spectrum.image = image;
        spectrum.squared = squared;
        spectrum
    }

    fn transform(&self, buf: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        let (pw, ph) = (self.pw, self.ph);
        row.process(buf);
        let mut t = vec![Complex64::default(); pw * ph];
        for y in 0..ph {
            for x in 0..pw {
                t[x * ph + y] = buf[y * pw + x];
            }
        }
        col.process(&mut t);
        for y in 0..ph {
            for x in 0..pw {
                buf[y * pw + x] = t[x * ph + y];
            }
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.plans.row_fwd, &self.plans.col_fwd);
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        self.transform(buf, &self.plans.row_inv, &self.plans.col_inv);
    }

    /// Scores every offset where `kernel` fits, or `None` if it does not fit.
    pub fn score_map(&self, kernel: &Kernel) -> Option<ScoreMap> {
        if kernel.width > self.width || kernel.height > self.height {
            return None;
        }
        let (pw, ph) = (self.pw, self.ph);
        // Pack zero-mean weights (real) and mask (imaginary) into one transform.
        let mut packed = vec![Complex64::default(); pw * ph];
        for &(dx, dy, t) in &kernel.taps {
            packed[dy * pw + dx] = Complex64::new(t, 1.0);
        }
        self.forward(&mut packed);

        let mut first = vec![Complex64::default(); pw * ph];
        let mut second = vec![Complex64::default(); pw * ph];
        let i = Complex64::new(0.0, 1.0);
        for ky in 0..ph {
            for kx in 0..pw {
                let k = ky * pw + kx;
                let mirror = ((ph - ky) % ph) * pw + (pw - kx) % pw;
                let z = packed[k];
                let zm = packed[mirror].conj();
                let weights = (z + zm) * 0.5;
                let mask = (z - zm) * (-0.5 * i);
                // corr(I, K) = IFFT(F_I * conj(F_K)); both results are real, so
                // cross-correlation and mask sum share one inverse transform.
                first[k] = self.image[k] * weights.conj() + i * (self.image[k] * mask.conj());
                second[k] = self.squared[k] * mask.conj();
            }
        }
        self.inverse(&mut first);
        self.inverse(&mut second);

        let norm = (pw * ph) as f64;
        let n = kernel.opaque_count() as f64;
        let (mw, mh) = (self.width - kernel.width + 1, self.height - kernel.height + 1);
        let mut data = Vec::with_capacity(mw * mh);
        for y in 0..mh {
            for x in 0..mw {
                let k = y * pw + x;
                let cross = first[k].re / norm;
                let sum = first[k].im / norm;
                let sum_sq = second[k].re / norm;
                data.push(finish(n, kernel.energy, cross, sum, sum_sq));
            }
        }
        Some(ScoreMap {
            width: mw,
            height: mh,
            data,
        })
    }
}

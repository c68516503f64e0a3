//! Output side: slot bookkeeping, demultiplexing into virtual neurons, delay
//! alignment for recorded traces, and carrier envelope extraction.

use super::input::point_of_sample;
use crate::circuit::{Trace, TAP_INDUCTOR};
use crate::error::{Error, Result};

/// Where each (message value, mask) slot lives in a recorded trace.
///
/// Slot `s = value·n_mask + mask` owns samples `i` with
/// `floor(i·n_slots / n_samples) == s`. The last `n_dummy` values are padding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotLayout {
    pub n_values: usize,
    pub n_dummy: usize,
    pub n_mask: usize,
    pub n_samples: usize,
}

impl SlotLayout {
    pub fn n_slots(&self) -> usize {
        self.n_values * self.n_mask
    }

    pub fn n_message(&self) -> usize {
        self.n_values - self.n_dummy
    }

    /// Half-open sample range of slot `s`.
    pub fn slot_range(&self, s: usize) -> (usize, usize) {
        let slots = self.n_slots();
        let start = (s * self.n_samples).div_ceil(slots);
        let end = ((s + 1) * self.n_samples).div_ceil(slots);
        (start, end)
    }

    pub fn slot_of_sample(&self, i: usize) -> usize {
        point_of_sample(i, self.n_slots(), self.n_samples)
    }

    fn min_slot_len(&self) -> usize {
        (0..self.n_slots())
            .map(|s| {
                let (a, b) = self.slot_range(s);
                b - a
            })
            .min()
            .unwrap_or(0)
    }

    /// Samples kept from the centre of every slot.
    pub fn kept_per_slot(&self, middle_fraction: f64) -> usize {
        ((self.min_slot_len() as f64 * middle_fraction + 1e-9).floor() as usize).max(1)
    }
}

/// Demultiplexed activations: one row per kept time sample, one column per
/// virtual neuron. Column `tap·n_mask + mask`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Row-major.
    pub data: Vec<f64>,
    /// Time of each row's sample in the first channel.
    pub times: Vec<f64>,
}

impl StateMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        StateMatrix {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
            times: vec![0.0; n_rows],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::Dimension {
                    expected: n_cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(StateMatrix {
            n_rows: rows.len(),
            n_cols,
            data,
            times: (0..rows.len()).map(|i| i as f64).collect(),
        })
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_cols.max(1)).take(self.n_rows)
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    /// Side-by-side concatenation; row counts must agree.
    pub fn hconcat(parts: &[StateMatrix]) -> Result<StateMatrix> {
        let first = parts.first().ok_or(Error::EmptyTraining)?;
        let n_rows = first.n_rows;
        if let Some(bad) = parts.iter().find(|p| p.n_rows != n_rows) {
            return Err(Error::Dimension {
                expected: n_rows,
                found: bad.n_rows,
            });
        }
        let n_cols = parts.iter().map(|p| p.n_cols).sum();
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in 0..n_rows {
            for p in parts {
                data.extend_from_slice(p.row(r));
            }
        }
        Ok(StateMatrix {
            n_rows,
            n_cols,
            data,
            times: first.times.clone(),
        })
    }
}

/// Split each tap into `n_mask` channels, keeping the central
/// `middle_fraction` of every slot and dropping the dummy values.
pub fn demultiplex(trace: &Trace, layout: &SlotLayout, middle_fraction: f64) -> Result<StateMatrix> {
    if !(middle_fraction > 0.0 && middle_fraction <= 1.0) {
        return Err(Error::invalid("reservoir.middle_fraction", "must lie in (0, 1]"));
    }
    if layout.n_mask == 0 || layout.n_values <= layout.n_dummy {
        return Err(Error::Layout("layout has no message slots".into()));
    }
    if trace.len() != layout.n_samples {
        return Err(Error::Layout(format!(
            "trace has {} samples, layout expects {}",
            trace.len(),
            layout.n_samples
        )));
    }
    if layout.min_slot_len() == 0 {
        return Err(Error::Layout(format!(
            "{} samples cannot cover {} slots",
            layout.n_samples,
            layout.n_slots()
        )));
    }
    let keep = layout.kept_per_slot(middle_fraction);
    let n_taps = trace.channels.len();
    let n_cols = n_taps * layout.n_mask;
    let n_rows = layout.n_message() * keep;
    let mut m = StateMatrix::zeros(n_rows, n_cols);
    for value in 0..layout.n_message() {
        for mask in 0..layout.n_mask {
            let (start, end) = layout.slot_range(value * layout.n_mask + mask);
            let first = start + (end - start - keep) / 2;
            for q in 0..keep {
                let row = value * keep + q;
                for (tap, channel) in trace.channels.iter().enumerate() {
                    m.data[row * n_cols + tap * layout.n_mask + mask] = channel[first + q];
                }
                if mask == 0 {
                    m.times[row] = trace.time(first + q);
                }
            }
        }
    }
    Ok(m)
}

/// Drop the leading stretch where the inductor tap stays below `threshold`.
pub fn align_trace(trace: &Trace, threshold: f64) -> Result<Trace> {
    let tap = trace
        .tap(TAP_INDUCTOR)
        .or_else(|| trace.channels.last().map(Vec::as_slice))
        .unwrap_or(&[]);
    let start = tap
        .iter()
        .position(|v| v.abs() >= threshold)
        .ok_or(Error::NoSignal { threshold })?;
    Ok(Trace {
        dt: trace.dt,
        t0: trace.time(start),
        tap_names: trace.tap_names.clone(),
        channels: trace.channels.iter().map(|c| c[start..].to_vec()).collect(),
    })
}

/// Upper and lower envelopes of a carrier-modulated channel.
///
/// An interior sample is a peak when it is the maximum of its `±window`
/// neighbourhood (first of equal values wins). The upper envelope
/// interpolates linearly between peaks, holds flat beyond the outer ones and
/// is never below the signal; without any peak it is the channel maximum.
/// The lower envelope is the mirror image.
pub fn envelope_extract(channel: &[f64], window: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if window == 0 {
        return Err(Error::invalid("envelope.window", "must be >= 1"));
    }
    let upper = peak_envelope(channel, window, |a, b| a > b);
    let lower = peak_envelope(channel, window, |a, b| a < b);
    Ok((upper, lower))
}

fn peak_envelope(x: &[f64], w: usize, better: impl Fn(f64, f64) -> bool) -> Vec<f64> {
    let n = x.len();
    let peaks: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| {
            let left = i.saturating_sub(w)..i;
            let right = i + 1..(i + w + 1).min(n);
            left.into_iter().all(|j| better(x[i], x[j])) && right.into_iter().all(|j| !better(x[j], x[i]))
        })
        .collect();
    if peaks.is_empty() {
        let extreme = x.iter().copied().reduce(|a, b| if better(b, a) { b } else { a });
        return extreme.map_or_else(Vec::new, |e| vec![e; n]);
    }
    let mut env = vec![0.0; n];
    let mut p = 0;
    for (i, e) in env.iter_mut().enumerate() {
        while p + 1 < peaks.len() && peaks[p + 1] <= i {
            p += 1;
        }
        let a = peaks[p];
        let interp = if i <= a || p + 1 == peaks.len() {
            x[a]
        } else {
            let b = peaks[p + 1];
            let f = (i - a) as f64 / (b - a) as f64;
            x[a] + f * (x[b] - x[a])
        };
        *e = if better(x[i], interp) { x[i] } else { interp };
    }
    env
}

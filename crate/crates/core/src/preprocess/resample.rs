use crate::error::{Error, Result};

/// Linearly interpolates `signal(times)` onto `target_len` equally spaced
/// points spanning `[times[0], times[last]]`. Both endpoints are copied
/// through unchanged.
pub fn resample_to_window(signal: &[f64], times: &[f64], target_len: usize) -> Result<Vec<f64>> {
    if signal.len() != times.len() {
        return Err(Error::Input(format!(
            "{} samples but {} timestamps",
            signal.len(),
            times.len()
        )));
    }
    if signal.len() < 2 {
        return Err(Error::Input("resampling needs at least two samples".into()));
    }
    if target_len < 2 {
        return Err(Error::Input("target length must be at least 2".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input(
            "timestamps must be strictly increasing".into(),
        ));
    }

    let n = signal.len();
    let (t0, t_end) = (times[0], times[n - 1]);
    let span = t_end - t0;
    let mut out = Vec::with_capacity(target_len);
    out.push(signal[0]);

    let mut seg = 0;
    for j in 1..target_len - 1 {
        let t = t0 + span * (j as f64 / (target_len - 1) as f64);
        while seg + 2 < n && times[seg + 1] <= t {
            seg += 1;
        }
        let (ta, tb) = (times[seg], times[seg + 1]);
        let frac = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        out.push(signal[seg] + frac * (signal[seg + 1] - signal[seg]));
    }

    out.push(signal[n - 1]);
    Ok(out)
}

/// Min-max scaling to `[0, 1]`. A constant input maps to all zeros.
pub fn minmax_normalize(values: &[f64]) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.0; values.len()];
    }
    values
        .iter()
        .map(|v| ((v - lo) / range).clamp(0.0, 1.0))
        .collect()
}

use crate::{Error, Result};

/// Reported value for a perfect reconstruction.
pub const RSNR_CAP_DB: f64 = 150.0;

fn energy_ratio(x_ref: &[f64], x_hat: &[f64]) -> Result<f64> {
    if x_ref.len() != x_hat.len() {
        return Err(Error::DimensionMismatch {
            expected: x_ref.len(),
            actual: x_hat.len(),
        });
    }
    let signal: f64 = x_ref.iter().map(|v| v * v).sum();
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let noise: f64 = x_ref.iter().zip(x_hat).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(signal / noise)
}

fn to_db(ratio: f64) -> f64 {
    (10.0 * ratio.log10()).min(RSNR_CAP_DB)
}

/// `10 log10(|x|^2 / |x - x_hat|^2)`, capped at [`RSNR_CAP_DB`].
pub fn rsnr(x_ref: &[f64], x_hat: &[f64]) -> Result<f64> {
    energy_ratio(x_ref, x_hat).map(to_db)
}

/// Average of the energy ratios over pairs, then converted to dB.
pub fn arsnr<'a, I>(pairs: I) -> Result<f64>
where
    I: IntoIterator<Item = (&'a [f64], &'a [f64])>,
{
    let mut sum = 0.0;
    let mut count = 0usize;
    for (x, x_hat) in pairs {
        sum += energy_ratio(x, x_hat)?;
        count += 1;
    }
    if count == 0 {
        return Err(Error::Config("no pairs to average".into()));
    }
    Ok(to_db(sum / count as f64))
}

/// Pearson correlation; `NaN` when either sample is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Mean and sample standard deviation.
pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

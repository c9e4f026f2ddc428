use crate::error::{Error, Result};

/// Maps an f64 to a u64 whose unsigned order matches `f64::total_cmp`.
fn order_key(v: f64) -> u64 {
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// Average-tie (fractional) ranks, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    // contiguous (key, index) pairs sort far faster than an indirect comparator
    let mut keyed: Vec<(u64, usize)> = values.iter().enumerate().map(|(i, v)| (order_key(*v), i)).collect();
    keyed.sort_unstable();
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[keyed[j].1] == values[keyed[i].1] {
            j += 1;
        }
        // positions i..j share the mean of ranks i+1..=j
        let r = (i + j + 1) as f64 / 2.0;
        for &(_, k) in &keyed[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 3 {
        return Err(Error::TooShort { min: 3, got: a.len() });
    }
    for (i, v) in a.iter().chain(b).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite { row: i % a.len(), col: i / a.len() });
        }
    }
    Ok(())
}

fn pearson_unchecked(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let dx = x - ma;
        let dy = y - mb;
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Err(Error::Degenerate);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson product-moment correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    pearson_unchecked(a, b)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b)?;
    pearson_unchecked(&average_ranks(a), &average_ranks(b))
}

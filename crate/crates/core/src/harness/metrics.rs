use crate::error::{AgeError, Result};

fn check(predictions: &[usize], truths: &[usize], num_classes: usize) -> Result<()> {
    if predictions.is_empty() {
        return Err(AgeError::Usage("F1 of an empty prediction set".into()));
    }
    if predictions.len() != truths.len() {
        return Err(AgeError::Usage(format!(
            "{} predictions for {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    if let Some(&c) = predictions.iter().chain(truths).find(|&&c| c >= num_classes) {
        return Err(AgeError::Usage(format!("class {c} outside 0..{num_classes}")));
    }
    Ok(())
}

/// Unweighted mean of per-class F1; a class absent from both vectors scores 0.
pub fn macro_f1(predictions: &[usize], truths: &[usize], num_classes: usize) -> Result<f64> {
    check(predictions, truths, num_classes)?;
    let mut tp = vec![0usize; num_classes];
    let mut fp = vec![0usize; num_classes];
    let mut fn_ = vec![0usize; num_classes];
    for (&p, &t) in predictions.iter().zip(truths) {
        if p == t {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    // Per-class F1 is 2tp / (2tp + fp + fn); summing the fractions exactly
    // keeps the mean correctly rounded.
    let terms: Vec<(u128, u128)> = (0..num_classes)
        .map(|c| ((2 * tp[c]) as u128, (2 * tp[c] + fp[c] + fn_[c]) as u128))
        .filter(|&(_, den)| den > 0)
        .collect();
    let exact = terms.iter().try_fold((0u128, 1u128), |(n, d), &(tn, td)| {
        let num = n.checked_mul(td)?.checked_add(tn.checked_mul(d)?)?;
        let den = d.checked_mul(td)?;
        let g = gcd(num, den);
        Some((num / g, den / g))
    });
    let mean = exact.and_then(|(num, den)| {
        let den = den.checked_mul(num_classes as u128)?;
        let g = gcd(num, den);
        Some((num / g) as f64 / (den / g) as f64)
    });
    Ok(mean.unwrap_or_else(|| {
        terms.iter().map(|&(n, d)| n as f64 / d as f64).sum::<f64>() / num_classes as f64
    }))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// F1 from pooled counts, which for single-label predictions is accuracy.
pub fn micro_f1(predictions: &[usize], truths: &[usize], num_classes: usize) -> Result<f64> {
    check(predictions, truths, num_classes)?;
    let correct = predictions.iter().zip(truths).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / predictions.len() as f64)
}

use super::LearnError;

/// Fraction of positions where `predicted` matches `truth`.
pub fn accuracy(predicted: &[u8], truth: &[u8]) -> Result<f64, LearnError> {
    if predicted.len() != truth.len() {
        return Err(LearnError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(LearnError::Empty);
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Area under the ROC curve as the Mann–Whitney statistic
/// `P(s⁺ > s⁻) + ½·P(s⁺ = s⁻)`, with label 1 as the positive class.
///
/// Ties get midranks. The result is symmetric by construction:
/// `auc(s) + auc(-s) == 1.0` holds exactly in floating point.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64, LearnError> {
    if scores.len() != labels.len() {
        return Err(LearnError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|&&l| l == 1).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(LearnError::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the rank sum of positives, kept integral: a tie group covering
    // ranks i+1..=j has midrank (i+1+j)/2.
    let mut twice_rank_sum: u64 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let p = order[i..j].iter().filter(|&&x| labels[x] == 1).count() as u64;
        twice_rank_sum += p * (i as u64 + 1 + j as u64);
        i = j;
    }
    // 2U = 2·R⁺ − n⁺(n⁺+1); auc = 2U / 2N.
    let twice_u = twice_rank_sum - pos * (pos + 1);
    let twice_n = 2 * pos * neg;
    Ok(if 2 * twice_u <= twice_n {
        twice_u as f64 / twice_n as f64
    } else {
        1.0 - (twice_n - twice_u) as f64 / twice_n as f64
    })
}

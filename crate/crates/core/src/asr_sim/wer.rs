use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Breakdown of a minimum-edit alignment between a reference and a
/// hypothesis token sequence.
///
/// `wer = (S + D + I) / N` and may exceed 1.0 when the hypothesis is much
/// longer than the reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub substitutions: usize,
    pub deletions: usize,
    pub insertions: usize,
    pub reference_len: usize,
    pub wer: f64,
}

impl AlignmentResult {
    pub fn edits(&self) -> usize {
        self.substitutions + self.deletions + self.insertions
    }
}

/// Word error rate via unit-cost Levenshtein alignment.
///
/// Among minimum-cost alignments the one with the most substitutions is
/// reported (substitution preferred over deletion over insertion). With
/// that choice the decomposition is symmetric: swapping the roles of
/// reference and hypothesis swaps D and I and preserves S.
pub fn word_error_rate<S: AsRef<str>>(reference: &[S], hypothesis: &[S]) -> Result<AlignmentResult> {
    if reference.is_empty() {
        return Err(Error::Validation(
            "word_error_rate: reference must be non-empty".into(),
        ));
    }
    let n = reference.len();
    let m = hypothesis.len();

    // Per cell: (min edit cost, max substitutions among min-cost paths).
    let mut cost = vec![vec![0usize; m + 1]; n + 1];
    let mut subs = vec![vec![0usize; m + 1]; n + 1];
    for i in 1..=n {
        cost[i][0] = i;
    }
    for j in 1..=m {
        cost[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let c = usize::from(reference[i - 1].as_ref() != hypothesis[j - 1].as_ref());
            let diag = (cost[i - 1][j - 1] + c, subs[i - 1][j - 1] + c);
            let del = (cost[i - 1][j] + 1, subs[i - 1][j]);
            let ins = (cost[i][j - 1] + 1, subs[i][j - 1]);
            let mut best = diag;
            for cand in [del, ins] {
                if cand.0 < best.0 || (cand.0 == best.0 && cand.1 > best.1) {
                    best = cand;
                }
            }
            cost[i][j] = best.0;
            subs[i][j] = best.1;
        }
    }

    let edits = cost[n][m];
    let s = subs[n][m];
    // In any alignment D - I = n - m and S + D + I = edits, so the split
    // is determined once S is fixed.
    let non_sub = (edits - s) as isize;
    let diff = n as isize - m as isize;
    debug_assert!((non_sub + diff) % 2 == 0 && non_sub + diff >= 0 && non_sub - diff >= 0);
    let deletions = ((non_sub + diff) / 2) as usize;
    let insertions = ((non_sub - diff) / 2) as usize;
    Ok(AlignmentResult {
        substitutions: s,
        deletions,
        insertions,
        reference_len: n,
        wer: edits as f64 / n as f64,
    })
}

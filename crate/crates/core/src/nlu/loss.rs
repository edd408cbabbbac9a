//! Dot-product similarity loss: softmax cross-entropy over similarities
//! between an encoded input and a candidate set of label embeddings,
//! where index 0 is the target and the rest are sampled negatives.

use ndarray::{Array1, Array2};

/// Returns `(loss, grad_input, grad_candidates)` for
/// `-log softmax(u . c_k)[0]` over the candidate rows.
pub fn similarity_loss(
    input: &Array1<f64>,
    candidates: &Array2<f64>,
) -> (f64, Array1<f64>, Array2<f64>) {
    let k = candidates.nrows();
    assert!(k >= 1, "need at least the target candidate");
    let logits: Vec<f64> = (0..k).map(|i| candidates.row(i).dot(input)).collect();
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let loss = -(logits[0] - max - z.ln());

    let mut grad_input = Array1::zeros(input.len());
    let mut grad_candidates = Array2::zeros(candidates.raw_dim());
    for i in 0..k {
        let g = exps[i] / z - if i == 0 { 1.0 } else { 0.0 };
        grad_input.scaled_add(g, &candidates.row(i));
        grad_candidates.row_mut(i).scaled_add(g, input);
    }
    (loss, grad_input, grad_candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn loss_is_cross_entropy_over_similarities() {
        let u = Array1::from(vec![1.0, 0.0]);
        let c = Array2::from_shape_vec((2, 2), vec![1.0, 0.0, -1.0, 0.0]).unwrap();
        let (loss, _, _) = similarity_loss(&u, &c);
        // logits 1 and -1 -> p(target) = e^1 / (e^1 + e^-1)
        let expected = -((1.0f64).exp() / ((1.0f64).exp() + (-1.0f64).exp())).ln();
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn well_separated_target_has_near_zero_loss() {
        let u = Array1::from(vec![10.0, 0.0, 0.0]);
        let mut c = Array2::zeros((4, 3));
        c[[0, 0]] = 10.0;
        for i in 1..4 {
            c[[i, 0]] = -10.0;
        }
        let (loss, _, _) = similarity_loss(&u, &c);
        assert!(loss < 1e-6, "loss = {loss}");
    }

    #[test]
    fn gradients_match_finite_differences() {
        const H: f64 = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = Array1::from_shape_fn(5, |_| rng.gen_range(-1.0..1.0));
        let c = Array2::from_shape_fn((4, 5), |_| rng.gen_range(-1.0..1.0));
        let (_, gu, gc) = similarity_loss(&u, &c);

        for i in 0..5 {
            let mut u2 = u.clone();
            u2[i] += H;
            let up = similarity_loss(&u2, &c).0;
            u2[i] -= 2.0 * H;
            let down = similarity_loss(&u2, &c).0;
            let numeric = (up - down) / (2.0 * H);
            assert!((gu[i] - numeric).abs() < 1e-6, "input grad {i}");
        }
        for idx in [(0, 0), (1, 3), (3, 4)] {
            let mut c2 = c.clone();
            c2[idx] += H;
            let up = similarity_loss(&u, &c2).0;
            c2[idx] -= 2.0 * H;
            let down = similarity_loss(&u, &c2).0;
            let numeric = (up - down) / (2.0 * H);
            assert!((gc[idx] - numeric).abs() < 1e-6, "candidate grad {idx:?}");
        }
    }
}
